#include "nlsball/functionals.hpp"

#include "nlsball/errors.hpp"

#include <cmath>
#include <string>

namespace nlsball {

std::string_view to_string(DissipationVariant v)
{
    return v == DissipationVariant::Subcritical ? "subcritical" : "supercritical";
}

std::string_view to_string(Gauge g)
{
    switch (g) {
    case Gauge::Sqrt: return "sqrt";
    case Gauge::Log1p: return "log1p";
    case Gauge::Linear: return "linear";
    }
    return "?";
}

DissipationVariant parse_variant(std::string_view s)
{
    if (s == "subcritical")
        return DissipationVariant::Subcritical;
    if (s == "supercritical")
        return DissipationVariant::Supercritical;
    throw ValidationError("unknown dissipation variant '" + std::string(s) +
                          "' (expected subcritical|supercritical)");
}

Gauge parse_gauge(std::string_view s)
{
    if (s == "sqrt")
        return Gauge::Sqrt;
    if (s == "log1p")
        return Gauge::Log1p;
    if (s == "linear")
        return Gauge::Linear;
    throw ValidationError("unknown gauge '" + std::string(s) + "' (expected sqrt|log1p|linear)");
}

double gauge_value(Gauge xi, double x)
{
    switch (xi) {
    case Gauge::Sqrt: return std::sqrt(x);
    case Gauge::Log1p: return std::log1p(x);
    case Gauge::Linear: return x;
    }
    return x;
}

double gauge_inverse(Gauge xi, double y)
{
    switch (xi) {
    case Gauge::Sqrt: return y * y;
    case Gauge::Log1p: return std::expm1(y);
    case Gauge::Linear: return y;
    }
    return y;
}

double critical_regularity(double q) { return 1.5 - 1.0 / q; }

void DissipationSpec::validate() const
{
    if (!(q > 0.0))
        throw ValidationError("dissipation.q must be positive");
    if (!(delta > 0.0))
        throw ValidationError("dissipation.delta must be positive");
    if (!(nonlinear_weight >= 0.0))
        throw ValidationError("dissipation.nonlinear_weight must be nonnegative");
    if (variant == DissipationVariant::Subcritical) {
        if (!(beta >= 1.0 && beta <= 1.5))
            throw ValidationError("subcritical dissipation requires beta in [1, 3/2], got " +
                                  std::to_string(beta));
    } else {
        if (!(q > 2.0))
            throw ValidationError("supercritical dissipation requires q > 2, got " +
                                  std::to_string(q));
        const double sc = critical_regularity(q);
        if (!(beta > 1.0 && beta <= sc))
            throw ValidationError("supercritical dissipation requires 1 < beta <= s_c = " +
                                  std::to_string(sc) + ", got " + std::to_string(beta));
    }
}

double cutoff(double x, const CutoffSpec& spec)
{
    const double t = x / spec.R;
    if (t <= 1.0)
        return 1.0;
    if (t >= 2.0)
        return 0.0;
    // exp(-1/s) glued on [1, 2]: C-infinity, monotone.
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double a = f(2.0 - t);
    const double b = f(t - 1.0);
    return a / (a + b);
}

double mass(const SpectralField& u)
{
    double sum = 0.0;
    for (const auto& c : u.coeffs())
        sum += std::norm(c);
    return sum;
}

namespace {

double dirichlet_form(const SpectralField& u)
{
    double sum = 0.0;
    const auto c = u.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n)
        sum += eigenvalue(n) * std::norm(c[n - 1]);
    return sum;
}

double power_moment(const PhysicalField& u, const RadialGrid& grid, double q)
{
    // sum_j w_j |u_j|^{2q+2}
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double a2 = std::norm(u.values[j]);
        sum += w[j] * a2 * std::pow(a2, q);
    }
    return sum;
}

// Pairings with the diagonal operators of the two variants.
double diagonal_weight(DissipationVariant v, double beta, std::size_t n)
{
    const double z2 = eigenvalue(n);
    return v == DissipationVariant::Subcritical ? std::pow(z2, beta - 1.0)
                                                : std::pow(1.0 + z2, beta - 1.0);
}

SpectralField apply_diagonal(const SpectralField& u, DissipationVariant v, double beta)
{
    SpectralField out(u);
    auto c = out.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n)
        c[n - 1] *= diagonal_weight(v, beta, n);
    return out;
}

SpectralField negative_laplacian(const SpectralField& u)
{
    SpectralField out(u);
    auto c = out.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n)
        c[n - 1] *= eigenvalue(n);
    return out;
}

double checked_exp(double x, const char* what)
{
    if (x > exponent_ceiling)
        throw DivergenceError(std::string("exponential overflow in ") + what);
    return std::exp(x);
}

double subcritical_weight(const SpectralField& u, const DissipationSpec& spec)
{
    const double rho = spec.frozen_rho ? *spec.frozen_rho
                                       : spec.rho(sobolev_norm(u, spec.beta - spec.delta));
    return checked_exp(rho, "exp(rho(|u|))");
}

// Everything the operator and both rates need, evaluated once.
struct Pieces {
    PhysicalField phys;
    SpectralField g; // P_N |u|^{2q} u
    double prefactor = 1.0; // exp(rho) (sub) or 2 exp(2 |P_N g|^2) (super)
    SpectralField h;        // P_N exp(|u|^2) u (super only)
};

Pieces evaluate_pieces(const SpectralField& u, const DissipationSpec& spec,
                       const RadialGrid& grid)
{
    Pieces p;
    p.phys = grid.synthesize(u);
    if (!p.phys.all_finite())
        throw DivergenceError("non-finite field values");
    p.g = grid.analyze(power_nonlinearity(p.phys, spec.q), u.dim());
    if (spec.variant == DissipationVariant::Subcritical) {
        p.prefactor = subcritical_weight(u, spec);
    } else {
        p.prefactor = 2.0 * checked_exp(2.0 * mass(p.g), "exp(2 |P_N |u|^{2q} u|^2)");
        PhysicalField e;
        e.values.resize(p.phys.size());
        for (std::size_t j = 0; j < p.phys.size(); ++j) {
            const double a2 = std::norm(p.phys.values[j]);
            e.values[j] = p.phys.values[j] * checked_exp(a2, "exp(|u|^2)");
        }
        p.h = grid.analyze(e, u.dim());
    }
    return p;
}

SpectralField assemble_operator(const SpectralField& u, const DissipationSpec& spec,
                                const Pieces& p)
{
    SpectralField out = apply_diagonal(u, spec.variant, spec.beta);
    const double w = spec.nonlinear_weight;
    if (spec.variant == DissipationVariant::Subcritical) {
        if (w != 0.0)
            out += (w * p.g);
        out *= p.prefactor;
    } else if (w != 0.0) {
        out += (w * p.prefactor) * p.g;
        out += w * p.h;
    }
    return out;
}

} // namespace

PhysicalField power_nonlinearity(const PhysicalField& u, double q)
{
    PhysicalField out;
    out.values.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double a2 = std::norm(u.values[j]);
        out.values[j] = a2 == 0.0 ? complex(0.0) : u.values[j] * std::pow(a2, q);
    }
    return out;
}

SpectralField projected_nonlinearity(const SpectralField& u, double q, const RadialGrid& grid)
{
    return grid.analyze(power_nonlinearity(grid.synthesize(u), q), u.dim());
}

double energy(const SpectralField& u, double q, const RadialGrid& grid)
{
    const double kinetic = 0.5 * dirichlet_form(u);
    const double potential = power_moment(grid.synthesize(u), grid, q) / (2.0 * q + 2.0);
    return kinetic + potential;
}

SpectralField dissipation_operator(const SpectralField& u, const DissipationSpec& spec,
                                   const RadialGrid& grid)
{
    return assemble_operator(u, spec, evaluate_pieces(u, spec, grid));
}

double mass_dissipation_rate(const SpectralField& u, const DissipationSpec& spec,
                             const RadialGrid& grid)
{
    const double w = spec.nonlinear_weight;
    if (spec.variant == DissipationVariant::Subcritical) {
        const double linear = std::pow(sobolev_norm(u, spec.beta - 1.0), 2);
        const double nonlinear = w != 0.0 ? power_moment(grid.synthesize(u), grid, spec.q) : 0.0;
        return subcritical_weight(u, spec) * (linear + w * nonlinear);
    }
    const double linear =
        std::pow(sobolev_norm(u, spec.beta - 1.0, SobolevWeight::Inhomogeneous), 2);
    if (w == 0.0)
        return linear;
    const auto phys = grid.synthesize(u);
    const SpectralField g = grid.analyze(power_nonlinearity(phys, spec.q), u.dim());
    const double k = 2.0 * checked_exp(2.0 * mass(g), "exp(2 |P_N |u|^{2q} u|^2)");
    return linear + w * (k * power_moment(phys, grid, spec.q) + exponential_moment(phys, grid));
}

double energy_dissipation_rate(const SpectralField& u, const DissipationSpec& spec,
                               const RadialGrid& grid)
{
    const Pieces p = evaluate_pieces(u, spec, grid);
    const SpectralField lap = negative_laplacian(u);
    const SpectralField diag = apply_diagonal(u, spec.variant, spec.beta);
    const double w = spec.nonlinear_weight;

    // <-Delta u, A u> + <P g, A u> + <-Delta u + P g, nonlinear damping>
    const double kinetic = real_inner(lap, diag);
    const double cross = real_inner(p.g, diag);
    if (spec.variant == DissipationVariant::Subcritical) {
        const double nonlinear = real_inner(p.g, lap) + mass(p.g);
        return p.prefactor * (kinetic + cross + w * nonlinear);
    }
    const SpectralField grad_energy = lap + p.g;
    const double nonlinear =
        p.prefactor * real_inner(grad_energy, p.g) + real_inner(grad_energy, p.h);
    return kinetic + cross + w * nonlinear;
}

double gradient_weighted_moment(const SpectralField& u, double p, const RadialGrid& grid)
{
    if (p == 0.0)
        return dirichlet_energy_quadrature(u, grid);
    const auto du = grid.radial_derivative(u);
    const auto phys = grid.synthesize(u);
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < phys.size(); ++j)
        sum += w[j] * std::norm(du.values[j]) * std::pow(std::norm(phys.values[j]), p);
    return sum;
}

double dirichlet_energy_quadrature(const SpectralField& u, const RadialGrid& grid)
{
    const auto du = grid.radial_derivative(u);
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < du.size(); ++j)
        sum += w[j] * std::norm(du.values[j]);
    // Trapezoid end point at r = 1 (weight h/2, r^2 = 1).
    const double h = 1.0 / static_cast<double>(grid.resolution() + 1);
    sum += 0.5 * h * std::norm(grid.boundary_derivative(u));
    return sum;
}

double exponential_series_partial(const PhysicalField& u, const RadialGrid& grid, int terms)
{
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double a2 = std::norm(u.values[j]);
        double term = a2; // |u|^{2p+2} / p! at p = 0
        double local = 0.0;
        for (int p = 0; p <= terms; ++p) {
            local += term;
            term *= a2 / static_cast<double>(p + 1);
        }
        sum += w[j] * local;
    }
    return sum;
}

double exponential_moment(const PhysicalField& u, const RadialGrid& grid)
{
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double a2 = std::norm(u.values[j]);
        sum += w[j] * a2 * checked_exp(a2, "exp(|u|^2)");
    }
    return sum;
}

double energy_dissipation_floor(const SpectralField& u, const DissipationSpec& spec,
                                const RadialGrid& grid)
{
    const double h_beta = std::pow(sobolev_norm(u, spec.beta), 2);
    const SpectralField g = projected_nonlinearity(u, spec.q, grid);
    const double g2 = mass(g);
    const double grad_q = gradient_weighted_moment(u, spec.q, grid);
    if (spec.variant == DissipationVariant::Subcritical)
        return subcritical_weight(u, spec) * (0.5 * h_beta + 0.5 * g2 + grad_q);

    const double e = checked_exp(2.0 * g2, "exp(2 |P_N |u|^{2q} u|^2)");
    // sum_p <|grad u|^2, |u|^{2p}> / p! = <|grad u|^2, exp(|u|^2)>
    const auto du = grid.radial_derivative(u);
    const auto phys = grid.synthesize(u);
    const auto w = grid.weights();
    double series = 0.0;
    for (std::size_t j = 0; j < phys.size(); ++j)
        series += w[j] * std::norm(du.values[j]) *
                  checked_exp(std::norm(phys.values[j]), "exp(|u|^2)");
    const double h = 1.0 / static_cast<double>(grid.resolution() + 1);
    series += 0.5 * h * std::norm(grid.boundary_derivative(u));
    return 0.5 * (h_beta + 3.0 * e * grad_q + e * g2 + series);
}

} // namespace nlsball
