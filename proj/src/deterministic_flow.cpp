#include "nlsball/deterministic_flow.hpp"

#include "nlsball/errors.hpp"
#include "nlsball/fit.hpp"
#include "nlsball/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlsball {

void FlowConfig::validate() const
{
    if (dim == 0)
        throw ValidationError("flow.dim must be positive");
    if (!(q > 0.0))
        throw ValidationError("flow.q must be positive");
    if (!(dt > 0.0))
        throw ValidationError("flow.dt must be positive");
    if (!(T >= 0.0))
        throw ValidationError("flow.T must be nonnegative");
    if (!(picard_tolerance > 0.0))
        throw ValidationError("flow.picard_tolerance must be positive");
    if (picard_max_iters <= 0)
        throw ValidationError("flow.picard_max_iters must be positive");
}

SplitStepper::SplitStepper(const FlowConfig& cfg, const RadialGrid& grid)
    : cfg_(cfg), grid_(grid), half_phase_(cfg.dim)
{
    if (grid.resolution() < cfg.dim)
        throw ValidationError("grid resolution below flow dimension");
    for (std::size_t n = 1; n <= cfg.dim; ++n)
        half_phase_[n - 1] = std::polar(1.0, -0.5 * cfg.dt * eigenvalue(n));
}

void SplitStepper::half_linear(SpectralField& u) const
{
    auto c = u.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] *= half_phase_[i];
}

void SplitStepper::nonlinear_substep(SpectralField& u, double tau) const
{
    if (cfg_.coupling == 0.0)
        return;
    PhysicalField phys = grid_.synthesize(u);
    for (auto& v : phys.values) {
        const double a2 = std::norm(v);
        if (a2 != 0.0)
            v *= std::polar(1.0, -tau * cfg_.coupling * std::pow(a2, cfg_.q));
    }
    u = grid_.analyze(phys, u.dim());
}

void SplitStepper::step(SpectralField& u) const
{
    if (u.dim() != cfg_.dim)
        throw ValidationError("state dimension does not match flow dimension");
    half_linear(u);
    nonlinear_substep(u, cfg_.dt);
    half_linear(u);
    if (!u.all_finite())
        throw DivergenceError("split-step produced non-finite coefficients");
}

SpectralField step_splitstep(const SpectralField& u, const FlowConfig& cfg, const RadialGrid& grid)
{
    SpectralField out(u);
    SplitStepper(cfg, grid).step(out);
    return out;
}

TrajectoryRow observe(double t, const SpectralField& u, double q, const RadialGrid& grid,
                      std::span<const double> sobolev_indices)
{
    TrajectoryRow row;
    row.t = t;
    row.mass = mass(u);
    row.energy = energy(u, q, grid);
    for (double s : sobolev_indices)
        row.sobolev.push_back(sobolev_norm(u, s));
    return row;
}

FlowResult integrate(const SpectralField& u0, const FlowConfig& cfg, const RadialGrid& grid,
                     const ObservationPlan& plan)
{
    cfg.validate();
    FlowResult result;
    result.final_state = u0;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.T / cfg.dt - 1e-9));
    FlowConfig stepped = cfg;
    if (steps > 0)
        stepped.dt = cfg.T / static_cast<double>(steps);
    const SplitStepper stepper(stepped, grid);

    auto record = [&](std::size_t k) {
        const double t = static_cast<double>(k) * stepped.dt;
        result.log.push_back(observe(t, result.final_state, cfg.q, grid, plan.sobolev_indices));
        if (plan.callback)
            plan.callback(t, result.final_state);
    };

    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        stepper.step(result.final_state);
        if (k == steps || (plan.every > 0 && k % plan.every == 0))
            record(k);
    }
    result.steps = steps;
    return result;
}

PicardResult picard_solve(const SpectralField& u0, const FlowConfig& cfg, const RadialGrid& grid,
                          double sobolev_index)
{
    cfg.validate();
    if (!(sobolev_index > 1.5))
        throw ValidationError("Picard iteration needs an H^s norm with s > 3/2");
    const std::size_t dim = u0.dim();
    const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::ceil(cfg.T / cfg.dt - 1e-9)));
    const double h = cfg.T / static_cast<double>(intervals);

    PicardResult res;
    res.times.resize(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k)
        res.times[k] = static_cast<double>(k) * h;

    std::vector<double> z2(dim);
    for (std::size_t n = 1; n <= dim; ++n)
        z2[n - 1] = eigenvalue(n);

    res.path.reserve(intervals + 1);
    for (double t : res.times)
        res.path.push_back(linear_propagate(u0, t));

    double previous = 0.0;
    for (int iter = 1; iter <= cfg.picard_max_iters; ++iter) {
        // Interaction picture: w(t) = u0 - i kappa int_0^t S(-s) P g(u(s)) ds, u = S(t) w.
        std::vector<complex> integral(dim, 0.0);
        std::vector<complex> prev_integrand(dim, 0.0);
        double residual = 0.0;
        std::vector<SpectralField> next;
        next.reserve(intervals + 1);
        for (std::size_t k = 0; k <= intervals; ++k) {
            const double t = res.times[k];
            const SpectralField g = projected_nonlinearity(res.path[k], cfg.q, grid);
            std::vector<complex> integrand(dim);
            for (std::size_t n = 0; n < dim; ++n)
                integrand[n] = std::polar(1.0, t * z2[n]) * g.coeffs()[n];
            if (k > 0)
                for (std::size_t n = 0; n < dim; ++n)
                    integral[n] += 0.5 * h * (prev_integrand[n] + integrand[n]);
            prev_integrand = std::move(integrand);

            SpectralField u(dim);
            for (std::size_t n = 0; n < dim; ++n)
                u.coeffs()[n] = std::polar(1.0, -t * z2[n]) *
                                (u0.coeffs()[n] - complex(0.0, cfg.coupling) * integral[n]);
            if (!u.all_finite())
                throw DivergenceError("Picard iterate is not finite");
            residual = std::max(residual, sobolev_norm(u - res.path[k], sobolev_index));
            next.push_back(std::move(u));
        }
        res.path = std::move(next);
        res.iterations = iter;
        res.residual = residual;
        if (iter > 1 && previous > 0.0) {
            const double ratio = residual / previous;
            res.contraction = std::max(res.contraction, ratio);
            // Ratios near 1 at round-off level are not a failure.
            if (ratio >= 1.0 && residual > 100.0 * cfg.picard_tolerance)
                throw NonContractionError("Duhamel map is not contracting on T = " +
                                          std::to_string(cfg.T) + " (residual ratio " +
                                          std::to_string(ratio) + ")");
        }
        if (residual < cfg.picard_tolerance)
            break;
        if (iter == cfg.picard_max_iters)
            throw BudgetError("Picard iteration did not reach tolerance in " +
                              std::to_string(iter) + " sweeps");
        previous = residual;
    }
    res.final_state = res.path.back();
    return res;
}

double picard_window(double radius, double q, double c, double kappa)
{
    return c * std::pow(std::pow(radius, 2.0 * q), -kappa);
}

GalerkinReport galerkin_convergence(const SpectralField& u0, std::span<const std::size_t> dims,
                                    const FlowConfig& cfg, double sigma)
{
    if (dims.empty())
        throw ValidationError("galerkin_convergence needs at least one dimension");
    GalerkinReport report;
    report.sigma = sigma;
    report.reference_dim = 2 * *std::max_element(dims.begin(), dims.end());

    auto run = [&](std::size_t n) {
        FlowConfig c = cfg;
        c.dim = n;
        const RadialGrid grid(dealiased_resolution(n, cfg.q));
        return integrate(u0.resized(n), c, grid).final_state;
    };

    const SpectralField reference = run(report.reference_dim);
    std::vector<double> xs, ys;
    for (std::size_t n : dims) {
        const SpectralField un = run(n).resized(report.reference_dim);
        const double err = sobolev_norm(un - reference, sigma);
        report.rows.push_back({n, err});
        if (err > 0.0) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(err);
        }
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const GalerkinRow& a, const GalerkinRow& b) { return a.dim < b.dim; });
    report.monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        if (report.rows[i].error > report.rows[i - 1].error)
            report.monotone = false;
    if (xs.size() >= 2)
        report.fitted_slope = loglog_fit(xs, ys).slope;
    return report;
}

} // namespace nlsball
