#include "nlsball/radial_spectral.hpp"

#include "nlsball/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace nlsball {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double sqrt2 = std::numbers::sqrt2;

// The FFTW planner is not thread-safe; plan execution with new arrays is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

double* as_real(complex* p) { return reinterpret_cast<double*>(p); }

} // namespace

// --- SpectralField -----------------------------------------------------------

SpectralField::SpectralField(std::vector<complex> coeffs) : coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::mode(std::size_t dim, std::size_t n, complex amplitude)
{
    if (n == 0 || n > dim)
        throw std::out_of_range("mode index outside 1..dim");
    SpectralField f(dim);
    f(n) = amplitude;
    return f;
}

bool SpectralField::all_finite() const noexcept
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const complex& c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

SpectralField SpectralField::resized(std::size_t dim) const
{
    std::vector<complex> c(dim);
    std::copy_n(coeffs_.begin(), std::min(dim, coeffs_.size()), c.begin());
    return SpectralField(std::move(c));
}

SpectralField SpectralField::conj() const
{
    SpectralField out(*this);
    for (auto& c : out.coeffs_)
        c = std::conj(c);
    return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other)
{
    if (other.dim() != dim())
        throw std::invalid_argument("SpectralField dimension mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other)
{
    if (other.dim() != dim())
        throw std::invalid_argument("SpectralField dimension mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(complex scale)
{
    for (auto& c : coeffs_)
        c *= scale;
    return *this;
}

bool PhysicalField::all_finite() const noexcept
{
    return std::all_of(values.begin(), values.end(), [](const complex& c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

// --- RadialGrid --------------------------------------------------------------

struct RadialGrid::Plans {
    fftw_plan sine = nullptr;   // RODFT00 on G points, real and imaginary parts at once
    fftw_plan cosine = nullptr; // REDFT00 on G + 2 points, same layout

    Plans(std::size_t g)
    {
        std::lock_guard lock(planner_mutex());
        std::vector<complex> a(g + 2), b(g + 2);
        int n = static_cast<int>(g);
        int nc = static_cast<int>(g + 2);
        fftw_r2r_kind sk = FFTW_RODFT00;
        fftw_r2r_kind ck = FFTW_REDFT00;
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        sine = fftw_plan_many_r2r(1, &n, 2, as_real(a.data()), nullptr, 2, 1,
                                  as_real(b.data()), nullptr, 2, 1, &sk, flags);
        cosine = fftw_plan_many_r2r(1, &nc, 2, as_real(a.data()), nullptr, 2, 1,
                                    as_real(b.data()), nullptr, 2, 1, &ck, flags);
        if (!sine || !cosine)
            throw std::runtime_error("FFTW planning failed");
    }
    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(sine);
        fftw_destroy_plan(cosine);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

RadialGrid::RadialGrid(std::size_t resolution)
{
    if (resolution == 0)
        throw ValidationError("grid resolution must be positive");
    const double h = 1.0 / static_cast<double>(resolution + 1);
    nodes_.resize(resolution);
    weights_.resize(resolution);
    for (std::size_t j = 0; j < resolution; ++j) {
        nodes_[j] = static_cast<double>(j + 1) * h;
        weights_[j] = nodes_[j] * nodes_[j] * h;
    }
    plans_ = std::make_shared<const Plans>(resolution);
}

void RadialGrid::check_dim(std::size_t dim) const
{
    if (dim > resolution())
        throw ValidationError("grid resolution " + std::to_string(resolution()) +
                              " is below field dimension " + std::to_string(dim));
}

std::vector<complex> RadialGrid::weighted_values(const SpectralField& field) const
{
    check_dim(field.dim());
    const std::size_t g = resolution();
    // RODFT00: Y_k = 2 sum_j X_j sin(pi (j+1)(k+1) / (G+1)).
    std::vector<complex> in(g), out(g);
    const auto c = field.coeffs();
    for (std::size_t n = 0; n < c.size(); ++n)
        in[n] = c[n] * (sqrt2 / 2.0);
    fftw_execute_r2r(plans_->sine, as_real(in.data()), as_real(out.data()));
    return out;
}

PhysicalField RadialGrid::synthesize(const SpectralField& field) const
{
    PhysicalField phys{weighted_values(field)};
    for (std::size_t j = 0; j < phys.values.size(); ++j)
        phys.values[j] /= nodes_[j];
    return phys;
}

SpectralField RadialGrid::analyze(const PhysicalField& phys, std::size_t dim) const
{
    const std::size_t g = resolution();
    if (phys.size() != g)
        throw ValidationError("physical field size does not match grid resolution");
    check_dim(dim);
    const double scale = sqrt2 / (2.0 * static_cast<double>(g + 1));
    std::vector<complex> in(g), out(g);
    for (std::size_t j = 0; j < g; ++j)
        in[j] = phys.values[j] * (nodes_[j] * scale);
    fftw_execute_r2r(plans_->sine, as_real(in.data()), as_real(out.data()));
    out.resize(dim);
    return SpectralField(std::move(out));
}

PhysicalField RadialGrid::radial_derivative(const SpectralField& field) const
{
    check_dim(field.dim());
    const std::size_t g = resolution();
    // v'(r) = sum_n c_n sqrt2 n pi cos(n pi r); REDFT00 on G+2 points gives
    // Y_k = X_0 + (-1)^k X_{G+1} + 2 sum_{j=1}^{G} X_j cos(pi j k / (G+1)).
    std::vector<complex> in(g + 2), out(g + 2);
    const auto c = field.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n)
        in[n] = c[n - 1] * (sqrt2 * pi * static_cast<double>(n) / 2.0);
    fftw_execute_r2r(plans_->cosine, as_real(in.data()), as_real(out.data()));
    const auto v = weighted_values(field);
    PhysicalField d;
    d.values.resize(g);
    for (std::size_t j = 0; j < g; ++j) {
        const double r = nodes_[j];
        d.values[j] = (out[j + 1] - v[j] / r) / r;
    }
    return d;
}

complex RadialGrid::boundary_derivative(const SpectralField& field) const
{
    complex sum = 0.0;
    const auto c = field.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += c[n - 1] * (sign * sqrt2 * pi * static_cast<double>(n));
    }
    return sum;
}

// --- free functions ----------------------------------------------------------

std::size_t dealiased_resolution(std::size_t dim, double q)
{
    const double rq = std::round(q);
    if (q > 0 && std::abs(q - rq) < 1e-12)
        return static_cast<std::size_t>(rq + 1.0) * dim;
    return 4 * dim;
}

double eigenfunction_value(std::size_t n, double r)
{
    if (n == 0)
        throw std::domain_error("eigenfunction index starts at 1");
    if (!(r > 0.0) || r > 1.0)
        throw std::domain_error("eigenfunction radius must lie in (0, 1]");
    if (r == 1.0)
        return 0.0;
    return sqrt2 * std::sin(static_cast<double>(n) * pi * r) / r;
}

double eigenvalue(std::size_t n)
{
    if (n == 0)
        throw std::domain_error("eigenvalue index starts at 1");
    const double z = pi * static_cast<double>(n);
    return z * z;
}

PhysicalField synthesize(const SpectralField& field, const RadialGrid& grid)
{
    return grid.synthesize(field);
}

SpectralField analyze(const PhysicalField& phys, const RadialGrid& grid, std::size_t dim)
{
    return grid.analyze(phys, dim);
}

SpectralField project(const SpectralField& field, std::size_t max_mode)
{
    SpectralField out(field);
    auto c = out.coeffs();
    for (std::size_t n = max_mode + 1; n <= c.size(); ++n)
        c[n - 1] = 0.0;
    return out;
}

double sobolev_norm(const SpectralField& field, double sigma, SobolevWeight weight)
{
    double sum = 0.0;
    const auto c = field.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n) {
        const double z2 = eigenvalue(n);
        const double w = weight == SobolevWeight::Homogeneous ? std::pow(z2, sigma)
                                                              : std::pow(1.0 + z2, sigma);
        sum += w * std::norm(c[n - 1]);
    }
    return std::sqrt(sum);
}

double lp_norm(const PhysicalField& phys, const RadialGrid& grid, double p)
{
    if (!(p >= 1.0))
        throw std::domain_error("L^p norm requires p >= 1");
    if (phys.size() != grid.resolution())
        throw ValidationError("physical field size does not match grid resolution");
    const auto w = grid.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < phys.size(); ++j) {
        const double a = std::abs(phys.values[j]);
        sum += w[j] * (p == 2.0 ? a * a : std::pow(a, p));
    }
    return std::pow(sum, 1.0 / p);
}

SpectralField linear_propagate(const SpectralField& field, double t)
{
    SpectralField out(field);
    auto c = out.coeffs();
    for (std::size_t n = 1; n <= c.size(); ++n)
        c[n - 1] *= std::polar(1.0, -t * eigenvalue(n));
    return out;
}

double real_inner(const SpectralField& a, const SpectralField& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("SpectralField dimension mismatch");
    double sum = 0.0;
    const auto ca = a.coeffs();
    const auto cb = b.coeffs();
    for (std::size_t i = 0; i < ca.size(); ++i)
        sum += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
    return sum;
}

} // namespace nlsball
