#pragma once

// Radial Dirichlet eigenbasis on the unit ball.
//
// Fields are expanded as u(r) = sum_n c_n e_n(r) with e_n(r) = sqrt(2) sin(n pi r) / r,
// orthonormal for the measure r^2 dr on (0,1). The substitution v = r u turns the
// basis into pure sines, so transforms between coefficients and point values are
// discrete sine transforms of type I on the uniform grid r_j = j / (G + 1).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlsball {

using complex = std::complex<double>;

/// Coefficient vector (c_1, ..., c_N) of a radial field. Mode indices are 1-based.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(std::size_t dim) : coeffs_(dim) {}
    explicit SpectralField(std::vector<complex> coeffs);

    /// amplitude * e_n embedded in a field of dimension `dim`.
    static SpectralField mode(std::size_t dim, std::size_t n, complex amplitude = 1.0);

    std::size_t dim() const noexcept { return coeffs_.size(); }

    /// c_n, 1-based.
    complex& operator()(std::size_t n) { return coeffs_[n - 1]; }
    const complex& operator()(std::size_t n) const { return coeffs_[n - 1]; }

    std::span<complex> coeffs() noexcept { return coeffs_; }
    std::span<const complex> coeffs() const noexcept { return coeffs_; }

    bool all_finite() const noexcept;

    /// Zero-pads or truncates to `dim` modes.
    SpectralField resized(std::size_t dim) const;
    SpectralField conj() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(complex scale);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(complex s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, complex s) { return a *= s; }

    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    std::vector<complex> coeffs_;
};

/// Point values u(r_j) on a RadialGrid.
struct PhysicalField {
    std::vector<complex> values;

    std::size_t size() const noexcept { return values.size(); }
    bool all_finite() const noexcept;
};

/// Uniform interior grid r_j = j / (G + 1), j = 1..G, with weights w_j = r_j^2 / (G + 1).
///
/// The grid owns FFTW plans; copies share them. All member functions are const and
/// safe to call concurrently.
class RadialGrid {
public:
    explicit RadialGrid(std::size_t resolution);

    std::size_t resolution() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// u(r_j) = sum_n c_n e_n(r_j).
    PhysicalField synthesize(const SpectralField& field) const;

    /// c_n = sum_j w_j u(r_j) e_n(r_j), n = 1..dim.
    SpectralField analyze(const PhysicalField& phys, std::size_t dim) const;

    /// Radial derivative u'(r_j) at the nodes.
    PhysicalField radial_derivative(const SpectralField& field) const;

    /// u'(1); the only nonzero boundary datum of a Dirichlet field.
    complex boundary_derivative(const SpectralField& field) const;

    /// r_j u(r_j), i.e. the sine series v evaluated on the grid.
    std::vector<complex> weighted_values(const SpectralField& field) const;

private:
    struct Plans;

    void check_dim(std::size_t dim) const;

    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::shared_ptr<const Plans> plans_;
};

/// Grid resolution for a nonlinearity of degree 2q+1: (q+1) * dim for integer q,
/// 4 * dim otherwise.
std::size_t dealiased_resolution(std::size_t dim, double q);

/// e_n(r) = sqrt(2) sin(n pi r) / r. Exactly 0 at r = 1.
double eigenfunction_value(std::size_t n, double r);

/// z_n^2 = (pi n)^2.
double eigenvalue(std::size_t n);

PhysicalField synthesize(const SpectralField& field, const RadialGrid& grid);
SpectralField analyze(const PhysicalField& phys, const RadialGrid& grid, std::size_t dim);

/// Zeroes every coefficient with n > max_mode.
SpectralField project(const SpectralField& field, std::size_t max_mode);

enum class SobolevWeight {
    Homogeneous,   // (n pi)^{2 sigma}
    Inhomogeneous, // (1 + (n pi)^2)^{sigma}
};

double sobolev_norm(const SpectralField& field, double sigma,
                    SobolevWeight weight = SobolevWeight::Homogeneous);

/// (sum_j w_j |u_j|^p)^{1/p}.
double lp_norm(const PhysicalField& phys, const RadialGrid& grid, double p);

/// Free Schrodinger group: c_n -> exp(-i t z_n^2) c_n.
SpectralField linear_propagate(const SpectralField& field, double t);

/// Real L^2 pairing Re sum_n c_n conj(d_n).
double real_inner(const SpectralField& a, const SpectralField& b);

} // namespace nlsball
