#pragma once

// Fluctuation-dissipation Galerkin SDE
//   du = i (Delta u - P_N |u|^{2q} u) dt - alpha L(u) dt + sqrt(alpha) dW^N,
//   W^N(t) = sum_n a_n e_n beta_n(t),  beta_n independent real Brownian motions.

#include "nlsball/deterministic_flow.hpp"
#include "nlsball/functionals.hpp"
#include "nlsball/radial_spectral.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nlsball {

using Rng = std::mt19937_64;

/// Stream for trajectory `index` of a run seeded with `master_seed`; a pure
/// function of both.
Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index);

struct NoiseSpec {
    std::vector<complex> amplitudes; // a_1..a_N

    /// a_n = n^{-exponent}, n = 1..dim.
    static NoiseSpec power_law(std::size_t dim, double exponent = 2.0);

    std::size_t dim() const noexcept { return amplitudes.size(); }

    /// A_r^N = sum_{n<=N} z_n^{2r} |a_n|^2.
    double A(double r) const;

    /// Requires finite amplitudes with nonincreasing modulus.
    void validate() const;

    /// Message when A_1^N exceeds `threshold` (any finite N is admissible, so
    /// this is a warning, not an error).
    std::optional<std::string> admissibility_warning(double threshold) const;
};

struct SdeConfig {
    double alpha = 0.1;
    double dt = 1e-3;
    double T = 1.0;
    std::uint64_t seed = 0;
    DissipationSpec dissipation;
    NoiseSpec noise = NoiseSpec::power_law(8);
    /// Coefficient of the Hamiltonian nonlinearity (test hook).
    double coupling = 1.0;
    /// Maximum number of recursive halvings of the damping substep.
    int max_halvings = 30;

    std::size_t dim() const noexcept { return noise.dim(); }
    void validate() const;
};

/// sum_n a_n e_n dB_n with dB_n ~ N(0, dt).
SpectralField sample_noise_increment(const NoiseSpec& spec, double dt, Rng& rng);

/// One step: Strang block of the Hamiltonian flow (half linear, nonlinear, half
/// linear), then the damping substep u <- u - alpha dt L(u), halved recursively
/// while |alpha dt L(u)| > |u| / 2, then the noise kick sqrt(alpha) dW.
class SdeStepper {
public:
    SdeStepper(const SdeConfig& cfg, const RadialGrid& grid);

    void step(SpectralField& u, Rng& rng);

    /// Damping substep over time tau; returns the number of halvings used.
    std::size_t damp(SpectralField& u, double tau, int depth = 0) const;

    std::size_t halvings() const noexcept { return halvings_; }
    const SdeConfig& config() const noexcept { return cfg_; }
    const RadialGrid& grid() const noexcept { return grid_; }

private:
    SdeConfig cfg_;
    RadialGrid grid_;
    SplitStepper hamiltonian_;
    std::size_t halvings_ = 0;
};

SpectralField sde_step(const SpectralField& u, const SdeConfig& cfg, const RadialGrid& grid,
                       Rng& rng);

/// Time series recorded along one SDE trajectory.
struct SdeTrajectory {
    std::vector<double> times;
    std::vector<double> mass;      // sum |c_n|^2
    std::vector<double> mass_rate; // the mass dissipation rate
    SpectralField final_state;
    std::size_t halvings = 0;
};

/// Runs u0 to cfg.T recording (t, mass, mass rate) every `observe_every` steps
/// and at both ends. The optional callback sees every recorded state.
SdeTrajectory simulate_sde(const SpectralField& u0, const SdeConfig& cfg, const RadialGrid& grid,
                           Rng& rng, std::size_t observe_every = 1,
                           const std::function<void(double, const SpectralField&)>& callback = {});

struct ItoResidual {
    double t = 0.0;
    double residual = 0.0; // mean of left minus right side
    double standard_error = 0.0; // Monte-Carlo
    std::size_t samples = 0;
};

/// Residual of the Ito mass balance
///   E M(u(t)) + alpha int_0^t E rate(u) ds - E M(u0) - (alpha/2) A_0^N t
/// with M = |u|^2 / 2 (the functional whose Ito expansion carries the
/// (alpha/2) A_0^N drift). Time integrals by trapezoid over recorded samples.
ItoResidual ito_mass_residual(std::span<const SdeTrajectory> ensemble, const SdeConfig& cfg);

} // namespace nlsball
