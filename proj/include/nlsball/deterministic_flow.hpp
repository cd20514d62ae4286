#pragma once

// Galerkin-projected Hamiltonian flow  du/dt = i (Delta u - P_N |u|^{2q} u).

#include "nlsball/radial_spectral.hpp"

#include <functional>
#include <span>
#include <vector>

namespace nlsball {

enum class Scheme { SplitStepStrang, PicardOracle };

struct FlowConfig {
    std::size_t dim = 64;
    double q = 3.0;
    double dt = 1e-4;
    double T = 1.0;
    Scheme scheme = Scheme::SplitStepStrang;
    double picard_tolerance = 1e-13;
    int picard_max_iters = 200;
    /// Coefficient of the nonlinearity; 0 gives the free flow.
    double coupling = 1.0;

    void validate() const;
};

/// Strang splitting: half linear phase, exact pointwise nonlinear phase, half linear phase.
/// Holds precomputed phases; const and reusable across trajectories.
class SplitStepper {
public:
    SplitStepper(const FlowConfig& cfg, const RadialGrid& grid);

    /// One step of size cfg.dt, in place. Throws DivergenceError on non-finite output.
    void step(SpectralField& u) const;

    /// u <- P_N exp(-i tau kappa |u|^{2q}) u.
    void nonlinear_substep(SpectralField& u, double tau) const;

    /// Multiplies c_n by exp(-i z_n^2 dt / 2).
    void half_linear(SpectralField& u) const;

    const RadialGrid& grid() const noexcept { return grid_; }

private:
    FlowConfig cfg_;
    RadialGrid grid_;
    std::vector<complex> half_phase_;
};

SpectralField step_splitstep(const SpectralField& u, const FlowConfig& cfg, const RadialGrid& grid);

struct TrajectoryRow {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    std::vector<double> sobolev; // one entry per requested index
};

struct ObservationPlan {
    /// Record every `every` steps (the initial and final states are always recorded).
    std::size_t every = 0;
    std::vector<double> sobolev_indices;
    std::function<void(double, const SpectralField&)> callback;
};

struct FlowResult {
    SpectralField final_state;
    std::vector<TrajectoryRow> log;
    std::size_t steps = 0;
};

/// Advances u0 to cfg.T with the split-step scheme. The step count is
/// ceil(T / dt) and the step is shrunk to land on T exactly.
FlowResult integrate(const SpectralField& u0, const FlowConfig& cfg, const RadialGrid& grid,
                     const ObservationPlan& plan = {});

TrajectoryRow observe(double t, const SpectralField& u, double q, const RadialGrid& grid,
                      std::span<const double> sobolev_indices);

struct PicardResult {
    SpectralField final_state;
    std::vector<double> times;
    std::vector<SpectralField> path;
    double residual = 0.0;    // last sup_t |u^{k+1} - u^k|_{H^s}
    double contraction = 0.0; // largest successive residual ratio after the first sweep
    int iterations = 0;
};

/// Fixed point of the Duhamel map
///   u(t) = S(t) u0 - i kappa int_0^t S(t - s) P_N |u|^{2q} u(s) ds
/// on a uniform time grid of spacing cfg.dt, trapezoid in s, iterated in the
/// sup-in-time H^s norm. Requires s > 3/2.
PicardResult picard_solve(const SpectralField& u0, const FlowConfig& cfg, const RadialGrid& grid,
                          double sobolev_index = 1.6);

/// Local existence window c * (R^{2q})^{-kappa} for data of H^s size R.
double picard_window(double radius, double q, double c, double kappa);

struct GalerkinRow {
    std::size_t dim = 0;
    double error = 0.0;
};

struct GalerkinReport {
    std::vector<GalerkinRow> rows;
    std::size_t reference_dim = 0;
    double sigma = 0.0;
    double fitted_slope = 0.0; // d log(error) / d log(N)
    bool monotone = false;
};

/// |phi_T^N P_N u0 - phi_T^{2 N_max} P_{2 N_max} u0|_{H^sigma} for each N in dims.
/// Grids are built per dimension with the dealiasing rule.
GalerkinReport galerkin_convergence(const SpectralField& u0, std::span<const std::size_t> dims,
                                    const FlowConfig& cfg, double sigma);

} // namespace nlsball
