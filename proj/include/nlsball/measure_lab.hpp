#pragma once

// Ergodic estimation of the stationary measures of the fluctuation-dissipation
// SDE, tail estimates, alpha sweeps, empirical densities and the slow-growth
// envelope diagnostic along the deterministic flow.

#include "nlsball/deterministic_flow.hpp"
#include "nlsball/functionals.hpp"
#include "nlsball/statistics.hpp"
#include "nlsball/stochastic_flow.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nlsball {

/// Functionals recorded at every stationary sample, in this order.
enum class Observable : std::size_t {
    Mass,          // |u|_{L^2}^2
    Energy,        // E(u)
    MassRate,      // mass dissipation rate
    EnergyRate,    // energy dissipation rate
    SobolevBeta,   // |u|_{H^{beta - delta}}
    PotentialNorm, // |u|_{L^{2q+2}}
};
inline constexpr std::size_t observable_count = 6;
std::string_view observable_name(Observable o);

using ObservableValues = std::array<double, observable_count>;

ObservableValues evaluate_observables(const SpectralField& u, const DissipationSpec& spec,
                                      const RadialGrid& grid);

struct AccumulatorLayout {
    std::size_t bins = 64;
    double mass_max = 1.0;   // histogram range [0, mass_max]
    double energy_max = 1.0; // histogram range [0, energy_max]
};

/// Running statistics, histograms of mass and energy, and the raw
/// (mass, energy, mass rate) sample stream grouped by trajectory.
class EnsembleAccumulator {
public:
    EnsembleAccumulator() = default;
    explicit EnsembleAccumulator(const AccumulatorLayout& layout);

    void add(const ObservableValues& v);
    /// Marks the end of one trajectory's samples.
    void close_trajectory();
    void merge(const EnsembleAccumulator& other);

    std::uint64_t count() const noexcept { return stats_[0].count(); }
    const RunningStat& stat(Observable o) const { return stats_[static_cast<std::size_t>(o)]; }
    const Histogram& mass_histogram() const noexcept { return mass_hist_; }
    const Histogram& energy_histogram() const noexcept { return energy_hist_; }
    std::span<const double> mass_samples() const noexcept { return mass_; }
    std::span<const double> energy_samples() const noexcept { return energy_; }
    std::span<const double> mass_rate_samples() const noexcept { return mass_rate_; }
    /// Number of samples contributed by each closed trajectory.
    std::span<const std::size_t> trajectory_sizes() const noexcept { return sizes_; }
    const AccumulatorLayout& layout() const noexcept { return layout_; }

private:
    AccumulatorLayout layout_;
    std::array<RunningStat, observable_count> stats_{};
    Histogram mass_hist_;
    Histogram energy_hist_;
    std::vector<double> mass_, energy_, mass_rate_;
    std::vector<std::size_t> sizes_;
    std::size_t open_ = 0;
};

struct StationaryOptions {
    double burn_in = 20.0;
    double horizon = 100.0;
    std::size_t trajectories = 64;
    std::size_t workers = 1;
    /// Steps between samples.
    std::size_t sample_every = 10;
    AccumulatorLayout layout;
    /// Replace the layout's histogram ranges by 1.05 times the largest sample.
    bool auto_range = true;
    /// Keep the final state of each trajectory.
    bool keep_final_states = true;
};

struct FunctionalSummary {
    std::string_view name;
    double mean = 0.0;
    double standard_error = 0.0; // spread of per-trajectory time averages
    std::size_t n = 0;           // trajectories
};

struct StationaryReport {
    std::array<FunctionalSummary, observable_count> functionals{};
    EnsembleAccumulator pooled;
    double a0 = 0.0;
    double target = 0.0; // A_0^N / 2
    double mass_rate_relative_deviation = 0.0;
    std::size_t trajectories = 0;
    std::size_t divergent = 0;
    std::size_t halvings = 0;
    double autocorrelation_time = 0.0; // integrated, of the mass rate, in time units
    double first_half_mass_rate = 0.0;
    double second_half_mass_rate = 0.0;
    double half_difference_stderr = 0.0;
    bool stationarity_ok = false;
    std::vector<SpectralField> final_states;

    const FunctionalSummary& summary(Observable o) const
    {
        return functionals[static_cast<std::size_t>(o)];
    }
};

/// Time-plus-ensemble averages over [burn_in, horizon] for trajectories
/// started at u0 (zero when not given). Divergent trajectories are counted
/// and excluded.
StationaryReport stationary_average(const SdeConfig& cfg, const StationaryOptions& opt,
                                    const std::optional<SpectralField>& u0 = std::nullopt);

struct TailRow {
    double R = 0.0;
    double tail = 0.0;
    double standard_error = 0.0;
};

struct TailReport {
    std::vector<TailRow> rows;
    double full_average = 0.0;
    double fitted_slope = 0.0; // d log(tail) / d log(R) over rows with positive tail
    /// tail(R_max) R_max <= tail(R_min) R_min within three standard errors.
    bool decays_like_inverse_R = false;
};

/// E[rate(u) (1 - chi_R(|u|_{L^2}^2))] for each R.
TailReport tail_estimate(const EnsembleAccumulator& acc, std::span<const double> R_ladder);

/// R values geometrically spaced over [r_min, r_max].
std::vector<double> geometric_ladder(double r_min, double r_max, std::size_t points);

struct SweepEntry {
    double alpha = 0.0;
    double mass_rate_mean = 0.0;
    double mass_rate_stderr = 0.0;
    double energy_rate_mean = 0.0;
    double energy_rate_stderr = 0.0;
    Histogram mass_histogram;
    Histogram energy_histogram;
    std::size_t divergent = 0;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::vector<double> mass_distances;   // between successive alphas
    std::vector<double> energy_distances; // between successive alphas
    double target = 0.0;
    bool monotone_stabilization = false;
};

/// Stationary statistics for each alpha (decreasing) with histograms on common
/// edges. When scale_horizon is set the burn-in and horizon are multiplied by
/// alphas.front() / alpha.
SweepReport inviscid_sweep(std::span<const double> alphas, const SdeConfig& cfg,
                           const StationaryOptions& opt, bool scale_horizon = true);

struct GrowthSample {
    int offset = 0;            // the integer i
    double initial_ratio = 0.0;
    double max_ratio = 0.0;
    std::optional<double> first_crossing; // time the ratio first exceeded 2
};

struct GrowthReport {
    std::vector<GrowthSample> samples;
    double max_ratio = 0.0;
    std::size_t crossings = 0;
};

/// Smallest integer i >= 0 with norm <= 2 xi(1 + i).
int envelope_offset(double norm, Gauge xi);

/// Runs the deterministic flow from each sample to T and records
/// sup_t |u(t)|_{H^sigma} / xi(1 + i + ln(1 + t)).
GrowthReport growth_envelope_check(std::span<const SpectralField> initial, const FlowConfig& cfg,
                                   const RadialGrid& grid, Gauge xi, double sigma,
                                   std::size_t observe_every = 10,
                                   std::optional<int> fixed_offset = std::nullopt);

struct DensityReport {
    std::vector<double> edges;
    std::vector<double> masses; // bin probabilities, sum to 1
    double bin_width = 0.0;
    double max_bin_mass = 0.0;
    double zero_fraction = 0.0; // samples exactly equal to 0
    bool atomic = false;        // some bin holds more than atom_threshold of the mass
};

/// Normalized histogram with Freedman-Diaconis bin width.
DensityReport empirical_density(std::span<const double> samples, double atom_threshold = 0.2);

} // namespace nlsball
