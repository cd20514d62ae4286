#include "nlsball/measure_lab.hpp"

#include "nlsball/errors.hpp"
#include "nlsball/fit.hpp"
#include "nlsball/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlsball {

std::string_view observable_name(Observable o)
{
    switch (o) {
    case Observable::Mass: return "mass";
    case Observable::Energy: return "energy";
    case Observable::MassRate: return "mass_rate";
    case Observable::EnergyRate: return "energy_rate";
    case Observable::SobolevBeta: return "sobolev_beta_minus";
    case Observable::PotentialNorm: return "potential_norm";
    }
    return "?";
}

ObservableValues evaluate_observables(const SpectralField& u, const DissipationSpec& spec,
                                      const RadialGrid& grid)
{
    ObservableValues v{};
    v[0] = mass(u);
    v[1] = energy(u, spec.q, grid);
    v[2] = mass_dissipation_rate(u, spec, grid);
    v[3] = energy_dissipation_rate(u, spec, grid);
    v[4] = sobolev_norm(u, spec.beta - spec.delta);
    v[5] = lp_norm(grid.synthesize(u), grid, 2.0 * spec.q + 2.0);
    return v;
}

// --- EnsembleAccumulator -----------------------------------------------------

EnsembleAccumulator::EnsembleAccumulator(const AccumulatorLayout& layout)
    : layout_(layout),
      mass_hist_(0.0, layout.mass_max, layout.bins),
      energy_hist_(0.0, layout.energy_max, layout.bins)
{
}

void EnsembleAccumulator::add(const ObservableValues& v)
{
    for (std::size_t i = 0; i < observable_count; ++i)
        stats_[i].add(v[i]);
    mass_hist_.add(v[0]);
    energy_hist_.add(v[1]);
    mass_.push_back(v[0]);
    energy_.push_back(v[1]);
    mass_rate_.push_back(v[2]);
    ++open_;
}

void EnsembleAccumulator::close_trajectory()
{
    if (open_ > 0)
        sizes_.push_back(open_);
    open_ = 0;
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other)
{
    if (other.count() == 0 && other.sizes_.empty())
        return;
    if (count() == 0 && sizes_.empty()) {
        *this = other;
        return;
    }
    for (std::size_t i = 0; i < observable_count; ++i)
        stats_[i].merge(other.stats_[i]);
    mass_hist_.merge(other.mass_hist_);
    energy_hist_.merge(other.energy_hist_);
    mass_.insert(mass_.end(), other.mass_.begin(), other.mass_.end());
    energy_.insert(energy_.end(), other.energy_.begin(), other.energy_.end());
    mass_rate_.insert(mass_rate_.end(), other.mass_rate_.begin(), other.mass_rate_.end());
    sizes_.insert(sizes_.end(), other.sizes_.begin(), other.sizes_.end());
    open_ += other.open_;
}

// --- stationary averages -----------------------------------------------------

namespace {

struct TrajectoryOutcome {
    bool divergent = false;
    std::vector<ObservableValues> samples;
    double first_half = 0.0;
    double second_half = 0.0;
    SpectralField final_state;
    std::size_t halvings = 0;
};

TrajectoryOutcome run_stationary_trajectory(const SdeConfig& cfg, const StationaryOptions& opt,
                                            const RadialGrid& grid, const SpectralField& u0,
                                            std::size_t index)
{
    TrajectoryOutcome out;
    Rng rng = trajectory_rng(cfg.seed, index);
    SdeStepper stepper(cfg, grid);
    SpectralField u = u0;
    const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / cfg.dt - 1e-9));
    const double mid = 0.5 * (opt.burn_in + opt.horizon);
    RunningStat first, second;
    try {
        for (std::size_t k = 1; k <= steps; ++k) {
            stepper.step(u, rng);
            const double t = static_cast<double>(k) * cfg.dt;
            if (t < opt.burn_in || k % opt.sample_every != 0)
                continue;
            const auto v = evaluate_observables(u, cfg.dissipation, grid);
            out.samples.push_back(v);
            (t < mid ? first : second).add(v[2]);
        }
    } catch (const DivergenceError&) {
        out.divergent = true;
        out.samples.clear();
        return out;
    }
    out.first_half = first.mean();
    out.second_half = second.mean();
    out.final_state = std::move(u);
    out.halvings = stepper.halvings();
    return out;
}

double integrated_autocorrelation(const std::vector<const TrajectoryOutcome*>& runs, double mean)
{
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto* r : runs)
        len = std::min(len, r->samples.size());
    if (runs.empty() || len < 8)
        return 0.0;
    const std::size_t max_lag = len / 4;
    std::vector<double> acov(max_lag + 1, 0.0);
    for (const auto* r : runs) {
        for (std::size_t lag = 0; lag <= max_lag; ++lag) {
            double s = 0.0;
            for (std::size_t i = 0; i + lag < len; ++i)
                s += (r->samples[i][2] - mean) * (r->samples[i + lag][2] - mean);
            acov[lag] += s / static_cast<double>(len - lag);
        }
    }
    if (!(acov[0] > 0.0))
        return 0.0;
    double tau = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        const double rho = acov[lag] / acov[0];
        if (rho <= 0.0)
            break;
        tau += 2.0 * rho;
    }
    return tau;
}

} // namespace

StationaryReport stationary_average(const SdeConfig& cfg, const StationaryOptions& opt,
                                    const std::optional<SpectralField>& u0)
{
    if (!(opt.burn_in >= 0.0 && opt.burn_in < opt.horizon))
        throw ValidationError("stationary averages need 0 <= burn_in < horizon");
    if (opt.trajectories == 0 || opt.sample_every == 0)
        throw ValidationError("stationary averages need trajectories > 0 and sample_every > 0");
    const RadialGrid grid(dealiased_resolution(cfg.dim(), cfg.dissipation.q));
    const SpectralField start = u0 ? *u0 : SpectralField(cfg.dim());
    if (start.dim() != cfg.dim())
        throw ValidationError("initial state dimension does not match the noise dimension");

    auto outcomes = parallel_map(opt.trajectories, opt.workers, [&](std::size_t i) {
        return run_stationary_trajectory(cfg, opt, grid, start, i);
    });

    StationaryReport rep;
    rep.a0 = cfg.noise.A(0.0);
    rep.target = 0.5 * rep.a0;
    rep.trajectories = opt.trajectories;

    std::vector<const TrajectoryOutcome*> good;
    double seen_mass = 0.0, seen_energy = 0.0;
    for (const auto& o : outcomes) {
        rep.halvings += o.halvings;
        if (o.divergent || o.samples.empty()) {
            rep.divergent += o.divergent ? 1 : 0;
            continue;
        }
        good.push_back(&o);
        for (const auto& v : o.samples) {
            seen_mass = std::max(seen_mass, v[0]);
            seen_energy = std::max(seen_energy, v[1]);
        }
    }
    AccumulatorLayout layout = opt.layout;
    if (opt.auto_range) {
        layout.mass_max = seen_mass > 0.0 ? 1.05 * seen_mass : 1.0;
        layout.energy_max = seen_energy > 0.0 ? 1.05 * seen_energy : 1.0;
    }

    rep.pooled = EnsembleAccumulator(layout);
    std::array<RunningStat, observable_count> per_traj{};
    RunningStat half_diff, first, second;
    for (const auto* o : good) {
        EnsembleAccumulator acc(layout);
        std::array<RunningStat, observable_count> local{};
        for (const auto& v : o->samples) {
            acc.add(v);
            for (std::size_t i = 0; i < observable_count; ++i)
                local[i].add(v[i]);
        }
        acc.close_trajectory();
        rep.pooled.merge(acc);
        for (std::size_t i = 0; i < observable_count; ++i)
            per_traj[i].add(local[i].mean());
        half_diff.add(o->first_half - o->second_half);
        first.add(o->first_half);
        second.add(o->second_half);
        if (opt.keep_final_states)
            rep.final_states.push_back(o->final_state);
    }

    for (std::size_t i = 0; i < observable_count; ++i) {
        auto& f = rep.functionals[i];
        f.name = observable_name(static_cast<Observable>(i));
        f.mean = per_traj[i].mean();
        f.standard_error = per_traj[i].standard_error();
        f.n = per_traj[i].count();
    }
    const auto& rate = rep.summary(Observable::MassRate);
    rep.mass_rate_relative_deviation = rep.target > 0 ? (rate.mean - rep.target) / rep.target : 0.0;
    rep.first_half_mass_rate = first.mean();
    rep.second_half_mass_rate = second.mean();
    rep.half_difference_stderr = half_diff.standard_error();
    rep.stationarity_ok = std::abs(half_diff.mean()) <= 3.0 * half_diff.standard_error() ||
                          half_diff.count() < 2;
    const double tau = integrated_autocorrelation(good, rate.mean);
    rep.autocorrelation_time = tau * static_cast<double>(opt.sample_every) * cfg.dt;
    return rep;
}

// --- tails -------------------------------------------------------------------

std::vector<double> geometric_ladder(double r_min, double r_max, std::size_t points)
{
    if (!(r_min > 0.0) || !(r_max > r_min) || points < 2)
        throw ValidationError("geometric ladder needs 0 < r_min < r_max and >= 2 points");
    std::vector<double> out(points);
    const double ratio = std::log(r_max / r_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = r_min * std::exp(ratio * static_cast<double>(i));
    out.back() = r_max;
    return out;
}

TailReport tail_estimate(const EnsembleAccumulator& acc, std::span<const double> R_ladder)
{
    TailReport rep;
    const auto mass = acc.mass_samples();
    const auto rate = acc.mass_rate_samples();
    rep.full_average = acc.stat(Observable::MassRate).mean();

    std::vector<std::size_t> sizes(acc.trajectory_sizes().begin(), acc.trajectory_sizes().end());
    std::size_t covered = 0;
    for (auto s : sizes)
        covered += s;
    if (covered < mass.size())
        sizes.push_back(mass.size() - covered);

    for (double R : R_ladder) {
        const CutoffSpec spec{R};
        RunningStat all, per_traj;
        std::size_t offset = 0;
        for (auto s : sizes) {
            RunningStat local;
            for (std::size_t i = offset; i < offset + s; ++i) {
                const double x = rate[i] * (1.0 - cutoff(mass[i], spec));
                local.add(x);
                all.add(x);
            }
            per_traj.add(local.mean());
            offset += s;
        }
        const double se = per_traj.count() > 1 ? per_traj.standard_error() : all.standard_error();
        rep.rows.push_back({R, all.mean(), se});
    }

    std::vector<double> xs, ys;
    for (const auto& r : rep.rows)
        if (r.tail > 0.0) {
            xs.push_back(r.R);
            ys.push_back(r.tail);
        }
    if (xs.size() >= 2)
        rep.fitted_slope = loglog_fit(xs, ys).slope;
    if (rep.rows.size() >= 2) {
        const auto& lo = rep.rows.front();
        const auto& hi = rep.rows.back();
        const double lhs = hi.R * hi.tail;
        const double rhs = lo.R * lo.tail;
        const double slack = 3.0 * std::hypot(hi.R * hi.standard_error, lo.R * lo.standard_error);
        rep.decays_like_inverse_R = lhs <= rhs + slack;
    }
    return rep;
}

// --- inviscid sweep ----------------------------------------------------------

SweepReport inviscid_sweep(std::span<const double> alphas, const SdeConfig& cfg,
                           const StationaryOptions& opt, bool scale_horizon)
{
    if (alphas.empty())
        throw ValidationError("inviscid sweep needs at least one alpha");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] > alphas[i - 1])
            throw ValidationError("inviscid sweep alphas must be nonincreasing");

    SweepReport rep;
    rep.target = 0.5 * cfg.noise.A(0.0);
    std::vector<StationaryReport> runs;
    double mass_max = 0.0, energy_max = 0.0;
    for (double a : alphas) {
        SdeConfig c = cfg;
        c.alpha = a;
        StationaryOptions o = opt;
        o.keep_final_states = false;
        if (scale_horizon) {
            const double f = alphas.front() / a;
            o.burn_in *= f;
            o.horizon *= f;
            o.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                         std::llround(opt.sample_every * f)));
        }
        runs.push_back(stationary_average(c, o));
        for (double m : runs.back().pooled.mass_samples())
            mass_max = std::max(mass_max, m);
        for (double e : runs.back().pooled.energy_samples())
            energy_max = std::max(energy_max, e);
    }
    mass_max = mass_max > 0 ? 1.05 * mass_max : 1.0;
    energy_max = energy_max > 0 ? 1.05 * energy_max : 1.0;

    for (std::size_t i = 0; i < runs.size(); ++i) {
        SweepEntry e;
        e.alpha = alphas[i];
        e.mass_rate_mean = runs[i].summary(Observable::MassRate).mean;
        e.mass_rate_stderr = runs[i].summary(Observable::MassRate).standard_error;
        e.energy_rate_mean = runs[i].summary(Observable::EnergyRate).mean;
        e.energy_rate_stderr = runs[i].summary(Observable::EnergyRate).standard_error;
        e.divergent = runs[i].divergent;
        e.mass_histogram = Histogram(0.0, mass_max, opt.layout.bins);
        e.energy_histogram = Histogram(0.0, energy_max, opt.layout.bins);
        for (double m : runs[i].pooled.mass_samples())
            e.mass_histogram.add(m);
        for (double x : runs[i].pooled.energy_samples())
            e.energy_histogram.add(x);
        rep.entries.push_back(std::move(e));
    }
    for (std::size_t i = 1; i < rep.entries.size(); ++i) {
        rep.mass_distances.push_back(
            histogram_l1_distance(rep.entries[i - 1].mass_histogram, rep.entries[i].mass_histogram));
        rep.energy_distances.push_back(histogram_l1_distance(rep.entries[i - 1].energy_histogram,
                                                             rep.entries[i].energy_histogram));
    }
    rep.monotone_stabilization = true;
    for (std::size_t i = 1; i < rep.mass_distances.size(); ++i)
        if (rep.mass_distances[i] > rep.mass_distances[i - 1])
            rep.monotone_stabilization = false;
    return rep;
}

// --- growth envelope ---------------------------------------------------------

int envelope_offset(double norm, Gauge xi)
{
    int i = 0;
    const double guess = gauge_inverse(xi, 0.5 * norm) - 1.0;
    if (guess > 0.0)
        i = static_cast<int>(std::ceil(guess));
    while (i > 0 && norm <= 2.0 * gauge_value(xi, static_cast<double>(i)))
        --i;
    while (norm > 2.0 * gauge_value(xi, 1.0 + static_cast<double>(i)))
        ++i;
    return i;
}

GrowthReport growth_envelope_check(std::span<const SpectralField> initial, const FlowConfig& cfg,
                                   const RadialGrid& grid, Gauge xi, double sigma,
                                   std::size_t observe_every, std::optional<int> fixed_offset)
{
    GrowthReport rep;
    for (const auto& u0 : initial) {
        GrowthSample s;
        s.offset = fixed_offset ? *fixed_offset : envelope_offset(sobolev_norm(u0, sigma), xi);
        auto ratio = [&](double t, const SpectralField& u) {
            return sobolev_norm(u, sigma) /
                   gauge_value(xi, 1.0 + s.offset + std::log1p(std::abs(t)));
        };
        s.initial_ratio = ratio(0.0, u0);
        ObservationPlan plan;
        plan.every = observe_every;
        plan.callback = [&](double t, const SpectralField& u) {
            const double r = ratio(t, u);
            s.max_ratio = std::max(s.max_ratio, r);
            if (r > 2.0 && !s.first_crossing)
                s.first_crossing = t;
        };
        integrate(u0, cfg, grid, plan);
        rep.max_ratio = std::max(rep.max_ratio, s.max_ratio);
        if (s.first_crossing)
            ++rep.crossings;
        rep.samples.push_back(s);
    }
    return rep;
}

// --- densities ---------------------------------------------------------------

namespace {

double quantile_sorted(const std::vector<double>& v, double p)
{
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double f = pos - static_cast<double>(lo);
    return v[lo] + f * (v[hi] - v[lo]);
}

} // namespace

DensityReport empirical_density(std::span<const double> samples, double atom_threshold)
{
    DensityReport rep;
    if (samples.empty())
        return rep;
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    rep.zero_fraction =
        static_cast<double>(std::count(v.begin(), v.end(), 0.0)) / n;
    const double lo = v.front(), hi = v.back();
    if (hi == lo) {
        rep.edges = {lo - 0.5, lo + 0.5};
        rep.masses = {1.0};
        rep.bin_width = 1.0;
        rep.max_bin_mass = 1.0;
        rep.atomic = true;
        return rep;
    }
    const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    std::size_t bins = 0;
    if (iqr > 0.0)
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / (2.0 * iqr * std::cbrt(1.0 / n))));
    if (bins == 0)
        bins = static_cast<std::size_t>(std::ceil(std::sqrt(n)));
    bins = std::clamp<std::size_t>(bins, 1, 100000);
    rep.bin_width = (hi - lo) / static_cast<double>(bins);
    Histogram h(lo, hi, bins);
    for (double x : v)
        h.add(x);
    rep.edges = h.edges();
    rep.masses = h.masses();
    rep.max_bin_mass = *std::max_element(rep.masses.begin(), rep.masses.end());
    rep.atomic = rep.max_bin_mass > atom_threshold;
    return rep;
}

} // namespace nlsball
