#include "nlsball/runner.hpp"

#include "nlsball/checkpoint.hpp"
#include "nlsball/errors.hpp"
#include "nlsball/estimates.hpp"
#include "nlsball/output.hpp"
#include "nlsball/parallel.hpp"
#include "nlsball/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace nlsball {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using Rows = std::vector<std::vector<CsvCell>>;

namespace {

class ConservationFailure : public DivergenceError {
public:
    using DivergenceError::DivergenceError;
};

struct Context {
    const RunConfig& cfg;
    std::ostream& log;
    RunResult& result;

    fs::path path(const std::string& name) const { return cfg.output_dir / name; }

    void csv(const std::string& name, const std::vector<std::string>& header, const Rows& rows)
    {
        write_csv(path(name), header, rows, cfg.hash);
        result.artifacts.emplace_back(name);
    }

    ojson report(std::string_view kind) const
    {
        ojson j = report_header(kind, cfg.hash);
        j["command"] = to_string(cfg.command);
        j["seed"] = cfg.master_seed;
        return j;
    }

    void json(const std::string& name, ojson doc)
    {
        doc["config"] = cfg.canonical;
        write_json(path(name), doc);
        result.artifacts.emplace_back(name);
    }

    void checkpoint(const std::string& name, std::vector<Snapshot> snaps, std::size_t dim)
    {
        Checkpoint ck;
        ck.header = {cfg.hash, cfg.master_seed, dim};
        ck.snapshots = std::move(snaps);
        save_checkpoint(path(name), ck);
        result.artifacts.emplace_back(name);
    }
};

ojson fit_json(const LinearFit& f)
{
    ojson j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    return j;
}

// --- deterministic flow -----------------------------------------------------

void simulate_det(Context& ctx)
{
    const auto& d = ctx.cfg.det;
    const SpectralField u0 = d.initial.build(ctx.cfg.dim);
    const RadialGrid grid(dealiased_resolution(ctx.cfg.dim, d.flow.q));

    std::vector<std::string> header{"t", "mass", "energy"};
    for (double s : d.sobolev_indices)
        header.push_back("sobolev_" + format_double(s));

    std::vector<TrajectoryRow> log;
    SpectralField final_state;
    ojson rep = ctx.report("simulate-det");
    if (d.flow.scheme == Scheme::SplitStepStrang) {
        ObservationPlan plan;
        plan.every = d.observe_every;
        plan.sobolev_indices = d.sobolev_indices;
        FlowResult res = integrate(u0, d.flow, grid, plan);
        log = std::move(res.log);
        final_state = std::move(res.final_state);
        rep["scheme"] = "split-step";
        rep["steps"] = res.steps;
    } else {
        const PicardResult res = picard_solve(u0, d.flow, grid, d.picard_sobolev);
        for (std::size_t k = 0; k < res.times.size(); ++k)
            if (k % std::max<std::size_t>(1, d.observe_every) == 0 || k + 1 == res.times.size())
                log.push_back(observe(res.times[k], res.path[k], d.flow.q, grid, d.sobolev_indices));
        final_state = res.final_state;
        rep["scheme"] = "picard";
        rep["iterations"] = res.iterations;
        rep["residual"] = res.residual;
        rep["contraction"] = res.contraction;
    }

    Rows rows;
    double mass_drift = 0.0, energy_drift = 0.0;
    const double m0 = log.front().mass, e0 = log.front().energy;
    for (const auto& r : log) {
        std::vector<CsvCell> row{r.t, r.mass, r.energy};
        for (double s : r.sobolev)
            row.emplace_back(s);
        rows.push_back(std::move(row));
        if (m0 != 0.0)
            mass_drift = std::max(mass_drift, std::abs(r.mass - m0) / std::abs(m0));
        if (e0 != 0.0)
            energy_drift = std::max(energy_drift, std::abs(r.energy - e0) / std::abs(e0));
    }
    ctx.csv("trajectory.csv", header, rows);
    ctx.checkpoint("final.ckpt", {{0.0, u0}, {log.back().t, final_state}}, ctx.cfg.dim);

    const bool ok = mass_drift < d.conservation_tolerance && energy_drift < d.conservation_tolerance;
    rep["final_time"] = log.back().t;
    rep["mass_relative_drift"] = mass_drift;
    rep["energy_relative_drift"] = energy_drift;
    rep["conservation_checked"] = d.check_conservation;
    rep["conservation_tolerance"] = d.conservation_tolerance;
    rep["conservation_ok"] = ok;
    ctx.json("summary.json", rep);
    ctx.log << "simulate-det: mass drift " << format_double(mass_drift) << ", energy drift "
            << format_double(energy_drift) << '\n';
    if (d.check_conservation && !ok)
        throw ConservationFailure("relative drift (mass " + format_double(mass_drift) +
                                  ", energy " + format_double(energy_drift) +
                                  ") exceeds tolerance " + format_double(d.conservation_tolerance));
}

// --- stochastic flow --------------------------------------------------------

ojson warnings_json(const RunConfig& cfg)
{
    ojson w = ojson::array();
    if (auto msg = cfg.sde.sde.noise.admissibility_warning(cfg.sde.admissibility_threshold))
        w.push_back(*msg);
    return w;
}

void simulate_sde_cmd(Context& ctx)
{
    const auto& s = ctx.cfg.sde;
    const SpectralField u0 = s.initial.build(ctx.cfg.dim);
    const RadialGrid grid(dealiased_resolution(ctx.cfg.dim, s.sde.dissipation.q));
    const auto ensemble = parallel_map(s.trajectories, ctx.cfg.workers, [&](std::size_t i) {
        Rng rng = trajectory_rng(s.sde.seed, i);
        return simulate_sde(u0, s.sde, grid, rng, s.observe_every);
    });

    const std::size_t points = ensemble.front().times.size();
    Rows rows;
    for (std::size_t k = 0; k < points; ++k) {
        RunningStat m, r;
        for (const auto& tr : ensemble) {
            m.add(tr.mass[k]);
            r.add(tr.mass_rate[k]);
        }
        rows.push_back({ensemble.front().times[k], m.mean(), m.standard_error(), r.mean(),
                        r.standard_error()});
    }
    ctx.csv("ensemble.csv", {"t", "mass_mean", "mass_stderr", "mass_rate_mean", "mass_rate_stderr"},
            rows);

    std::vector<Snapshot> finals;
    std::size_t halvings = 0;
    for (const auto& tr : ensemble) {
        finals.push_back({tr.times.back(), tr.final_state});
        halvings += tr.halvings;
    }
    ctx.checkpoint("final_states.ckpt", std::move(finals), ctx.cfg.dim);

    const ItoResidual ito = ito_mass_residual(ensemble, s.sde);
    ojson rep = ctx.report("simulate-sde");
    rep["trajectories"] = s.trajectories;
    rep["a0"] = s.sde.noise.A(0.0);
    rep["a1"] = s.sde.noise.A(1.0);
    rep["ito_residual"] = ito.residual;
    rep["ito_standard_error"] = ito.standard_error;
    rep["ito_within_3se"] = std::abs(ito.residual) <= 3.0 * ito.standard_error;
    rep["damping_halvings"] = halvings;
    rep["warnings"] = warnings_json(ctx.cfg);
    ctx.json("report.json", rep);
    ctx.log << "simulate-sde: Ito residual " << format_double(ito.residual) << " +- "
            << format_double(ito.standard_error) << '\n';
}

SdeConfig stationary_sde(const RunConfig& cfg)
{
    return cfg.sde.sde;
}

void histogram_rows(Rows& rows, std::string_view name, const Histogram& h)
{
    const auto edges = h.edges();
    const auto masses = h.masses();
    const auto counts = h.counts();
    for (std::size_t i = 0; i < masses.size(); ++i)
        rows.push_back({std::string(name), edges[i], edges[i + 1], counts[i], masses[i]});
}

ojson histogram_json(const Histogram& h)
{
    return {{"edges", h.edges()}, {"masses", h.masses()}};
}

void stationary_stats(Context& ctx)
{
    const auto& st = ctx.cfg.stationary;
    const SdeConfig sde = stationary_sde(ctx.cfg);
    const StationaryReport rep = stationary_average(sde, st.options);
    if (rep.divergent == rep.trajectories)
        throw DivergenceError("every stationary trajectory diverged");

    Rows frows;
    for (const auto& f : rep.functionals)
        frows.push_back({std::string(f.name), f.mean, f.standard_error, std::uint64_t{f.n}});
    ctx.csv("functionals.csv", {"functional", "mean", "standard_error", "trajectories"}, frows);

    Rows hrows;
    histogram_rows(hrows, "mass", rep.pooled.mass_histogram());
    histogram_rows(hrows, "energy", rep.pooled.energy_histogram());
    ctx.csv("histograms.csv", {"observable", "bin_lo", "bin_hi", "count", "probability"}, hrows);

    const double mean_mass = rep.summary(Observable::Mass).mean;
    const auto ladder = geometric_ladder(mean_mass, mean_mass * std::pow(10.0, st.tail_decades),
                                         st.tail_points);
    const TailReport tail = tail_estimate(rep.pooled, ladder);
    Rows trows;
    for (const auto& r : tail.rows)
        trows.push_back({r.R, r.tail, r.standard_error});
    ctx.csv("tail.csv", {"R", "tail", "standard_error"}, trows);

    const DensityReport dens = empirical_density(rep.pooled.mass_samples());
    Rows drows;
    for (std::size_t i = 0; i < dens.masses.size(); ++i)
        drows.push_back({dens.edges[i], dens.edges[i + 1], dens.masses[i]});
    ctx.csv("mass_density.csv", {"bin_lo", "bin_hi", "probability"}, drows);

    std::vector<Snapshot> finals;
    for (const auto& u : rep.final_states)
        finals.push_back({st.options.horizon, u});
    ctx.checkpoint("stationary_states.ckpt", std::move(finals), ctx.cfg.dim);

    const auto& rate = rep.summary(Observable::MassRate);
    ojson j = ctx.report("stationary-stats");
    j["a0"] = rep.a0;
    j["target_mass_rate"] = rep.target;
    j["mass_rate_mean"] = rate.mean;
    j["mass_rate_standard_error"] = rate.standard_error;
    j["mass_rate_relative_deviation"] = rep.mass_rate_relative_deviation;
    j["trajectories"] = rep.trajectories;
    j["divergent"] = rep.divergent;
    j["damping_halvings"] = rep.halvings;
    j["autocorrelation_time"] = rep.autocorrelation_time;
    j["first_half_mass_rate"] = rep.first_half_mass_rate;
    j["second_half_mass_rate"] = rep.second_half_mass_rate;
    j["half_difference_standard_error"] = rep.half_difference_stderr;
    j["stationarity_ok"] = rep.stationarity_ok;
    j["tail_fitted_slope"] = tail.fitted_slope;
    j["tail_decays_like_inverse_R"] = tail.decays_like_inverse_R;
    j["mass_density_atomic"] = dens.atomic;
    j["mass_density_zero_fraction"] = dens.zero_fraction;
    ojson funcs;
    for (const auto& f : rep.functionals)
        funcs[std::string(f.name)] = {{"mean", f.mean}, {"stderr", f.standard_error}, {"n", f.n}};
    j["functionals"] = funcs;
    j["histograms"] = {{"mass", histogram_json(rep.pooled.mass_histogram())},
                       {"energy", histogram_json(rep.pooled.energy_histogram())}};
    j["warnings"] = warnings_json(ctx.cfg);
    ctx.json("report.json", j);
    ctx.log << "stationary-stats: mass rate " << format_double(rate.mean) << " +- "
            << format_double(rate.standard_error) << " (target " << format_double(rep.target)
            << ")\n";
}

void inviscid_sweep_cmd(Context& ctx)
{
    const auto& st = ctx.cfg.stationary;
    const SweepReport rep = inviscid_sweep(ctx.cfg.sweep.alphas, stationary_sde(ctx.cfg),
                                           st.options, ctx.cfg.sweep.scale_horizon);
    Rows rows, hrows, drows;
    for (const auto& e : rep.entries) {
        rows.push_back({e.alpha, e.mass_rate_mean, e.mass_rate_stderr,
                        rep.target > 0 ? (e.mass_rate_mean - rep.target) / rep.target : 0.0,
                        e.energy_rate_mean, e.energy_rate_stderr, std::uint64_t{e.divergent}});
        const std::string tag = format_double(e.alpha);
        histogram_rows(hrows, "mass@" + tag, e.mass_histogram);
        histogram_rows(hrows, "energy@" + tag, e.energy_histogram);
    }
    for (std::size_t i = 0; i < rep.mass_distances.size(); ++i)
        drows.push_back({rep.entries[i].alpha, rep.entries[i + 1].alpha, rep.mass_distances[i],
                         rep.energy_distances[i]});
    ctx.csv("sweep.csv",
            {"alpha", "mass_rate_mean", "mass_rate_stderr", "relative_deviation", "energy_rate_mean",
             "energy_rate_stderr", "divergent"},
            rows);
    ctx.csv("sweep_histograms.csv", {"observable", "bin_lo", "bin_hi", "count", "probability"},
            hrows);
    ctx.csv("sweep_distances.csv", {"alpha_from", "alpha_to", "mass_l1", "energy_l1"}, drows);

    ojson j = ctx.report("inviscid-sweep");
    j["target_mass_rate"] = rep.target;
    j["monotone_stabilization"] = rep.monotone_stabilization;
    double e_lo = 0.0, e_hi = 0.0;
    for (const auto& e : rep.entries) {
        e_lo = (e_lo == 0.0) ? e.energy_rate_mean : std::min(e_lo, e.energy_rate_mean);
        e_hi = std::max(e_hi, e.energy_rate_mean);
    }
    j["energy_rate_max_over_min"] = e_lo > 0.0 ? e_hi / e_lo : 0.0;
    j["mass_distances"] = rep.mass_distances;
    j["energy_distances"] = rep.energy_distances;
    ctx.json("report.json", j);
    ctx.log << "inviscid-sweep: " << rep.entries.size() << " alphas\n";
}

void growth_check(Context& ctx)
{
    const auto& g = ctx.cfg.growth;
    std::vector<SpectralField> data;
    if (!g.checkpoint.empty()) {
        const Checkpoint ck = load_checkpoint(g.checkpoint);
        if (ck.header.dim != ctx.cfg.dim)
            throw ValidationError("growth.checkpoint has dimension " + std::to_string(ck.header.dim) +
                                  ", configuration has dim " + std::to_string(ctx.cfg.dim));
        for (const auto& s : ck.snapshots)
            if (data.size() < g.samples)
                data.push_back(s.state);
    } else {
        StationaryOptions opt = ctx.cfg.stationary.options;
        opt.trajectories = g.samples;
        opt.keep_final_states = true;
        data = stationary_average(stationary_sde(ctx.cfg), opt).final_states;
    }
    if (data.empty())
        throw DivergenceError("no stationary sample available to seed the growth check");

    const RadialGrid grid(dealiased_resolution(ctx.cfg.dim, g.flow.q));
    const GrowthReport rep =
        growth_envelope_check(data, g.flow, grid, g.xi, g.sigma, g.observe_every, g.offset);

    Rows rows;
    ojson findings = ojson::array();
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const auto& s = rep.samples[i];
        rows.push_back({std::uint64_t{i}, std::int64_t{s.offset}, s.initial_ratio, s.max_ratio,
                        s.first_crossing ? format_double(*s.first_crossing) : std::string()});
        if (s.first_crossing) {
            ojson f;
            f["sample"] = i;
            f["offset"] = s.offset;
            f["first_crossing_time"] = *s.first_crossing;
            f["max_ratio"] = s.max_ratio;
            findings.push_back(f);
        }
    }
    ctx.csv("growth.csv", {"sample", "offset", "initial_ratio", "max_ratio", "first_crossing"}, rows);
    ojson j = ctx.report("growth-check");
    j["sigma"] = g.sigma;
    j["gauge"] = to_string(g.xi);
    j["T"] = g.flow.T;
    j["max_ratio"] = rep.max_ratio;
    j["crossings"] = rep.crossings;
    j["findings"] = findings;
    ctx.json("report.json", j);
    ctx.log << "growth-check: max ratio " << format_double(rep.max_ratio) << ", "
            << rep.crossings << " crossing(s)\n";
}

// --- estimates --------------------------------------------------------------

std::uint64_t naive_pairs(std::uint64_t N, std::uint64_t M)
{
    std::uint64_t c = 0;
    for (std::uint64_t a = N; a <= 2 * N; ++a)
        for (std::uint64_t b = 0; a * a + b * b <= M; ++b)
            if (a * a + b * b == M)
                ++c;
    return c;
}

void verify_counting(Context& ctx)
{
    const auto& c = ctx.cfg.counting;
    const CountingReport constrained = counting_exponent(c.ladder, true);
    const CountingReport free = counting_exponent(c.ladder, false);
    Rows rows;
    for (const auto* rep : {&constrained, &free})
        for (const auto& r : rep->rows)
            rows.push_back({std::string(rep == &constrained ? "banded" : "unconstrained"), r.N,
                            r.max_count, r.argmax, rep->fit.slope, rep->fit.r2});
    ctx.csv("counting.csv", {"variant", "N", "max_count", "argmax_M", "fit_slope", "r2"}, rows);

    std::uint64_t mismatches = 0;
    for (std::uint64_t M = 0; M <= c.oracle_max_M; ++M)
        if (count_pairs(c.oracle_N, M) != naive_pairs(c.oracle_N, M))
            ++mismatches;

    Rows lrows;
    std::vector<double> lx, ly;
    for (auto N : c.lambda_ladder) {
        const std::uint64_t bands[] = {N, N, N};
        const auto mx = lambda_max_count(bands);
        const double norm = static_cast<double>(mx) / static_cast<double>(N);
        lrows.push_back({std::uint64_t{3}, N, mx, norm});
        lx.push_back(static_cast<double>(N));
        ly.push_back(norm);
    }
    ctx.csv("lambda.csv", {"m", "N", "max_count", "max_count_over_N3"}, lrows);

    ojson j = ctx.report("verify-counting");
    j["banded_fit"] = fit_json(constrained.fit);
    j["unconstrained_fit"] = fit_json(free.fit);
    j["banded_slope_below_0_35"] = constrained.fit.slope < 0.35;
    j["oracle_N"] = c.oracle_N;
    j["oracle_max_M"] = c.oracle_max_M;
    j["oracle_mismatches"] = mismatches;
    if (lx.size() >= 2)
        j["lambda_fit"] = fit_json(loglog_fit(lx, ly));
    ctx.json("report.json", j);
    ctx.log << "verify-counting: banded slope " << format_double(constrained.fit.slope)
            << ", unconstrained slope " << format_double(free.fit.slope) << ", oracle mismatches "
            << mismatches << '\n';
    if (mismatches)
        throw ValidationError("pair count disagrees with the enumeration oracle");
}

void verify_eigen_norms(Context& ctx)
{
    const auto& e = ctx.cfg.eigen_norms;
    Rows rows;
    ojson fits = ojson::array();
    for (double p : e.p) {
        const NormReport rep = eigen_norm_exponent(p, e.ladder, e.resolution);
        for (const auto& r : rep.rows)
            rows.push_back({p, std::uint64_t{r.n}, r.value, rep.fit.slope, rep.fit.r2});
        ojson f = fit_json(rep.fit);
        f["p"] = p;
        f["predicted_slope"] = p > 3.0 ? 1.0 - 3.0 / p : 0.0;
        fits.push_back(f);
        ctx.log << "verify-eigen-norms: p=" << format_double(p) << " slope "
                << format_double(rep.fit.slope) << '\n';
    }
    ctx.csv("eigen_norms.csv", {"p", "n", "norm", "fit_slope", "r2"}, rows);
    ojson j = ctx.report("verify-eigen-norms");
    j["fits"] = fits;
    ctx.json("report.json", j);
}

void verify_product_norms(Context& ctx)
{
    const auto& p = ctx.cfg.product_norms;
    const NormReport rep = product_norm_exponent(p.m, p.ladder, p.resolution);
    Rows rows;
    for (const auto& r : rep.rows)
        rows.push_back({std::int64_t{p.m}, std::uint64_t{r.n}, r.value, rep.fit.slope, rep.fit.r2});
    ctx.csv("product_norms.csv", {"m", "n", "norm_squared", "fit_slope", "r2"}, rows);
    ojson j = ctx.report("verify-product-norms");
    j["m"] = p.m;
    j["fit"] = fit_json(rep.fit);
    j["predicted_slope"] = 2 * p.m - 3;
    ctx.json("report.json", j);
    ctx.log << "verify-product-norms: slope " << format_double(rep.fit.slope) << " (predicted "
            << 2 * p.m - 3 << ")\n";
}

void verify_multilinear(Context& ctx)
{
    const auto& m = ctx.cfg.multilinear;
    MultilinearOptions opt;
    opt.time_factor = m.time_factor;
    opt.derivative = m.derivative;
    const MultilinearReport rep =
        multilinear_ladder(m.m, m.ladder, m.draws, ctx.cfg.master_seed, opt, ctx.cfg.workers);
    Rows rows;
    for (const auto& r : rep.rows)
        rows.push_back({std::int64_t{m.m}, std::uint64_t{r.N}, r.max_ratio, r.mean_ratio,
                        rep.max_fit.slope, rep.max_fit.r2});
    ctx.csv("multilinear.csv", {"m", "N", "max_ratio", "mean_ratio", "fit_slope", "r2"}, rows);
    ojson j = ctx.report("verify-multilinear");
    j["m"] = m.m;
    j["derivative"] = m.derivative;
    j["max_fit"] = fit_json(rep.max_fit);
    j["mean_fit"] = fit_json(rep.mean_fit);
    j["slope_below_0_15"] = rep.max_fit.slope < 0.15;
    ctx.json("report.json", j);
    ctx.log << "verify-multilinear: slope " << format_double(rep.max_fit.slope) << '\n';
}

void verify_radial_sobolev(Context& ctx)
{
    const auto& r = ctx.cfg.radial_sobolev;
    Rows rows;
    std::vector<double> maxima;
    for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t dim = r.dim << k;
        Rng rng = trajectory_rng(ctx.cfg.master_seed, k);
        const SobolevRatioReport rep = radial_sobolev_ratio(r.samples, dim, rng);
        rows.push_back({std::uint64_t{dim}, std::uint64_t{rep.samples}, rep.max_ratio, rep.mean_ratio});
        maxima.push_back(rep.max_ratio);
    }
    ctx.csv("radial_sobolev.csv", {"dim", "samples", "max_ratio", "mean_ratio"}, rows);
    const double change = std::abs(maxima[1] - maxima[0]) / maxima[0];
    ojson j = ctx.report("verify-radial-sobolev");
    j["max_ratio"] = std::max(maxima[0], maxima[1]);
    j["relative_change_on_doubling"] = change;
    j["stable_within_10_percent"] = change <= 0.1;
    ctx.json("report.json", j);
    ctx.log << "verify-radial-sobolev: max ratio " << format_double(j["max_ratio"].get<double>())
            << ", change on doubling " << format_double(change) << '\n';
}

void dispatch(Context& ctx)
{
    switch (ctx.cfg.command) {
    case Command::SimulateDet: return simulate_det(ctx);
    case Command::SimulateSde: return simulate_sde_cmd(ctx);
    case Command::StationaryStats: return stationary_stats(ctx);
    case Command::InviscidSweep: return inviscid_sweep_cmd(ctx);
    case Command::GrowthCheck: return growth_check(ctx);
    case Command::VerifyCounting: return verify_counting(ctx);
    case Command::VerifyEigenNorms: return verify_eigen_norms(ctx);
    case Command::VerifyProductNorms: return verify_product_norms(ctx);
    case Command::VerifyMultilinear: return verify_multilinear(ctx);
    case Command::VerifyRadialSobolev: return verify_radial_sobolev(ctx);
    }
}

} // namespace

void write_error_report(const fs::path& dir, int exit_code, std::string_view kind,
                        std::string_view message, std::uint64_t config_hash)
{
    fs::create_directories(dir);
    ojson j = report_header("error", config_hash);
    j["exit_code"] = exit_code;
    j["error"] = kind;
    j["message"] = message;
    write_json(dir / "error.json", j);
}

RunResult run(const RunConfig& cfg, std::ostream& log)
{
    RunResult result;
    auto fail = [&](int code, std::string_view kind, const std::exception& e) {
        result.exit_code = code;
        result.message = e.what();
        try {
            write_error_report(cfg.output_dir, code, kind, e.what(), cfg.hash);
            result.artifacts.emplace_back("error.json");
        } catch (const std::exception&) {
        }
    };
    try {
        fs::create_directories(cfg.output_dir);
        fs::remove(cfg.output_dir / "error.json");
        Context ctx{cfg, log, result};
        dispatch(ctx);
    } catch (const ConservationFailure& e) {
        fail(ExitDivergence, "conservation", e);
    } catch (const DivergenceError& e) {
        fail(ExitDivergence, "divergence", e);
    } catch (const BudgetError& e) {
        fail(ExitBudget, "budget", e);
    } catch (const NonContractionError& e) {
        fail(ExitBudget, "non_contraction", e);
    } catch (const ValidationError& e) {
        fail(ExitValidation, "validation", e);
    } catch (const std::domain_error& e) {
        fail(ExitValidation, "validation", e);
    }
    return result;
}

} // namespace nlsball
