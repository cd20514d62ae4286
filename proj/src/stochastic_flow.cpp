#include "nlsball/stochastic_flow.hpp"

#include "nlsball/errors.hpp"

#include <cmath>
#include <sstream>

namespace nlsball {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double field_norm(const SpectralField& u) { return std::sqrt(mass(u)); }

FlowConfig hamiltonian_config(const SdeConfig& cfg)
{
    FlowConfig f;
    f.dim = cfg.dim();
    f.q = cfg.dissipation.q;
    f.dt = cfg.dt;
    f.T = cfg.T;
    f.coupling = cfg.coupling;
    return f;
}

} // namespace

Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index)
{
    std::uint64_t state = master_seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state))};
    return Rng(seq);
}

NoiseSpec NoiseSpec::power_law(std::size_t dim, double exponent)
{
    NoiseSpec spec;
    spec.amplitudes.resize(dim);
    for (std::size_t n = 1; n <= dim; ++n)
        spec.amplitudes[n - 1] = std::pow(static_cast<double>(n), -exponent);
    return spec;
}

double NoiseSpec::A(double r) const
{
    double sum = 0.0;
    for (std::size_t n = 1; n <= amplitudes.size(); ++n)
        sum += std::pow(eigenvalue(n), r) * std::norm(amplitudes[n - 1]);
    return sum;
}

void NoiseSpec::validate() const
{
    if (amplitudes.empty())
        throw ValidationError("noise needs at least one amplitude");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const auto& a = amplitudes[i];
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ValidationError("noise amplitudes must be finite");
        if (i > 0 && std::abs(a) > std::abs(amplitudes[i - 1]))
            throw ValidationError("noise amplitudes |a_n| must be nonincreasing (violated at n=" +
                                  std::to_string(i + 1) + ")");
    }
}

std::optional<std::string> NoiseSpec::admissibility_warning(double threshold) const
{
    const double a1 = A(1.0);
    if (a1 <= threshold)
        return std::nullopt;
    std::ostringstream os;
    os << "A_1^N = " << a1 << " exceeds " << threshold
       << "; the amplitudes may not define an admissible noise as N grows";
    return os.str();
}

void SdeConfig::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("sde.alpha must lie in (0, 1)");
    if (!(dt > 0.0))
        throw ValidationError("sde.dt must be positive");
    if (!(T >= 0.0))
        throw ValidationError("sde.T must be nonnegative");
    if (max_halvings < 0)
        throw ValidationError("sde.max_halvings must be nonnegative");
    dissipation.validate();
    noise.validate();
}

SpectralField sample_noise_increment(const NoiseSpec& spec, double dt, Rng& rng)
{
    if (!(dt > 0.0))
        throw ValidationError("noise increment needs dt > 0");
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    SpectralField dw(spec.dim());
    for (std::size_t n = 0; n < spec.dim(); ++n)
        dw.coeffs()[n] = spec.amplitudes[n] * normal(rng);
    return dw;
}

SdeStepper::SdeStepper(const SdeConfig& cfg, const RadialGrid& grid)
    : cfg_(cfg), grid_(grid), hamiltonian_(hamiltonian_config(cfg), grid)
{
}

std::size_t SdeStepper::damp(SpectralField& u, double tau, int depth) const
{
    const SpectralField l = dissipation_operator(u, cfg_.dissipation, grid_);
    const double kick = cfg_.alpha * tau * field_norm(l);
    if (kick > 0.5 * field_norm(u) && depth < cfg_.max_halvings) {
        std::size_t used = 1;
        used += damp(u, 0.5 * tau, depth + 1);
        used += damp(u, 0.5 * tau, depth + 1);
        return used;
    }
    auto c = u.coeffs();
    const auto lc = l.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= (cfg_.alpha * tau) * lc[i];
    return 0;
}

void SdeStepper::step(SpectralField& u, Rng& rng)
{
    hamiltonian_.step(u);
    if (cfg_.alpha != 0.0)
        halvings_ += damp(u, cfg_.dt);
    const double amp = std::sqrt(cfg_.alpha);
    if (amp != 0.0) {
        std::normal_distribution<double> normal(0.0, std::sqrt(cfg_.dt));
        auto c = u.coeffs();
        for (std::size_t n = 0; n < c.size(); ++n)
            c[n] += amp * cfg_.noise.amplitudes[n] * normal(rng);
    }
    if (!u.all_finite())
        throw DivergenceError("SDE step produced non-finite coefficients");
}

SpectralField sde_step(const SpectralField& u, const SdeConfig& cfg, const RadialGrid& grid,
                       Rng& rng)
{
    SpectralField out(u);
    SdeStepper(cfg, grid).step(out, rng);
    return out;
}

SdeTrajectory simulate_sde(const SpectralField& u0, const SdeConfig& cfg, const RadialGrid& grid,
                           Rng& rng, std::size_t observe_every,
                           const std::function<void(double, const SpectralField&)>& callback)
{
    if (u0.dim() != cfg.dim())
        throw ValidationError("initial state dimension does not match the noise dimension");
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.T / cfg.dt - 1e-9));
    SdeStepper stepper(cfg, grid);
    SdeTrajectory traj;
    traj.final_state = u0;
    auto record = [&](std::size_t k) {
        const double t = static_cast<double>(k) * cfg.dt;
        traj.times.push_back(t);
        traj.mass.push_back(mass(traj.final_state));
        traj.mass_rate.push_back(mass_dissipation_rate(traj.final_state, cfg.dissipation, grid));
        if (callback)
            callback(t, traj.final_state);
    };
    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        stepper.step(traj.final_state, rng);
        if (k == steps || (observe_every > 0 && k % observe_every == 0))
            record(k);
    }
    traj.halvings = stepper.halvings();
    return traj;
}

ItoResidual ito_mass_residual(std::span<const SdeTrajectory> ensemble, const SdeConfig& cfg)
{
    ItoResidual out;
    if (ensemble.empty())
        return out;
    const double a0 = cfg.noise.A(0.0);
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (const auto& tr : ensemble) {
        if (tr.times.empty())
            continue;
        double integral = 0.0;
        for (std::size_t k = 1; k < tr.times.size(); ++k)
            integral += 0.5 * (tr.times[k] - tr.times[k - 1]) * (tr.mass_rate[k] + tr.mass_rate[k - 1]);
        const double t = tr.times.back();
        const double x = 0.5 * tr.mass.back() + cfg.alpha * integral - 0.5 * tr.mass.front() -
                         0.5 * cfg.alpha * a0 * t;
        out.t = t;
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    out.samples = n;
    out.residual = mean;
    out.standard_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return out;
}

} // namespace nlsball
