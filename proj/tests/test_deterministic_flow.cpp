#include "nlsball/deterministic_flow.hpp"
#include "nlsball/errors.hpp"
#include "nlsball/functionals.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nlsball;

namespace {

SpectralField smooth_data(std::size_t dim)
{
    SpectralField u(dim);
    u(1) = 0.2;
    u(2) = 0.1;
    return u;
}

FlowConfig config(std::size_t dim, double dt, double T)
{
    FlowConfig c;
    c.dim = dim;
    c.q = 3.0;
    c.dt = dt;
    c.T = T;
    return c;
}

double l2_diff(const SpectralField& a, const SpectralField& b) { return std::sqrt(mass(a - b)); }

} // namespace

TEST(SplitStep, ZeroStaysZero)
{
    const auto cfg = config(16, 1e-3, 0.1);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    EXPECT_EQ(integrate(SpectralField(16), cfg, grid).final_state, SpectralField(16));
}

TEST(SplitStep, FreeFlowIsExactLinearStep)
{
    auto cfg = config(32, 1e-3, 1e-3);
    cfg.coupling = 0.0;
    RadialGrid grid(dealiased_resolution(32, cfg.q));
    SpectralField u(32);
    for (std::size_t n = 1; n <= 32; ++n)
        u(n) = complex(1.0 / n, -0.5 / (n * n));
    const auto stepped = step_splitstep(u, cfg, grid);
    const auto exact = linear_propagate(u, cfg.dt);
    for (std::size_t n = 1; n <= 32; ++n)
        EXPECT_LT(std::abs(stepped(n) - exact(n)), 1e-13) << n;
}

TEST(SplitStep, MassDriftOverThousandSteps)
{
    const auto cfg = config(64, 1e-4, 0.1);
    RadialGrid grid(dealiased_resolution(64, cfg.q));
    const auto u0 = smooth_data(64);
    const auto res = integrate(u0, cfg, grid);
    EXPECT_EQ(res.steps, 1000u);
    EXPECT_LT(std::abs(mass(res.final_state) - mass(u0)) / mass(u0), 1e-6);
}

TEST(SplitStep, PerStepMassDriftIsProjectionTail)
{
    const auto cfg = config(64, 1e-4, 1e-4);
    RadialGrid grid(dealiased_resolution(64, cfg.q));
    SplitStepper stepper(cfg, grid);
    auto u = smooth_data(64);
    for (int k = 0; k < 200; ++k) {
        const double before = mass(u);
        stepper.step(u);
        EXPECT_LT(std::abs(mass(u) - before) / before, 1e-10);
    }
}

TEST(SplitStep, ZeroHorizon)
{
    const auto cfg = config(16, 1e-3, 0.0);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    const auto u0 = smooth_data(16);
    EXPECT_EQ(integrate(u0, cfg, grid).final_state, u0);
}

TEST(SplitStep, TimeReversal)
{
    // conj(phi_T(conj(phi_T(u0)))) = u0 for the symmetric scheme.
    const auto cfg = config(32, 1e-3, 0.5);
    RadialGrid grid(dealiased_resolution(32, cfg.q));
    const auto u0 = smooth_data(32);
    const auto forward = integrate(u0, cfg, grid).final_state;
    const auto back = integrate(forward.conj(), cfg, grid).final_state.conj();
    EXPECT_LT(l2_diff(back, u0), 1e-8);
}

TEST(SplitStep, SecondOrder)
{
    const double T = 0.1;
    RadialGrid grid(dealiased_resolution(32, 3.0));
    const auto u0 = smooth_data(32);
    const auto reference = integrate(u0, config(32, 1e-3 / 256, T), grid).final_state;
    std::vector<double> err;
    for (double dt : {2e-3, 1e-3, 5e-4})
        err.push_back(l2_diff(integrate(u0, config(32, dt, T), grid).final_state, reference));
    for (std::size_t i = 1; i < err.size(); ++i)
        EXPECT_NEAR(err[i - 1] / err[i], 4.0, 0.4) << i;
}

TEST(SplitStep, FlowComposition)
{
    RadialGrid grid(dealiased_resolution(32, 3.0));
    const auto u0 = smooth_data(32);
    const auto a = integrate(integrate(u0, config(32, 1e-3, 0.01), grid).final_state,
                             config(32, 1e-3, 0.02), grid)
                       .final_state;
    const auto b = integrate(u0, config(32, 1e-3, 0.03), grid).final_state;
    EXPECT_LT(l2_diff(a, b), 1e-12);
}

TEST(SplitStep, ObservationLog)
{
    const auto cfg = config(16, 1e-3, 0.1);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    ObservationPlan plan;
    plan.every = 10;
    plan.sobolev_indices = {0.0, 1.0};
    const auto res = integrate(smooth_data(16), cfg, grid, plan);
    ASSERT_EQ(res.log.size(), 11u);
    EXPECT_EQ(res.log.front().t, 0.0);
    EXPECT_NEAR(res.log.back().t, 0.1, 1e-15);
    for (const auto& row : res.log) {
        ASSERT_EQ(row.sobolev.size(), 2u);
        EXPECT_NEAR(row.sobolev[0] * row.sobolev[0], row.mass, 1e-14);
    }
}

TEST(SplitStep, DimensionMismatchRejected)
{
    const auto cfg = config(16, 1e-3, 0.1);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    SplitStepper stepper(cfg, grid);
    SpectralField u(8);
    EXPECT_THROW(stepper.step(u), ValidationError);
}

TEST(Picard, ZeroData)
{
    const auto cfg = config(16, 1e-4, 0.01);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    EXPECT_EQ(picard_solve(SpectralField(16), cfg, grid).final_state, SpectralField(16));
}

TEST(Picard, AgreesWithSplitStep)
{
    const auto cfg = config(32, 1e-5, 0.01);
    RadialGrid grid(dealiased_resolution(32, cfg.q));
    SpectralField u0(32);
    u0(1) = 0.1;
    u0(2) = complex(0.0, 0.05);
    u0(3) = 0.02;
    const auto picard = picard_solve(u0, cfg, grid, 1.6);
    EXPECT_LT(picard.contraction, 1.0);
    EXPECT_LT(picard.residual, cfg.picard_tolerance);
    SplitStepper stepper(cfg, grid);
    auto u = u0;
    double sup = 0;
    for (std::size_t k = 1; k < picard.times.size(); ++k) {
        stepper.step(u);
        sup = std::max(sup, sobolev_norm(u - picard.path[k], 1.6));
    }
    EXPECT_LT(sup, 1e-6);
}

TEST(Picard, RequiresSupercriticalEmbeddingIndex)
{
    const auto cfg = config(16, 1e-4, 0.01);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    EXPECT_THROW(picard_solve(SpectralField(16), cfg, grid, 1.5), ValidationError);
}

TEST(Picard, LargeWindowDoesNotContract)
{
    auto cfg = config(16, 1e-3, 1.0);
    RadialGrid grid(dealiased_resolution(16, cfg.q));
    EXPECT_THROW(picard_solve(SpectralField::mode(16, 1, 2.0), cfg, grid, 1.6), NonContractionError);
}

TEST(Picard, WindowShrinksWithRadius)
{
    EXPECT_GT(picard_window(1.0, 3.0, 0.1, 0.5), picard_window(2.0, 3.0, 0.1, 0.5));
    EXPECT_NEAR(picard_window(2.0, 1.0, 1.0, 1.0), 0.25, 1e-15);
}

TEST(Galerkin, FreeFlowOnSupportedDataIsExact)
{
    auto cfg = config(0, 1e-3, 0.05);
    cfg.coupling = 0.0;
    const auto u0 = smooth_data(4);
    const std::vector<std::size_t> dims{4, 8, 16};
    const auto rep = galerkin_convergence(u0, dims, cfg, 1.0);
    EXPECT_EQ(rep.reference_dim, 32u);
    for (const auto& row : rep.rows)
        EXPECT_LT(row.error, 1e-14) << row.dim;
}

TEST(Galerkin, AnalyticDataConvergesMonotonically)
{
    auto cfg = config(0, 1e-4, 0.05);
    cfg.q = 1.0;
    const auto u0 = SpectralField::mode(1, 1, 1.0);
    const std::vector<std::size_t> dims{4, 8, 16, 32};
    const auto rep = galerkin_convergence(u0, dims, cfg, 0.5);
    EXPECT_TRUE(rep.monotone);
    EXPECT_LT(rep.fitted_slope, -1.0);
}
