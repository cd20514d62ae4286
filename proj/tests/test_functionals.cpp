#include "nlsball/errors.hpp"
#include "nlsball/functionals.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nlsball;
using boost::math::quadrature::gauss_kronrod;
using std::numbers::pi;

namespace {

// Random field with |c_n| ~ n^-2, scaled to the requested L^2 norm.
SpectralField smooth_field(std::size_t dim, double norm, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    SpectralField u(dim);
    for (std::size_t n = 1; n <= dim; ++n)
        u(n) = complex(g(rng), g(rng)) / static_cast<double>(n * n);
    u *= norm / std::sqrt(mass(u));
    return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

DissipationSpec supercritical()
{
    DissipationSpec s;
    s.variant = DissipationVariant::Supercritical;
    s.q = 3.0;
    s.beta = 1.1;
    return s;
}

} // namespace

TEST(Mass, Examples)
{
    EXPECT_EQ(mass(SpectralField::mode(4, 1)), 1.0);
    EXPECT_EQ(mass(SpectralField(4)), 0.0);
    EXPECT_EQ(mass(SpectralField(std::vector<complex>{2.0, complex(0, 1)})), 5.0);
}

TEST(Mass, ExactScaling)
{
    std::mt19937_64 rng(1);
    const auto u = smooth_field(16, 1.3, rng);
    EXPECT_EQ(mass(2.0 * u), 4.0 * mass(u));
    EXPECT_EQ(mass(0.5 * u), 0.25 * mass(u));
}

TEST(Energy, Zero)
{
    RadialGrid grid(64);
    EXPECT_EQ(energy(SpectralField(16), 3.0, grid), 0.0);
}

TEST(Energy, LinearLimit)
{
    RadialGrid grid(64);
    double previous = 1.0;
    for (double c : {1e-1, 1e-2, 1e-3}) {
        const double ratio = energy(SpectralField::mode(16, 1, c), 3.0, grid) / (0.5 * pi * pi * c * c);
        EXPECT_GE(ratio, 1.0 - 1e-15);
        EXPECT_LE(std::abs(ratio - 1.0), previous);
        previous = std::abs(ratio - 1.0);
    }
    EXPECT_LT(previous, 1e-10);
}

TEST(Energy, FirstModeCubicAgainstAdaptiveQuadrature)
{
    const double quartic = gauss_kronrod<double, 61>::integrate(
        [](double r) { return 4.0 * std::pow(std::sin(pi * r), 4) / (r * r); }, 0.0, 1.0, 15, 1e-15);
    const double oracle = 0.5 * pi * pi + 0.25 * quartic;
    RadialGrid grid(dealiased_resolution(8, 1.0) * 64);
    EXPECT_NEAR(energy(SpectralField::mode(8, 1), 1.0, grid), oracle, 1e-11 * oracle);
}

TEST(Cutoff, Profile)
{
    const CutoffSpec spec{2.0};
    EXPECT_EQ(cutoff(1.0, spec), 1.0);
    EXPECT_EQ(cutoff(2.0, spec), 1.0);
    EXPECT_EQ(cutoff(4.0, spec), 0.0);
    EXPECT_EQ(cutoff(6.0, spec), 0.0);
    double prev = 1.0;
    for (int k = 0; k <= 200; ++k) {
        const double v = cutoff(2.0 + 2.0 * k / 200.0, spec);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Dissipation, ZeroField)
{
    RadialGrid grid(64);
    for (auto spec : {DissipationSpec{}, supercritical()}) {
        EXPECT_EQ(mass_dissipation_rate(SpectralField(16), spec, grid), 0.0);
        EXPECT_EQ(energy_dissipation_rate(SpectralField(16), spec, grid), 0.0);
        EXPECT_EQ(dissipation_operator(SpectralField(16), spec, grid), SpectralField(16));
    }
}

TEST(Dissipation, SubcriticalFirstModeLinearRegime)
{
    DissipationSpec spec;
    RadialGrid grid(64);
    const double a = 1e-6;
    const auto u = SpectralField::mode(16, 1, a);
    const auto L = dissipation_operator(u, spec, grid);
    const double expected =
        std::exp(3.0 * std::pow(std::pow(pi, spec.beta - spec.delta) * a, 2)) *
        std::pow(pi, 2.0 * (spec.beta - 1.0)) * a;
    EXPECT_LT(rel(L(1).real(), expected), 1e-8);
    for (std::size_t n = 2; n <= 16; ++n)
        EXPECT_LT(std::abs(L(n)), 1e-8 * expected);
}

TEST(Dissipation, PairingIdentity)
{
    std::mt19937_64 rng(2024);
    for (auto spec : {DissipationSpec{}, supercritical()}) {
        for (std::size_t dim : {8u, 24u}) {
            RadialGrid grid(dealiased_resolution(dim, spec.q));
            double worst = 0;
            for (int k = 0; k < 1000; ++k) {
                const double top = spec.variant == DissipationVariant::Subcritical ? 0.35 : 0.1;
                const auto u = smooth_field(dim, top * (k % 10 + 1) / 10.0, rng);
                const double pairing = real_inner(u, dissipation_operator(u, spec, grid));
                worst = std::max(worst, rel(pairing, mass_dissipation_rate(u, spec, grid)));
            }
            EXPECT_LT(worst, 1e-8) << to_string(spec.variant) << " dim " << dim;
        }
    }
}

TEST(Dissipation, SupercriticalFirstModeAgainstRefinedQuadrature)
{
    const auto spec = supercritical();
    const std::size_t dim = 8;
    const double eps = 0.3;
    auto u_of = [&](double r) { return eps * std::sqrt(2.0) * std::sin(pi * r) / r; };
    auto integrate = [](auto f) { return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 8, 1e-14); };

    const double power = integrate([&](double r) { return std::pow(u_of(r), 8) * r * r; });
    const double expo = integrate([&](double r) {
        const double a2 = u_of(r) * u_of(r);
        return a2 * std::exp(a2) * r * r;
    });
    double g2 = 0;
    for (std::size_t n = 1; n <= dim; ++n) {
        const double gn = integrate([&](double r) {
            return std::pow(u_of(r), 7) * std::sqrt(2.0) * std::sin(n * pi * r) / r * r * r;
        });
        g2 += gn * gn;
    }
    const double oracle = std::pow(1.0 + pi * pi, spec.beta - 1.0) * eps * eps +
                          2.0 * std::exp(2.0 * g2) * power + expo;

    RadialGrid grid(1024);
    const auto u = SpectralField::mode(dim, 1, eps);
    EXPECT_LT(rel(mass_dissipation_rate(u, spec, grid), oracle), 1e-8);
}

TEST(Dissipation, EnergyRateLowerBounds)
{
    std::mt19937_64 rng(77);
    for (auto spec : {DissipationSpec{}, supercritical()}) {
        const std::size_t dim = 16;
        RadialGrid grid(dealiased_resolution(dim, spec.q) * 4);
        for (int k = 0; k < 1000; ++k) {
            const double top = spec.variant == DissipationVariant::Subcritical ? 0.45 : 0.1;
            const auto u = smooth_field(dim, top * (k % 20 + 1) / 20.0, rng);
            const double rate = energy_dissipation_rate(u, spec, grid);
            const double floor = energy_dissipation_floor(u, spec, grid);
            EXPECT_GT(floor, 0.0);
            EXPECT_GE(rate, floor * (1.0 - 1e-9)) << to_string(spec.variant) << " sample " << k;
            EXPECT_GE(mass_dissipation_rate(u, spec, grid), 0.0);
        }
    }
}

TEST(Dissipation, MassRateControlledByEnergyRate)
{
    // max over random fields of M-rate / E-rate, at two dimensions.
    auto worst_ratio = [](std::size_t dim) {
        std::mt19937_64 rng(5);
        DissipationSpec spec;
        RadialGrid grid(dealiased_resolution(dim, spec.q));
        double c = 0;
        for (int k = 0; k < 1000; ++k) {
            const auto u = smooth_field(dim, 0.05 + 0.5 * (k % 25) / 25.0, rng);
            c = std::max(c, mass_dissipation_rate(u, spec, grid) / energy_dissipation_rate(u, spec, grid));
        }
        return c;
    };
    const double c16 = worst_ratio(16), c32 = worst_ratio(32);
    EXPECT_LT(c16, 1.0);
    EXPECT_NEAR(c32 / c16, 1.0, 0.1);
}

TEST(Dissipation, ExponentialSeriesConvergesFromBelow)
{
    std::mt19937_64 rng(3);
    const auto u = smooth_field(12, 0.8, rng);
    RadialGrid grid(64);
    const auto phys = grid.synthesize(u);
    const double full = exponential_moment(phys, grid);
    double prev = 0;
    int P = 0;
    for (; P < 200; ++P) {
        const double s = exponential_series_partial(phys, grid, P);
        EXPECT_GE(s, prev);
        EXPECT_LE(s, full * (1 + 1e-15));
        prev = s;
        if (full - s < 1e-10 * full)
            break;
    }
    EXPECT_LT(P, 200);
    EXPECT_LT(full - prev, 1e-10 * full);
}

TEST(Dissipation, OverflowIsDivergence)
{
    RadialGrid grid(64);
    const auto u = SpectralField::mode(16, 1, 30.0);
    EXPECT_THROW(mass_dissipation_rate(u, supercritical(), grid), DivergenceError);
}

TEST(Dissipation, ValidationRanges)
{
    DissipationSpec s;
    s.beta = 2.0;
    EXPECT_THROW(s.validate(), ValidationError);
    auto sup = supercritical();
    sup.q = 1.5;
    EXPECT_THROW(sup.validate(), ValidationError);
    sup = supercritical();
    sup.beta = 1.3; // above s_c = 7/6
    EXPECT_THROW(sup.validate(), ValidationError);
    EXPECT_NO_THROW(supercritical().validate());
    EXPECT_NEAR(critical_regularity(3.0), 1.5 - 1.0 / 3.0, 1e-15);
}
