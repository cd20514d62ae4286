#include "nlsball/errors.hpp"
#include "nlsball/functionals.hpp"
#include "nlsball/radial_spectral.hpp"
#include "nlsball/stochastic_flow.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nlsball;
using std::numbers::pi;

namespace {

SpectralField random_field(std::size_t dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    SpectralField u(dim);
    for (std::size_t n = 1; n <= dim; ++n)
        u(n) = {g(rng), g(rng)};
    return u;
}

// Direct O(G N) evaluation of sum_n c_n e_n(r_j).
std::vector<complex> direct_synthesis(const SpectralField& u, const RadialGrid& grid)
{
    std::vector<complex> out(grid.resolution());
    for (std::size_t j = 0; j < grid.resolution(); ++j) {
        const long double r = grid.nodes()[j];
        std::complex<long double> s = 0;
        for (std::size_t n = 1; n <= u.dim(); ++n) {
            const long double e = std::sqrt(2.0L) * std::sin(static_cast<long double>(n) * std::numbers::pi_v<long double> * r) / r;
            s += std::complex<long double>(u(n).real(), u(n).imag()) * e;
        }
        out[j] = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
    }
    return out;
}

double max_rel_diff(const SpectralField& a, const SpectralField& b)
{
    double num = 0, den = 0;
    for (std::size_t n = 1; n <= a.dim(); ++n) {
        num = std::max(num, std::abs(a(n) - b(n)));
        den = std::max(den, std::abs(b(n)));
    }
    return den > 0 ? num / den : num;
}

} // namespace

TEST(Eigenfunction, ClosedFormValues)
{
    EXPECT_NEAR(eigenfunction_value(1, 0.5), 2.0 * std::sqrt(2.0), 1e-15);
    EXPECT_EQ(eigenfunction_value(2, 1.0), 0.0);
    EXPECT_EQ(eigenfunction_value(7, 1.0), 0.0);
    const long double oracle = std::sqrt(2.0L) * std::sin(0.3L * std::numbers::pi_v<long double>) / 0.1L;
    EXPECT_NEAR(eigenfunction_value(3, 0.1), static_cast<double>(oracle), 1e-13);
    EXPECT_NEAR(eigenfunction_value(3, 0.1), 11.441, 1e-3);
}

TEST(Eigenfunction, DomainErrors)
{
    EXPECT_THROW(eigenfunction_value(0, 0.5), std::domain_error);
    EXPECT_THROW(eigenfunction_value(1, 0.0), std::domain_error);
    EXPECT_THROW(eigenfunction_value(1, -0.2), std::domain_error);
    EXPECT_THROW(eigenfunction_value(1, 1.5), std::domain_error);
}

TEST(Eigenvalue, SquaredFrequencies)
{
    EXPECT_NEAR(eigenvalue(1), 9.8696044010893586, 1e-14);
    EXPECT_NEAR(eigenvalue(3), 9.0 * pi * pi, 1e-12);
    EXPECT_THROW(eigenvalue(0), std::domain_error);
}

TEST(Eigenfunction, UnitNormByAdaptiveQuadrature)
{
    using boost::math::quadrature::gauss_kronrod;
    for (std::size_t n : {1u, 2u, 5u, 11u}) {
        auto f = [n](double r) {
            const double e = std::sqrt(2.0) * std::sin(static_cast<double>(n) * pi * r);
            return e * e; // e_n^2 r^2
        };
        EXPECT_NEAR((gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14)), 1.0, 1e-12) << n;
    }
}

TEST(Grid, NodesInteriorAndIncreasing)
{
    RadialGrid grid(101);
    ASSERT_EQ(grid.resolution(), 101u);
    EXPECT_GT(grid.nodes().front(), 0.0);
    EXPECT_LT(grid.nodes().back(), 1.0);
    for (std::size_t j = 1; j < grid.resolution(); ++j)
        EXPECT_LT(grid.nodes()[j - 1], grid.nodes()[j]);
    for (double w : grid.weights())
        EXPECT_GT(w, 0.0);
}

TEST(Grid, TotalWeightClosedFormAndLimit)
{
    // sum_j (j/(G+1))^2 / (G+1) = G (2G+1) / (6 (G+1)^2), which tends to 1/3 at rate 1/(2G).
    double previous_gap = 1.0;
    for (std::size_t G : {15u, 127u, 1023u, 8191u}) {
        RadialGrid grid(G);
        double s = 0;
        for (double w : grid.weights())
            s += w;
        const double g = static_cast<double>(G);
        EXPECT_NEAR(s, g * (2 * g + 1) / (6 * (g + 1) * (g + 1)), 1e-14);
        const double gap = 1.0 / 3.0 - s;
        EXPECT_GT(gap, 0.0);
        EXPECT_LT(gap, previous_gap);
        EXPECT_NEAR(gap * 2 * g, 1.0, 2.0 / g);
        previous_gap = gap;
    }
}

TEST(Grid, Orthonormality)
{
    for (std::size_t dim : {8u, 64u, 256u}) {
        RadialGrid grid(dealiased_resolution(dim, 3.0));
        std::vector<std::vector<double>> e(dim + 1);
        for (std::size_t n = 1; n <= dim; ++n) {
            e[n].resize(grid.resolution());
            for (std::size_t j = 0; j < grid.resolution(); ++j)
                e[n][j] = eigenfunction_value(n, grid.nodes()[j]);
        }
        double defect = 0;
        for (std::size_t m = 1; m <= dim; ++m)
            for (std::size_t n = m; n <= dim; ++n) {
                double s = 0;
                for (std::size_t j = 0; j < grid.resolution(); ++j)
                    s += grid.weights()[j] * e[m][j] * e[n][j];
                defect = std::max(defect, std::abs(s - (m == n ? 1.0 : 0.0)));
            }
        EXPECT_LT(defect, 1e-10) << dim;
    }
}

TEST(Grid, DealiasingRule)
{
    EXPECT_EQ(dealiased_resolution(64, 3.0), 256u);
    EXPECT_EQ(dealiased_resolution(10, 1.0), 20u);
    EXPECT_EQ(dealiased_resolution(10, 1.5), 40u);
}

TEST(Synthesize, SingleModeAtHalf)
{
    RadialGrid grid(7); // r_4 = 1/2
    const auto u = grid.synthesize(SpectralField::mode(3, 1));
    EXPECT_NEAR(grid.nodes()[3], 0.5, 1e-16);
    EXPECT_NEAR(u.values[3].real(), 2.0 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(u.values[3].imag(), 0.0, 1e-14);
}

TEST(Synthesize, ZeroField)
{
    RadialGrid grid(33);
    for (const auto& v : grid.synthesize(SpectralField(16)).values)
        EXPECT_EQ(v, complex(0.0));
}

TEST(Synthesize, MatchesDirectSum)
{
    const auto u = random_field(40, 11);
    RadialGrid grid(163);
    const auto fast = grid.synthesize(u);
    const auto slow = direct_synthesis(u, grid);
    double err = 0, scale = 0;
    for (std::size_t j = 0; j < slow.size(); ++j) {
        err = std::max(err, std::abs(fast.values[j] - slow[j]));
        scale = std::max(scale, std::abs(slow[j]));
    }
    EXPECT_LT(err / scale, 1e-12);
}

TEST(Synthesize, RefusesUnderResolvedGrid)
{
    RadialGrid grid(15);
    EXPECT_THROW(grid.synthesize(SpectralField(16)), ValidationError);
}

TEST(Analyze, RoundTrip)
{
    for (std::size_t dim : {1u, 7u, 64u, 1024u, 4096u}) {
        const auto u = random_field(dim, dim);
        RadialGrid grid(dim);
        EXPECT_LT(max_rel_diff(grid.analyze(grid.synthesize(u), dim), u), 1e-12) << dim;
        RadialGrid fine(dealiased_resolution(dim, 3.0));
        EXPECT_LT(max_rel_diff(fine.analyze(fine.synthesize(u), dim), u), 1e-12) << dim;
    }
}

TEST(Analyze, UnitVector)
{
    RadialGrid grid(64);
    const auto c = grid.analyze(grid.synthesize(SpectralField::mode(16, 5)), 16);
    for (std::size_t n = 1; n <= 16; ++n)
        EXPECT_NEAR(std::abs(c(n) - (n == 5 ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(Analyze, ZeroField)
{
    RadialGrid grid(32);
    PhysicalField zero{std::vector<complex>(32)};
    EXPECT_EQ(grid.analyze(zero, 10), SpectralField(10));
}

TEST(Analyze, QuadratureOfPointValues)
{
    // Point values built from the closed form, not from the transform.
    RadialGrid grid(48);
    PhysicalField phys{std::vector<complex>(grid.resolution())};
    for (std::size_t j = 0; j < grid.resolution(); ++j) {
        const double r = grid.nodes()[j];
        phys.values[j] = eigenfunction_value(1, r) + complex(0, 2) * eigenfunction_value(3, r);
    }
    const auto c = grid.analyze(phys, 6);
    const std::vector<complex> expected{1.0, 0.0, complex(0, 2), 0.0, 0.0, 0.0};
    for (std::size_t n = 1; n <= 6; ++n)
        EXPECT_LT(std::abs(c(n) - expected[n - 1]), 1e-12) << n;
}

TEST(Analyze, SizeMismatch)
{
    RadialGrid grid(32);
    PhysicalField phys{std::vector<complex>(31)};
    EXPECT_THROW(grid.analyze(phys, 8), ValidationError);
}

TEST(Project, Examples)
{
    const SpectralField u(std::vector<complex>{1.0, 1.0, 1.0});
    EXPECT_EQ(project(u, 2), SpectralField(std::vector<complex>{1.0, 1.0, 0.0}));
    EXPECT_EQ(project(u, 3), u);
    EXPECT_EQ(project(u, 10), u);
    const auto v = random_field(20, 3);
    EXPECT_EQ(project(project(v, 7), 7), project(v, 7));
}

TEST(Sobolev, Examples)
{
    for (std::size_t n : {1u, 4u, 9u})
        for (double s : {-1.0, 0.5, 1.0, 2.3})
            EXPECT_NEAR(sobolev_norm(SpectralField::mode(12, n), s), std::pow(n * pi, s),
                        1e-12 * std::pow(n * pi, s));
    const SpectralField u(std::vector<complex>{1.0, 1.0});
    EXPECT_NEAR(sobolev_norm(u, 1.0), pi * std::sqrt(5.0), 1e-13);
    const auto v = random_field(30, 5);
    double l2 = 0;
    for (auto c : v.coeffs())
        l2 += std::norm(c);
    EXPECT_NEAR(sobolev_norm(v, 0.0), std::sqrt(l2), 1e-12);
    EXPECT_NEAR(sobolev_norm(SpectralField::mode(4, 2), 1.0, SobolevWeight::Inhomogeneous),
                std::sqrt(1 + 4 * pi * pi), 1e-12);
}

TEST(Sobolev, MatchesQuadratureL2)
{
    const auto u = random_field(50, 8);
    RadialGrid grid(200);
    EXPECT_NEAR(sobolev_norm(u, 0.0), lp_norm(grid.synthesize(u), grid, 2.0), 1e-10);
}

TEST(Sobolev, ParsevalAgainstGradientQuadrature)
{
    // Band-limited field with decaying spectrum; |grad u|^2 integrated on a fine grid.
    SpectralField u(24);
    auto r = random_field(24, 21);
    for (std::size_t n = 1; n <= 24; ++n)
        u(n) = r(n) / static_cast<double>(n * n);
    RadialGrid grid(4096);
    const double spectral = sobolev_norm(u, 1.0);
    EXPECT_NEAR(dirichlet_energy_quadrature(u, grid), spectral * spectral,
                1e-6 * spectral * spectral);
}

TEST(Lp, Examples)
{
    RadialGrid grid(1024);
    for (std::size_t n : {1u, 10u, 100u})
        EXPECT_NEAR(lp_norm(grid.synthesize(SpectralField::mode(n, n)), grid, 2.0), 1.0, 1e-12);
    EXPECT_EQ(lp_norm(grid.synthesize(SpectralField(4)), grid, 3.0), 0.0);
    EXPECT_THROW(lp_norm(grid.synthesize(SpectralField(4)), grid, 0.5), std::domain_error);
}

TEST(Propagate, Examples)
{
    const auto u = random_field(32, 4);
    EXPECT_EQ(linear_propagate(u, 0.0), u);
    const double t = 0.37;
    const auto e1 = linear_propagate(SpectralField::mode(3, 1), t);
    EXPECT_LT(std::abs(e1(1) - std::exp(complex(0, -pi * pi * t))), 1e-14);
    EXPECT_EQ(e1(2), complex(0.0));
    for (double s : {0.1, 1.7, 123.4})
        EXPECT_NEAR(sobolev_norm(linear_propagate(u, s), 0), sobolev_norm(u, 0),
                    1e-13 * sobolev_norm(u, 0));
}

TEST(Propagate, GroupProperty)
{
    const auto u = random_field(32, 9);
    const double t1 = 0.013, t2 = 0.029;
    EXPECT_LT(max_rel_diff(linear_propagate(linear_propagate(u, t1), t2),
                           linear_propagate(u, t1 + t2)),
              1e-12);
}
