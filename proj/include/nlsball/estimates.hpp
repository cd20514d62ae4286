#pragma once

// Numerical checks of lattice-counting, eigenfunction-norm, product-norm,
// multilinear Strichartz and radial Sobolev estimates.

#include "nlsball/fit.hpp"
#include "nlsball/radial_spectral.hpp"
#include "nlsball/stochastic_flow.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nlsball {

/// floor(sqrt(x)) in exact integer arithmetic.
std::uint64_t isqrt(std::uint64_t x) noexcept;

/// #{(k1, k2) : N <= k1 <= 2N, k2 >= 0, k1^2 + k2^2 = M}.
std::uint64_t count_pairs(std::uint64_t N, std::uint64_t M);

struct CountingRow {
    std::uint64_t N = 0;
    std::uint64_t max_count = 0;
    std::uint64_t argmax = 0; // smallest M attaining the maximum
};

struct CountingReport {
    std::vector<CountingRow> rows;
    LinearFit fit; // log(max count) against log N
};

/// For each N, the maximum over M <= 8 N^2 of the pair count. With
/// `constrained` false the first index ranges over 1 <= k1 <= 2N instead.
CountingReport counting_exponent(std::span<const std::uint64_t> Ns, bool constrained = true);

/// Dyadic bands n_j in [N_j, 2 N_j] and a target sum of squares tau.
struct CountQuery {
    std::vector<std::uint64_t> bands;
    std::uint64_t tau = 0;
};

/// #{(n_1..n_m) : N_j <= n_j <= 2 N_j, sum n_j^2 = tau}. The first m-2 indices
/// are looped; the last pair is resolved by square-root tests. Throws
/// BudgetError when the loop count would exceed `budget`.
std::uint64_t lambda_count(const CountQuery& query, std::uint64_t budget = 100'000'000);

/// max over tau of lambda_count for the given bands, by enumeration of all
/// tuples (BudgetError beyond `budget` tuples).
std::uint64_t lambda_max_count(std::span<const std::uint64_t> bands,
                               std::uint64_t budget = 100'000'000);

struct NormRow {
    std::size_t n = 0;
    double value = 0.0;
};

struct NormReport {
    std::vector<NormRow> rows;
    LinearFit fit; // log(value) against log n
};

/// |e_n|_{L^p} on a grid of the given resolution, for each n.
NormReport eigen_norm_exponent(double p, std::span<const std::size_t> ns, std::size_t resolution);

/// |e_n^m|_{L^2}^2 = int |e_n|^{2m} r^2 dr by grid quadrature. Refuses
/// (ValidationError) when resolution < (m + 1) max(ns).
NormReport product_norm_exponent(int m, std::span<const std::size_t> ns, std::size_t resolution);

/// Field supported on modes [N, 2N].
struct FrequencyBand {
    std::size_t N = 0;
    SpectralField content;
};

/// Independent standard complex Gaussians on [N, 2N], scaled to unit L^2 norm.
FrequencyBand random_band(std::size_t N, std::size_t dim, Rng& rng);

struct MultilinearOptions {
    /// Time samples = factor * (2 N_max)^2, midpoints of a uniform grid on (0, 1).
    std::size_t time_factor = 4;
    /// Differentiate the first (highest) factor and divide out N_1.
    bool derivative = false;
};

/// |prod_j S(t) u_j|_{L^2((0,1) x B)} / (prod_j |u_j|_{L^2}) divided by
/// N_2^{1 - 1/(2m-2)} (N_3 ... N_m)^{3/2 - 1/(2m-2)} (bands sorted so that
/// N_1 >= N_2 >= ...). For m = 2 the normaliser is N_2^{1/2}.
/// Refuses when the grid cannot resolve the bands.
double multilinear_ratio(std::span<const FrequencyBand> bands, const RadialGrid& grid,
                         const MultilinearOptions& opt = {});

struct MultilinearRow {
    std::size_t N = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
};

struct MultilinearReport {
    std::vector<MultilinearRow> rows;
    LinearFit max_fit;  // log(max ratio) against log N
    LinearFit mean_fit; // log(mean ratio) against log N
};

/// m equal bands N for each N on the ladder, `draws` random draws per rung.
MultilinearReport multilinear_ladder(int m, std::span<const std::size_t> Ns, std::size_t draws,
                                     std::uint64_t seed, const MultilinearOptions& opt = {},
                                     std::size_t workers = 1);

/// max_j r_j |u(r_j)| / |u|_{H^1} with the inhomogeneous H^1 norm.
double radial_sobolev_quotient(const SpectralField& u, const RadialGrid& grid);

struct SobolevRatioReport {
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    std::size_t samples = 0;
};

/// Quotients of `samples` random fields c_n = g_n / n^2 (g_n standard complex
/// Gaussian) of dimension dim, on a grid of resolution 8 dim - 1.
SobolevRatioReport radial_sobolev_ratio(std::size_t samples, std::size_t dim, Rng& rng);

} // namespace nlsball
