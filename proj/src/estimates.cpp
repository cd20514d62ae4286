#include "nlsball/estimates.hpp"

#include "nlsball/errors.hpp"
#include "nlsball/functionals.hpp"
#include "nlsball/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nlsball {

std::uint64_t isqrt(std::uint64_t x) noexcept
{
    constexpr std::uint64_t max_root = 0xFFFFFFFFULL; // squares above this overflow
    auto r = std::min(max_root, static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x))));
    while (r > 0 && r * r > x)
        --r;
    while (r < max_root && (r + 1) * (r + 1) <= x)
        ++r;
    return r;
}

namespace {

bool is_square(std::uint64_t x, std::uint64_t& root) noexcept
{
    root = isqrt(x);
    return root * root == x;
}

// Pairs (a, b) with a in [lo_a, hi_a], b in [lo_b, hi_b], a^2 + b^2 = M.
std::uint64_t count_banded_pairs(std::uint64_t lo_a, std::uint64_t hi_a, std::uint64_t lo_b,
                                 std::uint64_t hi_b, std::uint64_t M)
{
    std::uint64_t count = 0;
    for (std::uint64_t a = lo_a; a <= hi_a && a * a <= M; ++a) {
        std::uint64_t b = 0;
        if (is_square(M - a * a, b) && b >= lo_b && b <= hi_b)
            ++count;
    }
    return count;
}

} // namespace

std::uint64_t count_pairs(std::uint64_t N, std::uint64_t M)
{
    return count_banded_pairs(N, 2 * N, 0, std::numeric_limits<std::uint64_t>::max(), M);
}

CountingReport counting_exponent(std::span<const std::uint64_t> Ns, bool constrained)
{
    CountingReport rep;
    for (std::uint64_t N : Ns) {
        if (N == 0)
            throw ValidationError("counting ladder needs N >= 1");
        const std::uint64_t m_max = 8 * N * N;
        std::vector<std::uint32_t> hist(m_max + 1, 0);
        const std::uint64_t k1_lo = constrained ? N : 1;
        for (std::uint64_t k1 = k1_lo; k1 <= 2 * N; ++k1)
            for (std::uint64_t k2 = 0; k1 * k1 + k2 * k2 <= m_max; ++k2)
                ++hist[k1 * k1 + k2 * k2];
        const auto it = std::max_element(hist.begin(), hist.end());
        rep.rows.push_back({N, *it, static_cast<std::uint64_t>(it - hist.begin())});
    }
    if (rep.rows.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& r : rep.rows) {
            x.push_back(static_cast<double>(r.N));
            y.push_back(static_cast<double>(r.max_count));
        }
        rep.fit = loglog_fit(x, y);
    }
    return rep;
}

namespace {

void check_bands(std::span<const std::uint64_t> bands)
{
    if (bands.size() < 2)
        throw ValidationError("counting needs at least two bands");
    for (auto b : bands)
        if (b == 0)
            throw ValidationError("bands need N >= 1");
}

double loop_work(std::span<const std::uint64_t> bands)
{
    double w = 1.0;
    for (auto b : bands)
        w *= static_cast<double>(b + 1);
    return w;
}

} // namespace

std::uint64_t lambda_count(const CountQuery& query, std::uint64_t budget)
{
    const auto& bands = query.bands;
    check_bands(bands);
    const std::size_t m = bands.size();
    const double work = loop_work(std::span(bands).first(m - 1));
    if (work > static_cast<double>(budget))
        throw BudgetError("lambda_count would need " + std::to_string(work) + " iterations");

    const std::uint64_t na = bands[m - 2], nb = bands[m - 1];
    std::function<std::uint64_t(std::size_t, std::uint64_t)> rec = [&](std::size_t j,
                                                                       std::uint64_t rest) {
        if (j == m - 2)
            return count_banded_pairs(na, 2 * na, nb, 2 * nb, rest);
        std::uint64_t total = 0;
        for (std::uint64_t n = bands[j]; n <= 2 * bands[j] && n * n <= rest; ++n)
            total += rec(j + 1, rest - n * n);
        return total;
    };
    return rec(0, query.tau);
}

std::uint64_t lambda_max_count(std::span<const std::uint64_t> bands, std::uint64_t budget)
{
    check_bands(bands);
    if (loop_work(bands) > static_cast<double>(budget))
        throw BudgetError("lambda_max_count would enumerate more than the budget");
    std::uint64_t top = 0;
    for (auto b : bands)
        top += 4 * b * b;
    std::vector<std::uint32_t> hist(top + 1, 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t j, std::uint64_t sum) {
        if (j == bands.size()) {
            ++hist[sum];
            return;
        }
        for (std::uint64_t n = bands[j]; n <= 2 * bands[j]; ++n)
            rec(j + 1, sum + n * n);
    };
    rec(0, 0);
    return *std::max_element(hist.begin(), hist.end());
}

namespace {

NormReport fit_rows(std::vector<NormRow> rows)
{
    NormReport rep;
    rep.rows = std::move(rows);
    if (rep.rows.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& r : rep.rows) {
            x.push_back(static_cast<double>(r.n));
            y.push_back(r.value);
        }
        rep.fit = loglog_fit(x, y);
    }
    return rep;
}

std::size_t max_of(std::span<const std::size_t> ns)
{
    if (ns.empty())
        throw ValidationError("ladder is empty");
    for (auto n : ns)
        if (n == 0)
            throw ValidationError("mode indices start at 1");
    return *std::max_element(ns.begin(), ns.end());
}

} // namespace

NormReport eigen_norm_exponent(double p, std::span<const std::size_t> ns, std::size_t resolution)
{
    const std::size_t n_max = max_of(ns);
    const auto need = static_cast<std::size_t>(std::ceil(p / 2.0 + 1.0)) * n_max;
    if (resolution < need)
        throw ValidationError("resolution " + std::to_string(resolution) +
                              " is too coarse for L^p norms up to mode " + std::to_string(n_max) +
                              " (needs " + std::to_string(need) + ")");
    const RadialGrid grid(resolution);
    std::vector<NormRow> rows;
    for (auto n : ns)
        rows.push_back({n, lp_norm(grid.synthesize(SpectralField::mode(n, n)), grid, p)});
    return fit_rows(std::move(rows));
}

NormReport product_norm_exponent(int m, std::span<const std::size_t> ns, std::size_t resolution)
{
    if (m < 2)
        throw ValidationError("product norms need m >= 2");
    const std::size_t n_max = max_of(ns);
    const std::size_t need = static_cast<std::size_t>(m + 1) * n_max;
    if (resolution < need)
        throw ValidationError("resolution " + std::to_string(resolution) +
                              " is too coarse for products of " + std::to_string(m) +
                              " copies of mode " + std::to_string(n_max) + " (needs " +
                              std::to_string(need) + ")");
    const RadialGrid grid(resolution);
    const auto r = grid.nodes();
    const auto w = grid.weights();
    std::vector<NormRow> rows;
    for (auto n : ns) {
        double sum = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j)
            sum += w[j] * std::pow(std::abs(eigenfunction_value(n, r[j])), 2.0 * m);
        rows.push_back({n, sum});
    }
    return fit_rows(std::move(rows));
}

FrequencyBand random_band(std::size_t N, std::size_t dim, Rng& rng)
{
    if (N == 0 || dim < 2 * N)
        throw ValidationError("band [N, 2N] needs N >= 1 and dim >= 2N");
    std::normal_distribution<double> normal(0.0, 1.0);
    FrequencyBand band{N, SpectralField(dim)};
    for (std::size_t n = N; n <= 2 * N; ++n) {
        const double re = normal(rng);
        const double im = normal(rng);
        band.content(n) = complex(re, im);
    }
    band.content *= 1.0 / std::sqrt(mass(band.content));
    return band;
}

namespace {

double field_mass(const SpectralField& u)
{
    double s = 0.0;
    for (const auto& c : u.coeffs())
        s += std::norm(c);
    return s;
}

} // namespace

double multilinear_ratio(std::span<const FrequencyBand> bands_in, const RadialGrid& grid,
                         const MultilinearOptions& opt)
{
    const std::size_t m = bands_in.size();
    if (m < 2)
        throw ValidationError("multilinear ratio needs at least two bands");
    std::vector<FrequencyBand> bands(bands_in.begin(), bands_in.end());
    std::stable_sort(bands.begin(), bands.end(),
                     [](const auto& a, const auto& b) { return a.N > b.N; });

    std::size_t top = 0;
    for (const auto& b : bands) {
        if (b.N == 0)
            throw ValidationError("band needs N >= 1");
        const auto c = b.content.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::size_t n = i + 1;
            if ((n < b.N || n > 2 * b.N) && c[i] != complex(0.0))
                throw ValidationError("band content has modes outside [N, 2N]");
        }
        top = std::max(top, b.content.dim());
    }
    const std::size_t need = (m + 1) * top;
    if (grid.resolution() < need)
        throw ValidationError("grid resolution " + std::to_string(grid.resolution()) +
                              " cannot resolve a product of " + std::to_string(m) +
                              " fields of dimension " + std::to_string(top) + " (needs " +
                              std::to_string(need) + ")");

    double norms = 1.0;
    for (const auto& b : bands) {
        const double mb = field_mass(b.content);
        if (!(mb > 0.0))
            throw ValidationError("band content is zero");
        norms *= std::sqrt(mb);
    }

    const double n_top = static_cast<double>(2 * bands.front().N);
    const auto steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(opt.time_factor * n_top * n_top));
    const auto w = grid.weights();
    std::vector<complex> prod(grid.resolution());
    double integral = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
        std::fill(prod.begin(), prod.end(), complex(1.0));
        for (std::size_t j = 0; j < m; ++j) {
            const SpectralField evolved = linear_propagate(bands[j].content, t);
            const PhysicalField v = (j == 0 && opt.derivative) ? grid.radial_derivative(evolved)
                                                               : grid.synthesize(evolved);
            for (std::size_t i = 0; i < prod.size(); ++i)
                prod[i] *= v.values[i];
        }
        double s = 0.0;
        for (std::size_t i = 0; i < prod.size(); ++i)
            s += w[i] * std::norm(prod[i]);
        integral += s;
    }
    const double lhs = std::sqrt(integral / static_cast<double>(steps));

    const double md = static_cast<double>(m);
    const double e2 = 1.0 - 1.0 / (2.0 * md - 2.0);
    const double e3 = 1.5 - 1.0 / (2.0 * md - 2.0);
    double scale = std::pow(static_cast<double>(bands[1].N), e2);
    for (std::size_t j = 2; j < m; ++j)
        scale *= std::pow(static_cast<double>(bands[j].N), e3);
    if (opt.derivative)
        scale *= static_cast<double>(bands[0].N);
    return lhs / (norms * scale);
}

MultilinearReport multilinear_ladder(int m, std::span<const std::size_t> Ns, std::size_t draws,
                                     std::uint64_t seed, const MultilinearOptions& opt,
                                     std::size_t workers)
{
    if (m < 2)
        throw ValidationError("multilinear ladder needs m >= 2");
    if (draws == 0 || Ns.empty())
        throw ValidationError("multilinear ladder needs draws >= 1 and a nonempty ladder");
    const auto mm = static_cast<std::size_t>(m);
    std::vector<RadialGrid> grids;
    for (auto N : Ns)
        grids.emplace_back((mm + 1) * 2 * N);

    const auto ratios = parallel_map(Ns.size() * draws, workers, [&](std::size_t task) {
        const std::size_t rung = task / draws;
        Rng rng = trajectory_rng(seed, task);
        std::vector<FrequencyBand> bands;
        for (std::size_t j = 0; j < mm; ++j)
            bands.push_back(random_band(Ns[rung], 2 * Ns[rung], rng));
        return multilinear_ratio(bands, grids[rung], opt);
    });

    MultilinearReport rep;
    std::vector<double> x, ymax, ymean;
    for (std::size_t rung = 0; rung < Ns.size(); ++rung) {
        MultilinearRow row{Ns[rung], 0.0, 0.0};
        double sum = 0.0;
        for (std::size_t d = 0; d < draws; ++d) {
            const double r = ratios[rung * draws + d];
            row.max_ratio = std::max(row.max_ratio, r);
            sum += r;
        }
        row.mean_ratio = sum / static_cast<double>(draws);
        rep.rows.push_back(row);
        x.push_back(static_cast<double>(row.N));
        ymax.push_back(row.max_ratio);
        ymean.push_back(row.mean_ratio);
    }
    if (x.size() >= 2) {
        rep.max_fit = loglog_fit(x, ymax);
        rep.mean_fit = loglog_fit(x, ymean);
    }
    return rep;
}

double radial_sobolev_quotient(const SpectralField& u, const RadialGrid& grid)
{
    const double h1 = sobolev_norm(u, 1.0, SobolevWeight::Inhomogeneous);
    if (!(h1 > 0.0))
        throw ValidationError("radial Sobolev quotient of the zero field");
    double sup = 0.0;
    for (const auto& v : grid.weighted_values(u))
        sup = std::max(sup, std::abs(v));
    return sup / h1;
}

SobolevRatioReport radial_sobolev_ratio(std::size_t samples, std::size_t dim, Rng& rng)
{
    if (samples == 0 || dim == 0)
        throw ValidationError("radial Sobolev ratio needs samples >= 1 and dim >= 1");
    const RadialGrid grid(8 * dim - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    SobolevRatioReport rep;
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        SpectralField u(dim);
        for (std::size_t n = 1; n <= dim; ++n) {
            const double re = normal(rng);
            const double im = normal(rng);
            u(n) = complex(re, im) / (std::sqrt(2.0) * static_cast<double>(n * n));
        }
        const double q = radial_sobolev_quotient(u, grid);
        rep.max_ratio = std::max(rep.max_ratio, q);
        sum += q;
    }
    rep.samples = samples;
    rep.mean_ratio = sum / static_cast<double>(samples);
    return rep;
}

} // namespace nlsball
