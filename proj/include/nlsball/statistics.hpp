#pragma once

// Mergeable running statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlsball {

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(const CompensatedSum& o) noexcept
    {
        add(o.sum_);
        add(o.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Count, compensated mean and Welford variance; merge uses the pairwise update.
class RunningStat {
public:
    void add(double x) noexcept
    {
        ++n_;
        sum_.add(x);
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStat& o) noexcept
    {
        if (o.n_ == 0)
            return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const double d = o.mean_ - mean_;
        m2_ = m2_ + o.m2_ + d * d * (na * nb / n);
        mean_ = (na * mean_ + nb * o.mean_) / n;
        n_ += o.n_;
        sum_.merge(o.sum_);
    }

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return n_ ? sum_.value() / static_cast<double>(n_) : 0.0; }
    double variance() const noexcept
    {
        return n_ > 1 ? std::max(0.0, m2_ / static_cast<double>(n_ - 1)) : 0.0;
    }
    double stddev() const noexcept { return std::sqrt(variance()); }
    /// Standard error of the mean assuming independent samples.
    double standard_error() const noexcept
    {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::uint64_t n_ = 0;
    CompensatedSum sum_;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Fixed-edge histogram with under/overflow counters.
class Histogram {
public:
    Histogram() = default;
    Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0)
    {
        if (!(hi > lo) || bins == 0)
            throw std::invalid_argument("histogram needs hi > lo and at least one bin");
    }

    void add(double x) noexcept
    {
        if (x < lo_) {
            ++underflow_;
            return;
        }
        if (x >= hi_) {
            // The right edge belongs to the last bin.
            if (x == hi_)
                ++counts_.back();
            else
                ++overflow_;
            return;
        }
        auto k = static_cast<std::size_t>((x - lo_) / (hi_ - lo_) * static_cast<double>(counts_.size()));
        if (k >= counts_.size())
            k = counts_.size() - 1;
        ++counts_[k];
    }

    void merge(const Histogram& o)
    {
        if (counts_.empty()) {
            *this = o;
            return;
        }
        if (o.counts_.empty())
            return;
        if (o.lo_ != lo_ || o.hi_ != hi_ || o.counts_.size() != counts_.size())
            throw std::invalid_argument("cannot merge histograms with different edges");
        for (std::size_t i = 0; i < counts_.size(); ++i)
            counts_[i] += o.counts_[i];
        underflow_ += o.underflow_;
        overflow_ += o.overflow_;
    }

    std::vector<double> edges() const
    {
        std::vector<double> e(counts_.size() + 1);
        for (std::size_t i = 0; i <= counts_.size(); ++i)
            e[i] = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(counts_.size());
        return e;
    }

    /// Bin probabilities over in-range samples; sums to 1 when any sample landed in range.
    std::vector<double> masses() const
    {
        std::uint64_t total = 0;
        for (auto c : counts_)
            total += c;
        std::vector<double> m(counts_.size(), 0.0);
        if (total == 0)
            return m;
        for (std::size_t i = 0; i < counts_.size(); ++i)
            m[i] = static_cast<double>(counts_[i]) / static_cast<double>(total);
        return m;
    }

    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    std::uint64_t underflow() const noexcept { return underflow_; }
    std::uint64_t overflow() const noexcept { return overflow_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    friend bool operator==(const Histogram&, const Histogram&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    std::vector<std::uint64_t> counts_;
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
};

/// L1 distance between two normalized histograms on identical edges.
inline double histogram_l1_distance(const Histogram& a, const Histogram& b)
{
    const auto pa = a.masses();
    const auto pb = b.masses();
    if (pa.size() != pb.size() || a.lo() != b.lo() || a.hi() != b.hi())
        throw std::invalid_argument("histogram distance needs identical edges");
    double d = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i)
        d += std::abs(pa[i] - pb[i]);
    return d;
}

} // namespace nlsball
