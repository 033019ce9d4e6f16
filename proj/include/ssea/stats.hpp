#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ssea::stats {

/// Matched observations (value_a, value_b), one per paired run.
struct PairedSample {
    std::vector<std::pair<double, double>> pairs;
};

struct TestResult {
    double w_plus = 0;      // rank sum of positive differences (a - b > 0)
    double w_minus = 0;     // rank sum of negative differences
    double statistic = 0;   // W = min(w_plus, w_minus)
    double z = 0;           // normal approximation score for W
    double p_one_sided = 0; // P(rank sum <= W) under the null
    double p_two_sided = 0;
    std::size_t n_effective = 0; // pairs with nonzero difference
    bool exact = false;          // exact enumeration vs normal approximation
};

namespace detail {

struct RankedDiffs {
    std::vector<double> ranks; // rank of |d_i|, average ranks on ties
    std::vector<bool> positive;
    std::vector<std::size_t> tie_sizes;
};

inline RankedDiffs rank_differences(const PairedSample& sample) {
    std::vector<double> abs_diffs;
    std::vector<bool> positive;
    for (const auto& [a, b] : sample.pairs) {
        const double d = a - b;
        if (d == 0)
            continue; // zero differences are discarded
        abs_diffs.push_back(std::fabs(d));
        positive.push_back(d > 0);
    }
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return abs_diffs[i] < abs_diffs[j]; });
    RankedDiffs out;
    out.ranks.resize(n);
    out.positive = std::move(positive);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && abs_diffs[order[j]] == abs_diffs[order[i]])
            ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            out.ranks[order[k]] = avg_rank;
        out.tie_sizes.push_back(j - i);
        i = j;
    }
    return out;
}

/// Exact null tail P(signed rank sum <= w) by counting sign assignments
/// with a subset-sum table over doubled ranks (doubling makes average ranks
/// integral). Cost O(n * n(n+1)), fine for the n <= 25 exact regime.
inline double exact_tail(const std::vector<double>& ranks, double w) {
    std::vector<std::uint64_t> doubled;
    std::uint64_t total = 0;
    for (double r : ranks) {
        const auto d = static_cast<std::uint64_t>(std::llround(2 * r));
        doubled.push_back(d);
        total += d;
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    std::uint64_t reach = 0;
    for (std::uint64_t d : doubled) {
        reach += d;
        for (std::uint64_t s = reach + 1; s-- > d;)
            count[s] += count[s - d];
    }
    const auto limit = static_cast<std::uint64_t>(std::floor(2 * w + 1e-9));
    double below = 0;
    for (std::uint64_t s = 0; s <= std::min(limit, total); ++s)
        below += count[s];
    return below / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Normal-approximation tail for the rank sum with tie-corrected variance
/// and continuity correction.
inline double approx_tail(const RankedDiffs& rd, double w, double* z_out) {
    const auto n = static_cast<double>(rd.ranks.size());
    const double mean = n * (n + 1) / 4.0;
    double tie_term = 0;
    for (std::size_t t : rd.tie_sizes) {
        const auto td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
    if (var <= 0) {
        if (z_out)
            *z_out = 0;
        return 1.0;
    }
    const double z = (w - mean + 0.5) / std::sqrt(var);
    if (z_out)
        *z_out = z;
    return normal_cdf(z);
}

constexpr std::size_t kExactCutoff = 25;

} // namespace detail

/// Wilcoxon signed-rank test. Zero differences are discarded; absolute
/// differences get average ranks on ties; W is the smaller signed rank sum.
/// Up to 25 effective pairs the p-value is exact (all 2^n sign assignments);
/// beyond that a tie-corrected normal approximation with continuity
/// correction is used. The two-sided p is min(1, 2 * one-sided).
inline TestResult wilcoxon_signed_rank(const PairedSample& sample) {
    const auto rd = detail::rank_differences(sample);
    if (rd.ranks.empty())
        throw std::invalid_argument("wilcoxon: all differences are zero");
    TestResult r;
    r.n_effective = rd.ranks.size();
    for (std::size_t i = 0; i < rd.ranks.size(); ++i)
        (rd.positive[i] ? r.w_plus : r.w_minus) += rd.ranks[i];
    r.statistic = std::min(r.w_plus, r.w_minus);
    if (r.n_effective <= detail::kExactCutoff) {
        r.exact = true;
        r.p_one_sided = detail::exact_tail(rd.ranks, r.statistic);
        detail::approx_tail(rd, r.statistic, &r.z);
    } else {
        r.exact = false;
        r.p_one_sided = detail::approx_tail(rd, r.statistic, &r.z);
    }
    r.p_two_sided = std::min(1.0, 2 * r.p_one_sided);
    return r;
}

/// One-sided test of "a exceeds b": the statistic is the negative rank sum,
/// small when differences are predominantly positive.
inline double wilcoxon_p_greater(const PairedSample& sample) {
    const auto rd = detail::rank_differences(sample);
    if (rd.ranks.empty())
        throw std::invalid_argument("wilcoxon: all differences are zero");
    double w_minus = 0;
    for (std::size_t i = 0; i < rd.ranks.size(); ++i)
        if (!rd.positive[i])
            w_minus += rd.ranks[i];
    if (rd.ranks.size() <= detail::kExactCutoff)
        return detail::exact_tail(rd.ranks, w_minus);
    return detail::approx_tail(rd, w_minus, nullptr);
}

/// Holm-Bonferroni step-down: reject the i-th smallest p while
/// p_(i) <= alpha / (m - i); the first failure stops all later rejections.
/// Decisions are returned in input order.
inline std::vector<bool> holm_bonferroni(const std::vector<double>& p_values, double alpha) {
    for (double p : p_values)
        if (p < 0 || p > 1)
            throw std::invalid_argument("holm_bonferroni: p-values must lie in [0,1]");
    if (alpha <= 0 || alpha >= 1)
        throw std::invalid_argument("holm_bonferroni: alpha must lie in (0,1)");
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });
    std::vector<bool> reject(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (p_values[order[i]] <= alpha / static_cast<double>(m - i))
            reject[order[i]] = true;
        else
            break;
    }
    return reject;
}

} // namespace ssea::stats
