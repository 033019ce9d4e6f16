#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "problem.hpp"

namespace ssea {

// ---------------------------------------------------------------------------
// TwoMax family
// ---------------------------------------------------------------------------

namespace detail {

/// |n/2 - |x|_1|, kept integral for odd n by doubling (order-preserving).
inline Fitness twomax_value(std::uint32_t n, std::uint32_t ones) {
    const auto diff = std::abs(static_cast<std::int64_t>(n) - 2 * static_cast<std::int64_t>(ones));
    return (n % 2 == 0) ? diff / 2 : diff;
}

inline Fitness twomax_scale(std::uint32_t n) { return n % 2 == 0 ? 1 : 2; }

} // namespace detail

/// TwoMax: two symmetric slopes of perfect fitness-distance correlation with
/// global optima at the all-ones and all-zeros strings, meeting in a valley
/// of fitness 0 at |x|_1 = n/2.
inline Fitness two_max(const Genotype& x) {
    return detail::twomax_value(x.size(), x.count_ones());
}

/// TwoMax with the left branch cut off below |x|_1 = n/2 - k: the value is
/// TwoMax(x) when |x|_1 >= n/2 - k and 0 otherwise, so the left peak becomes
/// the plateau {x : |x|_1 = n/2 - k} of height k. k = n/2 recovers TwoMax.
inline Fitness truncated_two_max(const Genotype& x, std::uint32_t k) {
    const std::uint32_t n = x.size();
    if (2 * k > n)
        throw std::invalid_argument("truncated_two_max: k must be at most n/2");
    const std::uint32_t ones = x.count_ones();
    // |x|_1 >= n/2 - k, written in doubled form to stay exact for odd n.
    if (2 * static_cast<std::int64_t>(ones) < static_cast<std::int64_t>(n) - 2 * static_cast<std::int64_t>(k))
        return 0;
    return detail::twomax_value(n, ones);
}

class TwoMaxProblem final : public Problem {
  public:
    /// Without a truncation height this is plain TwoMax; with one, the left
    /// branch is cut off at height k.
    explicit TwoMaxProblem(std::uint32_t n, std::optional<std::uint32_t> truncation = std::nullopt)
        : n_(n), trunc_(truncation) {
        if (n < 2)
            throw std::invalid_argument("twomax: n must be at least 2");
        if (trunc_ && 2 * *trunc_ > n)
            throw std::invalid_argument("twomax: truncation must be at most n/2");
        if (trunc_ && 2 * *trunc_ == n)
            trunc_.reset(); // k = n/2 is plain TwoMax
    }

    std::uint32_t dimension() const override { return n_; }
    Fitness evaluate(const Genotype& x) const override {
        return trunc_ ? truncated_two_max(x, *trunc_) : two_max(x);
    }
    std::string name() const override { return truncated() ? "truncated-twomax" : "twomax"; }

    bool truncated() const { return trunc_.has_value(); }
    std::uint32_t truncation() const { return trunc_.value_or(n_ / 2); }
    /// Weight of the left peak: n/2 - k (the all-zeros string when
    /// untruncated; for odd n, the lowest weight above the cut-off).
    std::uint32_t left_peak_weight() const {
        return trunc_ ? (n_ - 2 * *trunc_ + 1) / 2 : 0;
    }

    std::optional<Fitness> known_max() const override {
        return detail::twomax_value(n_, n_);
    }
    Fitness left_peak_value() const { return detail::twomax_value(n_, left_peak_weight()); }

    std::uint32_t peak_count() const override { return 2; }
    std::string peak_name(std::uint32_t i) const override {
        if (truncated())
            return i == 0 ? "LeftPeak" : "GlobalPeak";
        return i == 0 ? "AllZeros" : "AllOnes";
    }
    std::uint64_t peak_mask(const Genotype& x) const override {
        const std::uint32_t ones = x.count_ones();
        std::uint64_t mask = 0;
        if (ones == left_peak_weight())
            mask |= 1;
        if (ones == n_)
            mask |= 2;
        return mask;
    }

    /// The truncated left plateau is absorbing: every mutation from it is
    /// rejected (or swaps one plateau point for another), so plateau members
    /// monopolising the population minimum freeze inverse selection.
    std::optional<Fitness> trap_fitness() const override {
        if (!truncated())
            return std::nullopt;
        return left_peak_value();
    }
    bool is_trap_member(const Genotype& x, Fitness f) const override {
        return truncated() && f == left_peak_value() && x.count_ones() == left_peak_weight();
    }

  private:
    std::uint32_t n_;
    std::optional<std::uint32_t> trunc_;
};

// ---------------------------------------------------------------------------
// Ridge with branches
// ---------------------------------------------------------------------------

/// Inner ridge function over a string of length L (with branch spacing
/// floor(sqrt(L))): ridge points 0^(L-i) 1^i and off-branch points
/// y 0^(L-i-k) 1^i at i in {k, 2k, ..., (k-2)k} score (i+3)*scale + |x|_1;
/// everything else scores 0. `lo`/`hi` select the evaluated substring.
inline Fitness ridge_g_range(const Genotype& x, std::uint32_t lo, std::uint32_t hi, Fitness scale) {
    const std::uint32_t len = hi - lo;
    if (len < 9)
        throw std::invalid_argument("ridge_g: length must be at least 9");
    auto k = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(len)));
    while (k * k > len)
        --k;
    while ((k + 1) * (k + 1) <= len)
        ++k;
    const std::uint32_t trailing = x.trailing_ones_in_range(lo, hi);
    const std::uint32_t total = x.count_ones_range(lo, hi);
    if (trailing == total)
        return (static_cast<Fitness>(trailing) + 3) * scale + trailing;
    if (trailing >= k && trailing <= (k - 2) * k && trailing % k == 0 &&
        x.count_ones_range(lo + k, hi - trailing) == 0)
        return (static_cast<Fitness>(trailing) + 3) * scale + total;
    return 0;
}

inline Fitness ridge_g(const Genotype& x, Fitness scale) {
    return ridge_g_range(x, 0, x.size(), scale);
}

/// Ridge-with-branches over x = x'x'' with |x'| = floor(n/2) and
/// |x''| = ceil(n/2): a OneMax-style gradient pulls the suffix to all-zeros,
/// then the prefix, and from 0^n the inner ridge ascends through the suffix.
/// The inner function is scaled by the full dimension n so fitness increases
/// strictly along that intended path.
inline Fitness ridge_with_branches(const Genotype& x) {
    const std::uint32_t n = x.size();
    const std::uint32_t m1 = n / 2;
    const Fitness fn = n;
    const bool prefix_zero = x.count_ones_range(0, m1) == 0;
    if (prefix_zero)
        return ridge_g_range(x, m1, n, fn);
    const std::uint32_t suffix_ones = x.count_ones_range(m1, n);
    if (suffix_ones == 0)
        return 2 * fn - x.count_ones_range(0, m1);
    return fn - suffix_ones;
}

/// Variant with the optimal value n^3 moved to the local optimum carrying
/// j*k trailing ones, i.e. 0^m' 1^k 0^(m'-(j+1)k) 1^(jk); all other points
/// keep their ridge_with_branches value. Requires n = 2k^2.
inline Fitness ridge_with_branches_j(const Genotype& x, std::uint32_t j) {
    const std::uint32_t n = x.size();
    const auto k = static_cast<std::uint32_t>(std::round(std::sqrt(n / 2.0)));
    if (2 * k * k != n || k < 3)
        throw std::invalid_argument("ridge_with_branches_j: n must equal 2k^2 with k >= 3");
    if (j < 1 || j > k - 1)
        throw std::invalid_argument("ridge_with_branches_j: j must lie in [1, k-1]");
    const std::uint32_t m1 = n / 2;
    if (x.count_ones_range(0, m1) == 0 && x.count_ones_range(m1, m1 + k) == k &&
        x.count_ones_range(m1 + k, n - j * k) == 0 && x.count_ones_range(n - j * k, n) == j * k)
        return static_cast<Fitness>(n) * n * n;
    return ridge_with_branches(x);
}

class RidgeProblem final : public Problem {
  public:
    /// n = 2k^2, m' = m'' = k^2. Without a target branch j the global
    /// optimum is the ridge end 0^m' 1^m''; with j the optimal value n^3
    /// sits on the branch-j local optimum.
    explicit RidgeProblem(std::uint32_t k, std::optional<std::uint32_t> j = std::nullopt)
        : k_(k), j_(j) {
        if (k < 3)
            throw std::invalid_argument("ridge: k must be at least 3");
        if (j && (*j < 1 || *j > k - 1))
            throw std::invalid_argument("ridge: j must lie in [1, k-1]");
        n_ = 2 * k * k;
    }

    std::uint32_t dimension() const override { return n_; }
    Fitness evaluate(const Genotype& x) const override {
        return j_ ? ridge_with_branches_j(x, *j_) : ridge_with_branches(x);
    }
    std::string name() const override { return j_ ? "ridge-j" : "ridge"; }

    std::uint32_t ridge_k() const { return k_; }
    std::optional<std::uint32_t> branch_j() const { return j_; }

    std::optional<Fitness> known_max() const override {
        if (j_)
            return static_cast<Fitness>(n_) * n_ * n_;
        const Fitness m2 = n_ / 2;
        return (m2 + 3) * static_cast<Fitness>(n_) + m2;
    }

    // Peaks: 0 = designated optimum, 1 = ridge end, 2.. = branch optima in
    // branch order (i = k, 2k, ..., (k-2)k).
    std::uint32_t peak_count() const override { return 2 + (k_ - 2); }
    std::string peak_name(std::uint32_t i) const override {
        if (i == 0)
            return "DesignatedOptimum";
        if (i == 1)
            return "RidgeEnd";
        return "BranchOptimum(" + std::to_string((i - 1) * k_) + ")";
    }
    std::uint64_t peak_mask(const Genotype& x) const override {
        const std::uint32_t m1 = n_ / 2;
        std::uint64_t mask = 0;
        if (x.count_ones_range(0, m1) != 0)
            return 0;
        if (x.count_ones_range(m1, n_) == m1)
            mask |= 2; // ridge end 0^m' 1^m''
        for (std::uint32_t b = 1; b <= k_ - 2; ++b) {
            const std::uint32_t i = b * k_;
            if (x.count_ones_range(m1, m1 + k_) == k_ &&
                x.count_ones_range(m1 + k_, n_ - i) == 0 &&
                x.count_ones_range(n_ - i, n_) == i)
                mask |= std::uint64_t{1} << (1 + b);
        }
        if (j_) {
            const std::uint32_t dj = *j_;
            if (x.count_ones_range(m1, m1 + k_) == k_ &&
                x.count_ones_range(m1 + k_, n_ - dj * k_) == 0 &&
                x.count_ones_range(n_ - dj * k_, n_) == dj * k_)
                mask |= 1;
        } else if (mask & 2) {
            // Unmodified function: the designated optimum is the ridge end.
            mask |= 1;
        }
        return mask;
    }

  private:
    std::uint32_t k_;
    std::uint32_t n_;
    std::optional<std::uint32_t> j_;
};

// ---------------------------------------------------------------------------
// TwoGradients
// ---------------------------------------------------------------------------

struct TwoGradientsShape {
    std::uint32_t ell;       // suffix length
    std::uint32_t m;         // prefix length, always a multiple of 3
    std::uint32_t threshold; // 2m/3, exact
};

/// Splits dimension n into prefix/suffix. The suffix length starts at
/// floor(n^(1/3)) and grows by at most 2 so the prefix length is a multiple
/// of 3, keeping the 2m/3 threshold an exact integer.
inline TwoGradientsShape two_gradients_shape(std::uint32_t n) {
    std::uint32_t ell = 1;
    while (static_cast<std::uint64_t>(ell + 1) * (ell + 1) * (ell + 1) <= n)
        ++ell;
    ell += (n - ell) % 3;
    if (ell >= n)
        throw std::invalid_argument("two_gradients: n too small");
    const std::uint32_t m = n - ell;
    return {ell, m, 2 * m / 3};
}

/// Number of leading ones in the final ell bits.
inline std::uint32_t lso(const Genotype& x, std::uint32_t ell) {
    const std::uint32_t n = x.size();
    if (ell > n)
        throw std::invalid_argument("lso: suffix longer than genotype");
    std::uint32_t run = 0;
    while (run < ell && x.bit(n - ell + run))
        ++run;
    return run;
}

/// Two gradients of different steepness that must be optimised in parallel:
/// while PO(x) <= 2m/3 the value n^2*LSO(x) + PO(x) rewards suffix progress
/// above everything; any point with PO(x) > 2m/3 scores n^2*ell - m - 1 +
/// PO(x), beating every point with non-maximal LSO. The global optimum sits
/// at LSO = ell, PO = 2m/3; PO = m is a trap one fitness step below.
inline Fitness two_gradients(const Genotype& x) {
    const auto shape = two_gradients_shape(x.size());
    const std::uint32_t po = x.count_prefix_ones(shape.m);
    const std::uint32_t ls = lso(x, shape.ell);
    const Fitness n2 = static_cast<Fitness>(x.size()) * x.size();
    if (po <= shape.threshold)
        return n2 * ls + po;
    return n2 * shape.ell - shape.m - 1 + po;
}

class TwoGradientsProblem final : public Problem {
  public:
    explicit TwoGradientsProblem(std::uint32_t n) : n_(n), shape_(two_gradients_shape(n)) {}

    std::uint32_t dimension() const override { return n_; }
    std::string name() const override { return "twogradients"; }

    Fitness evaluate(const Genotype& x) const override {
        const std::uint32_t po = x.count_prefix_ones(shape_.m);
        const std::uint32_t ls = lso(x, shape_.ell);
        const Fitness n2 = static_cast<Fitness>(n_) * n_;
        if (po <= shape_.threshold)
            return n2 * ls + po;
        return n2 * shape_.ell - shape_.m - 1 + po;
    }

    const TwoGradientsShape& shape() const { return shape_; }

    Fitness optimum_value() const {
        return static_cast<Fitness>(n_) * n_ * shape_.ell + shape_.threshold;
    }
    /// All trap members (PO = m) share this value regardless of suffix.
    Fitness local_value() const { return static_cast<Fitness>(n_) * n_ * shape_.ell - 1; }

    std::optional<Fitness> known_max() const override { return optimum_value(); }

    std::uint32_t peak_count() const override { return 2; }
    std::string peak_name(std::uint32_t i) const override { return i == 0 ? "LOC" : "OPT"; }
    std::uint64_t peak_mask(const Genotype& x) const override {
        const std::uint32_t po = x.count_prefix_ones(shape_.m);
        std::uint64_t mask = 0;
        if (po == shape_.m)
            mask |= 1;
        if (po == shape_.threshold && lso(x, shape_.ell) == shape_.ell)
            mask |= 2;
        return mask;
    }

    std::optional<Fitness> trap_fitness() const override { return local_value(); }
    bool is_trap_member(const Genotype&, Fitness f) const override {
        // PO = m is the only way to attain the local value.
        return f == local_value();
    }

  private:
    std::uint32_t n_;
    TwoGradientsShape shape_;
};

} // namespace ssea
