#pragma once

// Independent brute-force evaluators used as test oracles. These are written
// against the mathematical definitions directly, over plain int vectors and
// with literal pattern scans, on purpose sharing no code with the library
// implementations they check.

#include <cstdint>
#include <vector>

#include <ssea/genotype.hpp>

namespace oracle {

using Bits = std::vector<int>;

inline Bits bits_from_value(std::uint64_t value, int n) {
    Bits x(n, 0);
    for (int i = 0; i < n; ++i)
        x[i] = static_cast<int>((value >> i) & 1u);
    return x;
}

inline ssea::Genotype to_genotype(const Bits& x) {
    ssea::Genotype g(static_cast<std::uint32_t>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i])
            g.set_bit(static_cast<std::uint32_t>(i), true);
    return g;
}

inline int ones(const Bits& x) {
    int c = 0;
    for (int b : x)
        c += b;
    return c;
}

// |n/2 - |x|_1|, doubled when n is odd so the value stays integral.
inline long long two_max(const Bits& x) {
    const long long n = static_cast<long long>(x.size());
    const long long doubled = std::llabs(n - 2 * ones(x));
    return n % 2 == 0 ? doubled / 2 : doubled;
}

inline long long truncated_two_max(const Bits& x, int k) {
    const long long n = static_cast<long long>(x.size());
    if (2 * ones(x) < n - 2 * k)
        return 0;
    return two_max(x);
}

// g over a string of length L with branch spacing kk = floor(sqrt(L)):
// literal scans for the two patterns 0^(L-i) 1^i and y 0^(L-i-kk) 1^i.
inline long long ridge_g(const Bits& x, long long scale) {
    const int L = static_cast<int>(x.size());
    int kk = 0;
    while ((kk + 1) * (kk + 1) <= L)
        ++kk;
    for (int i = 0; i <= L; ++i) {
        bool ridge_point = true;
        for (int p = 0; p < L && ridge_point; ++p)
            if (x[p] != (p >= L - i ? 1 : 0))
                ridge_point = false;
        if (ridge_point)
            return (i + 3) * scale + ones(x);
    }
    for (int i = kk; i <= (kk - 2) * kk; i += kk) {
        bool branch_point = true;
        for (int p = kk; p < L && branch_point; ++p)
            if (x[p] != (p >= L - i ? 1 : 0))
                branch_point = false;
        if (branch_point)
            return (i + 3) * scale + ones(x);
    }
    return 0;
}

// Case split over x = x'x''. `full_scale` selects the inner function's
// scale constant: the full dimension n (the reading where fitness rises
// strictly along the intended path) or the suffix length m''.
inline long long ridge_with_branches(const Bits& x, bool full_scale = true) {
    const int n = static_cast<int>(x.size());
    const int m1 = n / 2;
    const Bits prefix(x.begin(), x.begin() + m1);
    const Bits suffix(x.begin() + m1, x.end());
    const bool prefix_zero = ones(prefix) == 0;
    const bool suffix_zero = ones(suffix) == 0;
    if (prefix_zero)
        return ridge_g(suffix, full_scale ? n : static_cast<int>(suffix.size()));
    if (suffix_zero)
        return 2LL * n - ones(prefix);
    return static_cast<long long>(n) - ones(suffix);
}

inline long long ridge_with_branches_j(const Bits& x, int j) {
    const int n = static_cast<int>(x.size());
    int k = 0;
    while (2 * (k + 1) * (k + 1) <= n)
        ++k;
    const int m1 = n / 2;
    Bits optimum(n, 0);
    for (int p = m1; p < m1 + k; ++p)
        optimum[p] = 1;
    for (int p = n - j * k; p < n; ++p)
        optimum[p] = 1;
    if (x == optimum)
        return static_cast<long long>(n) * n * n;
    return ridge_with_branches(x);
}

// LSO by the literal sum-of-products formula; PO as the prefix sum.
inline int lso(const Bits& x, int ell) {
    const int n = static_cast<int>(x.size());
    int total = 0;
    for (int i = 1; i <= ell; ++i) {
        int prod = 1;
        for (int j = 1; j <= i; ++j)
            prod *= x[n - ell + j - 1];
        total += prod;
    }
    return total;
}

inline long long two_gradients(const Bits& x, int ell, int m, int threshold) {
    const long long n = static_cast<long long>(x.size());
    int po = 0;
    for (int i = 0; i < m; ++i)
        po += x[i];
    const int ls = lso(x, ell);
    if (po <= threshold)
        return n * n * ls + po;
    return n * n * ell - m - 1 + po;
}

// Clause-by-clause MaxSat count using boolean evaluation.
inline long long maxsat(const std::vector<std::vector<int>>& clauses, const Bits& x) {
    long long satisfied = 0;
    for (const auto& clause : clauses) {
        bool sat = false;
        for (int lit : clause) {
            const bool var = x[static_cast<std::size_t>(std::abs(lit)) - 1] != 0;
            if ((lit > 0 && var) || (lit < 0 && !var)) {
                sat = true;
                break;
            }
        }
        if (sat)
            ++satisfied;
    }
    return satisfied;
}

// Penalised MKP fitness in 128-bit arithmetic, immune to any overflow the
// 64-bit implementation might hide.
struct MkpData {
    std::vector<long long> rewards;
    std::vector<std::vector<long long>> weights; // [constraint][item]
    std::vector<long long> capacities;
};

inline __int128 mkp(const MkpData& inst, const Bits& x) {
    __int128 reward_sum = 0;
    __int128 total_reward = 0;
    for (std::size_t j = 0; j < inst.rewards.size(); ++j) {
        total_reward += inst.rewards[j];
        if (x[j])
            reward_sum += inst.rewards[j];
    }
    const __int128 w = total_reward + 1;
    __int128 penalty = 0;
    for (std::size_t i = 0; i < inst.weights.size(); ++i) {
        __int128 load = 0;
        for (std::size_t j = 0; j < inst.weights[i].size(); ++j)
            if (x[j])
                load += inst.weights[i][j];
        const __int128 slack = static_cast<__int128>(inst.capacities[i]) - load;
        if (slack < 0)
            penalty += slack;
    }
    return reward_sum + w * penalty;
}

} // namespace oracle
