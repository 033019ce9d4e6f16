#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssea {

/// Fitness values are signed 64-bit integers. Every objective in this library
/// is integer-valued (or made so by an order-preserving scaling), which keeps
/// selection and replacement exact.
using Fitness = std::int64_t;

/// Fixed-length bit string over {0,1}^n, word-packed. The length is set at
/// construction and never changes. Bit 0 is the first character of the
/// string form, i.e. "1010" has bit(0)==1 and bit(3)==0.
class Genotype {
  public:
    Genotype() = default;

    explicit Genotype(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {
        if (n == 0)
            throw std::invalid_argument("genotype dimension must be positive");
    }

    static Genotype from_string(std::string_view s) {
        Genotype g(static_cast<std::uint32_t>(s.size()));
        for (std::uint32_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                g.set_bit(i, true);
            else if (s[i] != '0')
                throw std::invalid_argument("genotype string must contain only 0/1");
        }
        return g;
    }

    std::uint32_t size() const { return n_; }

    bool bit(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set_bit(std::uint32_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip_bit(std::uint32_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::uint32_t count_ones() const {
        std::uint32_t c = 0;
        for (std::uint64_t w : words_)
            c += static_cast<std::uint32_t>(std::popcount(w));
        return c;
    }

    /// Number of ones among bits [0, k).
    std::uint32_t count_prefix_ones(std::uint32_t k) const { return count_ones_range(0, k); }

    /// Number of ones among bits [lo, hi).
    std::uint32_t count_ones_range(std::uint32_t lo, std::uint32_t hi) const {
        if (lo >= hi)
            return 0;
        const std::uint32_t wl = lo >> 6, wh = (hi - 1) >> 6;
        std::uint64_t first = ~std::uint64_t{0} << (lo & 63);
        std::uint64_t last = ~std::uint64_t{0} >> (63 - ((hi - 1) & 63));
        if (wl == wh)
            return static_cast<std::uint32_t>(std::popcount(words_[wl] & first & last));
        std::uint32_t c = static_cast<std::uint32_t>(std::popcount(words_[wl] & first));
        for (std::uint32_t w = wl + 1; w < wh; ++w)
            c += static_cast<std::uint32_t>(std::popcount(words_[w]));
        c += static_cast<std::uint32_t>(std::popcount(words_[wh] & last));
        return c;
    }

    /// Length of the all-ones run ending just before bit `hi`, looking no
    /// further down than bit `lo`. ("Trailing ones" of the range [lo, hi).)
    std::uint32_t trailing_ones_in_range(std::uint32_t lo, std::uint32_t hi) const {
        std::uint32_t run = 0;
        std::uint32_t i = hi;
        while (i > lo) {
            const std::uint32_t w = (i - 1) >> 6;
            std::uint64_t word = words_[w];
            // Mask out bits at and above i within this word.
            const std::uint32_t top = (i - 1) & 63;
            if (top != 63)
                word |= ~std::uint64_t{0} << (top + 1);
            std::uint64_t zeros = ~word;
            if (zeros == 0) {
                const std::uint32_t avail = i - std::max(lo, w << 6);
                const std::uint32_t wordspan = i - (w << 6);
                if (avail < wordspan)
                    return run + avail;
                run += wordspan;
                i = w << 6;
                continue;
            }
            const std::uint32_t z = 63 - static_cast<std::uint32_t>(std::countl_zero(zeros));
            // z is the highest zero bit position <= top in this word.
            const std::uint32_t stop = (w << 6) + z + 1;
            if (stop <= lo)
                return run + (i - lo);
            return run + (i - stop);
        }
        return run;
    }

    Genotype complemented() const {
        Genotype g(*this);
        for (auto& w : g.words_)
            w = ~w;
        g.mask_top();
        return g;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::uint32_t i = 0; i < n_; ++i)
            if (bit(i))
                s[i] = '1';
        return s;
    }

    std::span<std::uint64_t> words() { return words_; }
    std::span<const std::uint64_t> words() const { return words_; }

    /// Clears any bits beyond position n-1 in the top word.
    void mask_top() {
        const std::uint32_t rem = n_ & 63;
        if (rem != 0)
            words_.back() &= ~std::uint64_t{0} >> (64 - rem);
    }

    friend bool operator==(const Genotype& a, const Genotype& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

  private:
    std::uint32_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// |x|_1, the number of one-bits.
inline std::uint32_t hamming_weight(const Genotype& x) { return x.count_ones(); }

} // namespace ssea
