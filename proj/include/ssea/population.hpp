#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "genotype.hpp"
#include "rng.hpp"

namespace ssea {

/// Fitness-annotated multiset of genotypes with an ordered fitness index.
/// Slots are stable: replacing the member in slot i keeps every other slot
/// untouched, so observers can follow lineages by slot. The index keeps the
/// members of each distinct fitness value together, which makes min/max
/// queries and uniform tie-breaking O(log #distinct) or better.
class Population {
  public:
    struct Member {
        Genotype genotype;
        Fitness fitness = 0;
        std::uint32_t pos_in_bucket = 0;
    };

    Population() = default;

    explicit Population(std::uint32_t capacity) { members_.reserve(capacity); }

    std::uint32_t size() const { return static_cast<std::uint32_t>(members_.size()); }
    bool empty() const { return members_.empty(); }

    const Member& member(std::uint32_t slot) const { return members_[slot]; }
    Fitness fitness_of(std::uint32_t slot) const { return members_[slot].fitness; }

    void add(Genotype g, Fitness f) {
        const auto slot = static_cast<std::uint32_t>(members_.size());
        members_.push_back(Member{std::move(g), f, 0});
        bucket_add(slot, f);
    }

    /// Overwrites the member in `slot` with a new genotype/fitness pair; the
    /// previous genotype is swapped into `evicted_out` instead of being
    /// destroyed.
    void replace(std::uint32_t slot, const Genotype& g, Fitness f, Genotype& evicted_out) {
        Member& m = members_[slot];
        bucket_remove(slot, m.fitness);
        std::swap(evicted_out, m.genotype);
        m.genotype = g;
        m.fitness = f;
        bucket_add(slot, f);
    }

    Fitness min_fitness() const {
        require_nonempty();
        return buckets_.begin()->first;
    }

    Fitness max_fitness() const {
        require_nonempty();
        return buckets_.rbegin()->first;
    }

    std::uint32_t min_count() const {
        require_nonempty();
        return static_cast<std::uint32_t>(buckets_.begin()->second.size());
    }

    std::uint32_t count_at(Fitness f) const {
        auto it = buckets_.find(f);
        return it == buckets_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
    }

    std::uint32_t distinct_fitness_count() const {
        return static_cast<std::uint32_t>(buckets_.size());
    }

    /// Uniformly random slot among the minimum-fitness members. Consumes no
    /// draw when the choice is forced.
    std::uint32_t random_min_slot(RngStream& rng) const {
        require_nonempty();
        const auto& bucket = buckets_.begin()->second;
        return bucket[rng.next_below(bucket.size())];
    }

    const std::vector<std::uint32_t>& min_bucket() const {
        require_nonempty();
        return buckets_.begin()->second;
    }

    template <class Fn> void for_each_member(Fn&& fn) const {
        for (std::uint32_t i = 0; i < members_.size(); ++i)
            fn(i, members_[i]);
    }

    template <class Fn> void for_each_distinct_fitness(Fn&& fn) const {
        for (const auto& [f, bucket] : buckets_)
            fn(f, static_cast<std::uint32_t>(bucket.size()));
    }

    /// True when every distinct fitness value satisfies the predicate.
    template <class Pred> bool all_fitness_satisfy(Pred&& pred) const {
        for (const auto& [f, bucket] : buckets_)
            if (!pred(f))
                return false;
        return true;
    }

  private:
    void require_nonempty() const {
        if (members_.empty())
            throw std::logic_error("population is empty");
    }

    void bucket_add(std::uint32_t slot, Fitness f) {
        auto& bucket = buckets_[f];
        members_[slot].pos_in_bucket = static_cast<std::uint32_t>(bucket.size());
        bucket.push_back(slot);
    }

    void bucket_remove(std::uint32_t slot, Fitness f) {
        auto it = buckets_.find(f);
        assert(it != buckets_.end());
        auto& bucket = it->second;
        const std::uint32_t pos = members_[slot].pos_in_bucket;
        assert(bucket[pos] == slot);
        bucket[pos] = bucket.back();
        members_[bucket[pos]].pos_in_bucket = pos;
        bucket.pop_back();
        if (bucket.empty())
            buckets_.erase(it);
    }

    std::vector<Member> members_;
    std::map<Fitness, std::vector<std::uint32_t>> buckets_;
};

} // namespace ssea
