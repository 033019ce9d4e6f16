#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "population.hpp"

namespace ssea {

/// Parent selection regimes, ordered here from highest to lowest selective
/// pressure. Tournament entrants are always sampled uniformly WITH
/// replacement; all ties break uniformly at random. A tournament of size 1
/// degenerates to uniform selection.
enum class SelectionKind { Tournament, Uniform, InverseTournament, InverseElitist };

struct SelectionPolicy {
    SelectionKind kind = SelectionKind::Uniform;
    std::uint32_t tournament_size = 1; // only meaningful for the tournament kinds

    static SelectionPolicy uniform() { return {SelectionKind::Uniform, 1}; }
    static SelectionPolicy tournament(std::uint32_t k) { return {SelectionKind::Tournament, k}; }
    static SelectionPolicy inverse_tournament(std::uint32_t k) {
        return {SelectionKind::InverseTournament, k};
    }
    static SelectionPolicy inverse_elitist() { return {SelectionKind::InverseElitist, 1}; }

    void validate() const {
        if ((kind == SelectionKind::Tournament || kind == SelectionKind::InverseTournament) &&
            tournament_size < 1)
            throw std::invalid_argument("tournament size must be at least 1");
    }
};

/// Mutation operators: standard bit mutation flips each bit independently
/// with probability 1/n; the RLS variant flips exactly one uniformly chosen
/// bit.
enum class MutationKind { StandardBit, OneBitRls };

struct MutationPolicy {
    MutationKind kind = MutationKind::StandardBit;

    static MutationPolicy standard_bit() { return {MutationKind::StandardBit}; }
    static MutationPolicy one_bit_rls() { return {MutationKind::OneBitRls}; }
};

/// Mutates `x` into `out` (reusing its storage). Standard bit mutation uses
/// geometric jumps between flipped positions, so its cost is proportional to
/// the number of flips, not to n.
inline void mutate_into(const Genotype& x, MutationPolicy policy, RngStream& rng, Genotype& out) {
    out = x;
    const std::uint32_t n = x.size();
    if (policy.kind == MutationKind::OneBitRls) {
        out.flip_bit(static_cast<std::uint32_t>(rng.next_below(n)));
        return;
    }
    const double p = 1.0 / static_cast<double>(n);
    std::uint64_t i = geometric_gap(rng, p);
    while (i < n) {
        out.flip_bit(static_cast<std::uint32_t>(i));
        i += 1 + geometric_gap(rng, p);
    }
}

inline Genotype mutate(const Genotype& x, MutationPolicy policy, RngStream& rng) {
    Genotype out;
    mutate_into(x, policy, rng, out);
    return out;
}

namespace detail {

/// Runs a K-entrant tournament and returns the slot holding the extreme
/// fitness (maximum when `invert` is false, minimum when true). Entrant
/// draws are independent and uniform; among entrants attaining the extreme
/// the winner is chosen uniformly via reservoir replacement.
inline std::uint32_t tournament_extreme(const Population& pop, std::uint32_t k, bool invert,
                                        RngStream& rng) {
    const std::uint64_t mu = pop.size();
    auto chosen = static_cast<std::uint32_t>(rng.next_below(mu));
    Fitness best = pop.fitness_of(chosen);
    std::uint64_t tie_count = 1;
    for (std::uint32_t t = 1; t < k; ++t) {
        const auto entrant = static_cast<std::uint32_t>(rng.next_below(mu));
        const Fitness f = pop.fitness_of(entrant);
        const bool better = invert ? (f < best) : (f > best);
        if (better) {
            chosen = entrant;
            best = f;
            tie_count = 1;
        } else if (f == best) {
            ++tie_count;
            if (rng.next_below(tie_count) == 0)
                chosen = entrant;
        }
    }
    return chosen;
}

} // namespace detail

/// Selects a parent slot according to the policy. Ties (equal fitness among
/// tournament extremes, or among the population minimum for inverse elitist
/// selection) break uniformly at random.
inline std::uint32_t select_parent(const Population& pop, const SelectionPolicy& policy,
                                   RngStream& rng) {
    if (pop.empty())
        throw std::logic_error("select_parent: population is empty");
    switch (policy.kind) {
    case SelectionKind::Uniform:
        return static_cast<std::uint32_t>(rng.next_below(pop.size()));
    case SelectionKind::Tournament:
        return detail::tournament_extreme(pop, policy.tournament_size, false, rng);
    case SelectionKind::InverseTournament:
        return detail::tournament_extreme(pop, policy.tournament_size, true, rng);
    case SelectionKind::InverseElitist:
        return pop.random_min_slot(rng);
    }
    throw std::logic_error("select_parent: unknown policy");
}

/// What replace_worst did with the offspring.
struct ReplacementResult {
    bool offspring_survived = false;
    std::uint32_t replaced_slot = 0; // valid only when offspring_survived
};

/// Elitist worst-removal: drops a uniformly chosen minimum-fitness element
/// of P united with the offspring (the offspring itself is eligible). When
/// the offspring survives it takes the evicted member's slot, whose genotype
/// is swapped into `evicted_out`.
inline ReplacementResult replace_worst(Population& pop, const Genotype& offspring, Fitness f,
                                       RngStream& rng, Genotype& evicted_out) {
    const Fitness fmin = pop.min_fitness();
    if (f < fmin)
        return {false, 0}; // offspring is the unique minimum
    if (f > fmin) {
        const std::uint32_t victim = pop.random_min_slot(rng);
        pop.replace(victim, offspring, f, evicted_out);
        return {true, victim};
    }
    const auto& bucket = pop.min_bucket();
    const std::uint64_t pick = rng.next_below(bucket.size() + 1);
    if (pick == bucket.size())
        return {false, 0}; // offspring removed as one of the tied minima
    const std::uint32_t victim = bucket[static_cast<std::uint32_t>(pick)];
    pop.replace(victim, offspring, f, evicted_out);
    return {true, victim};
}

inline std::string to_string(SelectionKind kind) {
    switch (kind) {
    case SelectionKind::Tournament:
        return "tournament";
    case SelectionKind::Uniform:
        return "uniform";
    case SelectionKind::InverseTournament:
        return "inv-tournament";
    case SelectionKind::InverseElitist:
        return "inv-elitist";
    }
    return "?";
}

inline std::string to_string(MutationKind kind) {
    return kind == MutationKind::StandardBit ? "sbm" : "rls";
}

} // namespace ssea
