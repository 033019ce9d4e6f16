#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genotype.hpp"

namespace ssea {

/// A maximisation problem over {0,1}^n. Besides the fitness itself, a
/// problem can expose named peaks (used by experiment drivers to record
/// which optima a run has constructed) and an optional "trap": a set of
/// genotypes that, once they make up the whole fitness minimum of a
/// population, can never produce accepted offspring outside the trap. Trap
/// information drives deadlock detection and waiting-time fast-forwarding.
class Problem {
  public:
    virtual ~Problem() = default;

    virtual std::uint32_t dimension() const = 0;
    virtual Fitness evaluate(const Genotype& x) const = 0;
    virtual std::string name() const = 0;

    /// Largest attainable fitness, when known in closed form.
    virtual std::optional<Fitness> known_max() const { return std::nullopt; }

    virtual std::uint32_t peak_count() const { return 0; }
    virtual std::string peak_name(std::uint32_t) const { return {}; }
    /// Bitmask over [0, peak_count()) of the peaks `x` belongs to.
    virtual std::uint64_t peak_mask(const Genotype&) const { return 0; }

    /// Fitness shared by all trap members, if the problem has a trap.
    virtual std::optional<Fitness> trap_fitness() const { return std::nullopt; }
    /// Whether a member with this genotype/fitness is a trap member.
    virtual bool is_trap_member(const Genotype&, Fitness) const { return false; }
};

/// Names of the peaks a genotype sits on.
inline std::vector<std::string> peak_membership(const Problem& problem, const Genotype& x) {
    std::vector<std::string> labels;
    const std::uint64_t mask = problem.peak_mask(x);
    for (std::uint32_t i = 0; i < problem.peak_count(); ++i)
        if (mask & (std::uint64_t{1} << i))
            labels.push_back(problem.peak_name(i));
    return labels;
}

} // namespace ssea
