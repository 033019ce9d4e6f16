#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "operators.hpp"
#include "problem.hpp"

namespace ssea {

enum class EngineKind { SteadyState, Crowding, OnePlusOne, OnePlusLambda };

struct EngineConfig {
    EngineKind kind = EngineKind::SteadyState;
    std::uint32_t mu = 1;
    SelectionPolicy selection = SelectionPolicy::uniform();
    MutationPolicy mutation = MutationPolicy::standard_bit();
    std::uint32_t lambda = 1; // (1+lambda) only
    std::uint64_t budget = 0; // fitness evaluations, including initialisation

    /// Largest countable evaluation index (2^63 - 1); simulated counters
    /// passing this are reported as timeouts by the drivers.
    static constexpr std::uint64_t kEvalCap = (std::uint64_t{1} << 63) - 1;

    void validate() const {
        if (mu < 1)
            throw std::invalid_argument("engine: mu must be positive");
        if (lambda < 1)
            throw std::invalid_argument("engine: lambda must be positive");
        if (budget < mu)
            throw std::invalid_argument("engine: budget must cover initialisation (mu evaluations)");
        selection.validate();
    }
};

/// One observable event per fitness evaluation. During initialisation the
/// offspring fields describe the sampled member and nothing is removed.
/// `evaluation_index` counts every evaluation from 1, including bulk
/// advances injected by waiting-time fast-forwarding.
struct IterationEvent {
    std::uint64_t evaluation_index = 0;
    const Genotype* offspring = nullptr;
    Fitness offspring_fitness = 0;
    const Genotype* removed = nullptr; // null during initialisation
    Fitness removed_fitness = 0;
    bool offspring_survived = false;
    bool initialization = false;
    std::int64_t parent_slot = -1;
    const Population* population = nullptr;
};

enum class RunStatus { Running, StoppedByObserver, BudgetExhausted };

namespace detail {

class EngineBase {
  public:
    std::uint64_t evaluations() const { return evaluations_; }
    RunStatus status() const { return status_; }
    bool budget_exhausted() const { return status_ == RunStatus::BudgetExhausted; }

    /// Adds `delta` virtual evaluations, saturating at the countable cap.
    /// Returns false when the counter would pass the cap (callers report a
    /// timeout).
    bool advance_evaluations(std::uint64_t delta) {
        if (delta > EngineConfig::kEvalCap - evaluations_) {
            evaluations_ = EngineConfig::kEvalCap;
            return false;
        }
        evaluations_ += delta;
        return true;
    }

  protected:
    template <class Obs> bool notify(Obs&& observer, const IterationEvent& ev) {
        if (!observer(ev)) {
            status_ = RunStatus::StoppedByObserver;
            return false;
        }
        return true;
    }

    bool check_budget(std::uint64_t budget) {
        if (evaluations_ >= budget) {
            status_ = RunStatus::BudgetExhausted;
            return false;
        }
        return true;
    }

    std::uint64_t evaluations_ = 0;
    RunStatus status_ = RunStatus::Running;
};

} // namespace detail

/// The (mu+1) steady-state loop: select a parent, mutate it, then remove a
/// uniformly chosen worst member of population-plus-offspring. Exposed as a
/// stepping object so experiment drivers can interleave their own bookkeeping
/// (outcome detection, forced parents, fast-forwarded waiting times).
/// Observers are callables IterationEvent -> bool; returning false stops the
/// run.
class SteadyStateEngine : public detail::EngineBase {
  public:
    SteadyStateEngine(const EngineConfig& config, const Problem& problem, RngStream rng)
        : config_(config), problem_(problem), rng_(std::move(rng)), pop_(config.mu),
          offspring_(problem.dimension()), evicted_(problem.dimension()) {
        config_.validate();
    }

    /// Samples the initial population, one event per member. Returns true
    /// while the run may continue.
    template <class Obs> bool initialize(Obs&& observer) {
        for (std::uint32_t i = 0; i < config_.mu; ++i) {
            Genotype g = random_genotype(problem_.dimension(), rng_);
            const Fitness f = problem_.evaluate(g);
            pop_.add(std::move(g), f);
            ++evaluations_;
            IterationEvent ev;
            ev.evaluation_index = evaluations_;
            ev.offspring = &pop_.member(i).genotype;
            ev.offspring_fitness = f;
            ev.offspring_survived = true;
            ev.initialization = true;
            ev.population = &pop_;
            if (!notify(observer, ev))
                return false;
        }
        return check_budget(config_.budget);
    }

    template <class Obs> bool step(Obs&& observer) {
        const std::uint32_t parent = select_parent(pop_, config_.selection, rng_);
        return step_with_parent(parent, true, observer);
    }

    /// One iteration from a caller-chosen parent. When `count_evaluation` is
    /// false the evaluation counter is left alone (the caller has already
    /// accounted for this evaluation in a bulk advance).
    template <class Obs>
    bool step_with_parent(std::uint32_t parent, bool count_evaluation, Obs&& observer) {
        mutate_into(pop_.member(parent).genotype, config_.mutation, rng_, offspring_);
        const Fitness f = problem_.evaluate(offspring_);
        if (count_evaluation)
            ++evaluations_;
        const Fitness old_min = pop_.min_fitness();
        const ReplacementResult res = replace_worst(pop_, offspring_, f, rng_, evicted_);
        IterationEvent ev;
        ev.evaluation_index = evaluations_;
        ev.offspring = &offspring_;
        ev.offspring_fitness = f;
        ev.removed = res.offspring_survived ? &evicted_ : &offspring_;
        ev.removed_fitness = res.offspring_survived ? old_min : f;
        ev.offspring_survived = res.offspring_survived;
        ev.parent_slot = parent;
        ev.population = &pop_;
        if (!notify(observer, ev))
            return false;
        return check_budget(config_.budget);
    }

    template <class Obs> RunStatus run(Obs&& observer) {
        if (!initialize(observer))
            return status_;
        while (step(observer)) {
        }
        return status_;
    }

    const Population& population() const { return pop_; }
    RngStream& rng() { return rng_; }
    const EngineConfig& config() const { return config_; }

  private:
    EngineConfig config_;
    const Problem& problem_;
    RngStream rng_;
    Population pop_;
    Genotype offspring_;
    Genotype evicted_;
};

/// Deterministic crowding: the uniformly chosen parent is the only member
/// its offspring competes with; the offspring takes the parent's slot iff
/// its fitness is at least the parent's. Member lineages never mix.
class CrowdingEngine : public detail::EngineBase {
  public:
    CrowdingEngine(const EngineConfig& config, const Problem& problem, RngStream rng)
        : config_(config), problem_(problem), rng_(std::move(rng)), pop_(config.mu),
          offspring_(problem.dimension()), evicted_(problem.dimension()) {
        config_.validate();
    }

    template <class Obs> bool initialize(Obs&& observer) {
        for (std::uint32_t i = 0; i < config_.mu; ++i) {
            Genotype g = random_genotype(problem_.dimension(), rng_);
            const Fitness f = problem_.evaluate(g);
            pop_.add(std::move(g), f);
            ++evaluations_;
            IterationEvent ev;
            ev.evaluation_index = evaluations_;
            ev.offspring = &pop_.member(i).genotype;
            ev.offspring_fitness = f;
            ev.offspring_survived = true;
            ev.initialization = true;
            ev.population = &pop_;
            if (!notify(observer, ev))
                return false;
        }
        return check_budget(config_.budget);
    }

    template <class Obs> bool step(Obs&& observer) {
        const auto parent = static_cast<std::uint32_t>(rng_.next_below(pop_.size()));
        const Fitness parent_fitness = pop_.fitness_of(parent);
        mutate_into(pop_.member(parent).genotype, config_.mutation, rng_, offspring_);
        const Fitness f = problem_.evaluate(offspring_);
        ++evaluations_;
        const bool accepted = f >= parent_fitness;
        if (accepted)
            pop_.replace(parent, offspring_, f, evicted_);
        IterationEvent ev;
        ev.evaluation_index = evaluations_;
        ev.offspring = &offspring_;
        ev.offspring_fitness = f;
        ev.removed = accepted ? &evicted_ : &offspring_;
        ev.removed_fitness = accepted ? parent_fitness : f;
        ev.offspring_survived = accepted;
        ev.parent_slot = parent;
        ev.population = &pop_;
        if (!notify(observer, ev))
            return false;
        return check_budget(config_.budget);
    }

    template <class Obs> RunStatus run(Obs&& observer) {
        if (!initialize(observer))
            return status_;
        while (step(observer)) {
        }
        return status_;
    }

    const Population& population() const { return pop_; }

  private:
    EngineConfig config_;
    const Problem& problem_;
    RngStream rng_;
    Population pop_;
    Genotype offspring_;
    Genotype evicted_;
};

/// (1+1) EA: one current point; the offspring replaces it whenever its
/// fitness is at least as good (ties prefer the offspring). With lambda > 1
/// this becomes the (1+lambda) EA: the best of lambda offspring (ties among
/// offspring broken uniformly) challenges the parent each generation.
class OnePlusLambdaEngine : public detail::EngineBase {
  public:
    OnePlusLambdaEngine(const EngineConfig& config, const Problem& problem, RngStream rng)
        : config_(config), problem_(problem), rng_(std::move(rng)), pop_(1),
          offspring_(problem.dimension()), best_offspring_(problem.dimension()),
          evicted_(problem.dimension()) {
        config_.validate();
    }

    template <class Obs> bool initialize(Obs&& observer) {
        Genotype g = random_genotype(problem_.dimension(), rng_);
        const Fitness f = problem_.evaluate(g);
        pop_.add(std::move(g), f);
        ++evaluations_;
        IterationEvent ev;
        ev.evaluation_index = evaluations_;
        ev.offspring = &pop_.member(0).genotype;
        ev.offspring_fitness = f;
        ev.offspring_survived = true;
        ev.initialization = true;
        ev.population = &pop_;
        if (!notify(observer, ev))
            return false;
        return check_budget(config_.budget);
    }

    /// One generation: up to lambda offspring (fewer when the budget runs
    /// out mid-generation; only evaluated offspring count and compete).
    template <class Obs> bool step(Obs&& observer) {
        const Fitness parent_fitness = pop_.fitness_of(0);
        Fitness best = 0;
        std::uint64_t tie_count = 0;
        bool have_offspring = false;
        bool stop = false;
        for (std::uint32_t i = 0; i < config_.lambda; ++i) {
            mutate_into(pop_.member(0).genotype, config_.mutation, rng_, offspring_);
            const Fitness f = problem_.evaluate(offspring_);
            ++evaluations_;
            if (!have_offspring || f > best) {
                best = f;
                best_offspring_ = offspring_;
                tie_count = 1;
                have_offspring = true;
            } else if (f == best) {
                ++tie_count;
                if (rng_.next_below(tie_count) == 0)
                    best_offspring_ = offspring_;
            }
            IterationEvent ev;
            ev.evaluation_index = evaluations_;
            ev.offspring = &offspring_;
            ev.offspring_fitness = f;
            ev.parent_slot = 0;
            ev.population = &pop_;
            // Survival is resolved at generation end; report the comparison
            // against the current parent.
            ev.offspring_survived = f >= parent_fitness;
            ev.removed = &offspring_;
            ev.removed_fitness = f;
            if (!notify(observer, ev)) {
                stop = true;
                break;
            }
            if (evaluations_ >= config_.budget)
                break;
        }
        if (have_offspring && best >= parent_fitness)
            pop_.replace(0, best_offspring_, best, evicted_);
        if (stop)
            return false;
        return check_budget(config_.budget);
    }

    template <class Obs> RunStatus run(Obs&& observer) {
        if (!initialize(observer))
            return status_;
        while (step(observer)) {
        }
        return status_;
    }

    const Population& population() const { return pop_; }
    const Genotype& current() const { return pop_.member(0).genotype; }
    Fitness current_fitness() const { return pop_.fitness_of(0); }

  private:
    EngineConfig config_;
    const Problem& problem_;
    RngStream rng_;
    Population pop_;
    Genotype offspring_;
    Genotype best_offspring_;
    Genotype evicted_;
};

/// Difference between the sizes of the majority-zeros and majority-ones
/// sub-populations; members with exactly n/2 ones count in neither.
inline std::int64_t branch_imbalance(const Population& pop, std::uint32_t n) {
    std::int64_t d = 0;
    pop.for_each_member([&](std::uint32_t, const Population::Member& m) {
        const std::uint64_t doubled = 2ull * m.genotype.count_ones();
        if (doubled < n)
            ++d;
        else if (doubled > n)
            --d;
    });
    return d;
}

/// Side of a single genotype for imbalance tracking: +1 below n/2 ones,
/// -1 above, 0 in the valley.
inline int branch_side(const Genotype& x) {
    const std::uint64_t doubled = 2ull * x.count_ones();
    if (doubled < x.size())
        return 1;
    if (doubled > x.size())
        return -1;
    return 0;
}

template <class Obs>
Population run_steady_state(const EngineConfig& config, const Problem& problem, RngStream rng,
                            Obs&& observer) {
    SteadyStateEngine engine(config, problem, std::move(rng));
    engine.run(observer);
    return engine.population();
}

template <class Obs>
Population run_crowding(const EngineConfig& config, const Problem& problem, RngStream rng,
                        Obs&& observer) {
    CrowdingEngine engine(config, problem, std::move(rng));
    engine.run(observer);
    return engine.population();
}

template <class Obs>
Genotype run_one_plus_one(const EngineConfig& config, const Problem& problem, RngStream rng,
                          Obs&& observer) {
    EngineConfig cfg = config;
    cfg.mu = 1;
    cfg.lambda = 1;
    OnePlusLambdaEngine engine(cfg, problem, std::move(rng));
    engine.run(observer);
    return engine.current();
}

template <class Obs>
Genotype run_one_plus_lambda(const EngineConfig& config, const Problem& problem, RngStream rng,
                             Obs&& observer) {
    EngineConfig cfg = config;
    cfg.mu = 1;
    OnePlusLambdaEngine engine(cfg, problem, std::move(rng));
    engine.run(observer);
    return engine.current();
}

inline std::string to_string(EngineKind kind) {
    switch (kind) {
    case EngineKind::SteadyState:
        return "mu1";
    case EngineKind::Crowding:
        return "crowding";
    case EngineKind::OnePlusOne:
        return "oneplusone";
    case EngineKind::OnePlusLambda:
        return "onepluslambda";
    }
    return "?";
}

} // namespace ssea
