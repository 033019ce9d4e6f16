#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "benchmarks.hpp"
#include "engines.hpp"
#include "instances.hpp"

namespace ssea {

// ---------------------------------------------------------------------------
// Proportions and confidence intervals
// ---------------------------------------------------------------------------

struct ProportionCI {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double point = 0;
    double lower = 0;
    double upper = 0;
};

/// 95% Wilson score interval (z = 1.959964), well behaved at 0 and full
/// success counts.
inline ProportionCI wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0)
        throw std::invalid_argument("wilson_interval: trials must be positive");
    if (successes > trials)
        throw std::invalid_argument("wilson_interval: successes exceed trials");
    constexpr double z = 1.959964;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double centre = (p + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {successes, trials, p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

enum class OutcomeKind {
    BothFound,
    SinglePeak,
    ConvergedOpt,
    ConvergedLoc,
    Timeout,
    BudgetExhausted,
    SolvedAt,
    BestFitness
};

inline std::string to_string(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::BothFound:
        return "BothFound";
    case OutcomeKind::SinglePeak:
        return "SinglePeak";
    case OutcomeKind::ConvergedOpt:
        return "ConvergedOpt";
    case OutcomeKind::ConvergedLoc:
        return "ConvergedLoc";
    case OutcomeKind::Timeout:
        return "Timeout";
    case OutcomeKind::BudgetExhausted:
        return "BudgetExhausted";
    case OutcomeKind::SolvedAt:
        return "SolvedAt";
    case OutcomeKind::BestFitness:
        return "BestFitness";
    }
    return "?";
}

/// Per-run log: what the run produced, when each peak was first constructed
/// (by evaluation count, counting every evaluated genotype whether or not it
/// survived) and how many evaluations were consumed in total, including
/// fast-forwarded iterations.
struct RunRecord {
    std::uint64_t seed = 0;
    OutcomeKind outcome = OutcomeKind::BudgetExhausted;
    std::string outcome_label; // peak name for SinglePeak
    std::uint64_t evaluations = 0;
    std::vector<std::pair<std::string, std::uint64_t>> first_hits;
    Fitness best_fitness = 0;
    std::uint64_t solved_at = 0;
    bool solved = false;

    std::optional<std::uint64_t> first_hit(const std::string& label) const {
        for (const auto& [name, evals] : first_hits)
            if (name == label)
                return evals;
        return std::nullopt;
    }
};

/// Optional per-event hook threaded through the drivers (used by the CLI
/// trace mode); null means no tracing.
using EventTap = std::function<void(const IterationEvent&)>;

// ---------------------------------------------------------------------------
// Peak tracking
// ---------------------------------------------------------------------------

/// Observer-side bookkeeping shared by the benchmark drivers: first
/// construction of each peak, and an incremental count of trap members in
/// the population (maintained from offspring/removed deltas, so it costs one
/// popcount per event).
class PeakTracker {
  public:
    explicit PeakTracker(const Problem& problem)
        : problem_(problem), first_hits_(problem.peak_count(), 0),
          trap_fitness_(problem.trap_fitness()) {}

    void observe(const IterationEvent& ev) {
        const std::uint64_t mask = problem_.peak_mask(*ev.offspring);
        if (mask != 0)
            for (std::uint32_t i = 0; i < first_hits_.size(); ++i)
                if ((mask & (std::uint64_t{1} << i)) && first_hits_[i] == 0)
                    first_hits_[i] = ev.evaluation_index;
        if (trap_fitness_) {
            if (ev.offspring_fitness == *trap_fitness_ &&
                problem_.is_trap_member(*ev.offspring, ev.offspring_fitness))
                ++trap_members_;
            if (!ev.initialization && ev.removed_fitness == *trap_fitness_ &&
                problem_.is_trap_member(*ev.removed, ev.removed_fitness))
                --trap_members_;
        }
    }

    bool hit(std::uint32_t peak) const { return first_hits_[peak] != 0; }
    std::uint64_t hit_at(std::uint32_t peak) const { return first_hits_[peak]; }
    std::uint32_t hit_count() const {
        std::uint32_t c = 0;
        for (auto h : first_hits_)
            if (h != 0)
                ++c;
        return c;
    }
    std::int64_t trap_members() const { return trap_members_; }

    void export_hits(RunRecord& record) const {
        for (std::uint32_t i = 0; i < first_hits_.size(); ++i)
            if (first_hits_[i] != 0)
                record.first_hits.emplace_back(problem_.peak_name(i), first_hits_[i]);
    }

  private:
    const Problem& problem_;
    std::vector<std::uint64_t> first_hits_;
    std::optional<Fitness> trap_fitness_;
    std::int64_t trap_members_ = 0;
};

// ---------------------------------------------------------------------------
// Trap handling: deadlock detection and waiting-time fast-forward
// ---------------------------------------------------------------------------

/// True when the population minimum consists exclusively of trap members
/// while better members still exist. In that state inverse elitist selection
/// can neither remove the trapped members nor pick anyone else, and inverse
/// tournament selection only makes progress in iterations whose tournament
/// avoids the trap entirely.
inline bool trap_state(const Population& pop, const Problem& problem,
                       std::int64_t trap_members) {
    const auto trap_f = problem.trap_fitness();
    if (!trap_f || pop.empty())
        return false;
    if (pop.min_fitness() != *trap_f)
        return false;
    const std::uint32_t min_count = pop.min_count();
    if (min_count >= pop.size())
        return false; // fully converged on the trap; the convergence rules own this
    return trap_members == min_count;
}

enum class FastForwardStatus { Stepped, Timeout, BudgetExhausted };

/// Simulates, in one stroke, the geometric waiting time until an inverse
/// K-tournament first contains no minimum-fitness member, advancing the
/// evaluation counter by the sampled trial count G (the final, successful
/// iteration's evaluation is included in G). The successful iteration is
/// then executed with its tournament drawn uniformly from the non-minimum
/// members. Composition-preserving no-op iterations are skipped exactly.
template <class Obs>
FastForwardStatus fast_forward_inverse_tournament(SteadyStateEngine& engine, std::uint32_t k,
                                                  Obs&& observer) {
    const Population& pop = engine.population();
    const std::uint64_t mu = pop.size();
    const std::uint64_t trapped = pop.min_count();
    const double q = std::pow(static_cast<double>(mu - trapped) / static_cast<double>(mu),
                              static_cast<double>(k));
    const std::uint64_t trials = geometric_trials(engine.rng(), q);
    if (!engine.advance_evaluations(trials))
        return FastForwardStatus::Timeout;
    if (engine.evaluations() >= engine.config().budget) {
        return FastForwardStatus::BudgetExhausted;
    }
    // Conditioned iteration: K entrants uniform over the non-minimum members.
    const Fitness fmin = pop.min_fitness();
    auto draw_entrant = [&]() {
        for (;;) {
            const auto slot = static_cast<std::uint32_t>(engine.rng().next_below(mu));
            if (pop.fitness_of(slot) != fmin)
                return slot;
        }
    };
    std::uint32_t chosen = draw_entrant();
    Fitness worst = pop.fitness_of(chosen);
    std::uint64_t tie_count = 1;
    for (std::uint32_t t = 1; t < k; ++t) {
        const std::uint32_t entrant = draw_entrant();
        const Fitness f = pop.fitness_of(entrant);
        if (f < worst) {
            chosen = entrant;
            worst = f;
            tie_count = 1;
        } else if (f == worst) {
            ++tie_count;
            if (engine.rng().next_below(tie_count) == 0)
                chosen = entrant;
        }
    }
    engine.step_with_parent(chosen, false, observer);
    return FastForwardStatus::Stepped;
}

// ---------------------------------------------------------------------------
// TwoMax-family driver
// ---------------------------------------------------------------------------

namespace detail {

/// Rule: every member sits on a peak-fitness value.
inline bool twomax_converged(const Population& pop, const TwoMaxProblem& prob) {
    const Fitness top = *prob.known_max();
    if (!prob.truncated())
        return pop.min_fitness() == top;
    const Fitness left = prob.left_peak_value();
    if (pop.distinct_fitness_count() > 2)
        return false;
    return pop.all_fitness_satisfy([&](Fitness f) { return f == top || f == left; });
}

} // namespace detail

/// One (mu+1) or crowding run on TwoMax / TruncatedTwoMax, classifying the
/// outcome: BothFound as soon as both peaks have been constructed,
/// SinglePeak when the whole population sits on peak fitness with only one
/// peak ever seen, BudgetExhausted otherwise. On the truncated landscape,
/// populations whose minimum is monopolised by the left plateau are handled
/// by the trap rules: inverse elitist selection can never leave that state,
/// so the run's remaining budget is forfeited in one step; inverse
/// tournament selection skips the waiting times exactly.
inline RunRecord run_twomax_peaks(const TwoMaxProblem& problem, const EngineConfig& config,
                                  std::uint64_t seed, bool fast_forward_enabled = true,
                                  const EventTap* tap = nullptr) {
    RunRecord record;
    record.seed = seed;
    PeakTracker tracker(problem);
    auto observer = [&](const IterationEvent& ev) {
        tracker.observe(ev);
        if (tap)
            (*tap)(ev);
        return true;
    };

    auto finalize = [&](std::uint64_t evals, OutcomeKind fallback, std::string label = {}) {
        tracker.export_hits(record);
        if (tracker.hit(0) && tracker.hit(1)) {
            record.outcome = OutcomeKind::BothFound;
        } else {
            record.outcome = fallback;
            record.outcome_label = std::move(label);
        }
        if (record.outcome == OutcomeKind::BudgetExhausted)
            evals = std::min(evals, config.budget);
        record.evaluations = evals;
        return record;
    };

    auto drive = [&](auto& engine, bool allow_traps) {
        bool running = engine.initialize(observer);
        while (running) {
            if (tracker.hit(0) && tracker.hit(1))
                return finalize(engine.evaluations(), OutcomeKind::BothFound);
            if (tracker.hit_count() == 1 &&
                detail::twomax_converged(engine.population(), problem))
                return finalize(engine.evaluations(), OutcomeKind::SinglePeak,
                                problem.peak_name(tracker.hit(0) ? 0 : 1));
            if (allow_traps && trap_state(engine.population(), problem, tracker.trap_members())) {
                const SelectionKind kind = config.selection.kind;
                if (kind == SelectionKind::InverseElitist) {
                    // Frozen: the plateau can only exchange copies of itself
                    // and everything better can neither be removed nor
                    // selected, so the rest of the budget is forfeited in
                    // one stroke.
                    return finalize(config.budget, OutcomeKind::BudgetExhausted);
                }
                if (kind == SelectionKind::InverseTournament && fast_forward_enabled) {
                    if constexpr (std::is_same_v<std::decay_t<decltype(engine)>,
                                                 SteadyStateEngine>) {
                        const auto st = fast_forward_inverse_tournament(
                            engine, config.selection.tournament_size, observer);
                        if (st == FastForwardStatus::Stepped)
                            continue;
                        return finalize(engine.evaluations(),
                                        st == FastForwardStatus::Timeout
                                            ? OutcomeKind::Timeout
                                            : OutcomeKind::BudgetExhausted);
                    }
                }
            }
            running = engine.step(observer);
        }
        return finalize(engine.evaluations(), OutcomeKind::BudgetExhausted);
    };

    if (config.kind == EngineKind::Crowding) {
        CrowdingEngine engine(config, problem, RngStream(seed));
        return drive(engine, false);
    }
    if (config.kind == EngineKind::SteadyState) {
        SteadyStateEngine engine(config, problem, RngStream(seed));
        return drive(engine, true);
    }
    EngineConfig cfg = config;
    cfg.mu = 1;
    if (config.kind == EngineKind::OnePlusOne)
        cfg.lambda = 1;
    OnePlusLambdaEngine engine(cfg, problem, RngStream(seed));
    return drive(engine, false);
}

// ---------------------------------------------------------------------------
// TwoGradients driver
// ---------------------------------------------------------------------------

/// Terminal-state check for TwoGradients populations under a given parent
/// selection policy, given which optima have been constructed so far:
///  - whole population at the optimal value: ConvergedOpt (BothFound when
///    the local optimum was also constructed);
///  - whole population on the local optimum: ConvergedLoc (the global
///    optimum is treated as unreachable from there);
///  - inverse elitist selection with the population minimum monopolised by
///    local-optimum members while better members exist: Timeout (those
///    members can neither be removed nor displaced).
inline std::optional<OutcomeKind> twogradients_terminal(const Population& pop,
                                                        const TwoGradientsProblem& problem,
                                                        SelectionKind selection, bool opt_seen,
                                                        bool loc_seen) {
    const Fitness opt = problem.optimum_value();
    const Fitness loc = problem.local_value();
    const Fitness min = pop.min_fitness();
    const Fitness max = pop.max_fitness();
    if (min == opt && max == opt)
        return loc_seen ? OutcomeKind::BothFound : OutcomeKind::ConvergedOpt;
    if (min == loc && max == loc)
        return opt_seen ? OutcomeKind::BothFound : OutcomeKind::ConvergedLoc;
    if (selection == SelectionKind::InverseElitist && min == loc && max > loc)
        return OutcomeKind::Timeout;
    return std::nullopt;
}

/// One run on TwoGradients with the outcome taxonomy OPT / LOC / Both /
/// Timeout. Works for the steady-state engine (any parent selection) and
/// the (1+1)/(1+lambda) engines.
inline RunRecord run_twogradients(const TwoGradientsProblem& problem, const EngineConfig& config,
                                  std::uint64_t seed, bool fast_forward_enabled = true,
                                  const EventTap* tap = nullptr) {
    RunRecord record;
    record.seed = seed;
    PeakTracker tracker(problem);
    auto observer = [&](const IterationEvent& ev) {
        tracker.observe(ev);
        if (tap)
            (*tap)(ev);
        return true;
    };
    const auto finalize = [&](std::uint64_t evals, OutcomeKind outcome) {
        if (outcome == OutcomeKind::BudgetExhausted)
            evals = std::min(evals, config.budget);
        record.evaluations = evals;
        tracker.export_hits(record);
        record.outcome = outcome;
        return record;
    };

    const auto drive = [&](auto& engine, SelectionKind selection) {
        bool running = engine.initialize(observer);
        while (running) {
            const auto terminal = twogradients_terminal(engine.population(), problem, selection,
                                                        tracker.hit(1), tracker.hit(0));
            if (terminal)
                return finalize(engine.evaluations(), *terminal);
            if constexpr (std::is_same_v<std::decay_t<decltype(engine)>, SteadyStateEngine>) {
                if (selection == SelectionKind::InverseTournament && fast_forward_enabled &&
                    trap_state(engine.population(), problem, tracker.trap_members())) {
                    const auto st = fast_forward_inverse_tournament(
                        engine, config.selection.tournament_size, observer);
                    if (st == FastForwardStatus::Stepped)
                        continue;
                    return finalize(engine.evaluations(), st == FastForwardStatus::Timeout
                                                              ? OutcomeKind::Timeout
                                                              : OutcomeKind::BudgetExhausted);
                }
            }
            running = engine.step(observer);
        }
        if (engine.evaluations() >= EngineConfig::kEvalCap)
            return finalize(engine.evaluations(), OutcomeKind::Timeout);
        return finalize(engine.evaluations(), OutcomeKind::BudgetExhausted);
    };

    switch (config.kind) {
    case EngineKind::SteadyState: {
        SteadyStateEngine engine(config, problem, RngStream(seed));
        return drive(engine, config.selection.kind);
    }
    case EngineKind::Crowding: {
        CrowdingEngine engine(config, problem, RngStream(seed));
        return drive(engine, SelectionKind::Uniform);
    }
    case EngineKind::OnePlusOne:
    case EngineKind::OnePlusLambda: {
        EngineConfig cfg = config;
        cfg.mu = 1;
        if (config.kind == EngineKind::OnePlusOne)
            cfg.lambda = 1;
        OnePlusLambdaEngine engine(cfg, problem, RngStream(seed));
        return drive(engine, SelectionKind::Uniform);
    }
    }
    throw std::logic_error("run_twogradients: unknown engine kind");
}

// ---------------------------------------------------------------------------
// Solve-time and best-fitness drivers (MaxSat, MKP, ridge runs)
// ---------------------------------------------------------------------------

/// Runs until a genotype attains `target` fitness (SolvedAt, with the
/// evaluation index) or the budget is exhausted (the budget itself is the
/// censored solve time). Tracks the best fitness ever evaluated.
template <class Engine>
RunRecord run_until_target(Engine& engine, Fitness target, std::uint64_t budget,
                           const EventTap* tap = nullptr) {
    RunRecord record;
    bool solved = false;
    std::uint64_t solved_at = 0;
    Fitness best = std::numeric_limits<Fitness>::min();
    auto observer = [&](const IterationEvent& ev) {
        if (ev.offspring_fitness > best)
            best = ev.offspring_fitness;
        if (tap)
            (*tap)(ev);
        if (!solved && ev.offspring_fitness >= target) {
            solved = true;
            solved_at = ev.evaluation_index;
            return false;
        }
        return true;
    };
    engine.run(observer);
    record.evaluations = engine.evaluations();
    record.best_fitness = best;
    record.solved = solved;
    record.solved_at = solved ? solved_at : budget;
    record.outcome = solved ? OutcomeKind::SolvedAt : OutcomeKind::BudgetExhausted;
    return record;
}

/// Runs to exactly the configured budget and reports the best feasible
/// (non-negative) fitness ever evaluated; runs that never sample a feasible
/// selection report 0.
template <class Engine>
RunRecord run_best_feasible(Engine& engine, const EventTap* tap = nullptr) {
    RunRecord record;
    Fitness best = -1;
    auto observer = [&](const IterationEvent& ev) {
        if (ev.offspring_fitness > best)
            best = ev.offspring_fitness;
        if (tap)
            (*tap)(ev);
        return true;
    };
    engine.run(observer);
    record.evaluations = engine.evaluations();
    record.best_fitness = std::max<Fitness>(best, 0);
    record.solved = false;
    record.solved_at = 0;
    record.outcome = OutcomeKind::BestFitness;
    return record;
}

} // namespace ssea
