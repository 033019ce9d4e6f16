#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "harness.hpp"

namespace ssea {

// ---------------------------------------------------------------------------
// Experiment specification
// ---------------------------------------------------------------------------

enum class ProblemFamily { TwoMax, TwoGradients, Ridge, MaxSat, Mkp };

/// Declarative description of a run grid: the cartesian product of the
/// list-valued fields, executed `runs` times per cell with per-run seeds
/// derived from (seed, cell identity, run index).
struct ExperimentSpec {
    std::string problem; // twomax | truncated-twomax | twogradients | ridge | ridge-j | maxsat | mkp
    std::vector<std::uint32_t> n_values;
    std::optional<std::uint32_t> trunc_k;
    std::optional<std::uint32_t> ridge_k;
    std::optional<std::uint32_t> branch_j;
    std::vector<EngineKind> engines{EngineKind::SteadyState};
    std::vector<std::uint32_t> mu_values{1};
    std::vector<SelectionKind> selections{SelectionKind::Uniform};
    std::vector<std::uint32_t> tournament_sizes{2};
    std::vector<MutationKind> mutations{MutationKind::StandardBit};
    std::vector<std::uint32_t> lambdas{1};
    std::uint64_t runs = 0;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> budget; // nullopt = auto per problem family
    bool fast_forward = true;
    std::string out;
    std::string timeseries_out;
    std::vector<std::string> instance_paths;
    std::string best_known_path;
    unsigned threads = 1;

    ProblemFamily family() const {
        if (problem == "twomax" || problem == "truncated-twomax")
            return ProblemFamily::TwoMax;
        if (problem == "twogradients")
            return ProblemFamily::TwoGradients;
        if (problem == "ridge" || problem == "ridge-j")
            return ProblemFamily::Ridge;
        if (problem == "maxsat")
            return ProblemFamily::MaxSat;
        if (problem == "mkp")
            return ProblemFamily::Mkp;
        throw std::invalid_argument("experiment: unknown problem '" + problem + "'");
    }
};

class SpecError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

template <class T> T parse_number(const std::string& field, const std::string& token) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(token, &pos);
        if (pos != token.size() || v < 0)
            throw std::invalid_argument("negative");
        return static_cast<T>(v);
    } catch (const std::exception&) {
        throw SpecError("spec field '" + field + "': expected a non-negative integer, got '" +
                        token + "'");
    }
}

inline SelectionKind parse_selection(const std::string& field, const std::string& token) {
    if (token == "uniform")
        return SelectionKind::Uniform;
    if (token == "tournament")
        return SelectionKind::Tournament;
    if (token == "inv-tournament")
        return SelectionKind::InverseTournament;
    if (token == "inv-elitist")
        return SelectionKind::InverseElitist;
    throw SpecError("spec field '" + field + "': unknown selection '" + token + "'");
}

inline EngineKind parse_engine(const std::string& field, const std::string& token) {
    if (token == "mu1")
        return EngineKind::SteadyState;
    if (token == "crowding")
        return EngineKind::Crowding;
    if (token == "oneplusone")
        return EngineKind::OnePlusOne;
    if (token == "onepluslambda")
        return EngineKind::OnePlusLambda;
    throw SpecError("spec field '" + field + "': unknown engine '" + token + "'");
}

inline MutationKind parse_mutation(const std::string& field, const std::string& token) {
    if (token == "sbm")
        return MutationKind::StandardBit;
    if (token == "rls")
        return MutationKind::OneBitRls;
    throw SpecError("spec field '" + field + "': unknown mutation '" + token + "'");
}

} // namespace detail

/// Parses the key = value experiment format: one assignment per line,
/// comma-separated lists, '#' comments. Unknown keys are an error so typos
/// surface immediately.
inline ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    bool engines_set = false, selections_set = false, mutations_set = false, mus_set = false,
         ks_set = false, lambdas_set = false;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("spec line " + std::to_string(line_number) +
                            ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto list = detail::split_list(value);
        if (value.empty() || list.empty())
            throw SpecError("spec field '" + key + "': empty value");

        if (key == "problem") {
            spec.problem = value;
        } else if (key == "n") {
            spec.n_values.clear();
            for (const auto& t : list)
                spec.n_values.push_back(detail::parse_number<std::uint32_t>(key, t));
        } else if (key == "trunc-k") {
            spec.trunc_k = detail::parse_number<std::uint32_t>(key, value);
        } else if (key == "ridge-k") {
            spec.ridge_k = detail::parse_number<std::uint32_t>(key, value);
        } else if (key == "branch-j") {
            spec.branch_j = detail::parse_number<std::uint32_t>(key, value);
        } else if (key == "engine") {
            spec.engines.clear();
            for (const auto& t : list)
                spec.engines.push_back(detail::parse_engine(key, t));
            engines_set = true;
        } else if (key == "mu") {
            spec.mu_values.clear();
            for (const auto& t : list)
                spec.mu_values.push_back(detail::parse_number<std::uint32_t>(key, t));
            mus_set = true;
        } else if (key == "selection") {
            spec.selections.clear();
            for (const auto& t : list)
                spec.selections.push_back(detail::parse_selection(key, t));
            selections_set = true;
        } else if (key == "k") {
            spec.tournament_sizes.clear();
            for (const auto& t : list)
                spec.tournament_sizes.push_back(detail::parse_number<std::uint32_t>(key, t));
            ks_set = true;
        } else if (key == "mutation") {
            spec.mutations.clear();
            for (const auto& t : list)
                spec.mutations.push_back(detail::parse_mutation(key, t));
            mutations_set = true;
        } else if (key == "lambda") {
            spec.lambdas.clear();
            for (const auto& t : list)
                spec.lambdas.push_back(detail::parse_number<std::uint32_t>(key, t));
            lambdas_set = true;
        } else if (key == "runs") {
            spec.runs = detail::parse_number<std::uint64_t>(key, value);
        } else if (key == "seed") {
            spec.seed = detail::parse_number<std::uint64_t>(key, value);
        } else if (key == "budget") {
            if (value == "auto")
                spec.budget.reset();
            else
                spec.budget = detail::parse_number<std::uint64_t>(key, value);
        } else if (key == "fast-forward") {
            if (value == "on")
                spec.fast_forward = true;
            else if (value == "off")
                spec.fast_forward = false;
            else
                throw SpecError("spec field 'fast-forward': expected on/off");
        } else if (key == "out") {
            spec.out = value;
        } else if (key == "timeseries-out") {
            spec.timeseries_out = value;
        } else if (key == "instances") {
            spec.instance_paths = list;
        } else if (key == "best-known") {
            spec.best_known_path = value;
        } else if (key == "threads") {
            spec.threads = detail::parse_number<unsigned>(key, value);
        } else {
            throw SpecError("spec line " + std::to_string(line_number) + ": unknown field '" +
                            key + "'");
        }
    }
    (void)engines_set;
    (void)selections_set;
    (void)mutations_set;
    (void)mus_set;
    (void)ks_set;
    (void)lambdas_set;
    return spec;
}

inline void validate_experiment_spec(const ExperimentSpec& spec) {
    if (spec.problem.empty())
        throw SpecError("spec field 'problem': required");
    const ProblemFamily family = spec.family(); // throws on unknown problem
    if (spec.runs < 1)
        throw SpecError("spec field 'runs': must be at least 1");
    if (spec.out.empty())
        throw SpecError("spec field 'out': required");
    switch (family) {
    case ProblemFamily::TwoMax:
    case ProblemFamily::TwoGradients:
        if (spec.n_values.empty())
            throw SpecError("spec field 'n': required for " + spec.problem);
        if (spec.problem == "truncated-twomax" && !spec.trunc_k)
            throw SpecError("spec field 'trunc-k': required for truncated-twomax");
        break;
    case ProblemFamily::Ridge:
        if (!spec.ridge_k)
            throw SpecError("spec field 'ridge-k': required for ridge");
        if (spec.problem == "ridge-j" && !spec.branch_j)
            throw SpecError("spec field 'branch-j': required for ridge-j");
        if (!spec.budget)
            throw SpecError("spec field 'budget': required for ridge runs");
        break;
    case ProblemFamily::MaxSat:
    case ProblemFamily::Mkp:
        if (spec.instance_paths.empty())
            throw SpecError("spec field 'instances': required for " + spec.problem);
        if (!spec.budget)
            throw SpecError("spec field 'budget': required for " + spec.problem);
        break;
    }
    if (!spec.timeseries_out.empty() && family != ProblemFamily::TwoGradients)
        throw SpecError("spec field 'timeseries-out': only supported for twogradients");
}

// ---------------------------------------------------------------------------
// Grid expansion
// ---------------------------------------------------------------------------

/// One fully resolved grid cell: a problem instance, an engine
/// configuration, and the canonical identity used for seeds and output rows.
struct CellSpec {
    std::shared_ptr<const Problem> problem;
    EngineConfig config;
    ProblemFamily family = ProblemFamily::TwoMax;
    std::string id;
    std::string instance_id; // empty for analytic benchmarks
    std::string k_or_l;      // truncation height / suffix length / ridge k
};

namespace detail {

/// Budget rule when the spec leaves it to the library: TwoMax-family cells
/// get 200 * mu * n * ln(n), far above the expected both-peaks time, so
/// exhausting it is an anomaly worth reporting rather than a routine result;
/// TwoGradients cells get the countable cap (their own terminal rules stop
/// the run).
inline std::uint64_t auto_budget(ProblemFamily family, std::uint32_t mu, std::uint32_t n) {
    if (family == ProblemFamily::TwoGradients)
        return EngineConfig::kEvalCap;
    const double b = 200.0 * mu * n * std::log(static_cast<double>(std::max<std::uint32_t>(n, 2)));
    return std::max<std::uint64_t>(static_cast<std::uint64_t>(b), 2 * mu);
}

inline bool wildcard_match(const std::string& pattern, const std::string& name) {
    // '*' only; sufficient for instance globs like uf20-*.cnf
    std::size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[s])) {
            ++p, ++s;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        ++p;
    return p == pattern.size();
}

inline std::vector<std::filesystem::path> expand_instance_paths(
    const std::vector<std::string>& patterns, const std::filesystem::path& root) {
    std::vector<std::filesystem::path> out;
    for (const auto& raw : patterns) {
        std::filesystem::path pat(raw);
        if (!pat.is_absolute())
            pat = root / pat;
        const std::string fname = pat.filename().string();
        if (fname.find('*') == std::string::npos) {
            out.push_back(pat);
            continue;
        }
        std::vector<std::filesystem::path> matched;
        const auto dir = pat.parent_path();
        if (!std::filesystem::is_directory(dir))
            throw SpecError("spec field 'instances': no such directory " + dir.string());
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && wildcard_match(fname, entry.path().filename().string()))
                matched.push_back(entry.path());
        std::sort(matched.begin(), matched.end());
        if (matched.empty())
            throw SpecError("spec field 'instances': pattern matched nothing: " + raw);
        out.insert(out.end(), matched.begin(), matched.end());
    }
    return out;
}

} // namespace detail

/// Expands the spec into resolved cells (cartesian product over the list
/// fields; tournament sizes multiply only the tournament selections, and
/// lambda multiplies only (1+lambda) cells). Instance problems additionally
/// multiply over the parsed instances.
inline std::vector<CellSpec> expand_cells(const ExperimentSpec& spec,
                                          const std::filesystem::path& data_root) {
    validate_experiment_spec(spec);
    const ProblemFamily family = spec.family();

    struct ProblemEntry {
        std::shared_ptr<const Problem> problem;
        std::string instance_id;
        std::string k_or_l;
        std::uint32_t n;
    };
    std::vector<ProblemEntry> problems;

    switch (family) {
    case ProblemFamily::TwoMax:
        for (std::uint32_t n : spec.n_values) {
            auto p = std::make_shared<TwoMaxProblem>(n, spec.trunc_k);
            problems.push_back({p, "", std::to_string(p->truncation()), n});
        }
        break;
    case ProblemFamily::TwoGradients:
        for (std::uint32_t n : spec.n_values) {
            auto p = std::make_shared<TwoGradientsProblem>(n);
            problems.push_back({p, "", std::to_string(p->shape().ell), n});
        }
        break;
    case ProblemFamily::Ridge: {
        auto p = std::make_shared<RidgeProblem>(*spec.ridge_k, spec.branch_j);
        problems.push_back({p, p->name(), std::to_string(*spec.ridge_k), p->dimension()});
        break;
    }
    case ProblemFamily::MaxSat:
        for (const auto& path : detail::expand_instance_paths(spec.instance_paths, data_root)) {
            auto formula = load_dimacs_file(path);
            const std::string id = path.stem().string();
            auto p = std::make_shared<MaxSatProblem>(std::move(formula), id);
            problems.push_back({p, id, "0", p->dimension()});
        }
        break;
    case ProblemFamily::Mkp:
        for (const auto& path : detail::expand_instance_paths(spec.instance_paths, data_root)) {
            auto instances = load_mknap_file(path);
            for (std::size_t i = 0; i < instances.size(); ++i) {
                const std::string id = path.stem().string() + "#" + std::to_string(i + 1);
                auto p = std::make_shared<MkpProblem>(std::move(instances[i]), id);
                problems.push_back({p, id, "0", p->dimension()});
            }
        }
        break;
    }

    std::vector<CellSpec> cells;
    for (const auto& entry : problems) {
        for (EngineKind engine : spec.engines) {
            const bool wants_selection = engine == EngineKind::SteadyState;
            const auto& selections = wants_selection
                                         ? spec.selections
                                         : std::vector<SelectionKind>{SelectionKind::Uniform};
            for (SelectionKind sel : selections) {
                const bool tournament = sel == SelectionKind::Tournament ||
                                        sel == SelectionKind::InverseTournament;
                const auto& ks = tournament ? spec.tournament_sizes
                                            : std::vector<std::uint32_t>{1};
                for (std::uint32_t k : ks) {
                    for (MutationKind mut : spec.mutations) {
                        const auto& lambdas = engine == EngineKind::OnePlusLambda
                                                  ? spec.lambdas
                                                  : std::vector<std::uint32_t>{1};
                        for (std::uint32_t lambda : lambdas) {
                            const auto& mus = (engine == EngineKind::OnePlusLambda)
                                                  ? std::vector<std::uint32_t>{1}
                                                  : spec.mu_values;
                            for (std::uint32_t mu : mus) {
                                CellSpec cell;
                                cell.problem = entry.problem;
                                cell.family = family;
                                cell.instance_id = entry.instance_id;
                                cell.k_or_l = entry.k_or_l;
                                cell.config.kind = engine;
                                cell.config.mu = engine == EngineKind::OnePlusLambda ? 1 : mu;
                                cell.config.lambda = lambda;
                                cell.config.mutation = MutationPolicy{mut};
                                cell.config.selection = SelectionPolicy{sel, k};
                                cell.config.budget = spec.budget
                                                         ? *spec.budget
                                                         : detail::auto_budget(family, mu, entry.n);
                                std::ostringstream id;
                                id << entry.problem->name() << "/n=" << entry.n
                                   << "/kl=" << entry.k_or_l;
                                if (!entry.instance_id.empty())
                                    id << "/inst=" << entry.instance_id;
                                id << '/' << to_string(engine) << '/' << to_string(sel)
                                   << "/K=" << k << '/' << to_string(mut) << "/mu=" << mu;
                                if (engine == EngineKind::OnePlusLambda)
                                    id << "/lambda=" << lambda;
                                cell.id = id.str();
                                cells.push_back(std::move(cell));
                            }
                        }
                    }
                }
            }
        }
    }
    return cells;
}

/// Per-run seed: mixes the base seed, the cell identity and the run index
/// through the documented stream-splitting function.
inline std::uint64_t run_seed(std::uint64_t base_seed, const std::string& cell_id,
                              std::uint64_t run_index) {
    return derive_stream_seed(derive_stream_seed(base_seed, hash_label(cell_id)), run_index);
}

// ---------------------------------------------------------------------------
// Run execution
// ---------------------------------------------------------------------------

namespace detail {

/// mu parallel (1+1) runs sharing one budget: sub-run j receives
/// floor(B/mu) evaluations, so the summed budget never exceeds B. With a
/// target this is restart accounting (sub-runs consume the budget in
/// sequence until one solves); without one it reports the best feasible
/// fitness over all sub-runs.
inline RunRecord run_parallel_one_plus_one(const Problem& problem, const EngineConfig& config,
                                           std::uint64_t seed, std::optional<Fitness> target,
                                           const EventTap* tap) {
    const std::uint32_t mu = config.mu;
    const std::uint64_t sub_budget = std::max<std::uint64_t>(config.budget / mu, 1);
    RunRecord total;
    total.seed = seed;
    total.outcome = target ? OutcomeKind::BudgetExhausted : OutcomeKind::BestFitness;
    total.best_fitness = 0;
    Fitness best = std::numeric_limits<Fitness>::min();
    for (std::uint32_t j = 0; j < mu; ++j) {
        EngineConfig sub = config;
        sub.kind = EngineKind::OnePlusOne;
        sub.mu = 1;
        sub.lambda = 1;
        sub.budget = sub_budget;
        OnePlusLambdaEngine engine(sub, problem, RngStream(derive_stream_seed(seed, j)));
        RunRecord r = target ? run_until_target(engine, *target, sub_budget, tap)
                             : run_best_feasible(engine, tap);
        best = std::max(best, r.best_fitness);
        if (target && r.solved) {
            total.solved = true;
            total.solved_at = total.evaluations + r.solved_at;
            total.evaluations += r.evaluations;
            total.outcome = OutcomeKind::SolvedAt;
            total.best_fitness = best;
            return total;
        }
        total.evaluations += r.evaluations;
    }
    total.best_fitness = std::max<Fitness>(best, 0);
    if (target && !total.solved)
        total.solved_at = config.budget;
    return total;
}

template <class Fn>
RunRecord with_engine(const Problem& problem, const EngineConfig& config, std::uint64_t seed,
                      Fn&& fn) {
    switch (config.kind) {
    case EngineKind::SteadyState: {
        SteadyStateEngine engine(config, problem, RngStream(seed));
        return fn(engine);
    }
    case EngineKind::Crowding: {
        CrowdingEngine engine(config, problem, RngStream(seed));
        return fn(engine);
    }
    case EngineKind::OnePlusOne:
    case EngineKind::OnePlusLambda: {
        EngineConfig cfg = config;
        cfg.mu = 1;
        if (config.kind == EngineKind::OnePlusOne)
            cfg.lambda = 1;
        OnePlusLambdaEngine engine(cfg, problem, RngStream(seed));
        return fn(engine);
    }
    }
    throw std::logic_error("with_engine: unknown engine kind");
}

} // namespace detail

/// Executes one seeded run of a cell and classifies it with the rules of its
/// problem family.
inline RunRecord execute_run(const CellSpec& cell, std::uint64_t seed, bool fast_forward,
                             const EventTap* tap = nullptr) {
    switch (cell.family) {
    case ProblemFamily::TwoMax: {
        const auto& prob = static_cast<const TwoMaxProblem&>(*cell.problem);
        auto record = run_twomax_peaks(prob, cell.config, seed, fast_forward, tap);
        return record;
    }
    case ProblemFamily::TwoGradients: {
        const auto& prob = static_cast<const TwoGradientsProblem&>(*cell.problem);
        return run_twogradients(prob, cell.config, seed, fast_forward, tap);
    }
    case ProblemFamily::Ridge:
    case ProblemFamily::MaxSat: {
        const Fitness target = *cell.problem->known_max();
        if (cell.config.kind == EngineKind::OnePlusOne && cell.config.mu > 1)
            return detail::run_parallel_one_plus_one(*cell.problem, cell.config, seed, target,
                                                     tap);
        auto record = detail::with_engine(
            *cell.problem, cell.config, seed, [&](auto& engine) {
                return run_until_target(engine, target, cell.config.budget, tap);
            });
        record.seed = seed;
        return record;
    }
    case ProblemFamily::Mkp: {
        if (cell.config.kind == EngineKind::OnePlusOne && cell.config.mu > 1)
            return detail::run_parallel_one_plus_one(*cell.problem, cell.config, seed,
                                                     std::nullopt, tap);
        auto record = detail::with_engine(*cell.problem, cell.config, seed, [&](auto& engine) {
            return run_best_feasible(engine, tap);
        });
        record.seed = seed;
        return record;
    }
    }
    throw std::logic_error("execute_run: unknown family");
}

// ---------------------------------------------------------------------------
// Grid execution and TSV emission
// ---------------------------------------------------------------------------

struct GridResult {
    std::vector<CellSpec> cells;
    std::vector<std::vector<RunRecord>> records; // [cell][run]
};

/// Runs every (cell, run) task, farming them over `threads` workers. Output
/// is deterministic regardless of the thread count: each run derives its own
/// seed and the records land in a pre-sized table.
inline GridResult run_grid(const ExperimentSpec& spec, const std::filesystem::path& data_root,
                           unsigned threads) {
    GridResult result;
    result.cells = expand_cells(spec, data_root);
    result.records.resize(result.cells.size());
    for (auto& v : result.records)
        v.resize(spec.runs);

    struct Task {
        std::uint32_t cell;
        std::uint64_t run;
    };
    std::vector<Task> tasks;
    tasks.reserve(result.cells.size() * spec.runs);
    for (std::uint32_t c = 0; c < result.cells.size(); ++c)
        for (std::uint64_t r = 0; r < spec.runs; ++r)
            tasks.push_back({c, r});

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task task = tasks[i];
            const CellSpec& cell = result.cells[task.cell];
            const std::uint64_t seed = run_seed(spec.seed, cell.id, task.run);
            try {
                result.records[task.cell][task.run] = execute_run(cell, seed, spec.fast_forward);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty())
                    first_error = "cell " + cell.id + ", seed " + std::to_string(seed) + ": " +
                                  e.what();
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (!first_error.empty())
        throw std::runtime_error(first_error);
    return result;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

/// Success-grid TSV (one row per cell): outcome counts and the Wilson 95%
/// interval on the both-peaks proportion. For TwoGradients cells the
/// single_left column counts LOC convergence and single_right counts OPT
/// convergence.
inline void write_success_grid_tsv(std::ostream& out, const ExperimentSpec& spec,
                                   const GridResult& grid) {
    out << "# converged = whole population at peak fitness; timeout column counts "
           "budget-exhausted and 2^63-overflow runs\n";
    out << "problem\tn\tk_or_l\tengine\tselection\tK\tmutation\tmu\truns\tboth\tsingle_left\t"
           "single_right\ttimeout\tp_both\tci_low\tci_high\n";
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        const CellSpec& cell = grid.cells[c];
        std::uint64_t both = 0, left = 0, right = 0, timeout = 0;
        for (const RunRecord& r : grid.records[c]) {
            switch (r.outcome) {
            case OutcomeKind::BothFound:
                ++both;
                break;
            case OutcomeKind::SinglePeak:
                if (r.outcome_label == "AllOnes" || r.outcome_label == "GlobalPeak")
                    ++right;
                else
                    ++left;
                break;
            case OutcomeKind::ConvergedOpt:
                ++right;
                break;
            case OutcomeKind::ConvergedLoc:
                ++left;
                break;
            default:
                ++timeout;
                break;
            }
        }
        const auto ci = wilson_interval(both, spec.runs);
        out << cell.problem->name() << '\t' << cell.problem->dimension() << '\t' << cell.k_or_l
            << '\t' << to_string(cell.config.kind) << '\t'
            << to_string(cell.config.selection.kind) << '\t'
            << cell.config.selection.tournament_size << '\t'
            << to_string(cell.config.mutation.kind) << '\t' << cell.config.mu << '\t' << spec.runs
            << '\t' << both << '\t' << left << '\t' << right << '\t' << timeout << '\t'
            << detail::format_double(ci.point) << '\t' << detail::format_double(ci.lower) << '\t'
            << detail::format_double(ci.upper) << '\n';
    }
}

/// Time-series TSV: cumulative proportions of runs that have constructed
/// both optima / the global optimum / the local optimum by each evaluation
/// checkpoint (a 1-2-5 ladder covering every recorded first hit).
inline void write_timeseries_tsv(std::ostream& out, const ExperimentSpec& spec,
                                 const GridResult& grid) {
    std::uint64_t max_hit = 0;
    for (const auto& cell_records : grid.records)
        for (const RunRecord& r : cell_records)
            for (const auto& [name, at] : r.first_hits)
                max_hit = std::max(max_hit, at);
    std::vector<std::uint64_t> checkpoints;
    for (std::uint64_t base = 100; checkpoints.empty() || checkpoints.back() < max_hit;
         base *= 10)
        for (std::uint64_t mult : {1, 2, 5}) {
            checkpoints.push_back(base * mult);
            if (checkpoints.back() >= max_hit)
                break;
        }
    out << "evaluations";
    for (const CellSpec& cell : grid.cells)
        out << '\t' << cell.id << "/both\t" << cell.id << "/opt\t" << cell.id << "/loc";
    out << '\n';
    const auto runs = static_cast<double>(spec.runs);
    for (std::uint64_t cp : checkpoints) {
        out << cp;
        for (std::size_t c = 0; c < grid.cells.size(); ++c) {
            std::uint64_t nboth = 0, nopt = 0, nloc = 0;
            for (const RunRecord& r : grid.records[c]) {
                const auto opt_at = r.first_hit("OPT");
                const auto loc_at = r.first_hit("LOC");
                if (opt_at && *opt_at <= cp)
                    ++nopt;
                if (loc_at && *loc_at <= cp)
                    ++nloc;
                if (opt_at && loc_at && std::max(*opt_at, *loc_at) <= cp)
                    ++nboth;
            }
            out << '\t' << detail::format_double(nboth / runs) << '\t'
                << detail::format_double(nopt / runs) << '\t'
                << detail::format_double(nloc / runs);
        }
        out << '\n';
    }
}

/// Per-run TSV for solve-time / best-fitness experiments.
inline void write_runs_tsv(std::ostream& out, const GridResult& grid,
                           const BestKnownTable& table) {
    out << "instance\tengine\tselection\tK\tmu\tseed\tsolved_at\tbest_fitness\t"
           "normalized_fitness\n";
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        const CellSpec& cell = grid.cells[c];
        for (const RunRecord& r : grid.records[c]) {
            std::string norm = "0.000000";
            const Fitness achieved = std::max<Fitness>(r.best_fitness, 0);
            if (table.contains(cell.instance_id))
                norm = normalized_fitness(cell.instance_id, achieved, table);
            out << cell.instance_id << '\t' << to_string(cell.config.kind) << '\t'
                << to_string(cell.config.selection.kind) << '\t'
                << cell.config.selection.tournament_size << '\t' << cell.config.mu << '\t'
                << r.seed << '\t' << r.solved_at << '\t' << achieved << '\t' << norm << '\n';
        }
    }
}

} // namespace ssea
