#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "stats.hpp"

namespace ssea::cli {

namespace detail {

inline std::filesystem::path data_root(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("SSEA_DATA_DIR"))
        return std::filesystem::path(env);
    return fallback;
}

struct ProblemOptions {
    std::string problem;
    std::uint32_t n = 0;
    std::optional<std::uint32_t> trunc_k;
    std::optional<std::uint32_t> ridge_k;
    std::optional<std::uint32_t> branch_j;
    std::string file;
    std::uint32_t instance_index = 1;
};

/// Builds a single problem instance from CLI flags (the `run` and `fitness`
/// commands). Throws CLI::ValidationError on inconsistent flags.
inline std::pair<std::shared_ptr<const Problem>, ProblemFamily>
make_problem(const ProblemOptions& opt) {
    auto need_n = [&]() {
        if (opt.n == 0)
            throw CLI::ValidationError("--n", "required for problem '" + opt.problem + "'");
    };
    if (opt.problem == "twomax") {
        need_n();
        return {std::make_shared<TwoMaxProblem>(opt.n), ProblemFamily::TwoMax};
    }
    if (opt.problem == "truncated-twomax") {
        need_n();
        if (!opt.trunc_k)
            throw CLI::ValidationError("--trunc-k", "required for truncated-twomax");
        return {std::make_shared<TwoMaxProblem>(opt.n, opt.trunc_k), ProblemFamily::TwoMax};
    }
    if (opt.problem == "twogradients") {
        need_n();
        return {std::make_shared<TwoGradientsProblem>(opt.n), ProblemFamily::TwoGradients};
    }
    if (opt.problem == "ridge" || opt.problem == "ridge-j") {
        if (!opt.ridge_k)
            throw CLI::ValidationError("--ridge-k", "required for ridge problems");
        if (opt.problem == "ridge-j" && !opt.branch_j)
            throw CLI::ValidationError("--branch-j", "required for ridge-j");
        return {std::make_shared<RidgeProblem>(*opt.ridge_k,
                                               opt.problem == "ridge-j" ? opt.branch_j
                                                                        : std::nullopt),
                ProblemFamily::Ridge};
    }
    if (opt.problem == "maxsat") {
        if (opt.file.empty())
            throw CLI::ValidationError("--file", "required for maxsat");
        auto formula = load_dimacs_file(opt.file);
        return {std::make_shared<MaxSatProblem>(std::move(formula),
                                                std::filesystem::path(opt.file).stem().string()),
                ProblemFamily::MaxSat};
    }
    if (opt.problem == "mkp") {
        if (opt.file.empty())
            throw CLI::ValidationError("--file", "required for mkp");
        auto instances = load_mknap_file(opt.file);
        if (opt.instance_index < 1 || opt.instance_index > instances.size())
            throw CLI::ValidationError("--instance-index",
                                       "file holds " + std::to_string(instances.size()) +
                                           " instance(s)");
        const std::string id = std::filesystem::path(opt.file).stem().string() + "#" +
                               std::to_string(opt.instance_index);
        return {std::make_shared<MkpProblem>(std::move(instances[opt.instance_index - 1]), id),
                ProblemFamily::Mkp};
    }
    throw CLI::ValidationError("--problem", "unknown problem '" + opt.problem + "'");
}

inline void print_run_record(std::ostream& out, const CellSpec& cell, const RunRecord& record) {
    out << "problem=" << cell.problem->name() << " n=" << cell.problem->dimension()
        << " engine=" << to_string(cell.config.kind)
        << " selection=" << to_string(cell.config.selection.kind)
        << " K=" << cell.config.selection.tournament_size
        << " mutation=" << to_string(cell.config.mutation.kind) << " mu=" << cell.config.mu
        << " seed=" << record.seed << " evaluations=" << record.evaluations;
    for (const auto& [name, at] : record.first_hits)
        out << " first[" << name << "]=" << at;
    if (record.outcome == OutcomeKind::SolvedAt || record.outcome == OutcomeKind::BestFitness)
        out << " solved_at=" << record.solved_at << " best_fitness=" << record.best_fitness;
    out << " outcome=" << to_string(record.outcome);
    if (!record.outcome_label.empty())
        out << "(" << record.outcome_label << ")";
    out << '\n';
}

/// Rows of a per-run TSV, read back for paired statistics.
struct RunRow {
    std::string instance;
    double solved_at = 0;
    double best_fitness = 0;
    double normalized = 0;
};

inline std::vector<RunRow> read_runs_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("stats: cannot open " + path.string());
    std::string header;
    do {
        if (!std::getline(in, header))
            throw std::runtime_error("stats: " + path.string() + " is empty");
    } while (!header.empty() && header[0] == '#');
    std::map<std::string, std::size_t> columns;
    {
        std::istringstream hs(header);
        std::string name;
        std::size_t idx = 0;
        while (std::getline(hs, name, '\t'))
            columns[name] = idx++;
    }
    for (const char* required : {"instance", "solved_at", "best_fitness", "normalized_fitness"})
        if (!columns.count(required))
            throw std::runtime_error("stats: " + path.string() + " lacks column '" + required +
                                     "'");
    std::vector<RunRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, '\t'))
            fields.push_back(f);
        RunRow row;
        row.instance = fields.at(columns["instance"]);
        row.solved_at = std::stod(fields.at(columns["solved_at"]));
        row.best_fitness = std::stod(fields.at(columns["best_fitness"]));
        row.normalized = std::stod(fields.at(columns["normalized_fitness"]));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Pairs the i-th run on each instance across two row sets.
inline stats::PairedSample pair_rows(const std::vector<RunRow>& a, const std::vector<RunRow>& b,
                                     const std::string& metric) {
    auto value = [&](const RunRow& r) {
        if (metric == "time")
            return r.solved_at;
        if (metric == "fitness")
            return r.best_fitness;
        return r.normalized;
    };
    std::map<std::string, std::vector<double>> by_instance_b;
    std::map<std::string, std::size_t> used;
    for (const RunRow& r : b)
        by_instance_b[r.instance].push_back(value(r));
    stats::PairedSample sample;
    for (const RunRow& r : a) {
        auto it = by_instance_b.find(r.instance);
        if (it == by_instance_b.end())
            continue;
        std::size_t& u = used[r.instance];
        if (u >= it->second.size())
            continue;
        sample.pairs.emplace_back(value(r), it->second[u++]);
    }
    if (sample.pairs.empty())
        throw std::runtime_error("stats: no pairable runs (instances do not overlap)");
    return sample;
}

} // namespace detail

/// CLI entry point; returns the process exit status (0 success, 2 usage
/// error, 1 runtime error).
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"steady-state evolutionary algorithm laboratory"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute one seeded run and print its record");
    detail::ProblemOptions run_problem;
    std::string run_engine = "mu1", run_selection = "uniform", run_mutation = "sbm";
    std::uint32_t run_mu = 1, run_k = 2, run_lambda = 1;
    std::uint64_t run_seed_value = 0, run_budget = 0;
    bool run_trace = false, run_no_ff = false;
    run_cmd->add_option("--problem", run_problem.problem)->required();
    run_cmd->add_option("--n", run_problem.n);
    run_cmd->add_option("--trunc-k", run_problem.trunc_k);
    run_cmd->add_option("--ridge-k", run_problem.ridge_k);
    run_cmd->add_option("--branch-j", run_problem.branch_j);
    run_cmd->add_option("--file", run_problem.file);
    run_cmd->add_option("--instance-index", run_problem.instance_index);
    run_cmd->add_option("--engine", run_engine);
    run_cmd->add_option("--selection", run_selection);
    run_cmd->add_option("--mutation", run_mutation);
    run_cmd->add_option("--mu", run_mu);
    run_cmd->add_option("--k", run_k);
    run_cmd->add_option("--lambda", run_lambda);
    run_cmd->add_option("--seed", run_seed_value)->required();
    run_cmd->add_option("--budget", run_budget);
    run_cmd->add_flag("--trace", run_trace);
    run_cmd->add_flag("--no-fast-forward", run_no_ff);

    // --- fitness -----------------------------------------------------------
    auto* fitness_cmd = app.add_subcommand("fitness", "evaluate one genotype");
    detail::ProblemOptions fitness_problem;
    std::string fitness_genotype;
    fitness_cmd->add_option("--problem", fitness_problem.problem)->required();
    fitness_cmd->add_option("--n", fitness_problem.n);
    fitness_cmd->add_option("--trunc-k", fitness_problem.trunc_k);
    fitness_cmd->add_option("--ridge-k", fitness_problem.ridge_k);
    fitness_cmd->add_option("--branch-j", fitness_problem.branch_j);
    fitness_cmd->add_option("--file", fitness_problem.file);
    fitness_cmd->add_option("--instance-index", fitness_problem.instance_index);
    fitness_cmd->add_option("--genotype", fitness_genotype)->required();

    // --- parse-check -------------------------------------------------------
    auto* parse_cmd = app.add_subcommand("parse-check", "validate instance files");
    std::string parse_problem;
    std::vector<std::string> parse_files;
    parse_cmd->add_option("--problem", parse_problem)->required();
    parse_cmd->add_option("files", parse_files)->required();

    // --- bench -------------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("bench", "execute an experiment spec file");
    std::string bench_spec_path;
    std::optional<unsigned> bench_threads;
    std::optional<std::string> bench_out;
    bench_cmd->add_option("--spec", bench_spec_path)->required();
    auto* bench_threads_opt = bench_cmd->add_option("--threads", bench_threads);
    bench_cmd->add_option("--out", bench_out);
    (void)bench_threads_opt;

    // --- stats -------------------------------------------------------------
    auto* stats_cmd = app.add_subcommand("stats", "paired comparison of per-run TSV outputs");
    std::string stats_baseline, stats_out;
    std::vector<std::string> stats_challengers;
    std::vector<std::string> stats_metrics{"fitness"};
    double stats_alpha = 0.01;
    stats_cmd->add_option("--baseline", stats_baseline)->required();
    stats_cmd->add_option("--challenger", stats_challengers)->required();
    stats_cmd->add_option("--metric", stats_metrics)
        ->check(CLI::IsMember({"time", "fitness", "normalized"}));
    stats_cmd->add_option("--alpha", stats_alpha);
    stats_cmd->add_option("--out", stats_out);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        if (*run_cmd) {
            auto [problem, family] = detail::make_problem(run_problem);
            CellSpec cell;
            cell.problem = problem;
            cell.family = family;
            cell.instance_id = run_problem.file.empty()
                                   ? problem->name()
                                   : std::filesystem::path(run_problem.file).stem().string();
            cell.config.kind = ssea::detail::parse_engine("--engine", run_engine);
            cell.config.selection =
                SelectionPolicy{ssea::detail::parse_selection("--selection", run_selection), run_k};
            cell.config.mutation = MutationPolicy{ssea::detail::parse_mutation("--mutation", run_mutation)};
            cell.config.mu = run_mu;
            cell.config.lambda = run_lambda;
            if (run_budget != 0)
                cell.config.budget = run_budget;
            else
                cell.config.budget =
                    ssea::detail::auto_budget(family, run_mu, problem->dimension());
            EventTap tap = [&](const IterationEvent& ev) {
                out << "eval=" << ev.evaluation_index << " fitness=" << ev.offspring_fitness
                    << " survived=" << (ev.offspring_survived ? 1 : 0)
                    << (ev.initialization ? " init" : "") << '\n';
            };
            const RunRecord record =
                execute_run(cell, run_seed_value, !run_no_ff, run_trace ? &tap : nullptr);
            detail::print_run_record(out, cell, record);
            return 0;
        }

        if (*fitness_cmd) {
            auto [problem, family] = detail::make_problem(fitness_problem);
            const Genotype g = Genotype::from_string(fitness_genotype);
            if (g.size() != problem->dimension())
                throw CLI::ValidationError("--genotype",
                                           "length " + std::to_string(g.size()) +
                                               " does not match problem dimension " +
                                               std::to_string(problem->dimension()));
            out << problem->evaluate(g) << '\n';
            return 0;
        }

        if (*parse_cmd) {
            bool all_ok = true;
            for (const auto& file : parse_files) {
                try {
                    if (parse_problem == "maxsat") {
                        const auto formula = load_dimacs_file(file);
                        out << "OK " << file << " (vars=" << formula.variable_count
                            << " clauses=" << formula.clause_count() << ")\n";
                    } else if (parse_problem == "mkp") {
                        const auto instances = load_mknap_file(file);
                        out << "OK " << file << " (instances=" << instances.size() << ")\n";
                    } else {
                        throw CLI::ValidationError("--problem",
                                                   "parse-check supports maxsat and mkp");
                    }
                } catch (const ParseError& e) {
                    err << e.what() << '\n';
                    all_ok = false;
                }
            }
            return all_ok ? 0 : 1;
        }

        if (*bench_cmd) {
            std::ifstream in(bench_spec_path);
            if (!in)
                throw std::runtime_error("bench: cannot open spec file " + bench_spec_path);
            ExperimentSpec spec = parse_experiment_spec(in);
            if (bench_out)
                spec.out = *bench_out;
            validate_experiment_spec(spec);
            const auto spec_dir = std::filesystem::absolute(bench_spec_path).parent_path();
            const auto root = detail::data_root(spec_dir);
            const unsigned threads = bench_threads.value_or(spec.threads);
            const GridResult grid = run_grid(spec, root, std::max(1u, threads));

            const ProblemFamily family = spec.family();
            if (family == ProblemFamily::TwoMax || family == ProblemFamily::TwoGradients) {
                std::ofstream tsv(spec.out);
                if (!tsv)
                    throw std::runtime_error("bench: cannot write " + spec.out);
                write_success_grid_tsv(tsv, spec, grid);
                if (!spec.timeseries_out.empty()) {
                    std::ofstream series(spec.timeseries_out);
                    if (!series)
                        throw std::runtime_error("bench: cannot write " + spec.timeseries_out);
                    write_timeseries_tsv(series, spec, grid);
                }
            } else {
                BestKnownTable table;
                if (family == ProblemFamily::Mkp) {
                    if (!spec.best_known_path.empty()) {
                        const auto table_path = root / spec.best_known_path;
                        if (std::filesystem::exists(table_path))
                            table = BestKnownTable::load(table_path);
                    }
                    // Seed from declared optima, then from the batch itself
                    // for instances the table has never seen.
                    for (const CellSpec& cell : grid.cells) {
                        const auto& inst = static_cast<const MkpProblem&>(*cell.problem).instance();
                        if (inst.declared_optimum > 0)
                            table.offer(cell.instance_id, inst.declared_optimum);
                    }
                    for (std::size_t c = 0; c < grid.cells.size(); ++c)
                        if (!table.contains(grid.cells[c].instance_id))
                            for (const RunRecord& r : grid.records[c])
                                table.offer(grid.cells[c].instance_id, r.best_fitness);
                } else {
                    for (const CellSpec& cell : grid.cells)
                        if (const auto max = cell.problem->known_max())
                            table.offer(cell.instance_id, *max);
                }
                {
                    std::ofstream tsv(spec.out);
                    if (!tsv)
                        throw std::runtime_error("bench: cannot write " + spec.out);
                    write_runs_tsv(tsv, grid, table);
                }
                if (family == ProblemFamily::Mkp && !spec.best_known_path.empty()) {
                    bool improved = false;
                    for (std::size_t c = 0; c < grid.cells.size(); ++c)
                        for (const RunRecord& r : grid.records[c])
                            improved |= table.offer(grid.cells[c].instance_id, r.best_fitness);
                    table.save(root / spec.best_known_path);
                    (void)improved;
                }
            }
            out << "wrote " << spec.out << " (" << grid.cells.size() << " cells x " << spec.runs
                << " runs)\n";
            return 0;
        }

        if (*stats_cmd) {
            const auto baseline_rows = detail::read_runs_tsv(stats_baseline);
            struct Comparison {
                std::string id;
                std::string metric;
                stats::TestResult result;
                double p_directional;
                std::size_t n_pairs;
            };
            std::vector<Comparison> comparisons;
            for (const auto& challenger : stats_challengers) {
                const auto challenger_rows = detail::read_runs_tsv(challenger);
                for (const auto& metric : stats_metrics) {
                    auto sample = detail::pair_rows(challenger_rows, baseline_rows, metric);
                    if (metric == "time")
                        for (auto& [a, b] : sample.pairs) {
                            a = -a;
                            b = -b;
                        }
                    Comparison cmp;
                    cmp.id = std::filesystem::path(challenger).stem().string() + "-vs-" +
                             std::filesystem::path(stats_baseline).stem().string();
                    cmp.metric = metric;
                    cmp.n_pairs = sample.pairs.size();
                    cmp.result = stats::wilcoxon_signed_rank(sample);
                    cmp.p_directional = stats::wilcoxon_p_greater(sample);
                    comparisons.push_back(std::move(cmp));
                }
            }
            std::vector<double> directional;
            for (const auto& c : comparisons)
                directional.push_back(c.p_directional);
            const auto decisions = stats::holm_bonferroni(directional, stats_alpha);
            std::ostringstream report;
            report << "comparison\tmetric\tn_pairs\tn_effective\tW\tz\tp_two\tp_one\t"
                      "holm_decision\n";
            for (std::size_t i = 0; i < comparisons.size(); ++i) {
                const auto& c = comparisons[i];
                report << c.id << '\t' << c.metric << '\t' << c.n_pairs << '\t'
                       << c.result.n_effective << '\t' << ssea::detail::format_double(c.result.statistic)
                       << '\t' << ssea::detail::format_double(c.result.z) << '\t'
                       << ssea::detail::format_double(c.result.p_two_sided) << '\t'
                       << ssea::detail::format_double(c.p_directional) << '\t'
                       << (decisions[i] ? "reject" : "accept") << '\n';
            }
            if (stats_out.empty()) {
                out << report.str();
            } else {
                std::ofstream f(stats_out);
                if (!f)
                    throw std::runtime_error("stats: cannot write " + stats_out);
                f << report.str();
                out << "wrote " << stats_out << '\n';
            }
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const SpecError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int dispatch_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return dispatch(std::move(args), std::cout, std::cerr);
}

} // namespace ssea::cli
