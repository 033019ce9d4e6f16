#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"

namespace ssea {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// MaxSat (DIMACS CNF, SATLIB flavour)
// ---------------------------------------------------------------------------

/// CNF formula: clauses are stored flat, with offsets marking clause
/// boundaries. Literals are non-zero signed variable indices (positive =
/// asserted, negative = negated), all with magnitude <= variable_count.
struct CnfFormula {
    std::uint32_t variable_count = 0;
    std::vector<std::int32_t> literals;
    std::vector<std::uint32_t> clause_offsets; // clause c = [offsets[c], offsets[c+1])

    std::uint32_t clause_count() const {
        return clause_offsets.empty() ? 0 : static_cast<std::uint32_t>(clause_offsets.size() - 1);
    }
};

/// Parses DIMACS CNF as distributed by SATLIB: 'c' comment lines, a
/// 'p cnf <vars> <clauses>' header, whitespace-separated 0-terminated
/// clauses, plus the SATLIB quirks of '%' lines and a stray trailing "0"
/// after the final clause. The clause count must match the header.
inline CnfFormula parse_dimacs(std::istream& in) {
    CnfFormula formula;
    formula.clause_offsets.push_back(0);
    bool have_header = false;
    std::uint32_t declared_clauses = 0;
    bool in_clause = false;
    std::string line;
    std::size_t line_number = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("dimacs: line " + std::to_string(line_number) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty())
            continue;
        const char first = line[0];
        if (first == 'c' || first == '%')
            continue;
        if (first == 'p') {
            if (have_header)
                fail("duplicate header");
            std::istringstream hs(line);
            std::string p, fmt;
            long long nv = -1, nc = -1;
            hs >> p >> fmt >> nv >> nc;
            if (p != "p" || fmt != "cnf" || nv <= 0 || nc < 0 || hs.fail())
                fail("malformed 'p cnf' header");
            formula.variable_count = static_cast<std::uint32_t>(nv);
            declared_clauses = static_cast<std::uint32_t>(nc);
            have_header = true;
            continue;
        }
        if (!have_header)
            fail("literals before 'p cnf' header");
        std::istringstream ls(line);
        long long lit;
        while (ls >> lit) {
            if (lit == 0) {
                if (in_clause) {
                    formula.clause_offsets.push_back(
                        static_cast<std::uint32_t>(formula.literals.size()));
                    in_clause = false;
                } else if (formula.clause_count() != declared_clauses) {
                    fail("empty clause");
                }
                // A lone trailing 0 after all clauses is tolerated (SATLIB).
                continue;
            }
            if (lit < -static_cast<long long>(formula.variable_count) ||
                lit > static_cast<long long>(formula.variable_count))
                fail("literal " + std::to_string(lit) + " out of range");
            if (formula.clause_count() == declared_clauses)
                fail("more clauses than declared");
            formula.literals.push_back(static_cast<std::int32_t>(lit));
            in_clause = true;
        }
    }
    if (!have_header)
        throw ParseError("dimacs: missing 'p cnf' header");
    if (in_clause)
        throw ParseError("dimacs: unterminated final clause");
    if (formula.clause_count() != declared_clauses)
        throw ParseError("dimacs: clause count mismatch: header declares " +
                         std::to_string(declared_clauses) + ", found " +
                         std::to_string(formula.clause_count()));
    return formula;
}

inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline CnfFormula load_dimacs_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("dimacs: cannot open " + path.string());
    try {
        return parse_dimacs(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Number of satisfied clauses under the assignment where variable i is true
/// iff bit i-1 of x is 1.
inline Fitness maxsat_fitness(const CnfFormula& formula, const Genotype& x) {
    if (x.size() != formula.variable_count)
        throw std::invalid_argument("maxsat_fitness: genotype length does not match variable count");
    Fitness satisfied = 0;
    const auto nclauses = formula.clause_count();
    for (std::uint32_t c = 0; c < nclauses; ++c) {
        const std::uint32_t end = formula.clause_offsets[c + 1];
        for (std::uint32_t i = formula.clause_offsets[c]; i < end; ++i) {
            const std::int32_t lit = formula.literals[i];
            const bool bit = x.bit(static_cast<std::uint32_t>((lit > 0 ? lit : -lit) - 1));
            if (bit == (lit > 0)) {
                ++satisfied;
                break;
            }
        }
    }
    return satisfied;
}

class MaxSatProblem final : public Problem {
  public:
    MaxSatProblem(CnfFormula formula, std::string id)
        : formula_(std::move(formula)), id_(std::move(id)) {}

    std::uint32_t dimension() const override { return formula_.variable_count; }
    Fitness evaluate(const Genotype& x) const override { return maxsat_fitness(formula_, x); }
    std::string name() const override { return "maxsat"; }
    std::optional<Fitness> known_max() const override { return formula_.clause_count(); }

    std::uint32_t peak_count() const override { return 1; }
    std::string peak_name(std::uint32_t) const override { return "Satisfied"; }
    std::uint64_t peak_mask(const Genotype& x) const override {
        return evaluate(x) == static_cast<Fitness>(formula_.clause_count()) ? 1 : 0;
    }

    const CnfFormula& formula() const { return formula_; }
    const std::string& id() const { return id_; }

  private:
    CnfFormula formula_;
    std::string id_;
};

// ---------------------------------------------------------------------------
// Multidimensional knapsack (OR-Library mknap format)
// ---------------------------------------------------------------------------

/// One MKP instance: maximise sum of selected rewards subject to m weight
/// constraints. The penalty weight W = 1 + sum of rewards is recomputed at
/// load time so a single violated constraint always outweighs any reward.
struct MkpInstance {
    std::uint32_t item_count = 0;
    std::uint32_t constraint_count = 0;
    Fitness declared_optimum = 0; // 0 = unknown
    std::vector<Fitness> rewards;
    std::vector<Fitness> weights; // row-major, constraint_count x item_count
    std::vector<Fitness> capacities;
    Fitness penalty_weight = 0;

    Fitness weight(std::uint32_t constraint, std::uint32_t item) const {
        return weights[static_cast<std::size_t>(constraint) * item_count + item];
    }
};

namespace detail {

class TokenReader {
  public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    /// Next whitespace-separated token as a non-negative integer.
    Fitness next_value(const char* what) {
        std::string tok;
        if (!(in_ >> tok))
            throw ParseError("mknap: token " + std::to_string(index_) + ": unexpected end of input while reading " + what);
        ++index_;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw ParseError("mknap: token " + std::to_string(index_ - 1) + " ('" + tok +
                             "') while reading " + what + ": not an integer");
        if (v < 0)
            throw ParseError("mknap: token " + std::to_string(index_ - 1) + " while reading " +
                             std::string(what) + ": negative value");
        return v;
    }

    std::size_t index() const { return index_; }

  private:
    std::istream& in_;
    std::size_t index_ = 0;
};

} // namespace detail

/// Parses a multi-instance OR-Library mknap file: the first token is the
/// instance count; each instance is n, m, declared optimum, the n rewards,
/// the m x n weight matrix (one row per constraint) and the m capacities.
/// Tokens are whitespace-separated and line breaks carry no meaning.
inline std::vector<MkpInstance> parse_orlib_mknap(std::istream& in) {
    detail::TokenReader reader(in);
    const Fitness count = reader.next_value("instance count");
    std::vector<MkpInstance> instances;
    instances.reserve(static_cast<std::size_t>(count));
    for (Fitness inst = 0; inst < count; ++inst) {
        MkpInstance m;
        m.item_count = static_cast<std::uint32_t>(reader.next_value("item count"));
        m.constraint_count = static_cast<std::uint32_t>(reader.next_value("constraint count"));
        if (m.item_count == 0 || m.constraint_count == 0)
            throw ParseError("mknap: instance " + std::to_string(inst + 1) +
                             ": zero item or constraint count");
        m.declared_optimum = reader.next_value("declared optimum");
        m.rewards.reserve(m.item_count);
        Fitness reward_sum = 0;
        for (std::uint32_t j = 0; j < m.item_count; ++j) {
            m.rewards.push_back(reader.next_value("reward"));
            reward_sum += m.rewards.back();
        }
        m.weights.reserve(static_cast<std::size_t>(m.item_count) * m.constraint_count);
        for (std::uint32_t i = 0; i < m.constraint_count; ++i)
            for (std::uint32_t j = 0; j < m.item_count; ++j)
                m.weights.push_back(reader.next_value("weight"));
        m.capacities.reserve(m.constraint_count);
        for (std::uint32_t i = 0; i < m.constraint_count; ++i)
            m.capacities.push_back(reader.next_value("capacity"));
        m.penalty_weight = 1 + reward_sum;
        instances.push_back(std::move(m));
    }
    return instances;
}

inline std::vector<MkpInstance> parse_orlib_mknap(const std::string& text) {
    std::istringstream in(text);
    return parse_orlib_mknap(in);
}

inline std::vector<MkpInstance> load_mknap_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("mknap: cannot open " + path.string());
    try {
        return parse_orlib_mknap(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Penalised MKP fitness: the reward sum of the selected items plus
/// W * min(0, slack) summed over constraints. Feasible selections score
/// their plain reward; any violation makes the result negative.
inline Fitness mkp_fitness(const MkpInstance& inst, const Genotype& x) {
    if (x.size() != inst.item_count)
        throw std::invalid_argument("mkp_fitness: genotype length does not match item count");
    Fitness reward = 0;
    for (std::uint32_t j = 0; j < inst.item_count; ++j)
        if (x.bit(j))
            reward += inst.rewards[j];
    Fitness penalty = 0;
    const Fitness* row = inst.weights.data();
    for (std::uint32_t i = 0; i < inst.constraint_count; ++i, row += inst.item_count) {
        Fitness load = 0;
        for (std::uint32_t j = 0; j < inst.item_count; ++j)
            if (x.bit(j))
                load += row[j];
        const Fitness slack = inst.capacities[i] - load;
        if (slack < 0)
            penalty += slack;
    }
    return reward + inst.penalty_weight * penalty;
}

class MkpProblem final : public Problem {
  public:
    MkpProblem(MkpInstance instance, std::string id)
        : instance_(std::move(instance)), id_(std::move(id)) {}

    std::uint32_t dimension() const override { return instance_.item_count; }
    Fitness evaluate(const Genotype& x) const override { return mkp_fitness(instance_, x); }
    std::string name() const override { return "mkp"; }

    const MkpInstance& instance() const { return instance_; }
    const std::string& id() const { return id_; }

  private:
    MkpInstance instance_;
    std::string id_;
};

// ---------------------------------------------------------------------------
// Best-known table
// ---------------------------------------------------------------------------

/// Map from instance id to the best fitness value known for it, persisted as
/// a two-column "id<TAB>value" text file. Values only ever move upward.
class BestKnownTable {
  public:
    BestKnownTable() = default;

    static BestKnownTable load(const std::filesystem::path& path) {
        BestKnownTable table;
        std::ifstream in(path);
        if (!in)
            throw ParseError("best-known table: cannot open " + path.string());
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (line.empty() || line[0] == '#')
                continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError("best-known table: line " + std::to_string(line_number) +
                                 ": expected id<TAB>value");
            const std::string id = line.substr(0, tab);
            Fitness value = 0;
            try {
                value = std::stoll(line.substr(tab + 1));
            } catch (const std::exception&) {
                throw ParseError("best-known table: line " + std::to_string(line_number) +
                                 ": bad value");
            }
            if (value <= 0)
                throw ParseError("best-known table: line " + std::to_string(line_number) +
                                 ": values must be positive");
            table.values_[id] = value;
        }
        return table;
    }

    /// Atomic rewrite: the table is written to a sibling temp file and
    /// renamed over the target.
    void save(const std::filesystem::path& path) const {
        const std::filesystem::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out)
                throw std::runtime_error("best-known table: cannot write " + tmp.string());
            for (const auto& [id, value] : values_)
                out << id << '\t' << value << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

    bool contains(const std::string& id) const { return values_.count(id) != 0; }

    Fitness value(const std::string& id) const {
        auto it = values_.find(id);
        if (it == values_.end())
            throw std::out_of_range("best-known table: unknown instance id '" + id + "'");
        return it->second;
    }

    /// Raises the stored value if `achieved` beats it; inserts when absent.
    /// Returns true when the table changed.
    bool offer(const std::string& id, Fitness achieved) {
        if (achieved <= 0)
            return false;
        auto [it, inserted] = values_.emplace(id, achieved);
        if (!inserted && it->second >= achieved)
            return false;
        it->second = achieved;
        return true;
    }

    std::size_t size() const { return values_.size(); }

  private:
    std::map<std::string, Fitness> values_;
};

/// achieved / best-known, as a fixed 6-decimal string (exact division where
/// possible is irrelevant at this precision; callers report achieved == best
/// as "1.000000"). Values above 1 are legal and signal a new best.
inline std::string normalized_fitness(const std::string& id, Fitness achieved,
                                      const BestKnownTable& table) {
    if (achieved < 0)
        throw std::invalid_argument("normalized_fitness: achieved must be non-negative");
    const Fitness best = table.value(id);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f",
                  static_cast<double>(achieved) / static_cast<double>(best));
    return buf;
}

} // namespace ssea
