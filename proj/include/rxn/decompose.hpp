#pragma once

#include "rxn/network.hpp"
#include "rxn/parser.hpp"
#include "rxn/simplex.hpp"
#include "rxn/volpert.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rxn {

/// Species complex: species index -> positive multiplicity.
using Complex = std::map<int, int>;

inline int complex_order(const Complex& c) {
    int o = 0;
    for (const auto& [m, n] : c) o += n;
    return o;
}

/// Reaction step without a rate coefficient, as generated by the
/// combinatorial enumeration.
struct ElementaryStep {
    Complex reactants, products;
    auto operator<=>(const ElementaryStep&) const = default;
};

/// Elements-(plus charge)-by-species integer matrix of compositions.
/// Rows are the sorted element symbols followed by one "charge" row.
struct AtomicMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> species_names;
    Eigen::MatrixXi entries;  // rows x species; charge row may be negative
};

inline AtomicMatrix atomic_matrix(const ReactionNetwork& net) {
    std::set<std::string> elements;
    for (const auto& sp : net.species) {
        if (!sp.composition)
            throw std::invalid_argument("species '" + sp.name + "' lacks a composition");
        for (const auto& [el, n] : sp.composition->atoms)
            if (n > 0) elements.insert(el);
    }
    AtomicMatrix am;
    am.row_labels.assign(elements.begin(), elements.end());
    am.row_labels.push_back("charge");
    const int rows = static_cast<int>(am.row_labels.size());
    am.entries = Eigen::MatrixXi::Zero(rows, net.species_count());
    for (int m = 0; m < net.species_count(); ++m) {
        am.species_names.push_back(net.species[m].name);
        const auto& comp = *net.species[m].composition;
        for (int i = 0; i < rows - 1; ++i) {
            auto it = comp.atoms.find(am.row_labels[i]);
            if (it != comp.atoms.end()) am.entries(i, m) = it->second;
        }
        am.entries(rows - 1, m) = comp.charge;
    }
    return am;
}

struct StepGenerationReport {
    long reactant_complexes_examined = 0;  // 2M + C(M,2) for max_order 2
    long steps_generated = 0;
};

namespace detail {

inline Eigen::VectorXi complex_content(const AtomicMatrix& am, const Complex& c) {
    Eigen::VectorXi v = Eigen::VectorXi::Zero(am.entries.rows());
    for (const auto& [m, n] : c) v += n * am.entries.col(m);
    return v;
}

inline std::vector<int> to_key(const Eigen::VectorXi& v) {
    return std::vector<int>(v.data(), v.data() + v.size());
}

/// All complexes of order 1..max_order over M species (X, 2X, X+Y for
/// max_order 2).
inline std::vector<Complex> enumerate_complexes(int m_count, int max_order) {
    std::vector<Complex> out;
    for (int m = 0; m < m_count; ++m) out.push_back({{m, 1}});
    if (max_order >= 2) {
        for (int m = 0; m < m_count; ++m) out.push_back({{m, 2}});
        for (int m = 0; m < m_count; ++m)
            for (int n = m + 1; n < m_count; ++n) out.push_back({{m, 1}, {n, 1}});
    }
    return out;
}

}  // namespace detail

/// Every atom- and charge-balanced pair (a, b) of complexes with reactant
/// order 1..max_order, product order 0..max_order and a != b becomes one
/// elementary step. The empty product complex can only pair with a reactant
/// of empty atomic content, which cannot occur for real species.
inline std::vector<ElementaryStep> generate_steps(const AtomicMatrix& am, int max_order = 2,
                                                  StepGenerationReport* report = nullptr) {
    const int m_count = static_cast<int>(am.species_names.size());
    const auto complexes = detail::enumerate_complexes(m_count, max_order);

    std::map<std::vector<int>, std::vector<std::size_t>> by_content;
    for (std::size_t i = 0; i < complexes.size(); ++i)
        by_content[detail::to_key(detail::complex_content(am, complexes[i]))].push_back(i);

    std::vector<ElementaryStep> steps;
    for (std::size_t i = 0; i < complexes.size(); ++i) {
        const auto key = detail::to_key(detail::complex_content(am, complexes[i]));
        // Empty product complex: admissible only for zero content.
        if (std::all_of(key.begin(), key.end(), [](int x) { return x == 0; }))
            steps.push_back({complexes[i], {}});
        for (std::size_t j : by_content.at(key))
            if (j != i) steps.push_back({complexes[i], complexes[j]});
    }
    if (report) {
        report->reactant_complexes_examined = static_cast<long>(complexes.size());
        report->steps_generated = static_cast<long>(steps.size());
    }
    return steps;
}

/// Net stoichiometric change of a step over M species.
inline Eigen::VectorXi step_gamma(const ElementaryStep& s, int m_count) {
    Eigen::VectorXi g = Eigen::VectorXi::Zero(m_count);
    for (const auto& [m, n] : s.reactants) g[m] -= n;
    for (const auto& [m, n] : s.products) g[m] += n;
    return g;
}

struct VolpertFilterResult {
    std::vector<ElementaryStep> surviving_steps;
    std::vector<int> ungenerable_species;  // never indexed from the initial set
};

/// Volpert-index pruning: steps that never become reachable from the
/// initial species cannot take part in any decomposition.
inline VolpertFilterResult volpert_filter(const std::vector<ElementaryStep>& steps,
                                          const ReactionNetwork& species_context,
                                          const std::set<int>& initial) {
    ReactionNetwork net;
    net.species = species_context.species;
    for (const auto& s : steps) {
        ReactionStep step;
        for (const auto& [m, n] : s.reactants) step.reactants[m] = n;
        for (const auto& [m, n] : s.products) step.products[m] = n;
        step.rate_coefficient = 1.0;
        net.steps.push_back(step);
    }
    auto ix = volpert_index(net, initial);

    VolpertFilterResult out;
    for (std::size_t r = 0; r < steps.size(); ++r)
        if (ix.reaction_reachable(static_cast<int>(r))) out.surviving_steps.push_back(steps[r]);
    for (int m = 0; m < net.species_count(); ++m)
        if (!ix.species_reachable(m)) out.ungenerable_species.push_back(m);
    return out;
}

struct LpBounds {
    bool feasible = false;
    Rational min_total_steps;             // exact LP optimum of min sum x
    std::vector<Rational> per_step_min;   // exact optimum of min x_r, if requested
};

/// Exact LP preprocessing of Gamma_e x = gamma_overall, x >= 0.
inline LpBounds lp_bounds(const std::vector<ElementaryStep>& steps,
                          const Eigen::VectorXi& overall, bool per_step = false) {
    const std::size_t m = overall.size(), r = steps.size();
    RationalMatrix a(m, r);
    for (std::size_t j = 0; j < r; ++j) {
        Eigen::VectorXi g = step_gamma(steps[j], static_cast<int>(m));
        for (std::size_t i = 0; i < m; ++i) a(i, j) = g[static_cast<int>(i)];
    }
    std::vector<Rational> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = overall[static_cast<int>(i)];

    LpBounds out;
    auto total = lp_minimize(a, b, std::vector<Rational>(r, Rational(1)));
    if (total.status != LpStatus::Optimal) return out;  // infeasible (never unbounded: c >= 0)
    out.feasible = true;
    out.min_total_steps = total.objective;

    if (per_step) {
        out.per_step_min.resize(r);
        for (std::size_t j = 0; j < r; ++j) {
            std::vector<Rational> c(r, Rational(0));
            c[j] = 1;
            out.per_step_min[j] = lp_minimize(a, b, c).objective;
        }
    }
    return out;
}

inline long rational_ceil(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    BigInt f = num / den;
    if (f * den < num) f += 1;
    return static_cast<long>(f);
}

struct DecompositionSolution {
    std::vector<long> multiplicities;  // per step, length R
    long total_steps = 0;
};

struct DecompositionResult {
    std::vector<DecompositionSolution> solutions;
    bool complete = true;  // false when the node budget ran out
    long nodes_explored = 0;
};

/// All nonnegative-integer solutions of Gamma_e x = gamma_overall with
/// sum x <= max_total_steps. Depth-first branch and bound in step order;
/// every node is pruned by an exact rational LP on the remaining
/// subproblem, so the enumeration is complete.
inline DecompositionResult enumerate_decompositions(const std::vector<ElementaryStep>& steps,
                                                    const Eigen::VectorXi& overall,
                                                    long max_total_steps,
                                                    long node_budget = 50'000'000) {
    const int m = static_cast<int>(overall.size());
    const std::size_t r = steps.size();
    std::vector<Eigen::VectorXi> gammas(r);
    for (std::size_t j = 0; j < r; ++j) gammas[j] = step_gamma(steps[j], m);

    DecompositionResult result;
    std::vector<long> x(r, 0);

    // LP over the suffix j..r-1 with the current residual target.
    auto suffix_lp = [&](std::size_t j, const Eigen::VectorXi& residual) -> std::optional<Rational> {
        const std::size_t cols = r - j;
        RationalMatrix a(m, cols);
        for (std::size_t jj = 0; jj < cols; ++jj)
            for (int i = 0; i < m; ++i) a(i, jj) = gammas[j + jj][i];
        std::vector<Rational> b(m);
        for (int i = 0; i < m; ++i) b[static_cast<std::size_t>(i)] = residual[i];
        auto res = lp_minimize(a, b, std::vector<Rational>(cols, Rational(1)));
        if (res.status != LpStatus::Optimal) return std::nullopt;
        return res.objective;
    };

    std::function<void(std::size_t, Eigen::VectorXi, long)> dfs =
        [&](std::size_t j, Eigen::VectorXi residual, long budget) {
            if (!result.complete) return;
            if (++result.nodes_explored > node_budget) {
                result.complete = false;
                return;
            }
            if (j == r) {
                if (residual.isZero()) {
                    DecompositionSolution sol;
                    sol.multiplicities = x;
                    for (long v : x) sol.total_steps += v;
                    result.solutions.push_back(std::move(sol));
                }
                return;
            }
            auto bound = suffix_lp(j, residual);
            if (!bound || rational_ceil(*bound) > budget) return;
            for (long v = 0; v <= budget; ++v) {
                x[j] = v;
                dfs(j + 1, residual - static_cast<int>(v) * gammas[j], budget - v);
                if (!result.complete) break;
            }
            x[j] = 0;
        };

    if (max_total_steps >= 0) dfs(0, overall, max_total_steps);
    return result;
}

/// Parse a step-list file: network-format reaction lines without rate
/// coefficients, plus optional species/external/composition headers.
inline std::pair<ReactionNetwork, std::vector<ElementaryStep>> parse_step_list(
    const std::string& text) {
    ReactionNetwork net;
    std::vector<ElementaryStep> steps;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = rxn::detail::trim(raw);
        if (line.empty()) continue;
        if (line.rfind("species:", 0) == 0) {
            for (const auto& piece : rxn::detail::split(line.substr(8), ','))
                net.intern_species(rxn::detail::trim(piece));
            continue;
        }
        auto arrow = line.find("->");
        if (arrow != std::string::npos) {
            auto lterms = rxn::detail::parse_side(line.substr(0, arrow), line_no, 1);
            auto rterms =
                rxn::detail::parse_side(line.substr(arrow + 2), line_no, static_cast<int>(arrow) + 3);
            ElementaryStep s;
            for (const auto& t : lterms) s.reactants[net.intern_species(t.name)] += t.coefficient;
            for (const auto& t : rterms) s.products[net.intern_species(t.name)] += t.coefficient;
            steps.push_back(std::move(s));
            continue;
        }
        if (auto eq = line.find('='); eq != std::string::npos) {
            std::string name = rxn::detail::trim(line.substr(0, eq));
            int idx = net.intern_species(name);
            net.species[idx].composition = parse_formula(rxn::detail::trim(line.substr(eq + 1)), line_no);
            continue;
        }
        throw ParseError("unrecognized line in step list: '" + line + "'", line_no, 1);
    }
    return {net, steps};
}

inline std::string format_step(const ReactionNetwork& net, const ElementaryStep& s) {
    std::map<int, int> lhs(s.reactants.begin(), s.reactants.end());
    std::map<int, int> rhs(s.products.begin(), s.products.end());
    return rxn::detail::format_side(net, lhs) + " -> " + rxn::detail::format_side(net, rhs);
}

}  // namespace rxn
