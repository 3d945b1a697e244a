#pragma once

#include "rxn/network.hpp"

#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace rxn {

/// Directed bipartite multigraph: species and reaction steps as vertices,
/// alpha(m,r) edges species -> reaction and beta(m,r) edges reaction -> species.
struct VolpertGraph {
    struct Edge {
        int species;
        int reaction;
        int multiplicity;
        bool species_to_reaction;
    };
    const ReactionNetwork* network = nullptr;
    std::vector<Edge> edges;

    long edge_units() const {
        long n = 0;
        for (const auto& e : edges) n += e.multiplicity;
        return n;
    }
};

inline VolpertGraph volpert_graph(const ReactionNetwork& net) {
    net.validate();
    VolpertGraph g;
    g.network = &net;
    for (int r = 0; r < net.step_count(); ++r) {
        for (const auto& [m, a] : net.steps[r].reactants)
            if (a > 0) g.edges.push_back({m, r, a, true});
        for (const auto& [m, b] : net.steps[r].products)
            if (b > 0) g.edges.push_back({m, r, b, false});
    }
    return g;
}

/// Reachability levels from an initial species set. Unreachable objects
/// carry no index (empty optional).
struct VolpertIndexing {
    std::vector<std::optional<int>> species_index;   // size M
    std::vector<std::optional<int>> reaction_index;  // size R

    bool species_reachable(int m) const { return species_index[m].has_value(); }
    bool reaction_reachable(int r) const { return reaction_index[r].has_value(); }
};

/// Worklist fixpoint of the Volpert indexing rules:
///   initial species get index 0;
///   a reaction's index is 1 + max over its reactants' indices (1 for
///   zeroth-order steps);
///   a species' index is the min over its producing reactions' indices.
/// External species count as initially present.
inline VolpertIndexing volpert_index(const ReactionNetwork& net, const std::set<int>& initial) {
    net.validate();
    for (int m : initial)
        if (m < 0 || m >= net.species_count())
            throw std::invalid_argument("initial species index out of range");

    VolpertIndexing ix;
    ix.species_index.assign(net.species_count(), std::nullopt);
    ix.reaction_index.assign(net.step_count(), std::nullopt);
    for (int m : initial) ix.species_index[m] = 0;
    for (int m = 0; m < net.species_count(); ++m)
        if (net.species[m].external) ix.species_index[m] = 0;

    // The fixpoint is unique, so plain round-robin relaxation suffices.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < net.step_count(); ++r) {
            int level = 0;
            bool all_reachable = true;
            for (const auto& [m, a] : net.steps[r].reactants) {
                if (a == 0) continue;
                if (!ix.species_index[m]) {
                    all_reachable = false;
                    break;
                }
                level = std::max(level, *ix.species_index[m]);
            }
            if (!all_reachable) continue;
            int candidate = level + 1;
            if (!ix.reaction_index[r] || *ix.reaction_index[r] > candidate) {
                ix.reaction_index[r] = candidate;
                changed = true;
            }
            for (const auto& [m, b] : net.steps[r].products) {
                if (b == 0) continue;
                if (!ix.species_index[m] || *ix.species_index[m] > candidate) {
                    ix.species_index[m] = candidate;
                    changed = true;
                }
            }
        }
    }
    return ix;
}

inline std::set<int> species_set_by_name(const ReactionNetwork& net,
                                         const std::vector<std::string>& names) {
    std::set<int> s;
    for (const auto& n : names) {
        int idx = net.find_species(n);
        if (idx < 0) throw std::invalid_argument("unknown species '" + n + "'");
        s.insert(idx);
    }
    return s;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

/// DOT rendering: species as ellipses, reaction steps as boxes, edge labels
/// give multiplicities > 1. When an indexing is supplied, unreachable
/// vertices are grayed and reachable ones annotated with their index.
inline std::string export_dot(const VolpertGraph& g,
                              const VolpertIndexing* indexing = nullptr) {
    const ReactionNetwork& net = *g.network;
    std::ostringstream out;
    out << "digraph volpert {\n";
    for (int m = 0; m < net.species_count(); ++m) {
        out << "  \"" << detail::dot_escape(net.species[m].name) << "\" [shape=ellipse";
        if (indexing) {
            if (indexing->species_reachable(m))
                out << ", label=\"" << detail::dot_escape(net.species[m].name) << "\\n("
                    << *indexing->species_index[m] << ")\"";
            else
                out << ", style=filled, fillcolor=gray80";
        }
        out << "];\n";
    }
    for (int r = 0; r < net.step_count(); ++r) {
        out << "  \"R" << (r + 1) << "\" [shape=box";
        if (indexing) {
            if (indexing->reaction_reachable(r))
                out << ", label=\"R" << (r + 1) << "\\n(" << *indexing->reaction_index[r] << ")\"";
            else
                out << ", style=filled, fillcolor=gray80";
        }
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        std::string sp = "\"" + detail::dot_escape(net.species[e.species].name) + "\"";
        std::string rx = "\"R" + std::to_string(e.reaction + 1) + "\"";
        out << "  " << (e.species_to_reaction ? sp : rx) << " -> "
            << (e.species_to_reaction ? rx : sp);
        if (e.multiplicity > 1) out << " [label=\"" << e.multiplicity << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

inline std::string export_dot(const ReactionNetwork& net) {
    auto g = volpert_graph(net);
    return export_dot(g);
}

}  // namespace rxn
