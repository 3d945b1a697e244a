#include "rxn/builtins.hpp"
#include "rxn/volpert.hpp"

#include <catch2/catch_amalgamated.hpp>

namespace {

std::optional<int> sp_index(const rxn::VolpertIndexing& ix, const rxn::ReactionNetwork& net,
                            const std::string& name) {
    return ix.species_index[net.find_species(name)];
}

}  // namespace

TEST_CASE("Robertson graph shape") {
    auto net = rxn::builtin("Robertson").network;
    auto g = rxn::volpert_graph(net);
    // R1: A->R1, R1->B; R2: B=>R2 (mult 2), R2->B, R2->C; R3: B,C->R3->A,C
    CHECK(g.edges.size() == 9);
    CHECK(g.edge_units() == 10);
    int mult2 = 0;
    for (const auto& e : g.edges)
        if (e.multiplicity == 2) ++mult2;
    CHECK(mult2 == 1);
}

TEST_CASE("Robertson indexing from {A}") {
    auto net = rxn::builtin("Robertson").network;
    auto ix = rxn::volpert_index(net, rxn::species_set_by_name(net, {"A"}));
    CHECK(sp_index(ix, net, "A") == 0);
    CHECK(ix.reaction_index[0] == 1);
    CHECK(sp_index(ix, net, "B") == 1);
    CHECK(ix.reaction_index[1] == 2);
    CHECK(sp_index(ix, net, "C") == 2);
    CHECK(ix.reaction_index[2] == 3);
}

TEST_CASE("Robertson indexing from {C} reaches nothing else") {
    auto net = rxn::builtin("Robertson").network;
    auto ix = rxn::volpert_index(net, rxn::species_set_by_name(net, {"C"}));
    CHECK(sp_index(ix, net, "C") == 0);
    CHECK_FALSE(ix.species_reachable(net.find_species("A")));
    CHECK_FALSE(ix.species_reachable(net.find_species("B")));
    for (int r = 0; r < net.step_count(); ++r) CHECK_FALSE(ix.reaction_reachable(r));
}

TEST_CASE("zeroth-order steps are immediately reachable") {
    auto net = rxn::parse_network(
        "0 -> A, 1\n"
        "A -> B, 1\n");
    auto ix = rxn::volpert_index(net, {});
    CHECK(ix.reaction_index[0] == 1);
    CHECK(sp_index(ix, net, "A") == 1);
    CHECK(ix.reaction_index[1] == 2);
    CHECK(sp_index(ix, net, "B") == 2);
}

TEST_CASE("external species count as initially present") {
    auto net = rxn::builtin("Brusselator").network;
    auto ix = rxn::volpert_index(net, {});
    CHECK(sp_index(ix, net, "A") == 0);
    CHECK(sp_index(ix, net, "X") == 1);
    CHECK(sp_index(ix, net, "Y") == 2);
    for (int r = 0; r < net.step_count(); ++r) CHECK(ix.reaction_reachable(r));
}

TEST_CASE("growing the initial set never removes reachability or raises an index") {
    auto net = rxn::builtin("Robertson").network;
    auto from_a = rxn::volpert_index(net, rxn::species_set_by_name(net, {"A"}));
    auto from_ab = rxn::volpert_index(net, rxn::species_set_by_name(net, {"A", "B"}));
    for (int m = 0; m < net.species_count(); ++m) {
        if (!from_a.species_reachable(m)) continue;
        REQUIRE(from_ab.species_reachable(m));
        CHECK(*from_ab.species_index[m] <= *from_a.species_index[m]);
    }
    for (int r = 0; r < net.step_count(); ++r) {
        if (!from_a.reaction_reachable(r)) continue;
        REQUIRE(from_ab.reaction_reachable(r));
        CHECK(*from_ab.reaction_index[r] <= *from_a.reaction_index[r]);
    }
}

TEST_CASE("a reaction's index exceeds every reactant's index by exactly one") {
    auto net = rxn::builtin("Autocatalator").network;
    auto ix = rxn::volpert_index(net, {});
    for (int r = 0; r < net.step_count(); ++r) {
        if (!ix.reaction_reachable(r)) continue;
        int level = 0;
        for (const auto& [m, a] : net.steps[r].reactants)
            level = std::max(level, *ix.species_index[m]);
        CHECK(*ix.reaction_index[r] == level + 1);
    }
}

TEST_CASE("DOT export annotates indices and grays unreachable vertices") {
    auto net = rxn::builtin("Robertson").network;
    auto g = rxn::volpert_graph(net);
    auto ix = rxn::volpert_index(net, rxn::species_set_by_name(net, {"C"}));
    auto dot = rxn::export_dot(g, &ix);
    CHECK(dot.find("digraph volpert") != std::string::npos);
    CHECK(dot.find("\"C\" [shape=ellipse, label=\"C\\n(0)\"]") != std::string::npos);
    CHECK(dot.find("gray80") != std::string::npos);
    CHECK(dot.find("\"R1\"") != std::string::npos);
    CHECK(dot.find("label=\"2\"") != std::string::npos);  // 2B -> B + C multiplicity
    // balanced braces, closing newline
    CHECK(dot.back() == '\n');
    CHECK(std::count(dot.begin(), dot.end(), '{') == std::count(dot.begin(), dot.end(), '}'));
}

TEST_CASE("unknown initial species are rejected") {
    auto net = rxn::builtin("Robertson").network;
    CHECK_THROWS_AS(rxn::species_set_by_name(net, {"Zz"}), std::invalid_argument);
}
