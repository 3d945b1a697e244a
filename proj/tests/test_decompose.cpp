#include "rxn/csv.hpp"
#include "rxn/decompose.hpp"
#include "rxn/rng.hpp"
#include "rxn/simplex.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

namespace {

const std::string kDataDir = RXNKIT_DATA_DIR;

std::pair<rxn::ReactionNetwork, std::vector<rxn::ElementaryStep>> load_hbr(bool blacklist) {
    auto [net, preset] = rxn::parse_step_list(rxn::read_file(kDataDir + "/hbr.species"));
    auto steps = rxn::generate_steps(rxn::atomic_matrix(net));
    if (blacklist) {
        auto [bl_net, banned_raw] = rxn::parse_step_list(rxn::read_file(kDataDir + "/hbr.blacklist"));
        std::vector<rxn::ElementaryStep> banned;
        for (const auto& s : banned_raw) {
            rxn::ElementaryStep t;
            for (const auto& [m, n] : s.reactants)
                t.reactants[net.find_species(bl_net.species[m].name)] = n;
            for (const auto& [m, n] : s.products)
                t.products[net.find_species(bl_net.species[m].name)] = n;
            banned.push_back(t);
        }
        std::erase_if(steps, [&](const rxn::ElementaryStep& s) {
            return std::find(banned.begin(), banned.end(), s) != banned.end();
        });
    }
    return {net, steps};
}

/// Plain bounded exhaustive search, the oracle for the branch-and-bound.
void brute_force(const std::vector<Eigen::VectorXi>& gammas, std::size_t j,
                 Eigen::VectorXi residual, long budget, std::vector<long>& x,
                 std::vector<std::vector<long>>& out) {
    if (j == gammas.size()) {
        if (residual.isZero()) out.push_back(x);
        return;
    }
    for (long v = 0; v <= budget; ++v) {
        x[j] = v;
        brute_force(gammas, j + 1, residual - static_cast<int>(v) * gammas[j], budget - v, x, out);
    }
    x[j] = 0;
}

std::vector<std::vector<long>> brute_force_all(const std::vector<rxn::ElementaryStep>& steps,
                                               const Eigen::VectorXi& overall, long budget) {
    std::vector<Eigen::VectorXi> gammas;
    for (const auto& s : steps) gammas.push_back(rxn::step_gamma(s, overall.size()));
    std::vector<long> x(steps.size(), 0);
    std::vector<std::vector<long>> out;
    brute_force(gammas, 0, overall, budget, x, out);
    return out;
}

Eigen::VectorXi overall_reaction(const rxn::ReactionNetwork& net,
                                 std::initializer_list<std::pair<const char*, int>> terms) {
    Eigen::VectorXi v = Eigen::VectorXi::Zero(net.species_count());
    for (const auto& [name, coeff] : terms) v[net.find_species(name)] += coeff;
    return v;
}

}  // namespace

TEST_CASE("exact simplex on hand-checked programs") {
    using rxn::Rational;
    // min x + y  s.t.  x + y = 1
    {
        rxn::RationalMatrix a(1, 2);
        a(0, 0) = 1;
        a(0, 1) = 1;
        auto res = rxn::lp_minimize(a, {Rational(1)}, {Rational(1), Rational(1)});
        REQUIRE(res.status == rxn::LpStatus::Optimal);
        CHECK(res.objective == 1);
    }
    // min 0  s.t.  3x = 1  ->  x = 1/3 exactly
    {
        rxn::RationalMatrix a(1, 1);
        a(0, 0) = 3;
        auto res = rxn::lp_minimize(a, {Rational(1)}, {Rational(0)});
        REQUIRE(res.status == rxn::LpStatus::Optimal);
        CHECK(res.x[0] == Rational(1, 3));
    }
    // infeasible: x = -1 with x >= 0
    {
        rxn::RationalMatrix a(1, 1);
        a(0, 0) = 1;
        auto res = rxn::lp_minimize(a, {Rational(-1)}, {Rational(1)});
        CHECK(res.status == rxn::LpStatus::Infeasible);
    }
    // unbounded: min -x  s.t.  x - y = 0
    {
        rxn::RationalMatrix a(1, 2);
        a(0, 0) = 1;
        a(0, 1) = -1;
        auto res = rxn::lp_minimize(a, {Rational(0)}, {Rational(-1), Rational(0)});
        CHECK(res.status == rxn::LpStatus::Unbounded);
    }
    // degenerate redundant rows
    {
        rxn::RationalMatrix a(2, 1);
        a(0, 0) = 2;
        a(1, 0) = 4;
        auto res = rxn::lp_minimize(a, {Rational(1), Rational(2)}, {Rational(5)});
        REQUIRE(res.status == rxn::LpStatus::Optimal);
        CHECK(res.x[0] == Rational(1, 2));
        CHECK(res.objective == Rational(5, 2));
    }
}

TEST_CASE("rational kernel and coprime scaling") {
    rxn::RationalMatrix a(1, 3);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(0, 2) = 1;
    CHECK(rxn::rational_kernel(a).size() == 2);

    auto w = rxn::to_coprime_integers({rxn::Rational(1, 2), rxn::Rational(1, 3)});
    CHECK(w == std::vector<rxn::BigInt>{rxn::BigInt(3), rxn::BigInt(2)});
    auto neg = rxn::to_coprime_integers({rxn::Rational(-2), rxn::Rational(4)});
    CHECK(neg == std::vector<rxn::BigInt>{rxn::BigInt(1), rxn::BigInt(-2)});
}

TEST_CASE("atomic matrix of the 19-species fixture") {
    auto [net, steps] = rxn::parse_step_list(rxn::read_file(kDataDir + "/permanganate.species"));
    auto am = rxn::atomic_matrix(net);
    REQUIRE(am.row_labels == std::vector<std::string>{"C", "H", "Mn", "O", "charge"});
    REQUIRE(am.entries.rows() == 5);
    REQUIRE(am.entries.cols() == 19);
    // spot checks: H2C2O4 and [MnC2O4^2+,MnO3^-,H^+]^2+
    int ox = net.find_species("H2C2O4");
    CHECK(am.entries.col(ox) == (Eigen::VectorXi(5) << 2, 2, 0, 4, 0).finished());
    int big = net.find_species("MnC2O4_MnO3m_Hp_2p");
    CHECK(am.entries.col(big) == (Eigen::VectorXi(5) << 2, 1, 2, 7, 2).finished());
}

TEST_CASE("209 reactant complexes for 19 species at order <= 2") {
    auto [net, ignored] = rxn::parse_step_list(rxn::read_file(kDataDir + "/permanganate.species"));
    rxn::StepGenerationReport report;
    rxn::generate_steps(rxn::atomic_matrix(net), 2, &report);
    CHECK(report.reactant_complexes_examined == 2 * 19 + 19 * 18 / 2);
    CHECK(report.steps_generated > 0);
}

TEST_CASE("H2/Br2 step generation") {
    auto [net, steps] = load_hbr(false);
    CHECK(steps.size() == 12);
    auto [net_bl, steps_bl] = load_hbr(true);
    CHECK(steps_bl.size() == 10);
    // every generated step balances atoms and charge
    auto am = rxn::atomic_matrix(net);
    for (const auto& s : steps) {
        Eigen::VectorXi g = rxn::step_gamma(s, net.species_count());
        CHECK((am.entries * g).isZero());
    }
    // steps are pairwise distinct and never no-ops
    for (std::size_t i = 0; i < steps.size(); ++i) {
        CHECK(steps[i].reactants != steps[i].products);
        for (std::size_t j = i + 1; j < steps.size(); ++j) CHECK(!(steps[i] == steps[j]));
    }
}

TEST_CASE("Volpert filter keeps only reachable steps") {
    auto [net, steps] = load_hbr(true);
    auto all = rxn::volpert_filter(steps, net, rxn::species_set_by_name(net, {"H2", "Br2"}));
    CHECK(all.surviving_steps.size() == steps.size());
    CHECK(all.ungenerable_species.empty());

    auto only_h2 = rxn::volpert_filter(steps, net, rxn::species_set_by_name(net, {"H2"}));
    // without a bromine source nothing containing Br can ever be produced
    CHECK(only_h2.surviving_steps.size() == 2);  // H2 <-> 2H
    CHECK(only_h2.ungenerable_species.size() == 3);
}

TEST_CASE("LP bound and enumeration on the H2/Br2 overall reaction") {
    auto [net, steps] = load_hbr(true);
    auto overall = overall_reaction(net, {{"H2", -1}, {"Br2", -1}, {"HBr", 2}});

    auto bounds = rxn::lp_bounds(steps, overall, true);
    REQUIRE(bounds.feasible);
    CHECK(bounds.min_total_steps == rxn::Rational(2));
    REQUIRE(bounds.per_step_min.size() == steps.size());
    for (const auto& q : bounds.per_step_min) CHECK(q >= 0);

    auto result = rxn::enumerate_decompositions(steps, overall, 4);
    REQUIRE(result.complete);
    auto oracle = brute_force_all(steps, overall, 4);
    REQUIRE(result.solutions.size() == oracle.size());
    std::vector<std::vector<long>> got;
    for (const auto& s : result.solutions) got.push_back(s.multiplicities);
    std::sort(got.begin(), got.end());
    std::sort(oracle.begin(), oracle.end());
    CHECK(got == oracle);

    // the two-step radical chain: H2 + Br -> HBr + H and Br2 + H -> HBr + Br
    rxn::ElementaryStep chain1{{{net.find_species("H2"), 1}, {net.find_species("Br"), 1}},
                               {{net.find_species("HBr"), 1}, {net.find_species("H"), 1}}};
    rxn::ElementaryStep chain2{{{net.find_species("Br2"), 1}, {net.find_species("H"), 1}},
                               {{net.find_species("HBr"), 1}, {net.find_species("Br"), 1}}};
    auto i1 = std::find(steps.begin(), steps.end(), chain1) - steps.begin();
    auto i2 = std::find(steps.begin(), steps.end(), chain2) - steps.begin();
    REQUIRE(i1 < static_cast<long>(steps.size()));
    REQUIRE(i2 < static_cast<long>(steps.size()));
    bool found_chain = false;
    for (const auto& s : result.solutions)
        if (s.total_steps == 2 && s.multiplicities[i1] == 1 && s.multiplicities[i2] == 1)
            found_chain = true;
    CHECK(found_chain);
    for (const auto& s : result.solutions) CHECK(s.total_steps >= 2);
}

TEST_CASE("infeasible overall reactions are reported as such") {
    auto [net, steps] = load_hbr(true);
    // H2 -> 2 HBr is not atom-balanced over these steps
    auto overall = overall_reaction(net, {{"H2", -1}, {"HBr", 2}});
    CHECK_FALSE(rxn::lp_bounds(steps, overall).feasible);
    auto result = rxn::enumerate_decompositions(steps, overall, 6);
    CHECK(result.complete);
    CHECK(result.solutions.empty());
}

TEST_CASE("branch-and-bound equals exhaustive search on randomized instances") {
    rxn::CounterRng rng(4242);
    std::uniform_int_distribution<int> atom(0, 3);
    for (int trial = 0; trial < 25; ++trial) {
        rxn::ReactionNetwork net;
        const int m = std::uniform_int_distribution<int>(3, 5)(rng);
        for (int i = 0; i < m; ++i) {
            rxn::Species sp;
            sp.name = "S" + std::to_string(i);
            rxn::Composition c;
            c.atoms["A"] = atom(rng);
            c.atoms["B"] = atom(rng);
            if (c.atoms["A"] + c.atoms["B"] == 0) c.atoms["A"] = 1;
            sp.composition = c;
            net.species.push_back(sp);
        }
        auto steps = rxn::generate_steps(rxn::atomic_matrix(net));
        if (steps.empty() || steps.size() > 14) continue;

        // target: net effect of a random small step combination
        Eigen::VectorXi overall = Eigen::VectorXi::Zero(m);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(steps.size()) - 1);
        for (int j = 0; j < 3; ++j)
            overall += rxn::step_gamma(steps[pick(rng)], m);

        const long budget = 5;
        auto result = rxn::enumerate_decompositions(steps, overall, budget);
        REQUIRE(result.complete);
        auto oracle = brute_force_all(steps, overall, budget);
        std::vector<std::vector<long>> got;
        for (const auto& s : result.solutions) got.push_back(s.multiplicities);
        std::sort(got.begin(), got.end());
        std::sort(oracle.begin(), oracle.end());
        REQUIRE(got == oracle);

        // LP lower bound is valid for every solution
        auto bounds = rxn::lp_bounds(steps, overall);
        for (const auto& s : result.solutions) {
            REQUIRE(bounds.feasible);
            CHECK(s.total_steps >= rxn::rational_ceil(bounds.min_total_steps));
        }
    }
}

TEST_CASE("node budget exhaustion is flagged") {
    auto [net, steps] = load_hbr(false);
    auto overall = overall_reaction(net, {{"H2", -1}, {"Br2", -1}, {"HBr", 2}});
    auto result = rxn::enumerate_decompositions(steps, overall, 6, /*node_budget=*/10);
    CHECK_FALSE(result.complete);
}

TEST_CASE("step formatting round-trips through the step-list parser") {
    auto [net, steps] = load_hbr(true);
    std::string text = "species:";
    for (int i = 0; i < net.species_count(); ++i)
        text += (i ? ", " : " ") + net.species[i].name;
    text += "\n";
    for (const auto& s : steps) text += rxn::format_step(net, s) + "\n";
    auto [net2, steps2] = rxn::parse_step_list(text);
    REQUIRE(steps2.size() == steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) CHECK(steps2[i] == steps[i]);
}
