#include "rxn/csv.hpp"
#include "rxn/parser.hpp"
#include "rxn/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

namespace {

rxn::Composition comp(std::initializer_list<std::pair<const std::string, int>> atoms,
                      int charge = 0) {
    rxn::Composition c;
    c.atoms = atoms;
    c.charge = charge;
    return c;
}

}  // namespace

TEST_CASE("plain formulas") {
    CHECK(rxn::parse_formula("H2O") == comp({{"H", 2}, {"O", 1}}));
    CHECK(rxn::parse_formula("CO2") == comp({{"C", 1}, {"O", 2}}));
    CHECK(rxn::parse_formula("H2C2O4") == comp({{"H", 2}, {"C", 2}, {"O", 4}}));
    CHECK(rxn::parse_formula("MnO2") == comp({{"Mn", 1}, {"O", 2}}));
}

TEST_CASE("charge markers") {
    CHECK(rxn::parse_formula("MnO4^-") == comp({{"Mn", 1}, {"O", 4}}, -1));
    CHECK(rxn::parse_formula("H^+") == comp({{"H", 1}}, 1));
    CHECK(rxn::parse_formula("Mn^2+") == comp({{"Mn", 1}}, 2));
    CHECK(rxn::parse_formula("C2O4^2-") == comp({{"C", 2}, {"O", 4}}, -2));
    // bare sign and digits+sign suffix forms
    CHECK(rxn::parse_formula("Cl-") == comp({{"Cl", 1}}, -1));
    CHECK(rxn::parse_formula("Mn2+") == comp({{"Mn", 1}}, 2));
    CHECK(rxn::parse_formula("CO2-") == comp({{"C", 1}, {"O", 2}}, -1));
}

TEST_CASE("parenthesized groups") {
    CHECK(rxn::parse_formula("Mn(C2O4)2") == comp({{"Mn", 1}, {"C", 4}, {"O", 8}}));
    CHECK(rxn::parse_formula("(CH3)3N") == comp({{"C", 3}, {"H", 9}, {"N", 1}}));
}

TEST_CASE("bracketed complexes sum their members") {
    CHECK(rxn::parse_formula("[MnO2,H2C2O4]") ==
          comp({{"Mn", 1}, {"O", 6}, {"H", 2}, {"C", 2}}));
    CHECK(rxn::parse_formula("[Mn(C2O4)2]^-") == comp({{"Mn", 1}, {"C", 4}, {"O", 8}}, -1));
    CHECK(rxn::parse_formula("[MnC2O4,MnO4^-,H^+]") ==
          comp({{"Mn", 2}, {"C", 2}, {"O", 8}, {"H", 1}}));
}

TEST_CASE("outer charge marker states the total charge of a complex") {
    // The members carry their own charges; the outer superscript is the
    // total charge of the complex and takes precedence over the member sum.
    auto c = rxn::parse_formula("[MnC2O4^2+,MnO3^-]^+");
    CHECK(c.atoms == comp({{"Mn", 2}, {"C", 2}, {"O", 7}}).atoms);
    CHECK(c.charge == 1);
    auto d = rxn::parse_formula("[MnC2O4^2+,MnO3^-,H^+]^2+");
    CHECK(d.charge == 2);
    // Without an outer marker the member charges add up.
    CHECK(rxn::parse_formula("[MnO4^-,H^+]").charge == 0);
}

TEST_CASE("the 19-species fixture parses with consistent charges") {
    auto [net, steps] = rxn::parse_step_list(
        rxn::read_file(std::string(RXNKIT_DATA_DIR) + "/permanganate.species"));
    REQUIRE(net.species_count() == 19);
    REQUIRE(steps.empty());
    for (const auto& sp : net.species) REQUIRE(sp.composition.has_value());

    auto charge_of = [&net](const std::string& name) {
        return net.species[net.find_species(name)].composition->charge;
    };
    CHECK(charge_of("H2C2O4") == 0);
    CHECK(charge_of("HC2O4m") == -1);
    CHECK(charge_of("Hp") == 1);
    CHECK(charge_of("C2O4_2m") == -2);
    CHECK(charge_of("Mn2p") == 2);
    CHECK(charge_of("MnO4m") == -1);
    CHECK(charge_of("Mn3p") == 3);
    CHECK(charge_of("CO2m") == -1);
    CHECK(charge_of("MnO2_H2C2O4") == 0);
    CHECK(charge_of("MnC2O4_p") == 1);
    CHECK(charge_of("MnC2O4_2_m") == -1);
    CHECK(charge_of("MnC2O4_MnO4m_Hp") == 0);
    CHECK(charge_of("MnC2O4_MnO3m_p") == 1);
    CHECK(charge_of("MnC2O4_MnO3m_Hp_2p") == 2);
    CHECK(charge_of("Hp_MnO2_H2C2O4_p") == 1);

    const auto& ox = *net.species[net.find_species("H2C2O4")].composition;
    CHECK(ox == comp({{"H", 2}, {"C", 2}, {"O", 4}}));
    const auto& dimer = *net.species[net.find_species("MnC2O4_MnO4m_Hp")].composition;
    CHECK(dimer == comp({{"Mn", 2}, {"C", 2}, {"O", 8}, {"H", 1}}));
}

TEST_CASE("formula errors carry line and column") {
    CHECK_THROWS_AS(rxn::parse_formula("Xx2"), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_formula("H2O)"), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_formula("(H2O"), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_formula("[H2O"), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_formula(""), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_formula("H2O!"), rxn::ParseError);
    try {
        rxn::parse_formula("H2Qx", 7);
        FAIL("expected ParseError");
    } catch (const rxn::ParseError& e) {
        CHECK(e.line == 7);
        CHECK(e.column > 1);
    }
}

TEST_CASE("network parsing: reactions, externals, annotations, comments") {
    auto net = rxn::parse_network(
        "# toy network\n"
        "species: A, B\n"
        "external: S\n"
        "A = H2O  # water\n"
        "S + A -> B, 0.5\n"
        "B -> A, 0.25\n"
        "0 -> A, 1e-3\n");
    REQUIRE(net.species_count() == 3);
    CHECK(net.species[0].name == "A");
    CHECK(net.species[1].name == "B");
    CHECK(net.species[2].name == "S");
    CHECK(net.species[2].external);
    CHECK(net.species[0].composition == comp({{"H", 2}, {"O", 1}}));
    REQUIRE(net.step_count() == 3);
    CHECK(net.steps[2].reactants.empty());
    CHECK(net.steps[0].rate_coefficient == 0.5);
}

TEST_CASE("reversible reactions expand to two steps, forward first") {
    auto net = rxn::parse_network("2 X <-> X, 0.33, 0.72\n");
    REQUIRE(net.step_count() == 2);
    const int x = net.find_species("X");
    CHECK(net.steps[0].reactants.at(x) == 2);
    CHECK(net.steps[0].products.at(x) == 1);
    CHECK(net.steps[0].rate_coefficient == 0.33);
    CHECK(net.steps[1].reactants.at(x) == 1);
    CHECK(net.steps[1].products.at(x) == 2);
    CHECK(net.steps[1].rate_coefficient == 0.72);
}

TEST_CASE("network parse errors") {
    CHECK_THROWS_AS(rxn::parse_network("A -> B\n"), rxn::ParseError);           // no rate
    CHECK_THROWS_AS(rxn::parse_network("A -> B, -1\n"), rxn::ParseError);       // negative
    CHECK_THROWS_AS(rxn::parse_network("A -> B, fast\n"), rxn::ParseError);     // nonnumeric
    CHECK_THROWS_AS(rxn::parse_network("A <-> B, 1\n"), rxn::ParseError);       // one rate
    CHECK_THROWS_AS(rxn::parse_network("A -> A, 1\n"), rxn::ParseError);        // no-op step
    CHECK_THROWS_AS(rxn::parse_network("0 X -> B, 1\n"), rxn::ParseError);      // zero coeff
    CHECK_THROWS_AS(rxn::parse_network("gibberish\n"), rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_network("external: A\nexternal: A\nA -> B, 1\n"),
                    rxn::ParseError);
    CHECK_THROWS_AS(rxn::parse_network(""), rxn::ParseError);
}

TEST_CASE("serialize then parse is the identity on fixed examples") {
    const char* sources[] = {
        "A -> B, 0.04\n2 B -> B + C, 3e7\nB + C -> A + C, 1e4\n",
        "external: A, P\nA -> X, 1.92\nX -> Y, 5.76\n2 X + Y -> 3 X, 5.6\nX -> P, 4.8\n",
        "2 X <-> X, 0.33, 0.72\n",
        "species: W, Q\nW = H2O\nQ = MnO4^-\nW + Q -> W, 1e-5\n0 -> W, 2\nW -> 0, 7\n",
    };
    for (const char* src : sources) {
        auto net = rxn::parse_network(src);
        auto text = rxn::serialize_network(net);
        auto back = rxn::parse_network(text);
        CHECK(back == net);
        CHECK(rxn::serialize_network(back) == text);
    }
}

TEST_CASE("round trip on randomized networks") {
    rxn::CounterRng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        rxn::ReactionNetwork net;
        std::uniform_int_distribution<int> n_species(2, 6), n_steps(1, 8), coeff(1, 3);
        const int m = n_species(rng), r = n_steps(rng);
        for (int i = 0; i < m; ++i) {
            rxn::Species sp;
            sp.name = "S" + std::to_string(i);
            if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) sp.external = true;
            net.species.push_back(sp);
        }
        std::uniform_real_distribution<double> rate(0.0, 100.0);
        for (int j = 0; j < r; ++j) {
            rxn::ReactionStep step;
            std::uniform_int_distribution<int> pick(0, m - 1);
            step.reactants[pick(rng)] += coeff(rng);
            if (std::uniform_int_distribution<int>(0, 1)(rng))
                step.reactants[pick(rng)] += coeff(rng);
            step.products[pick(rng)] += coeff(rng);
            if (step.reactants == step.products) continue;
            step.rate_coefficient = rate(rng);
            net.steps.push_back(step);
        }
        if (net.steps.empty()) continue;
        auto text = rxn::serialize_network(net);
        auto back = rxn::parse_network(text);
        REQUIRE(back == net);
        REQUIRE(rxn::serialize_network(back) == text);
    }
}

TEST_CASE("serialization keeps full double precision") {
    auto net = rxn::parse_network("A -> B, 0.1\n");
    net.steps[0].rate_coefficient = 0.1 + 1e-17;  // representable neighbor checks %.17g
    auto back = rxn::parse_network(rxn::serialize_network(net));
    CHECK(back.steps[0].rate_coefficient == net.steps[0].rate_coefficient);
}
