#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rxn {

/// Atom counts plus signed charge (elementary-charge units) of one species.
struct Composition {
    std::map<std::string, int> atoms;
    int charge = 0;

    bool operator==(const Composition&) const = default;

    Composition& operator+=(const Composition& other) {
        for (const auto& [el, n] : other.atoms) atoms[el] += n;
        charge += other.charge;
        return *this;
    }
};

struct Species {
    std::string name;
    std::optional<Composition> composition;
    bool external = false;
    /// Fixed concentration (mol dm^-3) for external species; folded into
    /// effective rates, never part of the dynamic state.
    double fixed_concentration = 1.0;

    bool operator==(const Species&) const = default;
};

/// One irreversible reaction step. Stoichiometries are keyed by species
/// index into the owning network's species list.
struct ReactionStep {
    std::map<int, int> reactants;  // alpha(.,r), entries > 0 only
    std::map<int, int> products;   // beta(.,r), entries > 0 only
    double rate_coefficient = 0.0;

    bool operator==(const ReactionStep&) const = default;

    int reactant_order() const {
        int o = 0;
        for (const auto& [m, a] : reactants) o += a;
        return o;
    }
    int product_order() const {
        int o = 0;
        for (const auto& [m, b] : products) o += b;
        return o;
    }
};

struct Stoichiometry {
    Eigen::MatrixXi alpha, beta, gamma;  // M x R each, gamma = beta - alpha
};

class ReactionNetwork {
public:
    std::vector<Species> species;
    std::vector<ReactionStep> steps;

    bool operator==(const ReactionNetwork&) const = default;

    int species_count() const { return static_cast<int>(species.size()); }
    int step_count() const { return static_cast<int>(steps.size()); }

    int find_species(const std::string& name) const {
        for (int i = 0; i < species_count(); ++i)
            if (species[i].name == name) return i;
        return -1;
    }

    /// Index of species `name`, registering it on first sight.
    int intern_species(const std::string& name) {
        int idx = find_species(name);
        if (idx >= 0) return idx;
        if (name.empty()) throw std::invalid_argument("species name must be nonempty");
        species.push_back(Species{name});
        return species_count() - 1;
    }

    /// Indices of internal (dynamic) species, in species-list order.
    std::vector<int> internal_indices() const {
        std::vector<int> idx;
        for (int i = 0; i < species_count(); ++i)
            if (!species[i].external) idx.push_back(i);
        return idx;
    }

    int internal_count() const { return static_cast<int>(internal_indices().size()); }

    void validate() const {
        if (species.empty()) throw std::invalid_argument("network has no species");
        for (int i = 0; i < species_count(); ++i) {
            if (species[i].name.empty()) throw std::invalid_argument("empty species name");
            for (int j = i + 1; j < species_count(); ++j)
                if (species[i].name == species[j].name)
                    throw std::invalid_argument("duplicate species name: " + species[i].name);
        }
        for (const auto& step : steps) {
            for (const auto& [m, a] : step.reactants)
                if (m < 0 || m >= species_count() || a < 0)
                    throw std::invalid_argument("bad reactant stoichiometry");
            for (const auto& [m, b] : step.products)
                if (m < 0 || m >= species_count() || b < 0)
                    throw std::invalid_argument("bad product stoichiometry");
            if (step.reactants == step.products)
                throw std::invalid_argument("reaction step with identical sides");
            if (step.rate_coefficient < 0)
                throw std::invalid_argument("negative rate coefficient");
        }
    }
};

/// Molecularity matrices alpha, beta and the stoichiometric matrix
/// gamma = beta - alpha. Rows follow network.species, columns network.steps.
inline Stoichiometry stoichiometry(const ReactionNetwork& net) {
    const int m = net.species_count(), r = net.step_count();
    Stoichiometry s;
    s.alpha = Eigen::MatrixXi::Zero(m, r);
    s.beta = Eigen::MatrixXi::Zero(m, r);
    for (int j = 0; j < r; ++j) {
        for (const auto& [i, a] : net.steps[j].reactants) s.alpha(i, j) = a;
        for (const auto& [i, b] : net.steps[j].products) s.beta(i, j) = b;
    }
    s.gamma = s.beta - s.alpha;
    return s;
}

}  // namespace rxn
