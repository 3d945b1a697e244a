#pragma once

#include "rxn/network.hpp"
#include "rxn/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rxn {

/// Compiled mass-action system over the internal species of a network.
/// External species are folded into the effective rate of each step that
/// consumes them and dropped from the state. 0^0 := 1 in the monomials.
class MassActionSystem {
public:
    MassActionSystem(const ReactionNetwork& net, const Eigen::VectorXd& k) {
        net.validate();
        if (k.size() != net.step_count())
            throw std::invalid_argument("rate vector length != step count");
        for (int r = 0; r < k.size(); ++r)
            if (!(k[r] >= 0)) throw std::invalid_argument("negative rate coefficient");

        const auto internal = net.internal_indices();
        n_ = static_cast<int>(internal.size());
        std::vector<int> local(net.species_count(), -1);
        for (int i = 0; i < n_; ++i) local[internal[i]] = i;

        for (int r = 0; r < net.step_count(); ++r) {
            const auto& step = net.steps[r];
            Term t;
            t.k_eff = k[r];
            for (const auto& [m, a] : step.reactants) {
                if (a == 0) continue;
                if (net.species[m].external)
                    t.k_eff *= std::pow(net.species[m].fixed_concentration, a);
                else
                    t.exponents.push_back({local[m], a});
            }
            std::map<int, int> change;
            for (const auto& [m, a] : step.reactants)
                if (!net.species[m].external) change[local[m]] -= a;
            for (const auto& [m, b] : step.products)
                if (!net.species[m].external) change[local[m]] += b;
            for (const auto& [i, g] : change)
                if (g != 0) t.gamma.push_back({i, g});
            terms_.push_back(std::move(t));
        }
    }

    int dimension() const { return n_; }

    /// gamma . (k (.) c^alpha)
    Eigen::VectorXd rhs(const Eigen::VectorXd& c) const {
        check_dim(c);
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(n_);
        for (const auto& t : terms_) {
            double rate = t.k_eff;
            for (const auto& [i, a] : t.exponents) rate *= ipow(c[i], a);
            for (const auto& [i, g] : t.gamma) dc[i] += g * rate;
        }
        return dc;
    }

    /// Analytic Jacobian d(rhs)/dc from the monomial exponents.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& c) const {
        check_dim(c);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_, n_);
        for (const auto& t : terms_) {
            for (const auto& [j, aj] : t.exponents) {
                // d(rate)/dc_j = k * a_j * c_j^(a_j-1) * prod_{m != j} c_m^a_m
                double d = t.k_eff * aj * ipow(c[j], aj - 1);
                for (const auto& [m, am] : t.exponents)
                    if (m != j) d *= ipow(c[m], am);
                for (const auto& [i, g] : t.gamma) jac(i, j) += g * d;
            }
        }
        return jac;
    }

private:
    struct Term {
        double k_eff;
        std::vector<std::pair<int, int>> exponents;  // (internal index, alpha)
        std::vector<std::pair<int, int>> gamma;      // (internal index, net change)
    };

    static double ipow(double x, int e) {
        if (e <= 0) return 1.0;  // 0^0 = 1
        double p = 1.0;
        for (int i = 0; i < e; ++i) p *= x;
        return p;
    }

    void check_dim(const Eigen::VectorXd& c) const {
        if (c.size() != n_) throw std::invalid_argument("state vector length mismatch");
    }

    int n_ = 0;
    std::vector<Term> terms_;
};

inline Eigen::VectorXd mass_action_rhs(const ReactionNetwork& net, const Eigen::VectorXd& k,
                                       const Eigen::VectorXd& c) {
    return MassActionSystem(net, k).rhs(c);
}

inline Eigen::MatrixXd mass_action_jacobian(const ReactionNetwork& net, const Eigen::VectorXd& k,
                                            const Eigen::VectorXd& c) {
    return MassActionSystem(net, k).jacobian(c);
}

/// Basis of the left null space of gamma restricted to internal species,
/// i.e. the linear first integrals of the kinetic ODE. Computed over exact
/// rationals and scaled to coprime integer vectors.
inline std::vector<std::vector<long long>> conserved_quantities(const ReactionNetwork& net) {
    net.validate();
    const auto s = stoichiometry(net);
    const auto internal = net.internal_indices();
    const int n = static_cast<int>(internal.size());
    const int r = net.step_count();

    // Left kernel of gamma = kernel of gamma^T.
    RationalMatrix gt(r, n);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < n; ++i) gt(j, i) = s.gamma(internal[i], j);

    std::vector<std::vector<long long>> out;
    for (const auto& v : rational_kernel(gt)) {
        const auto w = to_coprime_integers(v);
        std::vector<long long> row(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) row[i] = static_cast<long long>(w[i]);
        out.push_back(std::move(row));
    }
    return out;
}

/// k(T) = k0 T^n exp(-A / (R T))
inline double arrhenius(double k0, double n, double activation, double temperature,
                        double gas_constant = 8.31446261815324) {
    if (!(temperature > 0)) throw std::domain_error("temperature must be positive");
    if (k0 < 0) throw std::domain_error("pre-exponential factor must be nonnegative");
    return k0 * std::pow(temperature, n) * std::exp(-activation / (gas_constant * temperature));
}

}  // namespace rxn
