#pragma once

#include "rxn/ode.hpp"
#include "rxn/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace rxn {

struct NoiseSpec {
    enum class Kind { None, Uniform, Gaussian };
    Kind kind = Kind::None;
    double lo = 0, hi = 0;  // uniform bounds
    double sigma = 0;       // gaussian

    static NoiseSpec none() { return {}; }
    static NoiseSpec uniform(double lo, double hi) {
        return {Kind::Uniform, lo, hi, 0};
    }
    static NoiseSpec gaussian(double sigma) { return {Kind::Gaussian, 0, 0, sigma}; }

    std::string describe() const {
        switch (kind) {
            case Kind::None: return "none";
            case Kind::Uniform:
                return "uniform(" + std::to_string(lo) + "," + std::to_string(hi) + ")";
            case Kind::Gaussian: return "gaussian(" + std::to_string(sigma) + ")";
        }
        return "?";
    }
};

/// Time series of (possibly noisy, possibly partial) observations.
/// Missing entries are NaN. initial_state pins the known initial condition
/// used when refitting the model.
struct Dataset {
    std::vector<double> times;
    Eigen::MatrixXd observations;  // rows = times, cols = observed species
    std::vector<std::string> observed_species;
    Eigen::VectorXd initial_state;  // internal species, model initial condition
    std::string noise_description = "none";
    std::uint64_t seed = 0;
};

/// Observations = deterministic solution at `times` plus i.i.d. noise.
inline Dataset synth_data(const ReactionNetwork& net, const Eigen::VectorXd& k_true,
                          const Eigen::VectorXd& c0, const std::vector<double>& times,
                          const NoiseSpec& noise, std::uint64_t seed) {
    IntegratorConfig config;
    config.rtol = 1e-10;
    config.atol = 1e-14;
    config.output_times = times;
    Trajectory traj = simulate(net, k_true, c0, std::min(0.0, times.front()),
                               times.back() + 1e-12, config);

    Dataset ds;
    ds.times = times;
    ds.initial_state = c0;
    ds.noise_description = noise.describe();
    ds.seed = seed;
    const auto internal = net.internal_indices();
    for (int idx : internal) ds.observed_species.push_back(net.species[idx].name);

    const int nt = static_cast<int>(times.size());
    const int n = static_cast<int>(internal.size());
    ds.observations.resize(nt, n);
    CounterRng rng(seed);
    std::uniform_real_distribution<double> uni(noise.lo, noise.hi);
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < n; ++j) {
            double v = traj.states[i][j];
            if (noise.kind == NoiseSpec::Kind::Uniform) v += uni(rng);
            if (noise.kind == NoiseSpec::Kind::Gaussian) v += gauss(rng);
            ds.observations(i, j) = v;
        }
    }
    return ds;
}

struct FitConfig {
    int max_iterations = 100;
    double lambda0 = 1e-3;
    double fd_step = 1e-6;       // relative, in log-parameter space
    double sse_rel_tol = 1e-10;
    double grad_tol = 1e-8;
    double sim_rtol = 1e-9;  // at least 10x tighter than the fit tolerances
    double sim_atol = 1e-14;
};

struct FitResult {
    Eigen::VectorXd k_hat;
    double sse = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    Eigen::VectorXd std_errors;  // finite-difference standard errors per parameter
};

namespace detail {

inline std::vector<int> observed_columns(const ReactionNetwork& net, const Dataset& ds) {
    const auto internal = net.internal_indices();
    std::vector<int> cols;
    for (const auto& name : ds.observed_species) {
        int idx = net.find_species(name);
        if (idx < 0 || net.species[idx].external)
            throw std::invalid_argument("dataset species '" + name +
                                        "' is not an internal species of the network");
        for (std::size_t j = 0; j < internal.size(); ++j)
            if (internal[j] == idx) cols.push_back(static_cast<int>(j));
    }
    return cols;
}

/// Residual vector (model - observation) over all non-missing entries.
/// Integrator failures surface as an infinite-residual sentinel.
inline bool fit_residuals(const ReactionNetwork& net, const Dataset& ds,
                          const std::vector<int>& cols, const Eigen::VectorXd& k,
                          const FitConfig& cfg, Eigen::VectorXd& out) {
    IntegratorConfig config;
    config.rtol = cfg.sim_rtol;
    config.atol = cfg.sim_atol;
    config.output_times = ds.times;
    Trajectory traj;
    try {
        traj = simulate(net, k, ds.initial_state, std::min(0.0, ds.times.front()),
                        ds.times.back() + 1e-12, config);
    } catch (const std::exception&) {
        return false;
    }
    std::vector<double> r;
    for (std::size_t i = 0; i < ds.times.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double obs = ds.observations(static_cast<int>(i), static_cast<int>(j));
            if (std::isnan(obs)) continue;  // missing observation
            r.push_back(traj.states[i][cols[j]] - obs);
        }
    out = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    return out.array().isFinite().all();
}

}  // namespace detail

/// Sum of squared residuals of the model at rate vector k.
inline double objective(const ReactionNetwork& net, const Dataset& ds, const Eigen::VectorXd& k,
                        const FitConfig& cfg = {}) {
    auto cols = detail::observed_columns(net, ds);
    Eigen::VectorXd r;
    if (!detail::fit_residuals(net, ds, cols, k, cfg, r))
        throw std::runtime_error("integrator failure in objective evaluation");
    return r.squaredNorm();
}

/// Levenberg-Marquardt over log k (box constraint k > 0 by construction),
/// Jacobian by forward finite differences, classic x10 damping schedule.
/// Accepted iterations never increase the SSE.
inline FitResult fit_rates(const ReactionNetwork& net, const Dataset& ds,
                           const Eigen::VectorXd& k_init, const FitConfig& cfg = {}) {
    if ((k_init.array() <= 0).any())
        throw std::invalid_argument("initial rate coefficients must be positive");
    const auto cols = detail::observed_columns(net, ds);
    const int p = static_cast<int>(k_init.size());

    Eigen::VectorXd u = k_init.array().log();
    Eigen::VectorXd r;
    if (!detail::fit_residuals(net, ds, cols, u.array().exp(), cfg, r))
        throw std::runtime_error("integrator failure at the initial parameters");
    double sse = r.squaredNorm();
    double lambda = cfg.lambda0;

    FitResult result;
    result.k_hat = u.array().exp();
    result.sse = sse;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        result.iterations = iter + 1;

        Eigen::MatrixXd jac(r.size(), p);
        bool jac_ok = true;
        for (int j = 0; j < p; ++j) {
            Eigen::VectorXd u_j = u;
            double h = cfg.fd_step * std::max(1.0, std::abs(u[j]));
            u_j[j] += h;
            Eigen::VectorXd r_j;
            if (!detail::fit_residuals(net, ds, cols, u_j.array().exp(), cfg, r_j) ||
                r_j.size() != r.size()) {
                jac_ok = false;
                break;
            }
            jac.col(j) = (r_j - r) / h;
        }
        if (!jac_ok) break;

        Eigen::VectorXd grad = jac.transpose() * r;
        if (grad.norm() < cfg.grad_tol) {
            result.converged = true;
            break;
        }

        Eigen::MatrixXd jtj = jac.transpose() * jac;
        bool accepted = false;
        for (int tries = 0; tries < 12 && !accepted; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < p; ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
            Eigen::VectorXd delta = damped.ldlt().solve(-grad);
            Eigen::VectorXd u_try = u + delta;
            Eigen::VectorXd r_try;
            if (detail::fit_residuals(net, ds, cols, u_try.array().exp(), cfg, r_try) &&
                r_try.squaredNorm() < sse) {
                double sse_try = r_try.squaredNorm();
                double rel_drop = (sse - sse_try) / std::max(sse, 1e-300);
                u = u_try;
                r = r_try;
                sse = sse_try;
                lambda = std::max(lambda / 10, 1e-12);
                accepted = true;
                result.k_hat = u.array().exp();
                result.sse = sse;
                if (rel_drop < cfg.sse_rel_tol) result.converged = true;
            } else {
                lambda *= 10;  // trial step rejected, never accepted uphill
            }
        }
        if (!accepted) {
            result.converged = true;  // no descent direction left at any damping
            break;
        }
        if (result.converged) break;
    }

    // Standard errors from the k-space Jacobian at the optimum.
    Eigen::VectorXd k = result.k_hat;
    Eigen::MatrixXd jac_k(r.size(), p);
    bool se_ok = true;
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd k_j = k;
        double h = cfg.fd_step * std::max(std::abs(k[j]), 1e-12);
        k_j[j] += h;
        Eigen::VectorXd r_j;
        if (!detail::fit_residuals(net, ds, cols, k_j, cfg, r_j) || r_j.size() != r.size()) {
            se_ok = false;
            break;
        }
        jac_k.col(j) = (r_j - r) / h;
    }
    result.std_errors = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    const Eigen::Index dof = r.size() - p;
    if (se_ok && dof > 0) {
        Eigen::MatrixXd cov = (jac_k.transpose() * jac_k)
                                  .ldlt()
                                  .solve(Eigen::MatrixXd::Identity(p, p)) *
                              (sse / static_cast<double>(dof));
        for (int j = 0; j < p; ++j)
            result.std_errors[j] = cov(j, j) > 0 ? std::sqrt(cov(j, j)) : 0.0;
    }
    return result;
}

}  // namespace rxn
