#pragma once

#include "rxn/kinetics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rxn {

enum class OdeMethod { Stiff, Explicit };

struct IntegratorConfig {
    OdeMethod method = OdeMethod::Stiff;
    double rtol = 1e-6;
    double atol = 1e-12;
    long max_steps = 10'000'000;
    std::optional<double> initial_step;
    std::vector<double> output_times;  // dense output grid; accepted steps if empty
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    long steps_accepted = 0;
    long steps_rejected = 0;
    OdeMethod method = OdeMethod::Stiff;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& msg, double t_reached)
        : std::runtime_error(msg + " (reached t = " + std::to_string(t_reached) + ")"),
          t_reached(t_reached) {}
    double t_reached;
};

using OdeRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using OdeJac = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

namespace detail {

// ROS3: 3-stage, order 3(2), L-stable linearly implicit Rosenbrock scheme
// (Sandu et al. 1997). One Jacobian evaluation and one LU factorization
// per step; exact for linear conserved quantities.
struct Ros3 {
    static constexpr double g = 0.43586652150845899941601945119356;
    static constexpr double a21 = 1.0, a31 = 1.0, a32 = 0.0;
    static constexpr double c21 = -1.0156171083877702091975600115545;
    static constexpr double c31 = 4.0759956452537699824805835358067;
    static constexpr double c32 = 9.2076794298330791242156818474003;
    static constexpr double b1 = 1.0;
    static constexpr double b2 = 6.1697947043828245592553615689730;
    static constexpr double b3 = -0.42772256543218573326238373806514;
    static constexpr double e1 = 0.5;
    static constexpr double e2 = -2.9079558716805469821718236208017;
    static constexpr double e3 = 0.22354069897811569627360909276199;
    static constexpr int order = 3;
};

}  // namespace detail

/// One linearly implicit Rosenbrock step of size h from state y.
/// Returns the advanced state and the embedded error estimate.
/// Throws if the shifted Jacobian I/(h*gamma) - J is singular.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> stiff_step(const Eigen::VectorXd& y, double h,
                                                              const OdeRhs& f, const OdeJac& jac) {
    using R = detail::Ros3;
    const Eigen::Index n = y.size();
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n) / (h * R::g) - jac(y);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
    // PartialPivLU has no rank query; detect singularity from the factors.
    if (!lu.matrixLU().diagonal().array().isFinite().all() ||
        (lu.matrixLU().diagonal().array() == 0.0).any())
        throw std::runtime_error("singular shifted Jacobian in Rosenbrock step");

    Eigen::VectorXd k1 = lu.solve(f(y));
    Eigen::VectorXd k2 = lu.solve(f(y + R::a21 * k1) + (R::c21 / h) * k1);
    Eigen::VectorXd k3 =
        lu.solve(f(y + R::a31 * k1 + R::a32 * k2) + (R::c31 / h) * k1 + (R::c32 / h) * k2);

    Eigen::VectorXd ynew = y + R::b1 * k1 + R::b2 * k2 + R::b3 * k3;
    Eigen::VectorXd yerr = R::e1 * k1 + R::e2 * k2 + R::e3 * k3;
    return {ynew, yerr};
}

/// One Dormand-Prince 5(4) step; same contract as stiff_step.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> explicit_step(const Eigen::VectorXd& y, double h,
                                                                 const OdeRhs& f) {
    Eigen::VectorXd k1 = f(y);
    Eigen::VectorXd k2 = f(y + h * (1.0 / 5) * k1);
    Eigen::VectorXd k3 = f(y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
    Eigen::VectorXd k4 = f(y + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
    Eigen::VectorXd k5 = f(y + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                                    (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
    Eigen::VectorXd k6 = f(y + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 +
                                    (46732.0 / 5247) * k3 + (49.0 / 176) * k4 -
                                    (5103.0 / 18656) * k5));
    Eigen::VectorXd ynew = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                                    (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
    Eigen::VectorXd k7 = f(ynew);
    Eigen::VectorXd y4 = y + h * ((5179.0 / 57600) * k1 + (7571.0 / 16695) * k3 +
                                  (393.0 / 640) * k4 - (92097.0 / 339200) * k5 +
                                  (187.0 / 2100) * k6 + (1.0 / 40) * k7);
    return {ynew, ynew - y4};
}

inline bool finite_states(const Trajectory& traj) {
    for (const auto& s : traj.states)
        if (!s.array().isFinite().all()) return false;
    return true;
}

/// Adaptive integration of y' = f(y) from t0 to t1.
inline Trajectory integrate(const OdeRhs& f, const OdeJac& jac, Eigen::VectorXd y, double t0,
                            double t1, const IntegratorConfig& config) {
    if (!(t1 > t0)) throw std::invalid_argument("t1 must exceed t0");
    if (!(config.rtol > 0) || !(config.atol > 0))
        throw std::invalid_argument("tolerances must be positive");

    Trajectory traj;
    traj.method = config.method;
    const bool dense = !config.output_times.empty();
    std::size_t next_out = 0;
    if (dense) {
        while (next_out < config.output_times.size() && config.output_times[next_out] <= t0) {
            traj.times.push_back(config.output_times[next_out]);
            traj.states.push_back(y);
            ++next_out;
        }
    } else {
        traj.times.push_back(t0);
        traj.states.push_back(y);
    }

    const int order = config.method == OdeMethod::Stiff ? detail::Ros3::order : 5;
    const double expo = 1.0 / order;
    double t = t0;
    double h = config.initial_step.value_or(std::min(1e-6 * (t1 - t0), 1e-3));
    h = std::min(h, t1 - t0);

    long steps = 0;
    while (t < t1) {
        if (++steps > config.max_steps)
            throw IntegrationError("step count exceeded", t);
        if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw IntegrationError("step size underflow", t);

        double h_try = std::min(h, t1 - t);
        bool clipped_to_output = false;
        if (dense && next_out < config.output_times.size() &&
            t + h_try > config.output_times[next_out]) {
            h_try = config.output_times[next_out] - t;
            clipped_to_output = true;
        }

        auto [ynew, yerr] = config.method == OdeMethod::Stiff ? stiff_step(y, h_try, f, jac)
                                                              : explicit_step(y, h_try, f);

        bool finite = ynew.array().isFinite().all();
        double err = std::numeric_limits<double>::infinity();
        if (finite) {
            double s = 0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                double sc = config.atol + config.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                s += (yerr[i] / sc) * (yerr[i] / sc);
            }
            err = std::sqrt(s / std::max<Eigen::Index>(y.size(), 1));
        }
        bool negative = finite && (ynew.array() < -100 * config.atol).any();

        if (finite && err <= 1.0 && !negative) {
            t += h_try;
            y = ynew;
            y = y.cwiseMax(-100 * config.atol);  // clamp tolerated round-off undershoot
            ++traj.steps_accepted;
            if (dense) {
                while (next_out < config.output_times.size() &&
                       config.output_times[next_out] <= t * (1 + 1e-14)) {
                    traj.times.push_back(config.output_times[next_out]);
                    traj.states.push_back(y);
                    ++next_out;
                }
            } else {
                traj.times.push_back(t);
                traj.states.push_back(y);
            }
            double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -expo), 0.2, 5.0);
            if (!clipped_to_output) h = h_try * factor;
            else h = std::max(h, h_try * factor);
        } else {
            ++traj.steps_rejected;
            double factor = finite && !negative
                                ? std::clamp(0.9 * std::pow(err, -expo), 0.1, 0.5)
                                : 0.5;
            h = h_try * factor;
        }
    }
    if (!finite_states(traj)) throw IntegrationError("non-finite state produced", t);
    return traj;
}

/// Integrate the mass-action kinetics of a network.
inline Trajectory simulate(const ReactionNetwork& net, const Eigen::VectorXd& k,
                           const Eigen::VectorXd& c0, double t0, double t1,
                           const IntegratorConfig& config = {}) {
    MassActionSystem sys(net, k);
    if (c0.size() != sys.dimension())
        throw std::invalid_argument("initial state length != internal species count");
    if ((c0.array() < 0).any())
        throw std::invalid_argument("negative initial concentration");
    return integrate([&sys](const Eigen::VectorXd& c) { return sys.rhs(c); },
                     [&sys](const Eigen::VectorXd& c) { return sys.jacobian(c); }, c0, t0, t1,
                     config);
}

/// Logarithmically spaced output grid, as used for the Robertson horizon.
inline std::vector<double> log_spaced(double t_min, double t_max, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n - 1));
    return out;
}

}  // namespace rxn
