#pragma once

#include "rxn/parser.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rxn {

inline constexpr double kAvogadro = 6.02214076e23;  // mol^-1

struct BuiltinModel {
    ReactionNetwork network;
    Eigen::VectorXd k;   // deterministic rate coefficients
    Eigen::VectorXd c0;  // default initial concentrations (internal species)
    /// Defaults for the stochastic model, when the reference parameters
    /// are stated in molecule counts.
    std::optional<Eigen::VectorXd> x0;
    std::optional<double> volume;  // dm^3
};

inline std::vector<std::string> builtin_names() {
    return {"Robertson", "Brusselator", "Autocatalator", "TwoXRevX"};
}

/// Benchmark networks with their reference rate coefficients and initial
/// conditions.
inline BuiltinModel builtin(const std::string& name) {
    BuiltinModel m;
    if (name == "Robertson") {
        m.network = parse_network(
            "A -> B, 0.04\n"
            "2 B -> B + C, 3e7\n"
            "B + C -> A + C, 1e4\n");
        m.k = Eigen::Vector3d(0.04, 3e7, 1e4);
        m.c0 = Eigen::Vector3d(1.0, 0.0, 0.0);
    } else if (name == "Brusselator") {
        m.network = parse_network(
            "external: A, P\n"
            "A -> X, 1.92\n"
            "X -> Y, 5.76\n"
            "2 X + Y -> 3 X, 5.6\n"
            "X -> P, 4.8\n");
        m.k = Eigen::Vector4d(1.92, 5.76, 5.6, 4.8);
        m.volume = 1e-21;
        m.x0 = Eigen::Vector2d(500, 720);
        m.c0 = *m.x0 / (kAvogadro * *m.volume);
    } else if (name == "Autocatalator") {
        m.network = parse_network(
            "external: A, P\n"
            "A -> X, 110.2\n"
            "X -> Y, 0.094\n"
            "X + 2 Y -> 3 Y, 0.011\n"
            "Y -> P, 90.34\n");
        m.k = Eigen::Vector4d(110.2, 0.094, 0.011, 90.34);
        m.volume = 1e-21;
        m.x0 = Eigen::Vector2d(15, 80);
        m.c0 = *m.x0 / (kAvogadro * *m.volume);
    } else if (name == "TwoXRevX") {
        m.network = parse_network("2 X <-> X, 0.33, 0.72\n");
        m.k = Eigen::Vector2d(0.33, 0.72);
        m.c0 = Eigen::VectorXd::Constant(1, 2.0);
    } else {
        throw std::invalid_argument("unknown builtin network '" + name + "'");
    }
    return m;
}

}  // namespace rxn
