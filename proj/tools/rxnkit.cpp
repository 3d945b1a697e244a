// rxnkit command-line front end: deterministic and stochastic simulation,
// Volpert graphs, elementary-step generation, decomposition of overall
// reactions and rate-coefficient estimation.

#include "rxn/builtins.hpp"
#include "rxn/csv.hpp"
#include "rxn/decompose.hpp"
#include "rxn/estimate.hpp"
#include "rxn/ode.hpp"
#include "rxn/parser.hpp"
#include "rxn/stochastic.hpp"
#include "rxn/svg.hpp"
#include "rxn/volpert.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else
            cur += ch;
    }
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& piece : rxn::detail::split(text, ',')) {
        auto name = rxn::detail::trim(piece);
        if (!name.empty()) out.push_back(name);
    }
    return out;
}

struct LoadedModel {
    rxn::ReactionNetwork network;
    Eigen::VectorXd k;
    Eigen::VectorXd c0;
    std::optional<Eigen::VectorXd> x0;
    std::optional<double> volume;
};

/// Builtins resolve before file lookup; an explicit --file disambiguates.
LoadedModel load_model(const std::string& builtin_name, const std::string& file,
                       const std::string& k_flag, const std::string& c0_flag) {
    LoadedModel m;
    if (!builtin_name.empty()) {
        auto b = rxn::builtin(builtin_name);
        m.network = b.network;
        m.k = b.k;
        m.c0 = b.c0;
        m.x0 = b.x0;
        m.volume = b.volume;
    } else if (!file.empty()) {
        m.network = rxn::parse_network(rxn::read_file(file));
        m.k.resize(m.network.step_count());
        for (int r = 0; r < m.network.step_count(); ++r)
            m.k[r] = m.network.steps[r].rate_coefficient;
        m.c0 = Eigen::VectorXd::Zero(m.network.internal_count());
    } else {
        throw CLI::ValidationError("either a builtin name or --file is required");
    }
    if (!k_flag.empty()) {
        auto v = parse_number_list(k_flag);
        if (static_cast<int>(v.size()) != m.network.step_count())
            throw CLI::ValidationError("--k needs one value per reaction step");
        m.k = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (!c0_flag.empty()) {
        auto v = parse_number_list(c0_flag);
        if (static_cast<int>(v.size()) != m.network.internal_count())
            throw CLI::ValidationError("--c0 needs one value per internal species");
        m.c0 = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return m;
}

std::vector<std::string> internal_names(const rxn::ReactionNetwork& net) {
    std::vector<std::string> names;
    for (int i : net.internal_indices()) names.push_back(net.species[i].name);
    return names;
}

/// Expand "--config file.json" into ordinary long options inserted before
/// the command-line flags, so explicit flags override file values. Unknown
/// keys are rejected by the regular option parser.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::vector<std::string> from_config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ValidationError("--config needs a file argument");
            auto doc = nlohmann::json::parse(rxn::read_file(args[++i]));
            if (!doc.is_object()) throw CLI::ValidationError("config file must be a JSON object");
            for (const auto& [key, value] : doc.items()) {
                from_config.push_back("--" + key);
                if (value.is_boolean()) {
                    if (!value.get<bool>()) from_config.pop_back();
                } else if (value.is_string()) {
                    from_config.push_back(value.get<std::string>());
                } else {
                    from_config.push_back(value.dump());
                }
            }
        } else
            out.push_back(args[i]);
    }
    // config-derived options go right after the subcommand name
    if (!from_config.empty() && !out.empty())
        out.insert(out.begin() + 1, from_config.begin(), from_config.end());
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        rxn::write_file_atomic(path, content);
}

rxn::StochMethod method_from_name(const std::string& name) {
    if (name == "direct") return rxn::StochMethod::Direct;
    if (name == "explicit") return rxn::StochMethod::ExplicitLeap;
    if (name == "implicit") return rxn::StochMethod::ImplicitLeap;
    if (name == "trapezoidal") return rxn::StochMethod::TrapezoidalLeap;
    throw CLI::ValidationError("unknown method '" + name + "'");
}

int cmd_simulate(const LoadedModel& m, double t0, double t1, double rtol, double atol,
                 const std::string& method, bool logt, int points, const std::string& out,
                 const std::string& plot) {
    rxn::IntegratorConfig config;
    config.method = method == "explicit" ? rxn::OdeMethod::Explicit : rxn::OdeMethod::Stiff;
    config.rtol = rtol;
    config.atol = atol;
    if (logt) {
        double lo = t0 > 0 ? t0 : std::min(1e-6, t1 * 1e-12);
        config.output_times = rxn::log_spaced(lo, t1, points);
    } else if (points > 0 && !logt) {
        config.output_times.resize(points);
        for (int i = 0; i < points; ++i)
            config.output_times[i] = t0 + (t1 - t0) * i / std::max(points - 1, 1);
    }
    auto traj = rxn::simulate(m.network, m.k, m.c0, t0, t1, config);
    auto names = internal_names(m.network);
    write_output(out, rxn::trajectory_csv(traj, names));
    if (!plot.empty()) {
        std::vector<rxn::PlotSeries> series(names.size());
        for (std::size_t j = 0; j < names.size(); ++j) {
            series[j].label = names[j];
            series[j].x = traj.times;
            for (const auto& s : traj.states) series[j].y.push_back(s[static_cast<int>(j)]);
        }
        rxn::PlotOptions po;
        po.log_x = logt;
        po.y_label = "concentration";
        rxn::write_file_atomic(plot, rxn::svg_line_plot(series, po));
    }
    std::cerr << "accepted " << traj.steps_accepted << " steps, rejected " << traj.steps_rejected
              << "\n";
    return 0;
}

int cmd_stochastic(const LoadedModel& m, const std::string& method_name, const std::string& x0_flag,
                   double volume, double t_end, std::uint64_t seed, int runs, double epsilon,
                   bool rates_are_stochastic, int grid_points, const std::string& out,
                   const std::string& plot) {
    rxn::StochasticRates rates;
    if (rates_are_stochastic) {
        rates.c = m.k;
        rates.volume = volume;
    } else {
        rates = rxn::convert_rates(m.network, m.k, volume);
    }
    rxn::StochasticSystem sys(m.network, rates);

    rxn::CountVector x0;
    if (!x0_flag.empty()) {
        auto v = parse_number_list(x0_flag);
        if (static_cast<int>(v.size()) != sys.dimension())
            throw CLI::ValidationError("--x0 needs one count per internal species");
        x0.resize(sys.dimension());
        for (int i = 0; i < sys.dimension(); ++i) x0[i] = static_cast<long>(std::llround(v[i]));
    } else if (m.x0) {
        x0 = m.x0->cast<long>();
    } else {
        throw CLI::ValidationError("--x0 is required for this network");
    }

    rxn::LeapConfig cfg;
    cfg.epsilon = epsilon;
    auto method = method_from_name(method_name);
    auto names = internal_names(m.network);

    if (runs <= 1) {
        auto traj = rxn::run_method(sys, method, x0, t_end, cfg, rxn::CounterRng(seed));
        write_output(out, rxn::jump_csv(traj, names));
        if (!plot.empty()) {
            std::vector<rxn::PlotSeries> series(names.size());
            for (std::size_t j = 0; j < names.size(); ++j) {
                series[j].label = names[j];
                series[j].x = traj.times;
                for (const auto& s : traj.counts)
                    series[j].y.push_back(static_cast<double>(s[static_cast<int>(j)]));
            }
            rxn::PlotOptions po;
            po.y_label = "molecule count";
            rxn::write_file_atomic(plot, rxn::svg_line_plot(series, po));
        }
    } else {
        std::vector<double> grid(grid_points);
        for (int i = 0; i < grid_points; ++i)
            grid[i] = t_end * (i + 1) / static_cast<double>(grid_points);
        auto stats = rxn::ensemble(sys, method, x0, grid, runs, seed, cfg);
        write_output(out, rxn::ensemble_csv(stats, names));
    }
    return 0;
}

int cmd_volpert(const rxn::ReactionNetwork& net, const std::string& initial_flag,
                const std::string& dot_out) {
    auto initial = rxn::species_set_by_name(net, parse_name_list(initial_flag));
    auto ix = rxn::volpert_index(net, initial);
    for (int s = 0; s < net.species_count(); ++s)
        std::cout << net.species[s].name << ": "
                  << (ix.species_reachable(s) ? std::to_string(*ix.species_index[s])
                                              : std::string("unreachable"))
                  << "\n";
    for (int r = 0; r < net.step_count(); ++r)
        std::cout << "R" << (r + 1) << ": "
                  << (ix.reaction_reachable(r) ? std::to_string(*ix.reaction_index[r])
                                               : std::string("unreachable"))
                  << "\n";
    if (!dot_out.empty()) {
        auto g = rxn::volpert_graph(net);
        rxn::write_file_atomic(dot_out, rxn::export_dot(g, &ix));
    }
    return 0;
}

int cmd_steps(const std::string& species_file, int max_order, const std::string& out) {
    auto [net, ignored] = rxn::parse_step_list(rxn::read_file(species_file));
    auto am = rxn::atomic_matrix(net);
    rxn::StepGenerationReport report;
    auto steps = rxn::generate_steps(am, max_order, &report);
    std::cerr << "examined " << report.reactant_complexes_examined << " reactant complexes, "
              << "generated " << report.steps_generated << " elementary steps\n";
    std::string text = "species:";
    for (int i = 0; i < net.species_count(); ++i) text += (i ? ", " : " ") + net.species[i].name;
    text += "\n";
    for (const auto& s : steps) text += rxn::format_step(net, s) + "\n";
    write_output(out, text);
    return 0;
}

int cmd_decompose(const std::string& species_file, const std::string& overall_text,
                  long max_total, const std::string& initial_flag, const std::string& blacklist,
                  const std::string& out) {
    auto [net, preset_steps] = rxn::parse_step_list(rxn::read_file(species_file));
    std::vector<rxn::ElementaryStep> steps = preset_steps;
    if (steps.empty()) {
        auto am = rxn::atomic_matrix(net);
        steps = rxn::generate_steps(am);
    }
    if (!blacklist.empty()) {
        auto [bl_net, raw] = rxn::parse_step_list(rxn::read_file(blacklist));
        std::vector<rxn::ElementaryStep> banned;
        for (const auto& s : raw) {  // remap blacklist species indices
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

    auto arrow = overall_text.find("->");
    if (arrow == std::string::npos)
        throw CLI::ValidationError("--overall must contain '->'");
    auto lterms = rxn::detail::parse_side(overall_text.substr(0, arrow), 1, 1);
    auto rterms = rxn::detail::parse_side(overall_text.substr(arrow + 2), 1, 1);
    Eigen::VectorXi overall = Eigen::VectorXi::Zero(net.species_count());
    for (const auto& t : lterms) {
        int idx = net.find_species(t.name);
        if (idx < 0) throw CLI::ValidationError("unknown species '" + t.name + "' in --overall");
        overall[idx] -= t.coefficient;
    }
    for (const auto& t : rterms) {
        int idx = net.find_species(t.name);
        if (idx < 0) throw CLI::ValidationError("unknown species '" + t.name + "' in --overall");
        overall[idx] += t.coefficient;
    }

    if (!initial_flag.empty()) {
        auto initial = rxn::species_set_by_name(net, parse_name_list(initial_flag));
        auto filtered = rxn::volpert_filter(steps, net, initial);
        std::cerr << "volpert filter: " << filtered.surviving_steps.size() << " of "
                  << steps.size() << " steps survive, " << filtered.ungenerable_species.size()
                  << " species ungenerable\n";
        steps = filtered.surviving_steps;
    }

    auto bounds = rxn::lp_bounds(steps, overall);
    if (!bounds.feasible) {
        std::cerr << "infeasible: the overall reaction has no decomposition over these steps\n";
        return kExitComputation;
    }
    std::ostringstream report;
    report << "# LP lower bound on total steps: " << bounds.min_total_steps << " (ceil "
           << rxn::rational_ceil(bounds.min_total_steps) << ")\n";

    auto result = rxn::enumerate_decompositions(steps, overall, max_total);
    report << "# decompositions with total <= " << max_total << ": " << result.solutions.size()
           << (result.complete ? "" : " (search budget exceeded, list incomplete)") << "\n";
    for (const auto& sol : result.solutions) {
        report << "\n# total " << sol.total_steps << "\n";
        std::string machine;
        for (std::size_t r = 0; r < steps.size(); ++r) {
            if (sol.multiplicities[r] > 0)
                report << sol.multiplicities[r] << " x " << rxn::format_step(net, steps[r]) << "\n";
            machine += (r ? "," : "") + std::to_string(sol.multiplicities[r]);
        }
        report << machine << "\n";
    }
    write_output(out, report.str());
    return 0;
}

int cmd_fit(const std::string& network_file, const std::string& builtin_name,
            const std::string& data_file, const std::string& k0_flag, const std::string& c0_flag,
            const std::string& out) {
    auto m = load_model(builtin_name, network_file, "", c0_flag);
    auto ds = rxn::read_dataset_csv(rxn::read_file(data_file));
    ds.initial_state = m.c0;

    Eigen::VectorXd k_init = m.k;
    if (!k0_flag.empty()) {
        auto v = parse_number_list(k0_flag);
        if (static_cast<int>(v.size()) != m.network.step_count())
            throw CLI::ValidationError("--k0 needs one value per reaction step");
        k_init = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    auto fit = rxn::fit_rates(m.network, ds, k_init);
    nlohmann::json doc;
    doc["k_hat"] = std::vector<double>(fit.k_hat.data(), fit.k_hat.data() + fit.k_hat.size());
    doc["sse"] = fit.sse;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    doc["std_errors"] =
        std::vector<double>(fit.std_errors.data(), fit.std_errors.data() + fit.std_errors.size());
    write_output(out, doc.dump(2) + "\n");
    return fit.converged ? 0 : kExitComputation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rxnkit - reaction kinetics toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string builtin_name, file, k_flag, c0_flag, out = "-", plot, method = "stiff";
    double t0 = 0, t1 = 1, rtol = 1e-6, atol = 1e-12;
    bool logt = false;
    int points = 0;
    auto* sim = app.add_subcommand("simulate", "integrate the kinetic ODE");
    sim->add_option("builtin", builtin_name, "builtin network name");
    sim->add_option("--file", file, "network file");
    sim->add_option("--builtin", builtin_name, "builtin network name");
    sim->add_option("--k", k_flag, "rate coefficients (comma list)");
    sim->add_option("--c0", c0_flag, "initial concentrations (comma list)");
    sim->add_option("--t0", t0);
    sim->add_option("--t1", t1);
    sim->add_option("--rtol", rtol);
    sim->add_option("--atol", atol);
    sim->add_option("--method", method)->check(CLI::IsMember({"stiff", "explicit"}));
    sim->add_flag("--logt", logt, "logarithmic time grid (and log-x plot)");
    sim->add_option("--points", points, "number of dense output points");
    sim->add_option("--out", out, "trajectory CSV ('-' for stdout)");
    sim->add_option("--plot", plot, "SVG plot file");

    std::string s_method = "direct", x0_flag;
    double volume = 1e-21, t_end = 10, epsilon = 0.03;
    std::uint64_t seed = 0;
    int runs = 1, grid_points = 200;
    bool rates_are_stochastic = false;
    auto add_stoch_options = [&](CLI::App* cmd, const std::string& default_method) {
        cmd->add_option("builtin", builtin_name);
        cmd->add_option("--file", file);
        cmd->add_option("--builtin", builtin_name);
        cmd->add_option("--k", k_flag);
        cmd->add_option("--method", s_method)
            ->default_val(default_method)
            ->check(CLI::IsMember({"direct", "explicit", "implicit", "trapezoidal"}));
        cmd->add_option("--x0", x0_flag, "initial molecule counts (comma list)");
        cmd->add_option("--volume", volume, "reaction volume in dm^3");
        cmd->add_option("--T", t_end, "simulation end time");
        cmd->add_option("--seed", seed);
        cmd->add_option("--runs", runs, "ensemble size (1 = single trajectory)");
        cmd->add_option("--epsilon", epsilon, "leap-condition tolerance");
        cmd->add_option("--grid", grid_points, "ensemble output grid size");
        cmd->add_flag("--rates-are-stochastic", rates_are_stochastic,
                      "treat --k as stochastic rate constants (skip unit conversion)");
        cmd->add_option("--out", out);
        cmd->add_option("--plot", plot, "SVG plot file (single run)");
    };
    auto* ssa = app.add_subcommand("ssa", "stochastic simulation (direct method by default)");
    add_stoch_options(ssa, "direct");
    auto* leap = app.add_subcommand("leap", "tau-leaping simulation");
    add_stoch_options(leap, "explicit");

    std::string initial_flag, dot_out;
    auto* volpert = app.add_subcommand("volpert", "Volpert graph and indexing");
    volpert->add_option("builtin", builtin_name);
    volpert->add_option("--file", file);
    volpert->add_option("--builtin", builtin_name);
    volpert->add_option("--initial", initial_flag, "initially present species (comma list)");
    volpert->add_option("--dot", dot_out, "DOT output file");

    std::string species_file, overall_text, blacklist;
    long max_total = 4;
    int max_order = 2;
    auto* steps_cmd = app.add_subcommand("steps", "generate combinatorially feasible steps");
    steps_cmd->add_option("species", species_file, "species/composition fixture file")->required();
    steps_cmd->add_option("--max-order", max_order);
    steps_cmd->add_option("--out", out);

    auto* dec = app.add_subcommand("decompose", "decompose an overall reaction");
    dec->add_option("species", species_file, "species/composition or step-list file")->required();
    dec->add_option("--overall", overall_text, "overall reaction, e.g. 'H2 + Br2 -> 2 HBr'")
        ->required();
    dec->add_option("--max-steps", max_total, "cardinality budget");
    dec->add_option("--initial", initial_flag, "initial species for the Volpert filter");
    dec->add_option("--blacklist", blacklist, "file of chemically rejected steps");
    dec->add_option("--out", out);

    std::string data_file, k0_flag;
    auto* fit = app.add_subcommand("fit", "estimate rate coefficients from data");
    fit->add_option("builtin", builtin_name);
    fit->add_option("--file", file);
    fit->add_option("--builtin", builtin_name);
    fit->add_option("--data", data_file, "dataset CSV")->required();
    fit->add_option("--k0", k0_flag, "initial rate guesses (comma list)");
    fit->add_option("--c0", c0_flag, "initial concentrations");
    fit->add_option("--out", out, "fit report JSON");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = apply_config_file(args);
        std::vector<const char*> cargs = {argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(load_model(builtin_name, file, k_flag, c0_flag), t0, t1, rtol,
                                atol, method, logt, points, out, plot);
        if (ssa->parsed() || leap->parsed())
            return cmd_stochastic(load_model(builtin_name, file, k_flag, c0_flag), s_method,
                                  x0_flag, volume, t_end, seed, runs, epsilon,
                                  rates_are_stochastic, grid_points, out, plot);
        if (volpert->parsed())
            return cmd_volpert(load_model(builtin_name, file, "", "").network, initial_flag,
                               dot_out);
        if (steps_cmd->parsed()) return cmd_steps(species_file, max_order, out);
        if (dec->parsed())
            return cmd_decompose(species_file, overall_text, max_total, initial_flag, blacklist,
                                 out);
        if (fit->parsed()) return cmd_fit(file, builtin_name, data_file, k0_flag, c0_flag, out);
    } catch (const rxn::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitUsage;
}
