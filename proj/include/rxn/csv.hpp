#pragma once

#include "rxn/estimate.hpp"
#include "rxn/ode.hpp"
#include "rxn/stochastic.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rxn {

namespace detail {

inline std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Header "t,<species...>", one row per output time, full double precision.
inline std::string trajectory_csv(const Trajectory& traj, const std::vector<std::string>& names) {
    std::string out = "t";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += detail::csv_double(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.states[i].size(); ++j)
            out += "," + detail::csv_double(traj.states[i][j]);
        out += "\n";
    }
    return out;
}

/// Event rows "t,<counts...>,fired"; fired is blank for non-event records.
inline std::string jump_csv(const JumpTrajectory& traj, const std::vector<std::string>& names) {
    std::string out = "t";
    for (const auto& n : names) out += "," + n;
    out += ",fired\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += detail::csv_double(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.counts[i].size(); ++j)
            out += "," + std::to_string(traj.counts[i][j]);
        out += ",";
        if (i >= 1 && i - 1 < traj.fired.size()) out += std::to_string(traj.fired[i - 1] + 1);
        out += "\n";
    }
    return out;
}

/// "t,mean_<s>...,var_<s>..." per output time.
inline std::string ensemble_csv(const EnsembleStats& stats, const std::vector<std::string>& names) {
    std::string out = "t";
    for (const auto& n : names) out += ",mean_" + n;
    for (const auto& n : names) out += ",var_" + n;
    out += "\n";
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        out += detail::csv_double(stats.times[i]);
        for (Eigen::Index j = 0; j < stats.mean.cols(); ++j)
            out += "," + detail::csv_double(stats.mean(static_cast<Eigen::Index>(i), j));
        for (Eigen::Index j = 0; j < stats.variance.cols(); ++j)
            out += "," + detail::csv_double(stats.variance(static_cast<Eigen::Index>(i), j));
        out += "\n";
    }
    return out;
}

inline std::string dataset_csv(const Dataset& ds) {
    std::string out = "t";
    for (const auto& n : ds.observed_species) out += "," + n;
    out += "\n";
    for (std::size_t i = 0; i < ds.times.size(); ++i) {
        out += detail::csv_double(ds.times[i]);
        for (Eigen::Index j = 0; j < ds.observations.cols(); ++j) {
            double v = ds.observations(static_cast<Eigen::Index>(i), j);
            out += ",";
            if (!std::isnan(v)) out += detail::csv_double(v);
        }
        out += "\n";
    }
    return out;
}

/// Parse "t,<species...>" CSV; blank cells become NaN (missing).
inline Dataset read_dataset_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset CSV");
    Dataset ds;
    {
        std::istringstream hdr(line);
        std::string cell;
        bool first = true;
        while (std::getline(hdr, cell, ',')) {
            if (first) {
                if (cell != "t") throw std::runtime_error("dataset CSV must start with a 't' column");
                first = false;
            } else
                ds.observed_species.push_back(cell);
        }
        if (ds.observed_species.empty())
            throw std::runtime_error("dataset CSV has no species columns");
    }
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ','))
            values.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : std::stod(cell));
        // Trailing blank cell is dropped by getline; pad to full width.
        while (values.size() < ds.observed_species.size() + 1)
            values.push_back(std::numeric_limits<double>::quiet_NaN());
        if (values.size() != ds.observed_species.size() + 1)
            throw std::runtime_error("dataset CSV row " + std::to_string(line_no) +
                                     " has the wrong number of cells");
        if (std::isnan(values[0]))
            throw std::runtime_error("dataset CSV row " + std::to_string(line_no) +
                                     " is missing its time");
        rows.push_back(std::move(values));
    }
    ds.times.resize(rows.size());
    ds.observations.resize(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(ds.observed_species.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.times[i] = rows[i][0];
        if (i > 0 && ds.times[i] <= ds.times[i - 1])
            throw std::runtime_error("dataset times must be strictly increasing");
        for (std::size_t j = 0; j < ds.observed_species.size(); ++j)
            ds.observations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j + 1];
    }
    return ds;
}

/// Atomic write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace rxn
