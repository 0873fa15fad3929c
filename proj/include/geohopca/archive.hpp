#pragma once

// On-disk decomposition archive:
//   core.npy, factor_1.npy .. factor_N.npy   float64, fortran order
//   supports.json                            per-mode sorted 1-based column indices
//   meta.json                                config, per-mode outcomes, bound

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "geohopca/npy.hpp"
#include "geohopca/shopca.hpp"

namespace geohopca::archive {

inline nlohmann::json config_json(const ShopcaConfig& c) {
    nlohmann::json j;
    j["ranks"] = c.ranks;
    j["sparsity"] = c.sparsity;
    nlohmann::json eta = nlohmann::json::array();
    for (std::size_t n = 0; n < c.ranks.size(); ++n) {
        if (auto e = c.eta_for(n)) eta.push_back(*e);
        else eta.push_back("auto");
    }
    j["eta"] = eta;
    j["max_cuts"] = c.max_cuts;
    j["node_budget"] = c.node_budget;
    return j;
}

inline nlohmann::json supports_json(const DecompositionResult& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : r.modes) j.push_back(m.support.one_based());
    return j;
}

/// Machine-readable summary. Wall-clock timings live under "wall_seconds" so
/// they can be stripped when comparing runs.
inline nlohmann::json meta_json(const DecompositionResult& r, const ShopcaConfig& c, double objective) {
    nlohmann::json j;
    j["config"] = config_json(c);
    nlohmann::json modes = nlohmann::json::array();
    nlohmann::json secs = nlohmann::json::array();
    for (const auto& m : r.modes) {
        modes.push_back({{"eta_achieved", m.eta_achieved},
                         {"eta_target", m.eta_target},
                         {"explained_variance", m.explained_variance},
                         {"cuts_used", m.cuts_used},
                         {"status", to_string(m.status)},
                         {"support_size", m.support.size()}});
        secs.push_back(m.seconds);
    }
    j["modes"] = modes;
    j["bound"] = r.bound ? nlohmann::json(*r.bound) : nlohmann::json(nullptr);
    j["objective_f"] = objective;
    j["wall_seconds"] = secs;
    return j;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) detail::fail(ErrorKind::Io, "cannot open for writing: " + p.string());
    f << s;
}

inline void write(const std::filesystem::path& dir, const DecompositionResult& r, const ShopcaConfig& c,
                  double objective) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) detail::fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
    npy::save((dir / "core.npy").string(), r.core);
    for (std::size_t n = 0; n < r.factors.size(); ++n)
        npy::save((dir / ("factor_" + std::to_string(n + 1) + ".npy")).string(), r.factors[n]);
    write_text(dir / "supports.json", supports_json(r).dump() + "\n");
    write_text(dir / "meta.json", meta_json(r, c, objective).dump(2) + "\n");
}

}  // namespace geohopca::archive
