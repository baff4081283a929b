#pragma once

// JSON input formats, report serialization and the command runner shared by
// the CLI and the Python module.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsat/factorization.hpp"
#include "hsat/hankel.hpp"
#include "hsat/saturation.hpp"
#include "hsat/weights.hpp"

namespace hsat {

using json = nlohmann::json;

std::string version();

// Spec formats. Every reader throws ParseError carrying a JSON pointer.
SymbolSpec symbol_from_json(const json& j);
json to_json(const SymbolSpec& s);
OuterSpec outer_from_json(const json& j, const std::string& pointer = "");
json to_json(const OuterSpec& o);
ThinSetSpec thin_set_from_json(const json& j, const std::string& pointer = "");
json to_json(const ThinSetSpec& u);

/// {"weight": <outer>, "floor_exponent": R} or {"w_kappa": {"thin_set": ..., "kappa": k}}.
struct WeightInput {
    WeightSpec weight;
    std::optional<ThinSetSpec> thin_set;
    std::optional<double> kappa;
};
WeightInput weight_from_json(const json& j);

// Reports. Grid-sized vectors are summarized, not dumped.
json to_json(const NormEstimate& e);
json to_json(const GapReport& g);
json to_json(const SaturationVerdict& v);
json to_json(const ImproverResult& r);
json to_json(const ApicalCertificate& c);
json to_json(const A2Report& r);
json to_json(const ThinnessReport& r);
json to_json(const ClaimReport& r);

struct RunConfig {
    std::optional<int> grid_exponent;  ///< per-command default when unset
    std::size_t n_min = 2;
    std::size_t n_max = 8192;
    double tol_rel = 1e-4;
    double tol_gap = 1e-6;
    std::uint64_t seed = 0;
    std::vector<double> delta_grid = SaturationConfig{}.delta_grid;
    std::vector<double> thetas;  ///< arc family radii; empty = no family
    double arc_base = 0.0;
    double delta = 0.5;
    std::optional<double> epsilon;  ///< claim: eps; weights: L- level
    double kappa = 1.0;
    double margin = kDefaultApicalMargin;
    std::optional<int> max_depth;
    bool timings = true;
    bool require_decision = false;

    void validate() const;
    json to_json() const;
};

/// Same keys as RunConfig::to_json; missing keys keep their defaults.
RunConfig run_config_from_json(const json& j);

struct Outcome {
    json report;
    bool decided = true;
};

/// command in {norm, saturation, weights, claim, examples}.
Outcome run_command(const std::string& command, const json& input, const RunConfig& cfg);

/// Flattened tables: norm-vs-N, level-set steps, A2 depths, per-arc integrals.
std::string to_csv(const json& report);

}  // namespace hsat
