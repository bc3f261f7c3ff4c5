#pragma once

// Declarative scenario configs (JSON) and the runners behind the CLI.
//
// A config is one JSON object:
//   {
//     "kind": "noon-protocol",            required, see ScenarioKind
//     "name": "...", "description": "...", optional labels
//     "seed": 0,                          drives sampled measurements and random draws
//     "policy": {"mode": "forced", "outcomes": [0, 1]},
//     "numerics": {"method": "series"},
//     "output": {"format": "csv", "path": null},
//     "params": {...}                     kind-specific, see the structs below
//   }
// Unknown keys are rejected. Omitted keys take the defaults below; the
// normalized echo written into reports has every key filled in and parses
// back to the same config.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "noonsim/evolution.hpp"
#include "noonsim/protocol.hpp"
#include "noonsim/report.hpp"

namespace noonsim {

enum class ScenarioKind {
    noon_protocol,
    conditional_map,
    multi_noon,
    floquet_sweep,
    trapped_ion_verify,
    hp_sweep,
    metrology_table,
};

std::string to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);
const std::vector<ScenarioKind>& all_scenario_kinds();

struct InputStateSpec {
    enum class Type { vacuum, fock, coherent, squeezed };
    Type type = Type::vacuum;
    std::size_t n = 0;      // fock
    cplx alpha{0.0, 0.0};   // coherent
    double r = 0.0;         // squeezed
    double phi = 0.0;       // squeezed

    StateVector build(std::size_t truncation) const;
    bool operator==(const InputStateSpec&) const = default;
};

struct NoonScenario {
    std::vector<std::size_t> N{1, 2, 3, 4, 5, 6};
    double omega = 1.0;
    std::optional<std::size_t> truncation;  // default N + 1 per row
    bool operator==(const NoonScenario&) const = default;
};

struct ConditionalMapScenario {
    InputStateSpec psi1{InputStateSpec::Type::coherent, 0, {1.0, 0.0}};
    InputStateSpec psi2{};
    std::size_t truncation = 20;
    double omega = 1.0;
    bool operator==(const ConditionalMapScenario&) const = default;
};

struct MultiNoonScenario {
    std::size_t M = 2;
    std::size_t N = 2;
    double omega = 1.0;
    std::optional<std::size_t> truncation;  // default N + 1
    bool operator==(const MultiNoonScenario&) const = default;
};

enum class FloquetScheme { coupling_modulated, frequency_modulated };

struct FloquetSweepScenario {
    FloquetScheme scheme = FloquetScheme::frequency_modulated;
    double g0 = 1.0;
    std::vector<double> nu_over_g{10.0, 20.0, 40.0, 80.0};
    double zeta = 2.4048255577;
    double phi1 = 0.0;
    // Default phi1 - pi/3 for the frequency-modulated scheme, phi1 - pi/2 for
    // the coupling-modulated one.
    std::optional<double> phi2;
    double delta = 0.0;
    std::size_t N = 2;
    int n_max = 40;
    std::size_t steps_per_period = 1000;

    double resolved_phi2() const;
    bool operator==(const FloquetSweepScenario&) const = default;
};

inline constexpr double kMinFloquetRatio = 5.0;

struct TrappedIonScenario {
    double g0 = 1.0;
    double epsilon_abs = 1.0;
    double phi_L = 0.0;
    std::vector<double> ratios{0.05, 0.02, 0.01};  // g0 eta / |epsilon_L|
    std::size_t N = 2;
    bool operator==(const TrappedIonScenario&) const = default;
};

struct HpSweepScenario {
    std::vector<std::size_t> N0{10, 100, 1000};
    double g = 1.0;
    std::vector<double> gt{0.25, 0.5, 1.0};
    // Ensemble level occupied at t = 0, with the qubit excited. Level 0 is
    // reproduced exactly by the bosonic model, so 1 is the first informative
    // case.
    std::size_t initial_level = 1;
    bool operator==(const HpSweepScenario&) const = default;
};

struct MetrologyScenario {
    std::vector<std::size_t> noon_N{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> cat_two_j{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t random_cats = 20;  // per 2j
    std::vector<double> coherent_alpha{1.0, 2.0};
    std::size_t multi_M = 2;
    std::size_t multi_N = 2;
    bool operator==(const MetrologyScenario&) const = default;
};

using ScenarioParams = std::variant<NoonScenario, ConditionalMapScenario, MultiNoonScenario, FloquetSweepScenario,
                                    TrappedIonScenario, HpSweepScenario, MetrologyScenario>;

struct PolicySpec {
    MeasurementPolicy::Mode mode = MeasurementPolicy::Mode::forced;
    std::vector<int> outcomes{0, 1};  // forced mode
    bool operator==(const PolicySpec&) const = default;
};

struct OutputSpec {
    ReportFormat format = ReportFormat::csv;
    std::optional<std::string> path;
    bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::noon_protocol;
    std::string name;
    std::string description;
    std::uint64_t seed = 0;
    PolicySpec policy;
    ExpmMethod method = ExpmMethod::series;
    OutputSpec output;
    ScenarioParams params;

    // Throws ValidationError naming the offending field.
    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig default_config(ScenarioKind kind);

// Parse and validate. Errors carry the JSON path of the offending field.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& config);

// Applies "a.b.c=value" to a config document; value is read as JSON when it
// parses, otherwise as a string. Bare keys address "params".
void apply_override(nlohmann::json& doc, const std::string& assignment);

RunReport run_scenario(const ScenarioConfig& config, const std::string& timestamp);

struct BuiltinScenario {
    std::string name;
    std::string summary;
    nlohmann::json config;
};

// Shipped scenarios; scenarios/<name>.json holds the same documents.
const std::vector<BuiltinScenario>& builtin_scenarios();
const BuiltinScenario& builtin_scenario(const std::string& name);

}  // namespace noonsim
