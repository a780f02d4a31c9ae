#pragma once

// Scenario documents: YAML text with unit-suffixed keys, converted to
// system-base per-unit on ingestion. See docs/scenario-format.md.

#include "syncstab/core_model.hpp"
#include "syncstab/stability_region.hpp"
#include "syncstab/transient_sim.hpp"

#include <optional>
#include <string>

namespace syncstab {

struct SimSettings {
    double dt_s = 1e-4;
    double t_end_s = 10.0;
};

struct DesignSettings {
    double current_limit_pu = 1.8;
};

struct ScenarioDocument {
    BaseQuantities base;
    VsgParams vsg;
    SgParams sg;
    LoadParams load;
    FaultScenario scenario;  // t_end_s mirrors sim.t_end_s
    SimSettings sim;
    std::optional<GridSpec> region;
    std::optional<DesignSettings> design;
};

/// Schema violations (missing field, unknown key, both unit forms of a field,
/// malformed number) throw ParseError carrying the line. Parameter invariants
/// are checked after conversion and throw InvariantError or DomainError.
[[nodiscard]] ScenarioDocument parse_scenario(const std::string& text);

/// Reads and parses a file. Throws ParseError if it cannot be read.
[[nodiscard]] ScenarioDocument load_scenario(const std::string& path);

/// Invariant checks of a fully converted document.
void validate(const ScenarioDocument& doc);

}  // namespace syncstab
