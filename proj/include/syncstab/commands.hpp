#pragma once

// Command layer behind the `syncstab` executable. Each command reads a
// scenario, writes its artifacts under the output directory (summary.json
// plus CSVs) and prints the summary to `out`.

#include "syncstab/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace syncstab {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitInvariant = 3,
    kExitUnstable = 4,
    kExitNumerical = 5,
};

struct CommandOptions {
    std::optional<double> vsg_inertia_s;     // --hv; D_v is rescaled to keep D_v/H_v
    std::optional<double> virtual_reactance_pu;  // --xi; fault-on (and post-fault) stage
    std::optional<double> fault_voltage_pu;  // --fault-voltage; fault-on stage E_g
    std::optional<double> dt_s;              // --dt
    std::string out_dir = ".";

    std::optional<std::string> model_path;   // index --model <reduce summary.json>
    bool full_model = false;                 // simulate --full
    bool verify = false;                     // design --verify
    std::string axis;                        // sweep --axis hv|eta|xi|fault-voltage
    std::vector<double> values;              // sweep --values
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"reduce", "index",  "eac",  "simulate",
                                                "region", "design", "sweep"};
    return names;
}

/// Applies the command-line overrides to a parsed document and re-validates it.
void apply_overrides(ScenarioDocument& doc, const CommandOptions& options);

/// Rescales every VSG quantity tied to its rating so that S_v = eta S_g while
/// the line-drop, virtual-drop, inertia-level and power-factor ratios stay put.
void apply_capacity_ratio(ScenarioDocument& doc, double eta);

/// Runs `command` on the scenario file and maps failures onto exit codes.
/// Diagnostics go to `err`.
int run(const std::string& command, const std::string& scenario_path,
        const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace syncstab
