// syncstab <command> <scenario-file> [options]

#include "syncstab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace syncstab;

    CLI::App app{"Transient synchronisation stability of a VSG-SG two-machine system"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string scenario_path;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"reduce", "relative swing model per stage"},
        {"index", "stability index, equilibria and SCR forms per stage"},
        {"eac", "equal-area first-swing classification"},
        {"simulate", "staged fault simulation, trajectory CSV"},
        {"region", "stability boundary and classification grid"},
        {"design", "inertia matching and virtual impedance design"},
        {"sweep", "index and classification over one parameter axis"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", scenario_path, "scenario file")->required(name != "index");
        sub->add_option("--hv", opt.vsg_inertia_s, "VSG inertia H_v [s]; D_v keeps its ratio");
        sub->add_option("--xi", opt.virtual_reactance_pu, "fault-on virtual reactance X_i [pu]");
        sub->add_option("--fault-voltage", opt.fault_voltage_pu, "fault-on SG voltage E_gf [pu]");
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--dt", opt.dt_s, "integration step [s]");
        if (name == "index") {
            sub->add_option("--model", opt.model_path, "reduce summary.json to re-ingest");
        }
        if (name == "simulate") {
            sub->add_flag("--full", opt.full_model, "use the four-state two-machine model");
        }
        if (name == "design") {
            sub->add_flag("--verify", opt.verify, "exit 4 if the designed system loses synchronism");
        }
        if (name == "sweep") {
            sub->add_option("--axis", opt.axis, "hv | eta | xi | fault-voltage")->required();
            sub->add_option("--values", opt.values, "comma-separated axis values")
                ->required()
                ->delimiter(',');
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitParse;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return run(command, scenario_path, opt, std::cout, std::cerr);
}
