#include "syncstab/commands.hpp"

#include "syncstab/controller.hpp"
#include "syncstab/eac.hpp"
#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/stability_region.hpp"
#include "syncstab/transient_sim.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace syncstab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Everything an index evaluation needs for one stage.
struct StageSnapshot {
    std::string name;
    RelativeSwingModel model;
    VsgParams vsg;
    SgParams sg;
    LoadParams load;
};

json to_json(const RelativeSwingModel& m) {
    return {{"sync_inertia_s", m.sync_inertia_s},
            {"sync_damping_pu", m.sync_damping_pu},
            {"sync_power_reference_pu", m.sync_power_reference_pu},
            {"sync_power_max_pu", m.sync_power_max_pu},
            {"reference_angular_velocity", m.reference_angular_velocity},
            {"damping_ratio_matched", m.damping_ratio_matched}};
}

json to_json(const VsgParams& v) {
    return {{"inertia_s", v.inertia_s},
            {"damping_pu", v.damping_pu},
            {"power_reference_pu", v.power_reference_pu},
            {"internal_voltage_pu", v.internal_voltage_pu},
            {"line_reactance_pu", v.line_reactance_pu},
            {"virtual_reactance_pu", v.virtual_reactance_pu},
            {"rated_power_pu", v.rated_power_pu}};
}

json to_json(const SgParams& g) {
    return {{"inertia_s", g.inertia_s},
            {"damping_pu", g.damping_pu},
            {"mechanical_power_pu", g.mechanical_power_pu},
            {"voltage_pu", g.voltage_pu},
            {"line_reactance_pu", g.line_reactance_pu},
            {"rated_power_pu", g.rated_power_pu}};
}

RelativeSwingModel model_from_json(const json& j) {
    RelativeSwingModel m;
    m.sync_inertia_s = j.at("sync_inertia_s").get<double>();
    m.sync_damping_pu = j.at("sync_damping_pu").get<double>();
    m.sync_power_reference_pu = j.at("sync_power_reference_pu").get<double>();
    m.sync_power_max_pu = j.at("sync_power_max_pu").get<double>();
    m.reference_angular_velocity = j.at("reference_angular_velocity").get<double>();
    m.damping_ratio_matched = j.at("damping_ratio_matched").get<bool>();
    return m;
}

VsgParams vsg_from_json(const json& j) {
    VsgParams v;
    v.inertia_s = j.at("inertia_s").get<double>();
    v.damping_pu = j.at("damping_pu").get<double>();
    v.power_reference_pu = j.at("power_reference_pu").get<double>();
    v.internal_voltage_pu = j.at("internal_voltage_pu").get<double>();
    v.line_reactance_pu = j.at("line_reactance_pu").get<double>();
    v.virtual_reactance_pu = j.at("virtual_reactance_pu").get<double>();
    v.rated_power_pu = j.at("rated_power_pu").get<double>();
    return v;
}

SgParams sg_from_json(const json& j) {
    SgParams g;
    g.inertia_s = j.at("inertia_s").get<double>();
    g.damping_pu = j.at("damping_pu").get<double>();
    g.mechanical_power_pu = j.at("mechanical_power_pu").get<double>();
    g.voltage_pu = j.at("voltage_pu").get<double>();
    g.line_reactance_pu = j.at("line_reactance_pu").get<double>();
    g.rated_power_pu = j.at("rated_power_pu").get<double>();
    return g;
}

// Doubles that may be infinite or NaN become null.
json number(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json optional_number(const std::optional<double>& x) {
    return x ? number(*x) : json(nullptr);
}

std::vector<std::pair<std::string, const StageParams*>> stages_of(const FaultScenario& sc) {
    std::vector<std::pair<std::string, const StageParams*>> out{{"prefault", &sc.prefault},
                                                                {"faulted", &sc.faulted}};
    if (sc.postfault) {
        out.emplace_back("postfault", &*sc.postfault);
    }
    return out;
}

std::vector<StageSnapshot> snapshots(const ScenarioDocument& doc) {
    std::vector<StageSnapshot> out;
    for (const auto& [name, stage] : stages_of(doc.scenario)) {
        StageSnapshot s;
        s.name = name;
        s.vsg = apply_stage(doc.vsg, *stage);
        s.sg = apply_stage(doc.sg, *stage);
        s.load = doc.load;
        s.model = reduce(s.vsg, s.sg, s.load, doc.base);
        out.push_back(s);
    }
    return out;
}

std::vector<StageSnapshot> snapshots_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(fmt::format("cannot read model file '{}'", path), 0);
    }
    std::vector<StageSnapshot> out;
    try {
        const json doc = json::parse(in);
        for (const json& st : doc.at("stages")) {
            StageSnapshot s;
            s.name = st.at("stage").get<std::string>();
            s.model = model_from_json(st.at("model"));
            s.vsg = vsg_from_json(st.at("vsg"));
            s.sg = sg_from_json(st.at("sg"));
            s.load.resistance_pu = st.at("load").at("resistance_pu").get<double>();
            out.push_back(s);
        }
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("model file '{}': {}", path, e.what()), 0);
    }
    return out;
}

json equilibria_json(const RelativeSwingModel& m) {
    if (m.sync_power_max_pu == 0.0 && m.sync_power_reference_pu == 0.0) {
        return {{"sep_exists", false}, {"sep_rad", nullptr}, {"uep_forward_rad", nullptr},
                {"uep_backward_rad", nullptr}};
    }
    const Equilibria eq = equilibria(m);
    if (!eq.exists) {
        return {{"sep_exists", false}, {"sep_rad", nullptr}, {"uep_forward_rad", nullptr},
                {"uep_backward_rad", nullptr}};
    }
    return {{"sep_exists", true},
            {"sep_rad", eq.sep_rad},
            {"uep_forward_rad", eq.uep_forward_rad},
            {"uep_backward_rad", eq.uep_backward_rad}};
}

json index_json(const StageSnapshot& s) {
    json j = {{"stage", s.name}};
    const bool degenerate = s.model.sync_power_max_pu == 0.0;
    j["lambda"] = degenerate ? json(nullptr) : number(stability_index(s.model));
    j.update(equilibria_json(s.model));
    const double gamma = scr(s.vsg, s.sg);
    j["scr"] = gamma;
    const double e_v = s.vsg.internal_voltage_pu;
    const double e_g = s.sg.voltage_pu;
    if (degenerate) {
        j["lambda_scr"] = nullptr;
        j["lambda_inertia"] = nullptr;
    } else {
        j["lambda_scr"] = number(lambda_from_scr(gamma, s.vsg.virtual_reactance_pu,
                                                 s.model.sync_power_reference_pu, e_v, e_g));
        j["lambda_inertia"] = number(lambda_from_inertia(
            s.vsg.inertia_s, s.sg.inertia_s, s.vsg.power_reference_pu,
            net_power(s.sg.mechanical_power_pu, load_power(e_g, s.load)), e_v, e_g,
            total_reactance(s.vsg, s.sg)));
    }
    return j;
}

std::string fmt_opt(const json& j) {
    return j.is_null() ? std::string() : fmt::format("{:.12g}", j.get<double>());
}

class Output {
public:
    Output(const std::string& dir, std::ostream& out) : dir_(dir), out_(out) {
        fs::create_directories(dir_);
    }

    [[nodiscard]] std::ofstream open(const std::string& name) const {
        std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error(fmt::format("cannot write '{}'", (dir_ / name).string()));
        }
        return f;
    }

    void summary(const json& j) const {
        auto f = open("summary.json");
        f << j.dump(2) << '\n';
        out_ << j.dump(2) << '\n';
    }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
    std::ostream& out_;
};

void write_trajectory(const Output& o, const std::string& name, const Trajectory& traj) {
    auto f = o.open(name);
    f << "t_s,delta_vg_rad,domega_vg_pu,p_syn_pu,i_v_pu\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        fmt::print(f, "{:.6f},{:.9g},{:.9g},{:.9g},{:.9g}\n", traj.times[k], traj.states[k].delta_rad,
                   traj.states[k].domega_pu, traj.sync_power[k], traj.current_mag[k]);
    }
}

double max_current(const Trajectory& traj) {
    return traj.current_mag.empty() ? 0.0
                                    : *std::max_element(traj.current_mag.begin(), traj.current_mag.end());
}

json trajectory_json(const Trajectory& traj) {
    return {{"los", traj.los_time.has_value()},
            {"los_time_s", optional_number(traj.los_time)},
            {"ssi", number(traj.ssi)},
            {"max_current_pu", max_current(traj)},
            {"final_delta_rad", traj.states.back().delta_rad},
            {"final_domega_pu", traj.states.back().domega_pu},
            {"samples", traj.size()}};
}

Trajectory simulate_doc(const ScenarioDocument& doc, bool full_model) {
    SimOptions opt;
    opt.dt_s = doc.sim.dt_s;
    return full_model ? simulate_full(doc.vsg, doc.sg, doc.load, doc.base, doc.scenario, opt)
                      : simulate_reduced(doc.vsg, doc.sg, doc.load, doc.base, doc.scenario, opt);
}

RelativeSwingModel model_for(const ScenarioDocument& doc, const StageParams& stage) {
    return stage_model(doc.vsg, doc.sg, doc.load, doc.base, stage);
}

double prefault_angle(const ScenarioDocument& doc) {
    const RelativeSwingModel pre = model_for(doc, doc.scenario.prefault);
    if (!sep_exists(pre)) {
        throw InvariantError("pre-fault stage has no SEP");
    }
    return equilibria(pre).sep_rad;
}

// ---- commands -------------------------------------------------------------

int cmd_reduce(const ScenarioDocument& doc, const Output& o) {
    json stages = json::array();
    for (const StageSnapshot& s : snapshots(doc)) {
        stages.push_back({{"stage", s.name},
                          {"model", to_json(s.model)},
                          {"vsg", to_json(s.vsg)},
                          {"sg", to_json(s.sg)},
                          {"load", {{"resistance_pu", s.load.resistance_pu}}}});
    }
    o.summary({{"command", "reduce"}, {"stages", stages}});
    return kExitOk;
}

int cmd_index(const std::vector<StageSnapshot>& snaps, const Output& o) {
    json stages = json::array();
    auto csv = o.open("index.csv");
    csv << "stage,lambda,sep_exists,sep_rad,uep_forward_rad,uep_backward_rad,scr,lambda_scr,lambda_inertia\n";
    for (const StageSnapshot& s : snaps) {
        const json j = index_json(s);
        fmt::print(csv, "{},{},{},{},{},{},{},{},{}\n", s.name, fmt_opt(j["lambda"]),
                   j["sep_exists"].get<bool>() ? 1 : 0, fmt_opt(j["sep_rad"]),
                   fmt_opt(j["uep_forward_rad"]), fmt_opt(j["uep_backward_rad"]), fmt_opt(j["scr"]),
                   fmt_opt(j["lambda_scr"]), fmt_opt(j["lambda_inertia"]));
        stages.push_back(j);
    }
    o.summary({{"command", "index"}, {"stages", stages}});
    return kExitOk;
}

int cmd_eac(const ScenarioDocument& doc, const Output& o) {
    const double delta_0 = prefault_angle(doc);
    const RelativeSwingModel faulted = model_for(doc, doc.scenario.faulted);
    const EacResult r = classify_first_swing(faulted, delta_0);
    json j = {{"command", "eac"},
              {"delta_0_rad", delta_0},
              {"classification", to_string(r.classification)},
              {"direction", to_string(r.direction)},
              {"critical", r.critical}};
    if (r.classification != FirstSwing::NoSep) {
        j["accel_area"] = r.accel_area;
        j["decel_area"] = r.decel_area;
        j["delta_s_rad"] = r.delta_s;
        j["delta_u_rad"] = r.delta_u;
        j["delta_max_rad"] = optional_number(r.delta_max);
    }
    o.summary(j);
    return kExitOk;
}

int cmd_simulate(const ScenarioDocument& doc, const CommandOptions& opt, const Output& o) {
    const Trajectory traj = simulate_doc(doc, opt.full_model);
    write_trajectory(o, "trajectory.csv", traj);
    json j = {{"command", "simulate"}, {"model", opt.full_model ? "full" : "reduced"},
              {"dt_s", doc.sim.dt_s}, {"trajectory_csv", "trajectory.csv"}};
    j.update(trajectory_json(traj));
    o.summary(j);
    return kExitOk;
}

int cmd_region(const ScenarioDocument& doc, const Output& o) {
    const StageParams& stage = doc.scenario.postfault ? *doc.scenario.postfault : doc.scenario.faulted;
    const RelativeSwingModel model = model_for(doc, stage);
    const RegionBoundary boundary = trace_boundary(model);
    const GridSpec spec = doc.region.value_or(GridSpec{});
    const RegionGrid grid = classify_grid(model, spec);

    auto b = o.open("boundary.csv");
    b << "branch,delta_rad,domega_pu\n";
    for (std::size_t i = 0; i < boundary.branches.size(); ++i) {
        for (const SyncState& s : boundary.branches[i]) {
            fmt::print(b, "{},{:.9g},{:.9g}\n", i, s.delta_rad, s.domega_pu);
        }
    }
    auto g = o.open("grid.csv");
    g << "delta_rad,domega_pu,stable\n";
    for (std::size_t i = 0; i < grid.delta_axis.size(); ++i) {
        for (std::size_t k = 0; k < grid.omega_axis.size(); ++k) {
            fmt::print(g, "{:.9g},{:.9g},{}\n", grid.delta_axis[i], grid.omega_axis[k],
                       grid.at(i, k) == RegionLabel::Stable ? 1 : 0);
        }
    }
    o.summary({{"command", "region"},
               {"stage", doc.scenario.postfault ? "postfault" : "faulted"},
               {"sep_rad", boundary.sep_rad},
               {"uep_forward_rad", boundary.uep_forward_rad},
               {"uep_backward_rad", boundary.uep_backward_rad},
               {"stable_points", grid.stable_count()},
               {"grid_points", grid.labels.size()},
               {"area_estimate", grid.area_estimate},
               {"boundary_csv", "boundary.csv"},
               {"grid_csv", "grid.csv"}});
    return kExitOk;
}

DesignInput design_input(const ScenarioDocument& doc) {
    DesignInput in;
    in.sg = apply_stage(doc.sg, doc.scenario.prefault);
    in.vsg = apply_stage(doc.vsg, doc.scenario.faulted);
    in.load = doc.load;
    in.fault_voltage_pu = doc.scenario.faulted.sg_voltage_pu;
    in.current_limit_pu = doc.design.value_or(DesignSettings{}).current_limit_pu;
    return in;
}

ScenarioDocument designed_document(ScenarioDocument doc, const DesignOutput& out) {
    doc.vsg.inertia_s = out.inertia_s;
    doc.vsg.damping_pu = out.damping_pu;
    doc.scenario.faulted.virtual_reactance_pu = out.virtual_reactance_pu;
    if (doc.scenario.postfault) {
        doc.scenario.postfault->virtual_reactance_pu = out.virtual_reactance_pu;
    }
    validate(doc);
    return doc;
}

int cmd_design(const ScenarioDocument& doc, const CommandOptions& opt, const Output& o) {
    const DesignInput in = design_input(doc);
    const DesignOutput out = design(in);
    const ScenarioDocument after_doc = designed_document(doc, out);
    const Trajectory before = simulate_doc(doc, false);
    const Trajectory after = simulate_doc(after_doc, false);
    write_trajectory(o, "before.csv", before);
    write_trajectory(o, "after.csv", after);

    const RelativeSwingModel fault_on = model_for(after_doc, after_doc.scenario.faulted);
    json j = {{"command", "design"},
              {"current_limit_pu", in.current_limit_pu},
              {"fault_voltage_pu", in.fault_voltage_pu},
              {"design",
               {{"inertia_s", out.inertia_s},
                {"damping_pu", out.damping_pu},
                {"virtual_reactance_pu", out.virtual_reactance_pu},
                {"binding", to_string(out.binding)},
                {"predicted_max_current_pu", number(out.predicted_max_current_pu)},
                {"predicted_lambda", number(out.predicted_lambda)}}},
              {"fault_on_sync_power_reference_pu", fault_on.sync_power_reference_pu},
              {"before", trajectory_json(before)},
              {"after", trajectory_json(after)},
              {"before_csv", "before.csv"},
              {"after_csv", "after.csv"}};
    o.summary(j);
    if (opt.verify && after.los_time) {
        return kExitUnstable;
    }
    return kExitOk;
}

void apply_axis(ScenarioDocument& doc, const std::string& axis, double value) {
    CommandOptions one;
    if (axis == "hv") {
        one.vsg_inertia_s = value;
    } else if (axis == "xi") {
        one.virtual_reactance_pu = value;
    } else if (axis == "fault-voltage") {
        one.fault_voltage_pu = value;
    } else if (axis == "eta") {
        apply_capacity_ratio(doc, value);
        return;
    } else {
        throw ParseError(fmt::format("unknown sweep axis '{}' (hv, eta, xi, fault-voltage)", axis), 0);
    }
    apply_overrides(doc, one);
}

int cmd_sweep(const ScenarioDocument& doc, const CommandOptions& opt, const Output& o) {
    if (opt.values.empty()) {
        throw ParseError("sweep needs --values", 0);
    }
    auto csv = o.open("sweep.csv");
    csv << "index,value,lambda,sep_exists,eac,classification,los_time_s,ssi,max_current_pu\n";
    json rows = json::array();
    for (std::size_t i = 0; i < opt.values.size(); ++i) {
        ScenarioDocument d = doc;
        apply_axis(d, opt.axis, opt.values[i]);
        const RelativeSwingModel faulted = model_for(d, d.scenario.faulted);
        const json lambda =
            faulted.sync_power_max_pu == 0.0 ? json(nullptr) : number(stability_index(faulted));
        const EacResult eac = classify_first_swing(faulted, prefault_angle(d));
        const Trajectory traj = simulate_doc(d, false);
        const char* cls = traj.los_time ? "Unstable" : "Stable";
        fmt::print(csv, "{},{:.9g},{},{},{},{},{},{:.9g},{:.9g}\n", i, opt.values[i], fmt_opt(lambda),
                   sep_exists(faulted) ? 1 : 0, to_string(eac.classification), cls,
                   traj.los_time ? fmt::format("{:.6f}", *traj.los_time) : std::string(), traj.ssi,
                   max_current(traj));
        rows.push_back({{"value", opt.values[i]},
                        {"lambda", lambda},
                        {"sep_exists", sep_exists(faulted)},
                        {"eac", to_string(eac.classification)},
                        {"classification", cls},
                        {"los_time_s", optional_number(traj.los_time)},
                        {"ssi", number(traj.ssi)},
                        {"max_current_pu", max_current(traj)}});
    }
    o.summary({{"command", "sweep"}, {"axis", opt.axis}, {"rows", rows}, {"sweep_csv", "sweep.csv"}});
    return kExitOk;
}

int dispatch(const std::string& command, const std::string& path, const CommandOptions& opt,
             std::ostream& out) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        throw ParseError(fmt::format("unknown command '{}'", command), 0);
    }
    if (command == "index" && opt.model_path) {
        const auto snaps = snapshots_from_file(*opt.model_path);
        return cmd_index(snaps, Output(opt.out_dir, out));
    }
    if (path.empty()) {
        throw ParseError("missing scenario file", 0);
    }
    ScenarioDocument doc = load_scenario(path);
    apply_overrides(doc, opt);
    const Output o(opt.out_dir, out);
    if (command == "reduce") return cmd_reduce(doc, o);
    if (command == "index") return cmd_index(snapshots(doc), o);
    if (command == "eac") return cmd_eac(doc, o);
    if (command == "simulate") return cmd_simulate(doc, opt, o);
    if (command == "region") return cmd_region(doc, o);
    if (command == "design") return cmd_design(doc, opt, o);
    return cmd_sweep(doc, opt, o);
}

}  // namespace

void apply_overrides(ScenarioDocument& doc, const CommandOptions& options) {
    if (options.vsg_inertia_s) {
        const double ratio = doc.vsg.damping_pu / doc.vsg.inertia_s;
        doc.vsg.inertia_s = *options.vsg_inertia_s;
        doc.vsg.damping_pu = ratio * doc.vsg.inertia_s;
    }
    if (options.virtual_reactance_pu) {
        doc.scenario.faulted.virtual_reactance_pu = *options.virtual_reactance_pu;
        if (doc.scenario.postfault) {
            doc.scenario.postfault->virtual_reactance_pu = *options.virtual_reactance_pu;
        }
    }
    if (options.fault_voltage_pu) {
        doc.scenario.faulted.sg_voltage_pu = *options.fault_voltage_pu;
    }
    if (options.dt_s) {
        doc.sim.dt_s = *options.dt_s;
    }
    validate(doc);
}

void apply_capacity_ratio(ScenarioDocument& doc, double eta) {
    if (!(eta > 0.0)) {
        throw DomainError("capacity ratio must be > 0");
    }
    const double s_old = doc.vsg.rated_power_pu;
    const double s_new = eta * doc.sg.rated_power_pu;
    const double up = s_new / s_old;
    doc.vsg.rated_power_pu = s_new;
    doc.vsg.line_reactance_pu /= up;
    doc.vsg.virtual_reactance_pu /= up;
    doc.vsg.inertia_s *= up;
    doc.vsg.damping_pu *= up;
    doc.vsg.power_reference_pu *= up;
    for (StageParams* st : {&doc.scenario.prefault, &doc.scenario.faulted}) {
        st->virtual_reactance_pu /= up;
        st->vsg_power_reference_pu *= up;
    }
    if (doc.scenario.postfault) {
        doc.scenario.postfault->virtual_reactance_pu /= up;
        doc.scenario.postfault->vsg_power_reference_pu *= up;
    }
    validate(doc);
}

int run(const std::string& command, const std::string& scenario_path,
        const CommandOptions& options, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(command, scenario_path, options, out);
    } catch (const ParseError& e) {
        if (e.line() > 0) {
            fmt::print(err, "{}:{}: error: {}\n", scenario_path, e.line(), e.what());
        } else {
            fmt::print(err, "error: {}\n", e.what());
        }
        return kExitParse;
    } catch (const RegionUndefinedError& e) {
        fmt::print(err, "unstable: {}\n", e.what());
        return kExitUnstable;
    } catch (const IntegrationDivergedError& e) {
        fmt::print(err, "numerical failure: {}\n", e.what());
        return kExitNumerical;
    } catch (const DegenerateModelError& e) {
        fmt::print(err, "numerical failure: {}\n", e.what());
        return kExitNumerical;
    } catch (const NonDifferentiableError& e) {
        fmt::print(err, "numerical failure: {}\n", e.what());
        return kExitNumerical;
    } catch (const Error& e) {
        // Invariant, domain, singular-network and design-infeasible errors.
        fmt::print(err, "invalid input: {}\n", e.what());
        return kExitInvariant;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 1;
    }
}

}  // namespace syncstab
