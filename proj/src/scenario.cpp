#include "syncstab/scenario.hpp"

#include "syncstab/errors.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace syncstab {

namespace {

int line_of(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    return mark.is_null() ? 0 : mark.line + 1;
}

// A mapping whose keys must all be consumed; anything left over is unknown.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) {
            throw ParseError(fmt::format("'{}' must be a mapping", path_), line_of(node_));
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    [[nodiscard]] std::optional<double> number(const std::string& key) {
        seen_.insert(key);
        const YAML::Node v = node_[key];
        if (!v) {
            return std::nullopt;
        }
        double x = 0.0;
        try {
            if (!v.IsScalar()) {
                throw YAML::BadConversion(v.Mark());
            }
            x = v.as<double>();
        } catch (const YAML::BadConversion&) {
            throw ParseError(fmt::format("'{}' must be a number", field(key)), line_of(v));
        }
        if (!std::isfinite(x)) {
            throw ParseError(fmt::format("'{}' must be finite", field(key)), line_of(v));
        }
        return x;
    }

    [[nodiscard]] double required(const std::string& key) {
        if (auto v = number(key)) {
            return *v;
        }
        throw ParseError(fmt::format("missing required field '{}'", field(key)), line_of(node_));
    }

    [[nodiscard]] std::size_t count(const std::string& key, std::size_t fallback) {
        const YAML::Node v = node_[key];
        seen_.insert(key);
        if (!v) {
            return fallback;
        }
        long long n = 0;
        try {
            n = v.as<long long>();
        } catch (const YAML::BadConversion&) {
            throw ParseError(fmt::format("'{}' must be an integer", field(key)), line_of(v));
        }
        if (n < 0) {
            throw ParseError(fmt::format("'{}' must be non-negative", field(key)), line_of(v));
        }
        return static_cast<std::size_t>(n);
    }

    // Exactly one of two unit forms, e.g. line_reactance_pu / line_inductance_h.
    template <class FromAlt>
    [[nodiscard]] std::optional<double> either(const std::string& key, const std::string& alt,
                                               FromAlt convert) {
        if (has(key) && has(alt)) {
            throw ParseError(fmt::format("'{}' and '{}' are mutually exclusive", field(key),
                                         field(alt)),
                             line_of(node_[alt]));
        }
        if (auto v = number(key)) {
            return v;
        }
        if (auto v = number(alt)) {
            return convert(*v);
        }
        return std::nullopt;
    }

    template <class FromAlt>
    [[nodiscard]] double required_either(const std::string& key, const std::string& alt,
                                         FromAlt convert) {
        if (auto v = either(key, alt, convert)) {
            return *v;
        }
        throw ParseError(fmt::format("missing required field '{}' (or '{}')", field(key), field(alt)),
                         line_of(node_));
    }

    [[nodiscard]] std::optional<Section> child(const std::string& key) {
        seen_.insert(key);
        const YAML::Node v = node_[key];
        if (!v) {
            return std::nullopt;
        }
        return Section(v, field(key));
    }

    [[nodiscard]] Section required_child(const std::string& key) {
        if (auto c = child(key)) {
            return std::move(*c);
        }
        throw ParseError(fmt::format("missing required section '{}'", field(key)), line_of(node_));
    }

    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ParseError(fmt::format("unknown key '{}'", field(key)), line_of(kv.first));
            }
        }
    }

private:
    [[nodiscard]] std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

BaseQuantities parse_base(Section s) {
    BaseQuantities b;
    b.rated_voltage_v = s.required("rated_voltage_v");
    b.rated_power_w = s.required("rated_power_w");
    b.rated_frequency_hz = s.required("rated_frequency_hz");
    s.finish();
    validate(b);
    return b;
}

struct Converters {
    const BaseQuantities& base;

    [[nodiscard]] auto reactance() const {
        return [b = base](double henries) { return reactance_from_inductance(henries, b); };
    }
    [[nodiscard]] auto power() const {
        return [b = base](double watts) { return watts / b.rated_power_w; };
    }
    [[nodiscard]] auto impedance() const {
        return [b = base](double ohms) { return ohms / b.impedance_base_ohm(); };
    }
};

VsgParams parse_vsg(Section s, const Converters& cv) {
    VsgParams v;
    v.inertia_s = s.required("inertia_s");
    v.damping_pu = s.required("damping_pu");
    v.power_reference_pu = s.required_either("power_reference_pu", "power_reference_w", cv.power());
    v.internal_voltage_pu = s.number("internal_voltage_pu").value_or(1.0);
    v.line_reactance_pu = s.required_either("line_reactance_pu", "line_inductance_h", cv.reactance());
    v.virtual_reactance_pu =
        s.either("virtual_reactance_pu", "virtual_inductance_h", cv.reactance()).value_or(0.0);
    v.rated_power_pu = s.either("rated_power_pu", "rated_power_w", cv.power()).value_or(1.0);
    s.finish();
    return v;
}

SgParams parse_sg(Section s, const Converters& cv) {
    SgParams g;
    g.inertia_s = s.required("inertia_s");
    g.damping_pu = s.required("damping_pu");
    g.mechanical_power_pu = s.required_either("mechanical_power_pu", "mechanical_power_w", cv.power());
    g.voltage_pu = s.number("voltage_pu").value_or(1.0);
    g.line_reactance_pu = s.required_either("line_reactance_pu", "line_inductance_h", cv.reactance());
    g.rated_power_pu = s.either("rated_power_pu", "rated_power_w", cv.power()).value_or(1.0);
    s.finish();
    return g;
}

LoadParams parse_load(Section s, const Converters& cv) {
    LoadParams l;
    l.resistance_pu = s.required_either("resistance_pu", "resistance_ohm", cv.impedance());
    s.finish();
    return l;
}

StageParams parse_stage(Section s, const VsgParams& vsg, const Converters& cv) {
    StageParams st;
    st.sg_voltage_pu = s.required("sg_voltage_pu");
    st.virtual_reactance_pu = s.either("virtual_reactance_pu", "virtual_inductance_h", cv.reactance())
                                  .value_or(vsg.virtual_reactance_pu);
    st.vsg_power_reference_pu = s.number("vsg_power_reference_pu").value_or(vsg.power_reference_pu);
    s.finish();
    return st;
}

FaultScenario parse_fault(Section s, const VsgParams& vsg, const Converters& cv) {
    FaultScenario f;
    f.t_fault_s = s.required("t_fault_s");
    f.t_clear_s = s.number("t_clear_s");
    f.prefault = parse_stage(s.required_child("prefault"), vsg, cv);
    f.faulted = parse_stage(s.required_child("faulted"), vsg, cv);
    if (auto post = s.child("postfault")) {
        f.postfault = parse_stage(std::move(*post), vsg, cv);
    }
    s.finish();
    return f;
}

SimSettings parse_sim(Section s) {
    SimSettings sim;
    sim.dt_s = s.number("dt_s").value_or(sim.dt_s);
    sim.t_end_s = s.required("t_end_s");
    s.finish();
    return sim;
}

GridSpec parse_region(Section s) {
    GridSpec g;
    g.delta_min_rad = s.number("delta_min_rad").value_or(g.delta_min_rad);
    g.delta_max_rad = s.number("delta_max_rad").value_or(g.delta_max_rad);
    g.omega_min_pu = s.number("omega_min_pu").value_or(g.omega_min_pu);
    g.omega_max_pu = s.number("omega_max_pu").value_or(g.omega_max_pu);
    g.n_delta = s.count("n_delta", g.n_delta);
    g.n_omega = s.count("n_omega", g.n_omega);
    g.t_max_s = s.number("t_max_s").value_or(g.t_max_s);
    g.dt_s = s.number("dt_s").value_or(g.dt_s);
    g.band_delta_rad = s.number("band_delta_rad").value_or(g.band_delta_rad);
    g.band_omega_pu = s.number("band_omega_pu").value_or(g.band_omega_pu);
    s.finish();
    return g;
}

DesignSettings parse_design(Section s) {
    DesignSettings d;
    d.current_limit_pu = s.number("current_limit_pu").value_or(d.current_limit_pu);
    s.finish();
    return d;
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(fmt::format("malformed document: {}", e.msg), e.mark.line + 1);
    }
    if (!root || root.IsNull()) {
        throw ParseError("empty scenario document", 0);
    }

    Section top(root, "");
    ScenarioDocument doc;
    doc.base = parse_base(top.required_child("base"));
    const Converters cv{doc.base};
    doc.vsg = parse_vsg(top.required_child("vsg"), cv);
    doc.sg = parse_sg(top.required_child("sg"), cv);
    doc.load = parse_load(top.required_child("load"), cv);
    doc.scenario = parse_fault(top.required_child("scenario"), doc.vsg, cv);
    doc.sim = parse_sim(top.required_child("sim"));
    if (auto r = top.child("region")) {
        doc.region = parse_region(std::move(*r));
    }
    if (auto d = top.child("design")) {
        doc.design = parse_design(std::move(*d));
    }
    top.finish();

    doc.scenario.t_end_s = doc.sim.t_end_s;
    validate(doc);
    return doc;
}

ScenarioDocument load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(fmt::format("cannot read scenario file '{}'", path), 0);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

void validate(const ScenarioDocument& doc) {
    validate(doc.base);
    validate(doc.vsg);
    validate(doc.sg);
    validate(doc.load);
    validate(doc.scenario);
    for (const StageParams* st : {&doc.scenario.prefault, &doc.scenario.faulted}) {
        if (st->sg_voltage_pu < 0.0 || st->virtual_reactance_pu < 0.0) {
            throw InvariantError("stage: E_g and X_i must be >= 0");
        }
    }
    if (doc.scenario.postfault &&
        (doc.scenario.postfault->sg_voltage_pu < 0.0 || doc.scenario.postfault->virtual_reactance_pu < 0.0)) {
        throw InvariantError("stage: E_g and X_i must be >= 0");
    }
    if (!(doc.sim.dt_s > 0.0) || doc.sim.dt_s > doc.sim.t_end_s) {
        throw InvariantError("sim: need 0 < dt_s <= t_end_s");
    }
    if (doc.region) {
        validate(*doc.region);
    }
    if (doc.design && !(doc.design->current_limit_pu > 0.0)) {
        throw InvariantError("design: current_limit_pu must be > 0");
    }
}

}  // namespace syncstab
