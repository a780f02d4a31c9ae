#include "support.hpp"

#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/stability_region.hpp"

#include <catch_amalgamated.hpp>

using namespace syncstab;
using namespace syncstab::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RelativeSwingModel swing(double p_ref, double p_max, double h, double d) {
    RelativeSwingModel m;
    m.sync_inertia_s = h;
    m.sync_damping_pu = d;
    m.sync_power_reference_pu = p_ref;
    m.sync_power_max_pu = p_max;
    return m;
}

RelativeSwingModel ref_fault_on(double hv) {
    VsgParams vsg = ref_vsg(hv);
    vsg.virtual_reactance_pu = ref_reactance(1.45e-3);
    SgParams sg = ref_sg();
    sg.voltage_pu = 0.2;
    return reduce(vsg, sg, ref_load(), ref_base());
}

}  // namespace

TEST_CASE("stable eigen-direction at a saddle", "[stability_region]") {
    const RelativeSwingModel m = swing(-0.12, 0.4259, 13.3, 6.7);
    const Equilibria eq = equilibria(m);
    for (double uep : {eq.uep_forward_rad, eq.uep_backward_rad}) {
        const SaddleDirection dir = stable_direction(m, uep);
        CHECK(dir.eigenvalue < 0.0);
        // J v = mu v with v = (1, w).
        const double two_h = 2.0 * m.sync_inertia_s;
        const double j10 = -m.sync_power_max_pu * std::cos(uep) / two_h;
        const double j11 = -m.sync_damping_pu / two_h;
        CHECK_THAT(m.reference_angular_velocity * dir.domega_per_rad, WithinRel(dir.eigenvalue, 1e-12));
        CHECK_THAT(j10 + j11 * dir.domega_per_rad,
                   WithinRel(dir.eigenvalue * dir.domega_per_rad, 1e-12));
    }
}

TEST_CASE("tracing needs an SEP", "[stability_region]") {
    CHECK_THROWS_AS(trace_boundary(swing(0.5, 0.4, 10.0, 1.0)), RegionUndefinedError);
    CHECK_THROWS_AS(classify_grid(swing(0.5, 0.4, 10.0, 1.0), GridSpec{}), RegionUndefinedError);
}

TEST_CASE("undamped symmetric boundary", "[stability_region]") {
    const RelativeSwingModel m = swing(0.0, 0.4259, 13.3, 0.0);
    TraceOptions opt;
    opt.t_max_s = 20.0;
    const RegionBoundary b = trace_boundary(m, opt);
    REQUIRE(b.branches.size() == 4);
    CHECK_THAT(b.uep_forward_rad, WithinAbs(kPi, 1e-15));
    CHECK_THAT(b.uep_backward_rad, WithinAbs(-kPi, 1e-15));
    for (std::size_t i = 0; i < 4; ++i) {
        const SyncState& seed = b.branches[i].front();
        const double uep = i < 2 ? kPi : -kPi;
        CHECK(std::abs(seed.delta_rad - uep) <= opt.epsilon_rad + 1e-15);
        CHECK(std::abs(seed.domega_pu) < 1e-5);
    }
    // (delta, domega) -> (-delta, -domega) maps branch 0 onto 3 and 1 onto 2.
    for (auto [a, c] : {std::pair<std::size_t, std::size_t>{0, 3}, {1, 2}}) {
        REQUIRE(b.branches[a].size() == b.branches[c].size());
        for (std::size_t k = 0; k < b.branches[a].size(); ++k) {
            REQUIRE_THAT(b.branches[a][k].delta_rad, WithinAbs(-b.branches[c][k].delta_rad, 1e-12));
            REQUIRE_THAT(b.branches[a][k].domega_pu, WithinAbs(-b.branches[c][k].domega_pu, 1e-15));
        }
    }
}

TEST_CASE("undamped boundary lies on the UEP energy level", "[stability_region]") {
    for (double p_ref : {0.0, -0.12, 0.2}) {
        const RelativeSwingModel m = swing(p_ref, 0.4259, 13.3, 0.0);
        TraceOptions opt;
        opt.t_max_s = 20.0;
        const RegionBoundary b = trace_boundary(m, opt);
        const double depth_f = energy(m, {b.uep_forward_rad, 0.0}) - energy(m, {b.sep_rad, 0.0});
        const double depth_b = energy(m, {b.uep_backward_rad, 0.0}) - energy(m, {b.sep_rad, 0.0});
        for (std::size_t i = 0; i < 4; ++i) {
            const double uep = i < 2 ? b.uep_forward_rad : b.uep_backward_rad;
            const double level = energy(m, {uep, 0.0});
            const double depth = i < 2 ? depth_f : depth_b;
            for (const SyncState& s : b.branches[i]) {
                REQUIRE(std::abs(energy(m, s) - level) <= 1e-3 * depth);
            }
        }
    }
}

TEST_CASE("damped boundary separates converging from escaping states", "[stability_region]") {
    const RelativeSwingModel m = ref_fault_on(20.0);
    TraceOptions opt;
    opt.t_max_s = 30.0;
    const RegionBoundary b = trace_boundary(m, opt);
    GridSpec spec;
    spec.t_max_s = 150.0;
    // A UEP bounds the region when states just inside it, at rest, converge.
    const auto bounds_region = [&](double uep) {
        return classify_point(m, {uep - 0.01 * (uep - b.sep_rad), 0.0}, spec) == RegionLabel::Stable;
    };
    const bool forward_bounds = bounds_region(b.uep_forward_rad);
    const bool backward_bounds = bounds_region(b.uep_backward_rad);
    // P_syn_ref < 0: the backward UEP has the lower energy and controls the region.
    CHECK(backward_bounds);
    CHECK_FALSE(forward_bounds);
    int checked = 0;
    for (std::size_t i = 0; i < b.branches.size(); ++i) {
        const Polyline& line = b.branches[i];
        const bool on_boundary = i < 2 ? forward_bounds : backward_bounds;
        for (std::size_t k = 5; k < line.size(); k += line.size() / 8 + 1) {
            const SyncState& p = line[k];
            if (p.delta_rad < b.uep_backward_rad - 1.0 || p.delta_rad > b.uep_forward_rad + 1.0 ||
                std::abs(p.domega_pu) < 1e-4) {
                continue;
            }
            const SyncState inside{b.sep_rad + 0.99 * (p.delta_rad - b.sep_rad), 0.99 * p.domega_pu};
            const SyncState outside{b.sep_rad + 1.01 * (p.delta_rad - b.sep_rad), 1.01 * p.domega_pu};
            CHECK(classify_point(m, inside, spec) == (on_boundary ? RegionLabel::Stable : RegionLabel::Unstable));
            CHECK(classify_point(m, outside, spec) == RegionLabel::Unstable);
            checked += on_boundary;
        }
    }
    CHECK(checked >= 4);
}

TEST_CASE("grid classification basics", "[stability_region]") {
    const RelativeSwingModel m = ref_fault_on(20.0);
    const Equilibria eq = equilibria(m);
    const GridSpec spec;
    CHECK(classify_point(m, {eq.sep_rad, 0.0}, spec) == RegionLabel::Stable);
    CHECK(classify_point(m, {eq.uep_forward_rad + 0.1, 0.01}, spec) == RegionLabel::Unstable);

    GridSpec small;
    small.n_delta = 9;
    small.n_omega = 7;
    const RegionGrid grid = classify_grid(m, small);
    CHECK(grid.delta_axis.size() == 9);
    CHECK(grid.omega_axis.size() == 7);
    CHECK(grid.labels.size() == 63);
    CHECK_THAT(grid.cell_area, WithinRel((2.0 * kPi / 8.0) * (0.04 / 6.0), 1e-12));
    CHECK_THAT(grid.area_estimate, WithinRel(grid.cell_area * static_cast<double>(grid.stable_count()), 1e-15));
    CHECK(grid.stable_count() > 0);
    CHECK(grid.stable_count() < 63);

    small.n_delta = 1;
    CHECK_THROWS_AS(classify_grid(m, small), DomainError);
}

TEST_CASE("undamped grid labels agree with the energy well", "[stability_region]") {
    const RelativeSwingModel m = swing(-0.12, 0.4259, 13.3, 0.0);
    const Equilibria eq = equilibria(m);
    GridSpec spec;
    spec.n_delta = 31;
    spec.n_omega = 31;
    spec.t_max_s = 20.0;
    const RegionGrid grid = classify_grid(m, spec);
    const double level = std::min(energy(m, {eq.uep_forward_rad, 0.0}), energy(m, {eq.uep_backward_rad, 0.0}));
    const double depth = level - energy(m, {eq.sep_rad, 0.0});
    int inside = 0;
    int agree = 0;
    for (std::size_t i = 0; i < grid.delta_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.omega_axis.size(); ++j) {
            const SyncState s{grid.delta_axis[i], grid.omega_axis[j]};
            const double v = energy(m, s);
            if (std::abs(v - level) < 0.02 * depth) {
                continue;  // the boundary passes through this cell
            }
            if (v < level && s.delta_rad > eq.uep_backward_rad && s.delta_rad < eq.uep_forward_rad) {
                ++inside;
                agree += grid.at(i, j) == RegionLabel::Stable;
            }
        }
    }
    REQUIRE(inside > 0);
    CHECK(agree >= 0.99 * inside);
}
