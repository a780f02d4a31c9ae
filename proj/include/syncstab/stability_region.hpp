#pragma once

// Stability region of a fixed relative swing model on the (delta, domega)
// phase plane: the boundary traced by reverse-time integration of the stable
// manifolds of both UEPs, and a brute-force classification grid.

#include "syncstab/core_model.hpp"
#include "syncstab/transient_sim.hpp"

#include <vector>

namespace syncstab {

using Polyline = std::vector<SyncState>;

struct RegionBoundary {
    // Four branches: forward UEP (toward decreasing delta, then increasing),
    // backward UEP (same order).
    std::vector<Polyline> branches;
    double uep_forward_rad = 0.0;
    double uep_backward_rad = 0.0;
    double sep_rad = 0.0;
    RelativeSwingModel model;
};

struct TraceOptions {
    double epsilon_rad = 1e-4;  // seed offset along the stable eigenvector
    double dt_s = 1e-3;
    double t_max_s = 100.0;
    double omega_cap_pu = 1.0;     // stop once |domega| exceeds this
    double delta_span_rad = 4.0 * 3.141592653589793;  // stop once |delta - sep| exceeds this
    std::size_t record_every = 10;
};

/// Stable manifolds of both UEPs, branches 0-1 forward and 2-3 backward.
/// With damping and P_syn_ref != 0 the higher-energy UEP can lie outside the
/// region, in which case its branches do not bound it; classify_grid decides.
/// Throws RegionUndefinedError when the model has no SEP.
[[nodiscard]] RegionBoundary trace_boundary(const RelativeSwingModel& model,
                                            const TraceOptions& options = {});

/// Stable eigenvector (delta component normalised to 1) and eigenvalue of the
/// linearisation at a saddle angle.
struct SaddleDirection {
    double eigenvalue = 0.0;
    double domega_per_rad = 0.0;
};
[[nodiscard]] SaddleDirection stable_direction(const RelativeSwingModel& model, double uep_rad);

enum class RegionLabel : unsigned char { Unstable = 0, Stable = 1 };

struct GridSpec {
    double delta_min_rad = -3.141592653589793;
    double delta_max_rad = 3.141592653589793;
    double omega_min_pu = -0.02;
    double omega_max_pu = 0.02;
    std::size_t n_delta = 41;
    std::size_t n_omega = 41;
    double t_max_s = 100.0;
    double dt_s = 1e-3;
    double band_delta_rad = 0.05;
    double band_omega_pu = 1e-4;
};

void validate(const GridSpec& spec);

struct RegionGrid {
    std::vector<double> delta_axis;
    std::vector<double> omega_axis;
    std::vector<RegionLabel> labels;  // delta-major: labels[i * n_omega + j]
    double cell_area = 0.0;           // rad * pu
    double area_estimate = 0.0;       // cell_area * count(Stable)

    [[nodiscard]] RegionLabel at(std::size_t i_delta, std::size_t j_omega) const {
        return labels[i_delta * omega_axis.size() + j_omega];
    }
    [[nodiscard]] std::size_t stable_count() const;
};

/// Label of one initial condition under the fixed model. Unstable on LOS.
/// Stable as soon as the state enters the energy well below the lower UEP
/// between the two UEPs: that set is forward invariant, and with damping every
/// orbit in it converges to the SEP. Anything still outside the well at t_max
/// is judged by the convergence band.
[[nodiscard]] RegionLabel classify_point(const RelativeSwingModel& model, const SyncState& initial,
                                         const GridSpec& spec);

/// Classifies every grid node. Throws RegionUndefinedError without an SEP.
[[nodiscard]] RegionGrid classify_grid(const RelativeSwingModel& model, const GridSpec& spec);

}  // namespace syncstab
