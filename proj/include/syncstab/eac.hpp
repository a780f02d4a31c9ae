#pragma once

// Modified equal-area criterion on the fault-on relative swing model.
//
// Areas are in pu*rad. With the kinetic term of the swing equation they relate
// as S = H_vg * Omega_ref * domega^2, so the acceleration area equals the
// kinetic energy gained between the initial angle and the fault-on SEP.
// Damping is ignored here; damped outcomes come from simulation.

#include "syncstab/core_model.hpp"

#include <optional>

namespace syncstab {

enum class FirstSwing { Stable, Unstable, NoSep };
enum class SwingDirection { None, Forward, Backward };

[[nodiscard]] const char* to_string(FirstSwing c);
[[nodiscard]] const char* to_string(SwingDirection d);

struct EacResult {
    double accel_area = 0.0;  // S_plus
    double decel_area = 0.0;  // S_minus, up to the UEP in the swing direction
    double delta_s = 0.0;     // fault-on SEP
    double delta_u = 0.0;     // UEP in the swing direction
    // Extreme angle of the first swing (a minimum for backward swings).
    std::optional<double> delta_max;
    FirstSwing classification = FirstSwing::NoSep;
    SwingDirection direction = SwingDirection::None;
    bool critical = false;  // |S_plus - S_minus| below the boundary tolerance
};

inline constexpr double kEacBoundaryTolerance = 1e-9;

/// Integral of (P_syn_ref - P_syn_max sin d) over [delta_0, delta_s].
/// Throws DomainError when delta_0 > delta_s.
[[nodiscard]] double acceleration_area(const RelativeSwingModel& model, double delta_0,
                                       double delta_s);

/// Integral of (P_syn_max sin d - P_syn_ref) over [delta_s, delta_end].
/// Throws DomainError when delta_s > delta_end.
[[nodiscard]] double deceleration_area(const RelativeSwingModel& model, double delta_s,
                                       double delta_end);

/// First-swing classification from the pre-fault angle `delta_0`. The swing
/// runs toward the fault-on SEP; a backward swing is mirrored onto the
/// backward UEP. An initial angle already past a UEP is Unstable.
[[nodiscard]] EacResult classify_first_swing(const RelativeSwingModel& model, double delta_0,
                                             double boundary_tolerance = kEacBoundaryTolerance);

}  // namespace syncstab
