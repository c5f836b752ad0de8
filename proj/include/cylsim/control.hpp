#pragma once

#include "cylsim/reference.hpp"
#include "cylsim/types.hpp"

namespace cylsim {

struct TrackingError {
    Vec3 e;     ///< desired minus actual position
    Vec3 edot;  ///< desired minus actual velocity
};

TrackingError tracking_error(const Vec3& ref_pos, const Vec3& ref_vel,
                             const JointState& s);

/// Sliding surface s_i = c_err_i * e_i + c_rate_i * edot_i.
Vec3 sliding_surface(const Vec3& e, const Vec3& edot, const SmcGains& g);

/// Switching function: sign(s) with sign(0) = 0, or clamp(s/phi, -1, 1) in
/// saturation mode.
double switching_value(double s, const SwitchingMode& mode);

/// Sliding-mode control torque.
///
/// Per joint the commanded acceleration is
///   a_i = ref.acc_i + (c_err_i / c_rate_i) edot_i
///                   + (lambda_i / c_rate_i) * sigma(s_i)
/// realized through inverse dynamics. Substituted into the exact
/// undisturbed plant this yields the reaching law
///   sdot_i = -lambda_i * sigma(s_i)
/// identically. Throws GainDomainError when any c_rate_i <= 0.
Vec3 smc_torque(const JointState& s, const RefSample& ref, const SmcGains& g,
                const SwitchingMode& mode, const ManipulatorParams& p);

/// V = 1/2 sum s_i^2.
double lyapunov_value(const Vec3& s);

/// Vdot = sum s_i sdot_i.
double lyapunov_rate(const Vec3& s, const Vec3& sdot);

}  // namespace cylsim
