#include "cylsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cylsim/dynamics.hpp"

namespace cylsim {

void SmcGains::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(c_err[i]) || !std::isfinite(c_rate[i]) ||
            !std::isfinite(lambda[i])) {
            throw ValidationError("controller gains must be finite");
        }
        if (!(c_rate[i] > 0.0)) {
            std::ostringstream os;
            os << "rate gain for joint " << (i + 1) << " must be > 0, got "
               << c_rate[i];
            throw GainDomainError(os.str());
        }
        if (c_err[i] < 0.0 || lambda[i] < 0.0) {
            throw ValidationError("error weights and switching gains must be >= 0");
        }
    }
}

void SwitchingMode::validate() const {
    if (kind == Kind::saturation && !(phi > 0.0)) {
        throw ValidationError("boundary layer width phi must be > 0");
    }
}

TrackingError tracking_error(const Vec3& ref_pos, const Vec3& ref_vel,
                             const JointState& state) {
    return {ref_pos - state.q, ref_vel - state.v};
}

Vec3 sliding_surface(const Vec3& e, const Vec3& edot, const SmcGains& g) {
    return g.c_err.cwiseProduct(e) + g.c_rate.cwiseProduct(edot);
}

double switching_value(double s, const SwitchingMode& mode) {
    if (mode.kind == SwitchingMode::Kind::saturation) {
        return std::clamp(s / mode.phi, -1.0, 1.0);
    }
    if (s > 0.0) return 1.0;
    if (s < 0.0) return -1.0;
    return 0.0;
}

Vec3 smc_torque(const JointState& state, const RefSample& ref,
                const SmcGains& gains, const SwitchingMode& mode,
                const ManipulatorParams& params) {
    gains.validate();
    const TrackingError err = tracking_error(ref.pos, ref.vel, state);
    const Vec3 s = sliding_surface(err.e, err.edot, gains);

    Vec3 a_cmd;
    for (int i = 0; i < 3; ++i) {
        a_cmd[i] = ref.acc[i] + (gains.c_err[i] / gains.c_rate[i]) * err.edot[i] +
                   (gains.lambda[i] / gains.c_rate[i]) * switching_value(s[i], mode);
    }
    return inverse_dynamics(state.q, state.v, a_cmd, params);
}

double lyapunov_value(const Vec3& s) { return 0.5 * s.squaredNorm(); }

double lyapunov_rate(const Vec3& s, const Vec3& sdot) { return s.dot(sdot); }

}  // namespace cylsim
