#pragma once

#include "cylsim/control.hpp"
#include "cylsim/dynamics.hpp"
#include "cylsim/reference.hpp"
#include "cylsim/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace cylsim {

/// Constant generalized force applied to one joint over a time window.
/// `step` keeps the default infinite duration; `pulse` requires a finite
/// one. In both cases the force is active for start <= t < start+duration.
struct DisturbanceSpec {
    int joint = 3;  ///< 1-based joint index
    double start = 0.5;
    double duration = std::numeric_limits<double>::infinity();
    double magnitude = 100.0;
    enum class Shape { step, pulse };
    Shape shape = Shape::step;

    void validate() const;
    bool active_at(double t) const { return t >= start && t < start + duration; }
};

struct SimConfig {
    double dt = 1e-4;
    double t_final = 2.0;
    JointState initial{Vec3(0.01, 0.01, 0.01), Vec3::Zero()};
    ReferenceSpec reference;
    std::optional<DisturbanceSpec> disturbance;
    SwitchingMode switching;
    int record_stride = 10;         ///< steps between recorded rows
    double emax_window_start = 0.0; ///< start of the e_max metric window (s)

    void validate() const;
};

struct SimRow {
    double t;
    Vec3 q;
    Vec3 v;
    Vec3 e;
    Vec3 edot;
    Vec3 s;
    Vec3 tau;
    double V;
};

struct SimMetrics {
    double ise = 0.0;
    Vec3 e_max = Vec3::Zero();        ///< per-joint max |e| over the window
    double emax_window_start = 0.0;
    /// Fraction of recorded samples outside the chattering band where the
    /// sliding condition s*sdot <= -(lambda/2)|s| fails (sdot by finite
    /// difference over the recording interval).
    double lyapunov_violation_fraction = 0.0;
    // Mass-matrix diagnostics aggregated over the run.
    double min_abs_det = std::numeric_limits<double>::infinity();
    double max_cond = 0.0;
    long det_sign_flips = 0;
};

struct SimResult {
    std::vector<SimRow> rows;
    SimMetrics metrics;
};

namespace detail {

template <class T>
bool all_finite(const T& x) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::isfinite(static_cast<double>(x));
    } else {
        return x.allFinite();
    }
}

/// Number of integration steps covering [0, t_final]; ratios within 1e-9 of
/// the next integer round up so that horizons like 2.0 / 1e-4 land on the
/// intended step count.
std::int64_t step_count(double t_final, double dt);

}  // namespace detail

/// Classical 4th-order Runge-Kutta update. `deriv(t, x)` returns dx/dt;
/// State may be a scalar or any Eigen vector. Throws NonFiniteState when
/// the updated state contains a NaN or infinity.
template <class State, class Deriv>
State rk4_step(Deriv&& deriv, double t, const State& x, double dt) {
    const State k1 = deriv(t, x);
    const State k2 = deriv(t + 0.5 * dt, State(x + 0.5 * dt * k1));
    const State k3 = deriv(t + 0.5 * dt, State(x + 0.5 * dt * k2));
    const State k4 = deriv(t + dt, State(x + dt * k3));
    State next = State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!detail::all_finite(next)) {
        throw NonFiniteState("non-finite state after step from t = " + std::to_string(t));
    }
    return next;
}

/// Closed-loop run: the controller torque and the disturbance force are
/// evaluated at every RK4 stage as functions of the stage time and state, so
/// the model-based torque terms cancel the plant terms at the state being
/// solved even where the mass-matrix determinant passes through zero.
/// Deterministic: identical inputs produce bit-identical results. Throws
/// SingularMassMatrix / NonFiniteState tagged with the failing timestamp.
SimResult simulate(const SmcGains& gains, const SimConfig& cfg,
                   const ManipulatorParams& p);

/// Trapezoidal integral of e1^2 + e2^2 + e3^2 over the recorded rows.
double ise(const SimResult& result);

/// Per-joint max |e_i(t)| over rows with t >= window_start.
Vec3 max_abs_error(const SimResult& result, double window_start);

}  // namespace cylsim
