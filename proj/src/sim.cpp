#include "cylsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cylsim {

void DisturbanceSpec::validate() const {
    if (joint < 1 || joint > 3) {
        throw ValidationError("disturbance joint must be 1, 2 or 3");
    }
    if (!std::isfinite(start) || start < 0.0) {
        throw ValidationError("disturbance start must be finite and >= 0");
    }
    if (!(duration > 0.0)) {
        throw ValidationError("disturbance duration must be > 0");
    }
    if (shape == Shape::pulse && !std::isfinite(duration)) {
        throw ValidationError("pulse disturbance requires a finite duration");
    }
    if (!std::isfinite(magnitude)) {
        throw ValidationError("disturbance magnitude must be finite");
    }
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt must be finite and > 0");
    }
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw ValidationError("t_final must be finite and > 0");
    }
    if (detail::step_count(t_final, dt) < 1) {
        throw ValidationError("t_final must cover at least one step of dt");
    }
    if (!initial.finite()) {
        throw ValidationError("initial state must be finite");
    }
    if (record_stride < 1) {
        throw ValidationError("record_stride must be >= 1");
    }
    if (!std::isfinite(emax_window_start) || emax_window_start < 0.0 ||
        emax_window_start > t_final) {
        throw ValidationError("emax_window must lie within [0, t_final]");
    }
    reference.validate();
    switching.validate();
    if (disturbance) disturbance->validate();
}

namespace detail {

std::int64_t step_count(double t_final, double dt) {
    const double r = t_final / dt;
    auto n = static_cast<std::int64_t>(std::floor(r));
    if (r - static_cast<double>(n) > 1.0 - 1e-9) ++n;
    return n;
}

}  // namespace detail

namespace {

Vec3 disturbance_force(const std::optional<DisturbanceSpec>& spec, double t) {
    Vec3 d = Vec3::Zero();
    if (spec && spec->active_at(t)) {
        d[spec->joint - 1] = spec->magnitude;
    }
    return d;
}

struct PlantState {
    Vec3 q;
    Vec3 v;

    bool allFinite() const { return q.allFinite() && v.allFinite(); }
};

PlantState operator+(const PlantState& a, const PlantState& b) {
    return {a.q + b.q, a.v + b.v};
}

PlantState operator*(double k, const PlantState& x) { return {k * x.q, k * x.v}; }

}  // namespace

SimResult simulate(const SmcGains& gains, const SimConfig& cfg,
                   const ManipulatorParams& p) {
    cfg.validate();
    p.validate();
    gains.validate();

    const std::int64_t n_steps = detail::step_count(cfg.t_final, cfg.dt);

    SimResult out;
    out.rows.reserve(static_cast<std::size_t>(n_steps / cfg.record_stride) + 2);
    out.metrics.emax_window_start = cfg.emax_window_start;

    // Mass-matrix diagnostics fold in every solve, including RK4 stages.
    double prev_det = 0.0;
    bool have_prev_det = false;
    auto fold_diag = [&](const MassMatrixDiag& d) {
        out.metrics.min_abs_det = std::min(out.metrics.min_abs_det, std::abs(d.det));
        out.metrics.max_cond = std::max(out.metrics.max_cond, d.cond_inf);
        if (have_prev_det && std::signbit(d.det) != std::signbit(prev_det)) {
            ++out.metrics.det_sign_flips;
        }
        prev_det = d.det;
        have_prev_det = true;
    };

    PlantState state{cfg.initial.q, cfg.initial.v};

    auto record = [&](double t, const PlantState& x, const Vec3& tau) {
        const RefSample ref = reference_at(t, cfg.reference);
        const JointState js{x.q, x.v};
        const TrackingError err = tracking_error(ref.pos, ref.vel, js);
        const Vec3 s = sliding_surface(err.e, err.edot, gains);
        out.rows.push_back(
            {t, x.q, x.v, err.e, err.edot, s, tau, lyapunov_value(s)});
    };

    // Torque is a pure function of stage time and stage state, evaluated at
    // every integrator stage. The model-based part of the torque then cancels
    // the plant terms at the exact state being solved, so near-zero mass
    // determinants (the reference path sweeps through two determinant zero
    // crossings per period) amplify only rounding noise. A torque held across
    // the whole step leaves an O(dt) model mismatch that those crossings
    // amplify without bound.
    auto torque_at = [&](double tt, const PlantState& x) {
        return smc_torque(JointState{x.q, x.v}, reference_at(tt, cfg.reference),
                          gains, cfg.switching, p);
    };
    auto deriv = [&](double tt, const PlantState& x) -> PlantState {
        MassMatrixDiag diag;
        const Vec3 a = forward_dynamics(JointState{x.q, x.v}, torque_at(tt, x),
                                        disturbance_force(cfg.disturbance, tt),
                                        p, &diag);
        fold_diag(diag);
        return {x.v, a};
    };

    double t = 0.0;
    try {
        for (std::int64_t k = 0; k < n_steps; ++k) {
            t = static_cast<double>(k) * cfg.dt;
            if (k % cfg.record_stride == 0) record(t, state, torque_at(t, state));
            state = rk4_step(deriv, t, state, cfg.dt);
        }
        // The final state is recorded only when it falls on the stride grid;
        // rows keep a uniform spacing of record_stride * dt.
        if (n_steps % cfg.record_stride == 0) {
            t = static_cast<double>(n_steps) * cfg.dt;
            record(t, state, torque_at(t, state));
        }
    } catch (const SingularMassMatrix& e) {
        std::ostringstream os;
        os << "singular mass matrix at t = " << t << ": " << e.what();
        throw SingularMassMatrix(os.str());
    } catch (const NonFiniteState& e) {
        std::ostringstream os;
        os << "non-finite state at t = " << t << ": " << e.what();
        throw NonFiniteState(os.str());
    }

    out.metrics.ise = ise(out);
    out.metrics.e_max = max_abs_error(out, cfg.emax_window_start);

    // Sliding-condition audit on the recorded grid: outside a band around
    // the surface (boundary layer, or the distance one sampling interval of
    // full-rate reaching can cross), demand s * sdot <= -(lambda/2)|s|.
    long counted = 0;
    long violated = 0;
    for (std::size_t j = 0; j + 1 < out.rows.size(); ++j) {
        const double h = out.rows[j + 1].t - out.rows[j].t;
        if (!(h > 0.0)) continue;
        for (int i = 0; i < 3; ++i) {
            const double si = out.rows[j].s[i];
            const double band =
                std::max(cfg.switching.kind == SwitchingMode::Kind::saturation
                             ? cfg.switching.phi
                             : 0.0,
                         2.0 * gains.lambda[i] * h);
            if (std::abs(si) <= band) continue;
            const double sdot_fd = (out.rows[j + 1].s[i] - si) / h;
            ++counted;
            if (si * sdot_fd > -0.5 * gains.lambda[i] * std::abs(si)) ++violated;
        }
    }
    out.metrics.lyapunov_violation_fraction =
        counted > 0 ? static_cast<double>(violated) / static_cast<double>(counted)
                    : 0.0;

    return out;
}

double ise(const SimResult& result) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < result.rows.size(); ++j) {
        const double h = result.rows[j + 1].t - result.rows[j].t;
        const double f0 = result.rows[j].e.squaredNorm();
        const double f1 = result.rows[j + 1].e.squaredNorm();
        acc += 0.5 * (f0 + f1) * h;
    }
    return acc;
}

Vec3 max_abs_error(const SimResult& result, double window_start) {
    Vec3 m = Vec3::Zero();
    for (const SimRow& row : result.rows) {
        if (row.t < window_start - 1e-12) continue;
        m = m.cwiseMax(row.e.cwiseAbs());
    }
    return m;
}

}  // namespace cylsim
