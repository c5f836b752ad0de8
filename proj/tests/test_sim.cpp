#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cylsim/config.hpp"
#include "cylsim/sim.hpp"

using namespace cylsim;

namespace {

/// Shared nominal run (tuned preset gains, default config): computed once.
const SimResult& nominal_run() {
    static const SimResult result = [] {
        return simulate(SmcGains::from_genes(kTable2Gains), SimConfig{},
                        ManipulatorParams{});
    }();
    return result;
}

SimResult synthetic_trace(const std::vector<double>& ts,
                          const std::vector<Vec3>& es) {
    SimResult r;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        SimRow row{};
        row.t = ts[i];
        row.e = es[i];
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace

TEST_CASE("rk4_step leaves the state unchanged under zero derivative") {
    auto zero = [](double, const Vec3&) { return Vec3::Zero(); };
    const Vec3 x(1.0, -2.0, 3.0);
    CHECK((rk4_step(zero, 0.0, x, 0.1) - x).norm() == 0.0);
}

TEST_CASE("rk4_step matches the truncated Taylor series on xdot = x") {
    auto deriv = [](double, const double& x) { return x; };
    const double next = rk4_step(deriv, 0.0, 1.0, 0.1);
    CHECK(next == doctest::Approx(1.1051708333333332).epsilon(1e-15));
}

TEST_CASE("rk4_step halving the step shrinks global error about 16x") {
    auto deriv = [](double, const double& x) { return x; };
    auto integrate = [&](double dt) {
        double x = 1.0;
        const auto n = detail::step_count(1.0, dt);
        for (std::int64_t k = 0; k < n; ++k) {
            x = rk4_step(deriv, static_cast<double>(k) * dt, x, dt);
        }
        return x;
    };
    const double e1 = std::abs(integrate(0.1) - std::exp(1.0));
    const double e2 = std::abs(integrate(0.05) - std::exp(1.0));
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("rk4_step reports non-finite states") {
    auto blow_up = [](double, const double&) {
        return std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(rk4_step(blow_up, 0.0, 1.0, 0.1), NonFiniteState);
}

TEST_CASE("step counts align with the intended grid despite rounding") {
    CHECK(detail::step_count(2.0, 1e-4) == 20000);
    CHECK(detail::step_count(0.3, 1e-4) == 3000);
    CHECK(detail::step_count(1.0, 1e-3) == 1000);
    CHECK(detail::step_count(0.25, 0.1) == 2);
    CHECK(detail::step_count(1.0, 0.3) == 3);
}

TEST_CASE("nominal run produces the documented row grid") {
    const SimResult& r = nominal_run();
    REQUIRE(r.rows.size() == 2001);
    CHECK(r.rows.front().t == 0.0);
    CHECK(r.rows.back().t == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].t > r.rows[i - 1].t);
        CHECK(r.rows[i].t - r.rows[i - 1].t ==
              doctest::Approx(1e-3).epsilon(1e-9));
    }
}

TEST_CASE("row V equals the Lyapunov value of the row surface") {
    const SimResult& r = nominal_run();
    for (std::size_t i = 0; i < r.rows.size(); i += 97) {
        CHECK(r.rows[i].V == 0.5 * r.rows[i].s.squaredNorm());
    }
}

TEST_CASE("nominal run tracks within 0.01 after the reaching transient") {
    const Vec3 e_max = max_abs_error(nominal_run(), 0.3);
    CHECK(e_max[0] <= 0.01);
    CHECK(e_max[1] <= 0.01);
    CHECK(e_max[2] <= 0.01);
}

TEST_CASE("nominal run satisfies the sliding condition away from the band") {
    CHECK(nominal_run().metrics.lyapunov_violation_fraction < 0.01);
}

TEST_CASE("reaching law holds in finite differences during the transient") {
    SimConfig cfg;
    cfg.t_final = 0.1;
    cfg.record_stride = 1;
    const SmcGains gains = SmcGains::from_genes(kTable2Gains);
    const SimResult r = simulate(gains, cfg, ManipulatorParams{});

    for (int i = 0; i < 3; ++i) {
        std::vector<double> rel;
        for (std::size_t j = 0; j + 1 < r.rows.size(); ++j) {
            const double si = r.rows[j].s[i];
            if (std::abs(si) <= 2.0 * gains.lambda[i] * cfg.dt) continue;
            const double sdot = (r.rows[j + 1].s[i] - si) / cfg.dt;
            const double sgn = si > 0 ? 1.0 : -1.0;
            rel.push_back(std::abs(sdot + gains.lambda[i] * sgn) /
                          gains.lambda[i]);
        }
        REQUIRE(rel.size() > 50);
        std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
        CHECK(rel[rel.size() / 2] < 0.05);
    }
}

TEST_CASE("on-trajectory start stays on the reference to integration noise") {
    SimConfig cfg;
    cfg.t_final = 1.0;
    const RefSample start = reference_at(0.0, cfg.reference);
    cfg.initial.q = start.pos;
    cfg.initial.v = start.vel;

    const SimResult r =
        simulate(SmcGains::from_genes(kBaselineGains), cfg, ManipulatorParams{});
    CHECK(max_abs_error(r, 0.0).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("rows before the disturbance onset are unaffected by it") {
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.record_stride = 1;
    const SmcGains gains = SmcGains::from_genes(kBaselineGains);

    const SimResult clean = simulate(gains, cfg, ManipulatorParams{});
    cfg.disturbance = DisturbanceSpec{};
    const SimResult kicked = simulate(gains, cfg, ManipulatorParams{});

    REQUIRE(clean.rows.size() == kicked.rows.size());
    for (std::size_t j = 0; j < clean.rows.size(); ++j) {
        if (clean.rows[j].t >= 0.5) break;
        CHECK((clean.rows[j].q - kicked.rows[j].q).norm() == 0.0);
        CHECK((clean.rows[j].v - kicked.rows[j].v).norm() == 0.0);
        CHECK((clean.rows[j].tau - kicked.rows[j].tau).norm() == 0.0);
    }
    // ... and the kick is visible afterwards: the joint-3 trajectories
    // diverge once the force is active.
    double divergence = 0.0;
    for (std::size_t j = 0; j < clean.rows.size(); ++j) {
        if (clean.rows[j].t < 0.5) continue;
        divergence = std::max(
            divergence, std::abs(clean.rows[j].q[2] - kicked.rows[j].q[2]));
    }
    CHECK(divergence > 1e-3);
}

TEST_CASE("ise examples") {
    CHECK(ise(synthetic_trace({0.0, 1.0, 2.0},
                              {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()})) ==
          0.0);
    CHECK(ise(synthetic_trace({0.0, 1.0, 2.0},
                              {Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0)})) ==
          doctest::Approx(2.0).epsilon(1e-12));

    std::vector<double> ts;
    std::vector<Vec3> es;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 1e-3 * k;
        ts.push_back(t);
        es.push_back(Vec3(t, 0, 0));
    }
    CHECK(ise(synthetic_trace(ts, es)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("max_abs_error examples") {
    CHECK(max_abs_error(synthetic_trace({0.0, 1.0}, {Vec3::Zero(), Vec3::Zero()}),
                        0.0)
              .norm() == 0.0);

    std::vector<double> ts;
    std::vector<Vec3> es;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 1e-3 * k;
        ts.push_back(t);
        es.push_back(Vec3(std::sin(2.0 * std::numbers::pi * t), 0, 0));
    }
    const SimResult r = synthetic_trace(ts, es);
    CHECK(max_abs_error(r, 0.0)[0] ==
          doctest::Approx(1.0).epsilon(2.0 * std::numbers::pi * 1e-3));
    // A window can exclude the early peak.
    CHECK(max_abs_error(r, 0.9)[0] < 0.9);
}

TEST_CASE("open-loop force balance holds the state still") {
    ManipulatorParams p;
    const Vec3 q0(0.3, 0.0, 0.2);
    const Vec3 tau = gravity_vector(p);  // v = 0 makes n vanish

    using Vec6 = Eigen::Matrix<double, 6, 1>;
    auto deriv = [&](double, const Vec6& x) -> Vec6 {
        const JointState js{x.head<3>(), x.tail<3>()};
        Vec6 dx;
        dx.head<3>() = js.v;
        dx.tail<3>() = forward_dynamics(js, tau, Vec3::Zero(), p);
        return dx;
    };
    Vec6 x;
    x.head<3>() = q0;
    x.tail<3>().setZero();
    for (int k = 0; k < 1000; ++k) {
        x = rk4_step(deriv, k * 1e-3, x, 1e-3);
    }
    CHECK((x.head<3>() - q0).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(x.tail<3>().lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("simulate is deterministic") {
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.3;
    cfg.record_stride = 1;
    const SmcGains gains = SmcGains::from_genes(kBaselineGains);
    const SimResult a = simulate(gains, cfg, ManipulatorParams{});
    const SimResult b = simulate(gains, cfg, ManipulatorParams{});
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t j = 0; j < a.rows.size(); ++j) {
        CHECK((a.rows[j].q - b.rows[j].q).norm() == 0.0);
        CHECK((a.rows[j].v - b.rows[j].v).norm() == 0.0);
        CHECK((a.rows[j].tau - b.rows[j].tau).norm() == 0.0);
    }
    CHECK(a.metrics.ise == b.metrics.ise);
}

TEST_CASE("simulation failures carry the failing timestamp") {
    SUBCASE("singular start configuration") {
        ManipulatorParams p;
        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_final = 0.1;
        cfg.initial.q = Vec3(0.0, 0.0, 1.0 / (4.0 * p.m2));
        try {
            simulate(SmcGains::from_genes(kTable2Gains), cfg, p);
            FAIL("expected SingularMassMatrix");
        } catch (const SingularMassMatrix& e) {
            CHECK(std::string(e.what()).find("t = ") != std::string::npos);
        }
    }
    SUBCASE("divergent gains blow the run up") {
        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_final = 0.5;
        SmcGains gains = SmcGains::from_genes(kTable2Gains);
        gains.c_rate = Vec3::Constant(1e-9);
        // The overflow can surface as a non-finite state or as a (numerically)
        // degenerate mass matrix, depending on which quantity saturates first.
        try {
            simulate(gains, cfg, ManipulatorParams{});
            FAIL("expected the simulation to fail");
        } catch (const NonFiniteState& e) {
            CHECK(std::string(e.what()).find("t = ") != std::string::npos);
        } catch (const SingularMassMatrix& e) {
            CHECK(std::string(e.what()).find("t = ") != std::string::npos);
        }
    }
}

TEST_CASE("non-divisible stride keeps uniform spacing") {
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.record_stride = 7;
    const SimResult r =
        simulate(SmcGains::from_genes(kBaselineGains), cfg, ManipulatorParams{});
    CHECK(r.rows.size() == 143);  // floor(1000/7) + 1
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].t - r.rows[i - 1].t ==
              doctest::Approx(7e-3).epsilon(1e-9));
    }
}

TEST_CASE("config validation rejects bad values") {
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("dt") {
        cfg.dt = -1.0;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
    SUBCASE("stride") {
        cfg.record_stride = 0;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
    SUBCASE("horizon shorter than one step") {
        cfg.t_final = 1e-6;
        cfg.dt = 1e-3;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
    SUBCASE("emax window outside the run") {
        cfg.emax_window_start = 3.0;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
    SUBCASE("disturbance joint out of range") {
        DisturbanceSpec d;
        d.joint = 4;
        cfg.disturbance = d;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
    SUBCASE("pulse requires finite duration") {
        DisturbanceSpec d;
        d.shape = DisturbanceSpec::Shape::pulse;
        cfg.disturbance = d;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
        cfg.disturbance->duration = 0.2;
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("disturbance activity window is half-open") {
    DisturbanceSpec d;
    d.start = 0.5;
    d.duration = 0.25;
    CHECK_FALSE(d.active_at(0.49));
    CHECK(d.active_at(0.5));
    CHECK(d.active_at(0.74));
    CHECK_FALSE(d.active_at(0.75));

    DisturbanceSpec step;
    CHECK(step.active_at(1e9));
}
