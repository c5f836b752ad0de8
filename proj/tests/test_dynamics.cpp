#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cylsim/dynamics.hpp"

using namespace cylsim;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("mass matrix at the zero configuration is diagonal") {
    ManipulatorParams p;
    const Mat3 m = mass_matrix(Vec3::Zero(), p);
    CHECK(m(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m(1, 1) == doctest::Approx(23.735183).epsilon(1e-12));
    CHECK(m(2, 2) == doctest::Approx(25.264444).epsilon(1e-12));
    CHECK(m(0, 2) == 0.0);
    CHECK(m(2, 0) == 0.0);
}

TEST_CASE("mass matrix entries match hand evaluation at theta1=0.5, q3=0.2") {
    ManipulatorParams p;
    const Mat3 m = mass_matrix(Vec3(0.5, -1.3, 0.2), p);
    CHECK(m(0, 0) == doctest::Approx(6.079715987707406).epsilon(1e-12));
    CHECK(m(0, 2) == doctest::Approx(4.12317643869096).epsilon(1e-12));
    CHECK(m(2, 0) == doctest::Approx(15.30105805012881).epsilon(1e-12));
    CHECK(m(2, 2) == doctest::Approx(57.04256094978023).epsilon(1e-12));
    CHECK(m(1, 1) == doctest::Approx(23.735183).epsilon(1e-12));
}

TEST_CASE("mass matrix M33 at theta1=pi/2 is 2*m1") {
    ManipulatorParams p;
    const Mat3 m = mass_matrix(Vec3(kPi / 2.0, 0.0, 0.7), p);
    CHECK(m(2, 2) == doctest::Approx(72.73481).epsilon(1e-12));
}

TEST_CASE("mass matrix structural zeros hold for arbitrary configurations") {
    ManipulatorParams p;
    for (double t1 : {-1.2, 0.0, 0.4, 2.9}) {
        for (double q3 : {-0.8, 0.05, 1.7}) {
            const Mat3 m = mass_matrix(Vec3(t1, 0.3, q3), p);
            CHECK(m(0, 1) == 0.0);
            CHECK(m(1, 0) == 0.0);
            CHECK(m(1, 2) == 0.0);
            CHECK(m(2, 1) == 0.0);
        }
    }
}

TEST_CASE("velocity forces vanish at zero velocity") {
    ManipulatorParams p;
    CHECK(velocity_forces(Vec3(0.7, 0.1, 0.4), Vec3::Zero(), p).norm() == 0.0);
}

TEST_CASE("velocity forces match hand evaluation") {
    ManipulatorParams p;

    SUBCASE("theta1=0, q3=0.1, v=(1,0,0)") {
        const Vec3 n = velocity_forces(Vec3(0.0, 0.0, 0.1), Vec3(1, 0, 0), p);
        CHECK(n[0] == doctest::Approx(-1.2632222).epsilon(1e-12));
        CHECK(n[1] == 0.0);
        CHECK(n[2] == doctest::Approx(-2.5264444).epsilon(1e-12));
    }
    SUBCASE("theta1=pi/4, v=(0,0,1)") {
        const Vec3 n = velocity_forces(Vec3(kPi / 4.0, 0.0, 0.3), Vec3(0, 0, 1), p);
        CHECK(n[0] == doctest::Approx(-16.783308852003664).epsilon(1e-12));
        CHECK(n[1] == 0.0);
        CHECK(n[2] == 0.0);
    }
}

TEST_CASE("velocity forces are homogeneous of degree 2 in velocity") {
    ManipulatorParams p;
    const Vec3 q(0.9, -0.2, 0.6);
    const Vec3 v(0.4, -1.1, 0.8);
    for (double k : {-2.0, 0.5, 3.0}) {
        const Vec3 lhs = velocity_forces(q, k * v, p);
        const Vec3 rhs = k * k * velocity_forces(q, v, p);
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("gravity vector") {
    SUBCASE("default parameters") {
        ManipulatorParams p;
        const Vec3 g = gravity_vector(p);
        CHECK(g[0] == 0.0);
        CHECK(g[1] == doctest::Approx(356.400569).epsilon(1e-12));
        CHECK(g[2] == 0.0);
    }
    SUBCASE("zero gravity") {
        ManipulatorParams p;
        p.g = 0.0;
        CHECK(gravity_vector(p).norm() == 0.0);
    }
    SUBCASE("unit masses") {
        ManipulatorParams p;
        p.m2 = 1.0;
        p.m3 = 1.0;
        CHECK(gravity_vector(p)[1] == doctest::Approx(19.6).epsilon(1e-12));
    }
}

TEST_CASE("forward dynamics force balance gives zero acceleration") {
    ManipulatorParams p;
    p.friction = Vec3(0.5, 0.4, 0.3);
    const JointState s{Vec3(0.4, 0.1, 0.3), Vec3(0.1, -0.3, 0.2)};
    const Vec3 d_ext(2.0, -1.0, 0.5);
    const Vec3 tau = velocity_forces(s.q, s.v, p) +
                     Vec3(p.friction.cwiseProduct(s.v)) + gravity_vector(p) +
                     d_ext;
    const Vec3 a = forward_dynamics(s, tau, d_ext, p);
    CHECK(a.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("forward dynamics hand evaluation at the zero configuration") {
    ManipulatorParams p;
    const JointState s{Vec3::Zero(), Vec3::Zero()};
    const Vec3 a =
        forward_dynamics(s, Vec3(1.0, 356.400569, 0.0), Vec3::Zero(), p);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(a[1]) < 1e-12);
    CHECK(std::abs(a[2]) < 1e-12);
}

TEST_CASE("inverse dynamics hand evaluations") {
    ManipulatorParams p;
    SUBCASE("rest: only gravity remains") {
        const Vec3 tau =
            inverse_dynamics(Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
        CHECK(tau[0] == 0.0);
        CHECK(tau[1] == doctest::Approx(356.400569).epsilon(1e-12));
        CHECK(tau[2] == 0.0);
    }
    SUBCASE("unit acceleration on joint 1 at the zero configuration") {
        const Vec3 tau =
            inverse_dynamics(Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0), p);
        CHECK(tau[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tau[1] == doctest::Approx(356.400569).epsilon(1e-12));
        CHECK(tau[2] == 0.0);
    }
}

TEST_CASE("forward/inverse round trip") {
    ManipulatorParams p;
    p.friction = Vec3(0.2, 0.1, 0.05);
    const JointState s{Vec3(0.4, 0.1, 0.3), Vec3(0.1, -0.3, 0.2)};
    const Vec3 a0(0.3, -0.2, 0.5);
    const Vec3 tau = inverse_dynamics(s.q, s.v, a0, p);
    const Vec3 a = forward_dynamics(s, tau, Vec3::Zero(), p);
    CHECK((a - a0).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("singular configuration raises, regularization recovers") {
    ManipulatorParams p;
    // theta1 = 0 makes M11 = -4 m2 q3 + I3, which crosses zero at
    // q3 = 1/(4 m2); with the zero off-diagonals there the determinant
    // vanishes.
    const double q3 = 1.0 / (4.0 * p.m2);
    const JointState s{Vec3(0.0, 0.0, q3), Vec3::Zero()};

    CHECK_THROWS_AS(forward_dynamics(s, Vec3::Zero(), Vec3::Zero(), p),
                    SingularMassMatrix);
    CHECK_THROWS_WITH_AS(forward_dynamics(s, Vec3::Zero(), Vec3::Zero(), p),
                         doctest::Contains("singular mass matrix"),
                         SingularMassMatrix);

    p.regularize_mass = 1e-6;
    MassMatrixDiag diag;
    const Vec3 a = forward_dynamics(s, Vec3::Zero(), Vec3::Zero(), p, &diag);
    CHECK(diag.regularized);
    CHECK(a.allFinite());
}

TEST_CASE("mass matrix diagnostics are populated") {
    ManipulatorParams p;
    const JointState s{Vec3(0.5, 0.0, 0.2), Vec3::Zero()};
    MassMatrixDiag diag;
    forward_dynamics(s, Vec3::Zero(), Vec3::Zero(), p, &diag);
    CHECK(diag.det != 0.0);
    CHECK(diag.cond_inf >= 1.0);
    CHECK_FALSE(diag.regularized);
}

TEST_CASE("parameter validation rejects nonphysical values") {
    ManipulatorParams p;
    p.m1 = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);

    ManipulatorParams p2;
    p2.friction = Vec3(-0.1, 0, 0);
    CHECK_THROWS_AS(p2.validate(), ValidationError);

    ManipulatorParams ok;
    CHECK_NOTHROW(ok.validate());
}
