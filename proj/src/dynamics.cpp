#include "cylsim/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace cylsim {

void ManipulatorParams::validate() const {
    if (!(m1 > 0.0) || !(m2 > 0.0) || !(m3 > 0.0)) {
        throw ValidationError("masses m1, m2, m3 must be > 0");
    }
    if (!(i3 > 0.0)) throw ValidationError("moment of inertia i3 must be > 0");
    if (!(g >= 0.0)) throw ValidationError("gravity g must be >= 0");
    if (!(friction.array() >= 0.0).all()) {
        throw ValidationError("friction coefficients must be >= 0");
    }
    if (!(regularize_mass >= 0.0)) {
        throw ValidationError("regularize_mass must be >= 0");
    }
}

Mat3 mass_matrix(const Vec3& q, const ManipulatorParams& p) {
    const double st = std::sin(q[0]);
    const double ct = std::cos(q[0]);
    const double q3 = q[2];

    Mat3 m = Mat3::Zero();
    m(0, 0) = (4.0 * p.m1 * st - 4.0 * p.m2 * ct) * q3 + p.i3;
    m(0, 2) = (p.m1 + p.m2) * st * ct * q3;
    m(1, 1) = p.m3;
    m(2, 0) = p.m1 * st * ct;
    m(2, 2) = 2.0 * (p.m1 * st + p.m2 * ct);
    return m;
}

Vec3 velocity_forces(const Vec3& q, const Vec3& v, const ManipulatorParams& p) {
    const double st = std::sin(q[0]);
    const double ct = std::cos(q[0]);
    const double q3 = q[2];

    // Quadratic-velocity coefficients (columns multiply v1^2, v2^2, v3^2).
    const double a11 = (p.m1 * st - p.m2 * ct) * q3;
    const double a13 = -p.m1 * ct + p.m2 * st;
    const double a31 = 2.0 * q3 * (p.m1 * st - p.m2 * ct);
    // Cross-product coefficients (columns multiply v1v2, v1v3, v2v3).
    const double b12 = -(p.m1 + p.m2) * st * ct * q3;
    const double b32 = -(p.m1 + p.m2) * st * ct;

    Vec3 n;
    n[0] = a11 * v[0] * v[0] + a13 * v[2] * v[2] + b12 * v[0] * v[2];
    n[1] = 0.0;
    n[2] = a31 * v[0] * v[0] + b32 * v[0] * v[2];
    return n;
}

Vec3 gravity_vector(const ManipulatorParams& p) {
    return Vec3(0.0, p.g * (p.m2 + p.m3), 0.0);
}

namespace {

// |det| threshold relative to the cube of the largest row norm. The scale
// must not use the product of all rows: a singular configuration collapses
// one row, which would shrink the threshold along with the determinant.
bool near_singular(const Mat3& m, double det) {
    const double r = m.rowwise().norm().maxCoeff();
    return std::abs(det) <= 1e-12 * r * r * r;
}

std::string describe_configuration(const Vec3& q, double det) {
    std::ostringstream os;
    os << "singular mass matrix at q = (" << q[0] << ", " << q[1] << ", "
       << q[2] << "), det = " << det;
    return os.str();
}

}  // namespace

Vec3 forward_dynamics(const JointState& s, const Vec3& tau, const Vec3& d_ext,
                      const ManipulatorParams& p, MassMatrixDiag* diag) {
    Mat3 m = mass_matrix(s.q, p);
    double det = m.determinant();
    bool regularized = false;

    if (near_singular(m, det)) {
        if (p.regularize_mass > 0.0) {
            m += p.regularize_mass * Mat3::Identity();
            det = m.determinant();
            regularized = true;
        } else {
            throw SingularMassMatrix(describe_configuration(s.q, det));
        }
    }

    const Mat3 m_inv = m.inverse();
    const Vec3 rhs = tau - velocity_forces(s.q, s.v, p) -
                     p.friction.asDiagonal() * s.v - gravity_vector(p) - d_ext;

    if (diag != nullptr) {
        diag->det = det;
        diag->cond_inf =
            m.cwiseAbs().rowwise().sum().maxCoeff() *
            m_inv.cwiseAbs().rowwise().sum().maxCoeff();
        diag->regularized = regularized;
    }
    return m_inv * rhs;
}

Vec3 inverse_dynamics(const Vec3& q, const Vec3& v, const Vec3& a,
                      const ManipulatorParams& p) {
    return mass_matrix(q, p) * a + velocity_forces(q, v, p) +
           p.friction.asDiagonal() * v + gravity_vector(p);
}

}  // namespace cylsim
