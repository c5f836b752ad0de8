#pragma once

#include "cylsim/types.hpp"

namespace cylsim {

/// Per-solve diagnostics of the mass matrix.
struct MassMatrixDiag {
    double det = 0.0;        ///< determinant of M(q)
    double cond_inf = 0.0;   ///< infinity-norm condition estimate
    bool regularized = false;
};

/// Inertia matrix M(q) of the arm, entry for entry:
///   M11 = (4 m1 sin(t1) - 4 m2 cos(t1)) q3 + I3
///   M13 = (m1 + m2) sin(t1) cos(t1) q3
///   M22 = m3
///   M31 = m1 sin(t1) cos(t1)
///   M33 = 2 (m1 sin(t1) + m2 cos(t1))
/// and zero elsewhere. The matrix is intentionally not symmetrized; the
/// controller inverts the same model, so the closed loop stays
/// model-matched.
Mat3 mass_matrix(const Vec3& q, const ManipulatorParams& p);

/// Velocity-product forces n(q, v): the quadratic and cross terms that make
/// up C(q, v) v for this arm.
Vec3 velocity_forces(const Vec3& q, const Vec3& v, const ManipulatorParams& p);

/// Gravity loads. Only the vertical prismatic joint carries weight, so the
/// vector is (0, g (m2 + m3), 0) for every configuration.
Vec3 gravity_vector(const ManipulatorParams& p);

/// Joint accelerations solving
///   M(q) a = tau - n(q, v) - diag(friction) v - G - d_ext.
/// Throws SingularMassMatrix when |det M| drops below 1e-12 times the cube
/// of the largest row norm, unless params.regularize_mass > 0, in which
/// case epsilon*I is added and the solve proceeds. `diag`, when given,
/// receives determinant and conditioning info for the solve.
Vec3 forward_dynamics(const JointState& s, const Vec3& tau, const Vec3& d_ext,
                      const ManipulatorParams& p, MassMatrixDiag* diag = nullptr);

/// Generalized forces tau = M(q) a + n(q, v) + diag(friction) v + G.
Vec3 inverse_dynamics(const Vec3& q, const Vec3& v, const Vec3& a,
                      const ManipulatorParams& p);

}  // namespace cylsim
