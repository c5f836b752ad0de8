#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace cylsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A config value or parameter violates a documented invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mass matrix determinant fell below the singularity threshold.
class SingularMassMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration produced a NaN or infinite state component.
class NonFiniteState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rate gains c2, c4, c6 must be strictly positive: they divide in the
/// control law.
class GainDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical constants of the 3-DOF cylindrical arm (one revolute joint
/// theta1, two prismatic joints q2, q3).
struct ManipulatorParams {
    double m1 = 36.367405;       ///< mass of joint 1 (kg)
    double m2 = 12.632222;       ///< mass of joint 2 (kg)
    double m3 = 23.735183;       ///< mass of joint 3 (kg)
    double i3 = 1.0;             ///< moment of inertia of joint 3 (kg m^2)
    double g = 9.8;              ///< gravitational acceleration (m/s^2)
    Vec3 friction = Vec3::Zero();  ///< viscous friction per joint, default off

    /// When > 0, epsilon*I is added to the mass matrix whenever its
    /// determinant falls below the singularity threshold instead of
    /// aborting. Default off.
    double regularize_mass = 0.0;

    void validate() const;
};

/// Generalized positions (rad, m, m) and velocities of the three joints.
struct JointState {
    Vec3 q = Vec3::Zero();
    Vec3 v = Vec3::Zero();

    bool finite() const { return q.allFinite() && v.allFinite(); }
};

/// The nine tunable controller parameters. Gene order in the optimizer is
/// (c1, c2, c3, c4, c5, c6, lambda1, lambda2, lambda3): c_err holds the
/// odd-index surface coefficients, c_rate the even-index ones.
struct SmcGains {
    Vec3 c_err;    ///< error weights on the sliding surface (c1, c3, c5)
    Vec3 c_rate;   ///< error-rate weights (c2, c4, c6); must be > 0
    Vec3 lambda;   ///< reaching-law switching gains

    static SmcGains from_genes(const std::array<double, 9>& genes) {
        SmcGains g;
        g.c_err = Vec3(genes[0], genes[2], genes[4]);
        g.c_rate = Vec3(genes[1], genes[3], genes[5]);
        g.lambda = Vec3(genes[6], genes[7], genes[8]);
        return g;
    }

    std::array<double, 9> to_genes() const {
        return {c_err[0], c_rate[0], c_err[1], c_rate[1], c_err[2], c_rate[2],
                lambda[0], lambda[1], lambda[2]};
    }

    /// Full invariant check (c_rate > 0, c_err >= 0, lambda >= 0).
    void validate() const;
};

/// Switching function selection. Pure sign is the default; the saturation
/// variant linearizes the switch inside a boundary layer of half-width phi
/// to mitigate chattering.
struct SwitchingMode {
    enum class Kind { sign, saturation };
    Kind kind = Kind::sign;
    double phi = 0.01;  ///< boundary-layer half-width, saturation only

    void validate() const;
};

}  // namespace cylsim
