#pragma once

#include "cylsim/types.hpp"

#include <numbers>

namespace cylsim {

/// Desired trajectory sample: position, velocity and acceleration of each
/// joint. vel and acc are the exact analytic derivatives of pos.
struct RefSample {
    Vec3 pos;
    Vec3 vel;
    Vec3 acc;
};

/// Sinusoidal joint-space reference A sin(w t + phase), identical for all
/// three joints.
struct ReferenceSpec {
    double amplitude = 1.0;
    double omega = 2.0 * std::numbers::pi;
    double phase = std::numbers::pi / 2.0;

    void validate() const;
};

RefSample reference_at(double t, const ReferenceSpec& spec);

}  // namespace cylsim
