#include "cylsim/reference.hpp"

#include <cmath>

#include "cylsim/types.hpp"

namespace cylsim {

void ReferenceSpec::validate() const {
    if (!std::isfinite(amplitude) || !std::isfinite(omega) ||
        !std::isfinite(phase)) {
        throw ValidationError("reference parameters must be finite");
    }
    if (!(omega > 0.0)) {
        throw ValidationError("reference omega must be > 0");
    }
}

RefSample reference_at(double t, const ReferenceSpec& ref) {
    const double arg = ref.omega * t + ref.phase;
    const double s = std::sin(arg);
    const double c = std::cos(arg);

    RefSample out;
    out.pos = Vec3::Constant(ref.amplitude * s);
    out.vel = Vec3::Constant(ref.amplitude * ref.omega * c);
    out.acc = Vec3::Constant(-ref.amplitude * ref.omega * ref.omega * s);
    return out;
}

}  // namespace cylsim
