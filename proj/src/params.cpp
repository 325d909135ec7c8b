#include "vtrack/params.hpp"

#include <algorithm>
#include <string>

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ModelError(std::string("vehicle parameter ") + name +
                     " must be positive, got " + std::to_string(v));
  }
}

}  // namespace

void VehicleParams::validate() const {
  require_positive(m, "m");
  require_positive(Iz, "Iz");
  require_positive(Ir, "Ir");
  require_positive(Lf, "Lf");
  require_positive(Lr, "Lr");
  require_positive(Cf, "Cf");
  require_positive(Cr, "Cr");
  require_positive(R, "R");
  require_positive(g, "g");
  if (!(Iz > Lf * m)) {
    throw ModelError("yaw inertia too small: need Iz > Lf*m, got Iz=" +
                     std::to_string(Iz) + " vs Lf*m=" + std::to_string(Lf * m));
  }
  if (!(wheelbase() > 0.0)) {
    throw ModelError("wheelbase Lf+Lr must be positive");
  }
}

VehicleParams VehicleParams::perturbed(double cf_scale, double cr_scale) const {
  if (!(cf_scale > 0.0) || !(cr_scale > 0.0)) {
    throw ModelError("stiffness scale factors must be positive");
  }
  VehicleParams p = *this;
  p.Cf *= cf_scale;
  p.Cr *= cr_scale;
  p.validate();
  return p;
}

ControlInput ActuatorLimits::clamp(const ControlInput& u) const {
  return {std::clamp(u.torque, -torque_max, torque_max),
          std::clamp(u.steer, -steer_max, steer_max)};
}

bool ActuatorLimits::saturates(const ControlInput& u) const {
  return std::abs(u.torque) > torque_max || std::abs(u.steer) > steer_max;
}

}  // namespace vtrack
