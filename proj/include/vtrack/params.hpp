#pragma once

#include <cmath>

namespace vtrack {

/// Speed below which the lateral model (which divides by Vx) is invalid.
inline constexpr double kVxMin = 0.5;  // m/s

/// Chassis and tire parameters, SI units. Defaults describe a mid-size
/// passenger car with slightly asymmetric axle cornering stiffness.
struct VehicleParams {
  double m = 1500.0;    // vehicle mass [kg]
  double Iz = 2500.0;   // yaw inertia [kg m^2]
  double Ir = 1.0;      // wheel spin inertia, per axle [kg m^2]
  double Lf = 1.1;      // CoG to front axle [m]
  double Lr = 1.5;      // CoG to rear axle [m]
  double Cf = 60000.0;  // front cornering stiffness [N/rad]
  double Cr = 57000.0;  // rear cornering stiffness [N/rad]
  double R = 0.3;       // wheel radius [m]
  double g = 9.81;      // gravity [m/s^2]

  double wheelbase() const { return Lf + Lr; }

  /// Throws ModelError if any invariant fails (positivity, Iz > Lf*m,
  /// usable wheelbase).
  void validate() const;

  /// Copy with both axle cornering stiffnesses scaled; used to run the
  /// plant off-nominal while controllers keep the nominal values.
  /// Scales must be positive and the result must still validate().
  VehicleParams perturbed(double cf_scale, double cr_scale) const;
};

/// Command pair applied to the plant.
struct ControlInput {
  double torque = 0.0;  // total wheel torque T_w [N m]
  double steer = 0.0;   // front steering angle [rad]
};

/// Symmetric actuator saturation.
struct ActuatorLimits {
  double torque_max = 1500.0;                 // [N m]
  double steer_max = 30.0 * M_PI / 180.0;     // [rad]

  ControlInput clamp(const ControlInput& u) const;
  bool saturates(const ControlInput& u) const;
};

}  // namespace vtrack
