#pragma once

#include "vtrack/params.hpp"

namespace vtrack {

/// Chassis + pose + wheel-speed state. Vx must stay above kVxMin (the
/// lateral model divides by it); the integrator enforces this.
struct VehicleState {
  double Vx = 15.0;      // longitudinal speed [m/s]
  double Vy = 0.0;       // lateral speed [m/s]
  double psi_dot = 0.0;  // yaw rate [rad/s]
  double psi = 0.0;      // yaw angle [rad]
  double X = 0.0;        // global position [m]
  double Y = 0.0;
  double omega_f = 0.0;  // front axle wheel speed [rad/s]
  double omega_r = 0.0;  // rear axle wheel speed [rad/s]
};

struct ChassisRates {
  double Vx_dot = 0.0;
  double Vy_dot = 0.0;
  double psi_ddot = 0.0;
};

struct PoseRates {
  double psi_dot = 0.0;
  double X_dot = 0.0;
  double Y_dot = 0.0;
};

struct WheelAccels {
  double front = 0.0;  // [rad/s^2]
  double rear = 0.0;
};

/// Tire-level quantities implied by a state/input pair.
struct ForceSet {
  double Fx_f = 0.0, Fx_r = 0.0;  // longitudinal tire forces [N]
  double Fy_f = 0.0, Fy_r = 0.0;  // lateral tire forces [N]
  double Mz = 0.0;                // yaw moment about CoG [N m]
  double alpha_f = 0.0, alpha_r = 0.0;  // slip angles [rad]
  double beta = 0.0;                    // sideslip angle [rad]
};

/// Control-affine chassis dynamics: returns f(x) + g(x) u for the
/// (Vx, Vy, psi_dot) substate, with the wheel angular accelerations
/// supplied as exogenous inputs exactly as they appear in f and g.
/// Throws ModelError when Vx < kVxMin.
ChassisRates dynamics_rhs(const VehicleState& state, const ControlInput& input,
                          const VehicleParams& params,
                          const WheelAccels& wheel_accels);

/// Global kinematics: psi_dot passthrough and body->world velocity rotation.
PoseRates pose_rhs(const VehicleState& state);

/// Wheel-speed closure policy for the plant.
enum class WheelMode {
  /// omega = Vx/R identically. The wheel acceleration is obtained by
  /// algebraic elimination (Vx_dot enters its own right-hand side linearly
  /// through omega_dot), so the reduced ODE is smooth and RK4 keeps 4th
  /// order. No lag state is carried.
  QuasiStatic,
  /// Ir*omega_dot = T_w/2 - R*Fx per axle, with Fx from a linear
  /// longitudinal-slip law Fx = slip_stiffness * (R*omega - Vx)/max(Vx, Vx_min).
  Dynamic,
};

struct PlantConfig {
  WheelMode wheel_mode = WheelMode::QuasiStatic;
  double slip_stiffness = 30000.0;  // [N per unit slip], dynamic mode only
};

/// Fixed-step RK4 integrator around dynamics_rhs + pose_rhs with the
/// configured wheel policy. Stateless between calls: step() is a pure
/// function of its arguments, so runs are bit-reproducible.
class Plant {
 public:
  explicit Plant(const VehicleParams& params, const PlantConfig& config = {});

  const VehicleParams& params() const { return params_; }
  const PlantConfig& config() const { return config_; }

  /// Wheel angular accelerations under the active policy. In quasi-static
  /// mode this is also the V̇x/R the controllers may consume as a
  /// measurement.
  WheelAccels wheel_accels(const VehicleState& state,
                           const ControlInput& input) const;

  ForceSet forces(const VehicleState& state, const ControlInput& input) const;

  /// One RK4 step of dt seconds. Throws ModelError if the speed falls
  /// below kVxMin and DivergenceError (naming the field) if any state
  /// component leaves the finite range.
  VehicleState step(const VehicleState& state, const ControlInput& input,
                    double dt) const;

 private:
  VehicleParams params_;
  PlantConfig config_;
};

}  // namespace vtrack
