#pragma once

#include <optional>

#include "vtrack/estimators.hpp"
#include "vtrack/params.hpp"
#include "vtrack/plant.hpp"

namespace vtrack {

/// The two linearizing outputs of the chassis model:
///   y1 = Vx
///   y2 = Lf*m*Vy - Iz*psi_dot
/// y2's time derivative along the plant flow is input-independent (the
/// steering columns of the Vy and psi_dot rows cancel in the combination),
/// which is what makes (y1, y2) a flat output pair: see docs/flatness.md.
struct FlatOutputs {
  double y1 = 0.0;
  double y2 = 0.0;
  double y2_dot = 0.0;
};

FlatOutputs flat_outputs(const VehicleState& state, const VehicleParams& p);

/// y2's derivative along the plant flow (input-independent):
///   -Lf*m*Vx*psi_dot - Cr*(Lf+Lr)*(Vy - Lr*psi_dot)/Vx
double flat_y2_rate(const VehicleState& state, const VehicleParams& p);

/// Common denominator of the inverse map and of det(Delta):
///   D(y1) = Cr*(Lf+Lr)*(Iz - Lr*Lf*m) + (Lf*m*y1)^2
double flat_denominator(double y1, const VehicleParams& p);

struct ChassisTriple {
  double Vx = 0.0;
  double Vy = 0.0;
  double psi_dot = 0.0;
};

/// Inverse map: recovers (Vx, Vy, psi_dot) from (y1, y2, y2_dot) by solving
/// the linear system formed by the y2 definition and its derivative.
/// Throws ModelError when D(y1) is numerically zero (degenerate parameters).
ChassisTriple state_from_flat(double y1, double y2, double y2_dot,
                              const VehicleParams& p);

struct DeltaMatrix {
  double d11 = 0.0, d12 = 0.0;
  double d21 = 0.0, d22 = 0.0;
  double det() const { return d11 * d22 - d12 * d21; }
};

/// Input-to-highest-derivative map: [y1_dot; y2_ddot] = Delta*u + Phi.
/// Entries are evaluated at the chassis state implied by (y1, y2, y2_dot),
/// with the front wheel angular acceleration as an exogenous signal.
DeltaMatrix delta_matrix(double y1, double y2, double y2_dot,
                         const VehicleParams& p, double omega_f_dot);

/// Closed form of det(Delta):
///   (Ir*omega_f_dot - Cf*R) * D(y1) / (Iz * R^2 * y1 * m^2)
/// Kept as an independent code path from DeltaMatrix::det() so the two can
/// cross-check each other.
double delta_det_closed_form(double y1, const VehicleParams& p,
                             double omega_f_dot);

/// Throws ModelError when either factor of the closed-form determinant is
/// relatively smaller than `rel_tol`, naming the failed condition:
/// wheel-spin acceleration reaching Cf*R/Ir, or degenerate D(y1).
void check_delta_invertible(double y1, const VehicleParams& p,
                            double omega_f_dot, double rel_tol = 1e-6);

/// Drift term Phi = [y1_dot; y2_ddot] at u = 0.
std::pair<double, double> phi_term(double y1, double y2, double y2_dot,
                                   const VehicleParams& p,
                                   const WheelAccels& wheel_accels);

/// Outer-loop gains. Longitudinal loop is PI on e1 = y1_ref - y1 (error
/// polynomial s^2 + K1_1 s + K1_2); lateral loop is PID-with-integral on
/// e2 = y2_ref - y2 (error polynomial s^3 + K2_1 s^2 + K2_2 s + K2_3).
/// Defaults place the poles at {-2,-2} and {-3,-3,-3}.
struct FlatnessGains {
  double K1_1 = 4.0, K1_2 = 4.0;
  double K2_1 = 9.0, K2_2 = 27.0, K2_3 = 27.0;

  /// Throws ModelError unless both error polynomials are Hurwitz.
  void validate() const;
};

struct FlatReference {
  double y1 = 0.0, y1_dot = 0.0;
  double y2 = 0.0, y2_dot = 0.0, y2_ddot = 0.0;
};

/// Measurements consumed by the flatness law. y1_dot doubles as the wheel
/// acceleration belief: the controller assumes rolling wheels, so
/// omega_dot = y1_dot / R on both axles.
struct FlatMeasurement {
  double y1 = 0.0;
  double y2 = 0.0;
  double y2_dot = 0.0;
  double y1_dot = 0.0;
};

struct FlatIntegrators {
  double e1 = 0.0;  // integral of y1 error [m]
  double e2 = 0.0;  // integral of y2 error [kg m^2]
};

struct FlatControlResult {
  ControlInput u;      // unsaturated law output
  double e_y1 = 0.0;
  double e_y2 = 0.0;
  double det = 0.0;
  double v1 = 0.0, v2 = 0.0;  // virtual inputs, for diagnostics
};

/// One evaluation of the flatness law: virtual inputs from the tracking
/// feedback, then u = Delta^{-1} (v - Phi). `integ` is advanced by dt
/// before use; the caller owns anti-windup (revert on saturation).
/// Throws ModelError through the invertibility check.
FlatControlResult flat_control(const FlatMeasurement& meas,
                               const FlatReference& ref,
                               const FlatnessGains& gains,
                               FlatIntegrators& integ,
                               const VehicleParams& p, double dt,
                               double det_rel_tol = 1e-6);

struct FlatnessControllerConfig {
  FlatnessGains gains;
  ActuatorLimits limits;
  double diff_span = 0.05;       // window for the y2 differentiator [s]
  double det_rel_tol = 1e-6;     // invertibility margin
  bool exact_y2_dot = false;     // consume meas.y2_dot instead of the window
  ControlInput u_hold;           // applied while the differentiator warms up
};

/// Stateful wrapper: owns the y2 differentiator window, the integrators and
/// the anti-windup logic. One instance per simulation run.
class FlatnessController {
 public:
  FlatnessController(const VehicleParams& params,
                     const FlatnessControllerConfig& config, double dt);

  struct Output {
    ControlInput u;      // saturated, ready to apply
    bool warm = false;
    double e_y1 = 0.0;
    double e_y2 = 0.0;
    double det = 0.0;
  };

  /// meas.y2_dot is ignored unless exact_y2_dot is set; the controller
  /// differentiates the (noisy) y2 stream itself.
  Output step(const FlatMeasurement& meas, const FlatReference& ref, double t);

  void reset();

 private:
  VehicleParams params_;
  FlatnessControllerConfig cfg_;
  double dt_;
  SlidingWindow y2_window_;
  FlatIntegrators integ_;
};

}  // namespace vtrack
