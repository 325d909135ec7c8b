#pragma once

#include "vtrack/estimators.hpp"
#include "vtrack/params.hpp"

namespace vtrack {

// Intelligent controllers for the ultra-local model y^(nu) = F + alpha*u.
// Error convention throughout: e = y - y_desired (sign matters: these
// formulas subtract the gain terms). All four throw ModelError on alpha = 0.

/// nu = 1:  u = -(F - yd_dot + KP e) / alpha.
double ip_control(double F, double yd_dot, double e, double KP, double alpha);

/// nu = 1:  u = -(F - yd_dot + KP e + KI integ_e) / alpha.
/// KI = 0 reduces exactly to ip_control.
double ipi_control(double F, double yd_dot, double e, double integ_e,
                   double KP, double KI, double alpha);

/// nu = 2:  u = -(F - yd_ddot + KP e + KD e_dot) / alpha.
double ipd_control(double F, double yd_ddot, double e, double e_dot,
                   double KP, double KD, double alpha);

/// nu = 2:  u = -(F - yd_ddot + KP e + KI integ_e + KD e_dot) / alpha.
/// KI = 0 reduces exactly to ipd_control.
double ipid_control(double F, double yd_ddot, double e, double e_dot,
                    double integ_e, double KP, double KI, double KD,
                    double alpha);

/// Feedback gains of one intelligent channel; unused gains stay 0.
struct IntelligentGains {
  double KP = 0.0;
  double KI = 0.0;
  double KD = 0.0;

  /// Hurwitz check of the closed-loop error polynomial for the given order.
  void validate(int nu) const;
};

/// One ultra-local channel: gain alpha, estimation window span, gains.
struct MfcChannelConfig {
  double alpha = 1.0;
  double span = 0.05;  // F-estimation window [s]
  IntelligentGains gains;
};

struct MfcOutput {
  ControlInput u;       // saturated command
  bool warm = false;    // false while any estimator window is cold
  double F1 = 0.0, F2 = 0.0;
  double e1 = 0.0, e2 = 0.0;
};

/// References for the flat-output pair (y1, y2); only value + first
/// derivative are consumed (both channels are closed at order 1).
struct MfcFlatRefs {
  double y1 = 0.0, y1_dot = 0.0;
  double y2 = 0.0, y2_dot = 0.0;
};

struct MfcFlatConfig {
  MfcChannelConfig lon{1.0 / 450.0, 0.05, {4.0, 4.0, 0.0}};    // iPI on y1
  MfcChannelConfig lat{-1.0e5, 0.02, {6.0, 9.0, 0.0}};         // iPI on y2
  ActuatorLimits limits;
  ControlInput u_hold;  // applied while windows fill
};

/// Two decoupled iPI loops on the flat outputs. The controller never sees
/// vehicle parameters; the caller supplies y2 already assembled from its
/// measurements. Input windows hold the previously applied command, so the
/// F estimate at step k uses u up to step k-1 (causal zero-order hold).
class MfcFlatController {
 public:
  MfcFlatController(const MfcFlatConfig& config, double dt);

  MfcOutput step(double y1_meas, double y2_meas, const MfcFlatRefs& refs,
                 double t);
  void reset();

 private:
  MfcFlatConfig cfg_;
  double dt_;
  SlidingWindow y1_win_, u1_win_, y2_win_, u2_win_;
  double integ1_ = 0.0, integ2_ = 0.0;
  ControlInput prev_u_;
};

struct MfcNaturalRefs {
  double vx_ref = 0.0;
  double vx_ref_dot = 0.0;
  // lateral deviation reference is identically zero by construction
};

struct MfcNaturalConfig {
  MfcChannelConfig lon{1.0 / 450.0, 0.1, {3.0, 0.0, 0.0}};  // iP on Vx
  // alpha2 sits between the front-axle input gains of the stiff and the
  // softened plant so the estimator's input-feedback loop keeps the same
  // margin under cornering-stiffness loss as on the nominal car.
  MfcChannelConfig lat{23.5, 0.1, {4.0, 0.0, 4.0}};  // iPD on deviation
  double diff_span = 0.1;  // window for the deviation-rate differentiator [s]
  ActuatorLimits limits;
  ControlInput u_hold;
};

/// iP on measured speed, iPD on measured lateral deviation (order-2
/// channel, F from the order-2 estimator, deviation rate from the
/// algebraic differentiator). Deliberately takes no VehicleParams: every
/// input is a direct measurement or a tuning constant.
class MfcNaturalController {
 public:
  MfcNaturalController(const MfcNaturalConfig& config, double dt);

  MfcOutput step(double vx_meas, double deviation_meas,
                 const MfcNaturalRefs& refs, double t);
  void reset();

 private:
  MfcNaturalConfig cfg_;
  double dt_;
  SlidingWindow vx_win_, u1_win_, dev_win_, u2_win_, dev_diff_win_;
  ControlInput prev_u_;
};

}  // namespace vtrack
