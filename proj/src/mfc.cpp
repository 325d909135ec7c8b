#include "vtrack/mfc.hpp"

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {

void check_alpha(double alpha) {
  if (alpha == 0.0) throw ModelError("ultra-local gain alpha must be nonzero");
}

}  // namespace

double ip_control(double F, double yd_dot, double e, double KP, double alpha) {
  check_alpha(alpha);
  return -(F - yd_dot + KP * e) / alpha;
}

double ipi_control(double F, double yd_dot, double e, double integ_e,
                   double KP, double KI, double alpha) {
  check_alpha(alpha);
  return -(F - yd_dot + KP * e + KI * integ_e) / alpha;
}

double ipd_control(double F, double yd_ddot, double e, double e_dot, double KP,
                   double KD, double alpha) {
  check_alpha(alpha);
  return -(F - yd_ddot + KP * e + KD * e_dot) / alpha;
}

double ipid_control(double F, double yd_ddot, double e, double e_dot,
                    double integ_e, double KP, double KI, double KD,
                    double alpha) {
  check_alpha(alpha);
  return -(F - yd_ddot + KP * e + KI * integ_e + KD * e_dot) / alpha;
}

void IntelligentGains::validate(int nu) const {
  // Closed loop is e^(nu) + KD e^(nu-1)... + KP e + KI integral(e) = 0; after
  // clearing the integral the polynomial must be Hurwitz.
  bool ok = false;
  if (nu == 1) {
    // s + KP, or s^2 + KP s + KI with integral action
    ok = KP > 0.0 && KI >= 0.0 && KD == 0.0;
  } else if (nu == 2) {
    if (KI == 0.0) {
      ok = KP > 0.0 && KD > 0.0;  // s^2 + KD s + KP
    } else {
      // s^3 + KD s^2 + KP s + KI
      ok = KP > 0.0 && KD > 0.0 && KI > 0.0 && KD * KP > KI;
    }
  }
  if (!ok) {
    throw ModelError("intelligent-controller gains are not Hurwitz for order " +
                     std::to_string(nu));
  }
}

MfcFlatController::MfcFlatController(const MfcFlatConfig& config, double dt)
    : cfg_(config),
      dt_(dt),
      y1_win_(config.lon.span, dt),
      u1_win_(config.lon.span, dt),
      y2_win_(config.lat.span, dt),
      u2_win_(config.lat.span, dt),
      prev_u_(config.u_hold) {
  check_alpha(cfg_.lon.alpha);
  check_alpha(cfg_.lat.alpha);
  cfg_.lon.gains.validate(1);
  cfg_.lat.gains.validate(1);
}

MfcOutput MfcFlatController::step(double y1_meas, double y2_meas,
                                  const MfcFlatRefs& refs, double t) {
  y1_win_.push(y1_meas, t);
  u1_win_.push(prev_u_.torque, t);
  y2_win_.push(y2_meas, t);
  u2_win_.push(prev_u_.steer, t);

  MfcOutput out;
  out.e1 = y1_meas - refs.y1;
  out.e2 = y2_meas - refs.y2;

  const auto F1 = estimate_F_order1(y1_win_, u1_win_, cfg_.lon.alpha);
  const auto F2 = estimate_F_order1(y2_win_, u2_win_, cfg_.lat.alpha);
  if (!F1 || !F2) {
    out.u = cfg_.limits.clamp(cfg_.u_hold);
    prev_u_ = out.u;
    return out;
  }
  out.warm = true;
  out.F1 = *F1;
  out.F2 = *F2;

  const double i1 = integ1_ + out.e1 * dt_;
  const double i2 = integ2_ + out.e2 * dt_;
  ControlInput u;
  u.torque = ipi_control(*F1, refs.y1_dot, out.e1, i1, cfg_.lon.gains.KP,
                         cfg_.lon.gains.KI, cfg_.lon.alpha);
  u.steer = ipi_control(*F2, refs.y2_dot, out.e2, i2, cfg_.lat.gains.KP,
                        cfg_.lat.gains.KI, cfg_.lat.alpha);
  out.u = cfg_.limits.clamp(u);
  if (!cfg_.limits.saturates(u)) {  // conditional integration
    integ1_ = i1;
    integ2_ = i2;
  }
  prev_u_ = out.u;
  return out;
}

void MfcFlatController::reset() {
  y1_win_.clear();
  u1_win_.clear();
  y2_win_.clear();
  u2_win_.clear();
  integ1_ = integ2_ = 0.0;
  prev_u_ = cfg_.u_hold;
}

MfcNaturalController::MfcNaturalController(const MfcNaturalConfig& config,
                                           double dt)
    : cfg_(config),
      dt_(dt),
      vx_win_(config.lon.span, dt),
      u1_win_(config.lon.span, dt),
      dev_win_(config.lat.span, dt),
      u2_win_(config.lat.span, dt),
      dev_diff_win_(config.diff_span, dt),
      prev_u_(config.u_hold) {
  check_alpha(cfg_.lon.alpha);
  check_alpha(cfg_.lat.alpha);
  cfg_.lon.gains.validate(1);
  cfg_.lat.gains.validate(2);
}

MfcOutput MfcNaturalController::step(double vx_meas, double deviation_meas,
                                     const MfcNaturalRefs& refs, double t) {
  vx_win_.push(vx_meas, t);
  u1_win_.push(prev_u_.torque, t);
  dev_win_.push(deviation_meas, t);
  u2_win_.push(prev_u_.steer, t);
  dev_diff_win_.push(deviation_meas, t);

  MfcOutput out;
  out.e1 = vx_meas - refs.vx_ref;
  out.e2 = deviation_meas;  // reference is the path itself

  const auto F1 = estimate_F_order1(vx_win_, u1_win_, cfg_.lon.alpha);
  const auto F2 = estimate_F_order2(dev_win_, u2_win_, cfg_.lat.alpha);
  const auto dev_rate = differentiate(dev_diff_win_);
  if (!F1 || !F2 || !dev_rate) {
    out.u = cfg_.limits.clamp(cfg_.u_hold);
    prev_u_ = out.u;
    return out;
  }
  out.warm = true;
  out.F1 = *F1;
  out.F2 = *F2;

  ControlInput u;
  u.torque = ip_control(*F1, refs.vx_ref_dot, out.e1, cfg_.lon.gains.KP,
                        cfg_.lon.alpha);
  u.steer = ipd_control(*F2, 0.0, out.e2, *dev_rate, cfg_.lat.gains.KP,
                        cfg_.lat.gains.KD, cfg_.lat.alpha);
  out.u = cfg_.limits.clamp(u);
  prev_u_ = out.u;
  return out;
}

void MfcNaturalController::reset() {
  vx_win_.clear();
  u1_win_.clear();
  dev_win_.clear();
  u2_win_.clear();
  dev_diff_win_.clear();
  prev_u_ = cfg_.u_hold;
}

}  // namespace vtrack
