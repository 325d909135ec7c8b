#include "vtrack/flatness.hpp"

#include <cmath>
#include <string>

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {

void check_flat_speed(double y1) {
  if (!(y1 >= kVxMin)) {
    throw ModelError("flat output y1 = " + std::to_string(y1) +
                     " m/s below singular threshold");
  }
}

// Gradient of the y2 flow derivative
//   h(Vx, Vy, psi_dot) = -Lf*m*Vx*psi_dot - Cr*(Lf+Lr)*(Vy - Lr*psi_dot)/Vx
// used to chain y2_ddot = S*Vx_dot + W*Vy_dot + P*psi_ddot.
struct FlowGradient {
  double S, W, P;
};

FlowGradient flow_gradient(const ChassisTriple& c, const VehicleParams& p) {
  const double L = p.wheelbase();
  const double rear = (c.Vy - p.Lr * c.psi_dot) / (c.Vx * c.Vx);
  return {-p.Lf * p.m * c.psi_dot + p.Cr * L * rear,
          -p.Cr * L / c.Vx,
          -p.Lf * p.m * c.Vx + p.Cr * L * p.Lr / c.Vx};
}

VehicleState as_state(const ChassisTriple& c) {
  VehicleState s;
  s.Vx = c.Vx;
  s.Vy = c.Vy;
  s.psi_dot = c.psi_dot;
  return s;
}

}  // namespace

FlatOutputs flat_outputs(const VehicleState& state, const VehicleParams& p) {
  FlatOutputs y;
  y.y1 = state.Vx;
  y.y2 = p.Lf * p.m * state.Vy - p.Iz * state.psi_dot;
  y.y2_dot = 0.0;  // along-flow value comes from flat_y2_rate or a window
  return y;
}

double flat_y2_rate(const VehicleState& state, const VehicleParams& p) {
  check_flat_speed(state.Vx);
  const double L = p.wheelbase();
  return -p.Lf * p.m * state.Vx * state.psi_dot -
         p.Cr * L * (state.Vy - p.Lr * state.psi_dot) / state.Vx;
}

double flat_denominator(double y1, const VehicleParams& p) {
  const double lfm_y1 = p.Lf * p.m * y1;
  return p.Cr * p.wheelbase() * (p.Iz - p.Lr * p.Lf * p.m) + lfm_y1 * lfm_y1;
}

ChassisTriple state_from_flat(double y1, double y2, double y2_dot,
                              const VehicleParams& p) {
  const double L = p.wheelbase();
  const double D = flat_denominator(y1, p);
  const double lfm = p.Lf * p.m;
  const double scale =
      p.Cr * L * (p.Iz + p.Lr * lfm) + lfm * lfm * y1 * y1 + 1.0;
  if (std::abs(D) <= 1e-12 * scale) {
    throw ModelError("inverse flat map degenerate: D(y1) ~ 0 at y1 = " +
                     std::to_string(y1));
  }
  ChassisTriple c;
  c.Vx = y1;
  c.Vy = -(y2 * (p.Cr * L * p.Lr - lfm * y1 * y1) + p.Iz * y1 * y2_dot) / D;
  c.psi_dot = -(lfm * y1 * y2_dot + p.Cr * L * y2) / D;
  return c;
}

DeltaMatrix delta_matrix(double y1, double y2, double y2_dot,
                         const VehicleParams& p, double omega_f_dot) {
  check_flat_speed(y1);
  const ChassisTriple c = state_from_flat(y1, y2, y2_dot, p);
  const FlowGradient gr = flow_gradient(c, p);
  const VehicleState s = as_state(c);
  // Columns of g, extracted from the affine rhs; omega_r_dot never enters g.
  const WheelAccels w{omega_f_dot, 0.0};
  const ChassisRates f0 = dynamics_rhs(s, {0.0, 0.0}, p, w);
  const ChassisRates ft = dynamics_rhs(s, {1.0, 0.0}, p, w);
  const ChassisRates fd = dynamics_rhs(s, {0.0, 1.0}, p, w);
  const double gt1 = ft.Vx_dot - f0.Vx_dot;
  const double gt2 = ft.Vy_dot - f0.Vy_dot;
  const double gt3 = ft.psi_ddot - f0.psi_ddot;
  const double gd1 = fd.Vx_dot - f0.Vx_dot;
  const double gd2 = fd.Vy_dot - f0.Vy_dot;
  const double gd3 = fd.psi_ddot - f0.psi_ddot;

  DeltaMatrix d;
  d.d11 = gt1;
  d.d12 = gd1;
  d.d21 = gr.S * gt1 + gr.W * gt2 + gr.P * gt3;
  d.d22 = gr.S * gd1 + gr.W * gd2 + gr.P * gd3;
  return d;
}

double delta_det_closed_form(double y1, const VehicleParams& p,
                             double omega_f_dot) {
  check_flat_speed(y1);
  return (p.Ir * omega_f_dot - p.Cf * p.R) * flat_denominator(y1, p) /
         (p.Iz * p.R * p.R * y1 * p.m * p.m);
}

void check_delta_invertible(double y1, const VehicleParams& p,
                            double omega_f_dot, double rel_tol) {
  const double wheel_factor = p.Ir * omega_f_dot - p.Cf * p.R;
  if (std::abs(wheel_factor) <= rel_tol * p.Cf * p.R) {
    throw ModelError(
        "decoupling singular: wheel spin acceleration " +
        std::to_string(omega_f_dot) + " rad/s^2 is at the Cf*R/Ir limit " +
        std::to_string(p.Cf * p.R / p.Ir) + " rad/s^2");
  }
  const double lfm = p.Lf * p.m;
  const double scale =
      p.Cr * p.wheelbase() * (p.Iz + p.Lr * lfm) + lfm * lfm * y1 * y1 + 1.0;
  if (std::abs(flat_denominator(y1, p)) <= rel_tol * scale) {
    throw ModelError(
        "decoupling singular: degenerate chassis parameters, "
        "Cr*(Lf+Lr)*(Iz - Lr*Lf*m) + (Lf*m*y1)^2 ~ 0");
  }
}

std::pair<double, double> phi_term(double y1, double y2, double y2_dot,
                                   const VehicleParams& p,
                                   const WheelAccels& wheel_accels) {
  check_flat_speed(y1);
  const ChassisTriple c = state_from_flat(y1, y2, y2_dot, p);
  const FlowGradient gr = flow_gradient(c, p);
  const ChassisRates f =
      dynamics_rhs(as_state(c), {0.0, 0.0}, p, wheel_accels);
  return {f.Vx_dot,
          gr.S * f.Vx_dot + gr.W * f.Vy_dot + gr.P * f.psi_ddot};
}

void FlatnessGains::validate() const {
  if (!(K1_1 > 0.0) || !(K1_2 > 0.0)) {
    throw ModelError("longitudinal gains must make s^2 + K1_1 s + K1_2 Hurwitz");
  }
  if (!(K2_1 > 0.0) || !(K2_2 > 0.0) || !(K2_3 > 0.0) ||
      !(K2_1 * K2_2 > K2_3)) {
    throw ModelError(
        "lateral gains must make s^3 + K2_1 s^2 + K2_2 s + K2_3 Hurwitz "
        "(need all positive and K2_1*K2_2 > K2_3)");
  }
}

FlatControlResult flat_control(const FlatMeasurement& meas,
                               const FlatReference& ref,
                               const FlatnessGains& gains,
                               FlatIntegrators& integ, const VehicleParams& p,
                               double dt, double det_rel_tol) {
  const double e1 = ref.y1 - meas.y1;
  const double e2 = ref.y2 - meas.y2;
  const double e2_dot = ref.y2_dot - meas.y2_dot;
  integ.e1 += e1 * dt;
  integ.e2 += e2 * dt;

  FlatControlResult r;
  r.e_y1 = e1;
  r.e_y2 = e2;
  r.v1 = ref.y1_dot + gains.K1_1 * e1 + gains.K1_2 * integ.e1;
  r.v2 = ref.y2_ddot + gains.K2_1 * e2_dot + gains.K2_2 * e2 +
         gains.K2_3 * integ.e2;

  // Rolling-wheel belief: omega_dot = measured acceleration / R, same on
  // both axles.
  const double wd = meas.y1_dot / p.R;
  check_delta_invertible(meas.y1, p, wd, det_rel_tol);
  const DeltaMatrix d = delta_matrix(meas.y1, meas.y2, meas.y2_dot, p, wd);
  const auto [phi1, phi2] =
      phi_term(meas.y1, meas.y2, meas.y2_dot, p, {wd, wd});

  const double b1 = r.v1 - phi1;
  const double b2 = r.v2 - phi2;
  r.det = d.det();
  r.u.torque = (d.d22 * b1 - d.d12 * b2) / r.det;
  r.u.steer = (-d.d21 * b1 + d.d11 * b2) / r.det;
  return r;
}

FlatnessController::FlatnessController(const VehicleParams& params,
                                       const FlatnessControllerConfig& config,
                                       double dt)
    : params_(params),
      cfg_(config),
      dt_(dt),
      y2_window_(config.diff_span, dt) {
  params_.validate();
  cfg_.gains.validate();
  if (!(dt > 0.0)) throw ModelError("controller period must be positive");
}

FlatnessController::Output FlatnessController::step(const FlatMeasurement& meas,
                                                    const FlatReference& ref,
                                                    double t) {
  Output out;
  out.e_y1 = ref.y1 - meas.y1;
  out.e_y2 = ref.y2 - meas.y2;

  double y2_dot = meas.y2_dot;
  if (!cfg_.exact_y2_dot) {
    y2_window_.push(meas.y2, t);
    const auto d = differentiate(y2_window_);
    if (!d) {
      out.u = cfg_.limits.clamp(cfg_.u_hold);
      return out;
    }
    y2_dot = *d;
  }

  FlatMeasurement m = meas;
  m.y2_dot = y2_dot;
  FlatIntegrators saved = integ_;
  const FlatControlResult r =
      flat_control(m, ref, cfg_.gains, integ_, params_, dt_, cfg_.det_rel_tol);
  out.det = r.det;
  out.warm = true;
  out.u = cfg_.limits.clamp(r.u);
  const bool saturated = cfg_.limits.saturates(r.u);
  if (saturated) integ_ = saved;  // conditional integration
  return out;
}

void FlatnessController::reset() {
  y2_window_.clear();
  integ_ = {};
}

}  // namespace vtrack
