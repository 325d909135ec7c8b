#include "vtrack/plant.hpp"

#include <array>
#include <cmath>
#include <string>

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {

void check_speed(double vx) {
  if (!std::isfinite(vx)) {
    throw DivergenceError("state field Vx became non-finite");
  }
  if (vx < kVxMin) {
    throw ModelError("speed " + std::to_string(vx) +
                     " m/s below singular threshold " + std::to_string(kVxMin) +
                     " m/s (lateral model divides by Vx)");
  }
}

}  // namespace

ChassisRates dynamics_rhs(const VehicleState& s, const ControlInput& u,
                          const VehicleParams& p, const WheelAccels& w) {
  check_speed(s.Vx);
  const double front_slip_vel = (s.Vy + p.Lf * s.psi_dot) / s.Vx;
  const double rear_slip_vel = (s.Vy - p.Lr * s.psi_dot) / s.Vx;

  const double f1 = s.psi_dot * s.Vy - p.Ir / (p.m * p.R) * (w.rear + w.front);
  const double f2 =
      -s.psi_dot * s.Vx - (p.Cf * front_slip_vel + p.Cr * rear_slip_vel) / p.m;
  const double f3 =
      (-p.Lf * p.Cf * front_slip_vel + p.Lr * p.Cr * rear_slip_vel) / p.Iz;

  const double g11 = 1.0 / (p.m * p.R);
  const double g12 = p.Cf / p.m * front_slip_vel;
  const double g22 = (p.Cf * p.R - p.Ir * w.front) / (p.m * p.R);
  const double g32 = (p.Lf * p.Cf * p.R - p.Lf * p.Ir * w.front) / (p.Iz * p.R);

  return {f1 + g11 * u.torque + g12 * u.steer,
          f2 + g22 * u.steer,
          f3 + g32 * u.steer};
}

PoseRates pose_rhs(const VehicleState& s) {
  const double c = std::cos(s.psi);
  const double sn = std::sin(s.psi);
  return {s.psi_dot, s.Vx * c - s.Vy * sn, s.Vx * sn + s.Vy * c};
}

Plant::Plant(const VehicleParams& params, const PlantConfig& config)
    : params_(params), config_(config) {
  params_.validate();
  if (config_.wheel_mode == WheelMode::Dynamic &&
      !(config_.slip_stiffness > 0.0)) {
    throw ModelError("slip stiffness must be positive in dynamic wheel mode");
  }
}

WheelAccels Plant::wheel_accels(const VehicleState& s,
                                const ControlInput& u) const {
  const VehicleParams& p = params_;
  check_speed(s.Vx);
  if (config_.wheel_mode == WheelMode::QuasiStatic) {
    // omega_dot = Vx_dot / R on both axles; Vx_dot depends on omega_dot
    // linearly through f1, so solve the scalar equation in closed form.
    const double g12 = p.Cf / p.m * (s.Vy + p.Lf * s.psi_dot) / s.Vx;
    const double rhs =
        s.psi_dot * s.Vy + u.torque / (p.m * p.R) + g12 * u.steer;
    const double vx_dot = rhs / (1.0 + 2.0 * p.Ir / (p.m * p.R * p.R));
    const double wd = vx_dot / p.R;
    return {wd, wd};
  }
  const double denom = std::max(s.Vx, kVxMin);
  const double slip_f = (p.R * s.omega_f - s.Vx) / denom;
  const double slip_r = (p.R * s.omega_r - s.Vx) / denom;
  const double fx_f = config_.slip_stiffness * slip_f;
  const double fx_r = config_.slip_stiffness * slip_r;
  return {(0.5 * u.torque - p.R * fx_f) / p.Ir,
          (0.5 * u.torque - p.R * fx_r) / p.Ir};
}

ForceSet Plant::forces(const VehicleState& s, const ControlInput& u) const {
  const VehicleParams& p = params_;
  check_speed(s.Vx);
  const WheelAccels w = wheel_accels(s, u);
  ForceSet f;
  f.alpha_f = (s.Vy + p.Lf * s.psi_dot) / s.Vx - u.steer;
  f.alpha_r = (s.Vy - p.Lr * s.psi_dot) / s.Vx;
  f.beta = s.Vy / s.Vx;
  f.Fy_f = -p.Cf * f.alpha_f;
  f.Fy_r = -p.Cr * f.alpha_r;
  if (config_.wheel_mode == WheelMode::QuasiStatic) {
    f.Fx_f = (0.5 * u.torque - p.Ir * w.front) / p.R;
    f.Fx_r = (0.5 * u.torque - p.Ir * w.rear) / p.R;
  } else {
    const double denom = std::max(s.Vx, kVxMin);
    f.Fx_f = config_.slip_stiffness * (p.R * s.omega_f - s.Vx) / denom;
    f.Fx_r = config_.slip_stiffness * (p.R * s.omega_r - s.Vx) / denom;
  }
  f.Mz = p.Lf * f.Fy_f - p.Lr * f.Fy_r - p.Lf * p.Ir * w.front / p.R * u.steer;
  return f;
}

namespace {

// Dense derivative of the full 8-component state under a given wheel policy.
std::array<double, 8> full_rhs(const Plant& plant, const VehicleState& s,
                               const ControlInput& u) {
  const WheelAccels w = plant.wheel_accels(s, u);
  const ChassisRates c = dynamics_rhs(s, u, plant.params(), w);
  const PoseRates k = pose_rhs(s);
  return {c.Vx_dot, c.Vy_dot, c.psi_ddot, k.psi_dot,
          k.X_dot,  k.Y_dot,  w.front,    w.rear};
}

VehicleState apply(const VehicleState& s, const std::array<double, 8>& d,
                   double h) {
  VehicleState r = s;
  r.Vx += h * d[0];
  r.Vy += h * d[1];
  r.psi_dot += h * d[2];
  r.psi += h * d[3];
  r.X += h * d[4];
  r.Y += h * d[5];
  r.omega_f += h * d[6];
  r.omega_r += h * d[7];
  return r;
}

void check_finite(const VehicleState& s) {
  const struct {
    const char* name;
    double v;
  } fields[] = {{"Vx", s.Vx},           {"Vy", s.Vy}, {"psi_dot", s.psi_dot},
                {"psi", s.psi},         {"X", s.X},   {"Y", s.Y},
                {"omega_f", s.omega_f}, {"omega_r", s.omega_r}};
  for (const auto& f : fields) {
    if (!std::isfinite(f.v)) {
      throw DivergenceError(std::string("state field ") + f.name +
                            " became non-finite");
    }
  }
}

}  // namespace

VehicleState Plant::step(const VehicleState& state, const ControlInput& input,
                         double dt) const {
  if (!(dt > 0.0)) {
    throw ModelError("integrator step must be positive");
  }
  const auto k1 = full_rhs(*this, state, input);
  const auto k2 = full_rhs(*this, apply(state, k1, 0.5 * dt), input);
  const auto k3 = full_rhs(*this, apply(state, k2, 0.5 * dt), input);
  const auto k4 = full_rhs(*this, apply(state, k3, dt), input);

  VehicleState next = state;
  std::array<double, 8> incr;
  for (std::size_t i = 0; i < 8; ++i) {
    incr[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  }
  next = apply(state, incr, dt);
  if (config_.wheel_mode == WheelMode::QuasiStatic) {
    next.omega_f = next.Vx / params_.R;
    next.omega_r = next.Vx / params_.R;
  }
  check_finite(next);
  check_speed(next.Vx);
  return next;
}

}  // namespace vtrack
