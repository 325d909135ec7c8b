#include "vtrack/scenario.hpp"

#include <cstdlib>
#include <sstream>

#include "vtrack/errors.hpp"
#include "vtrack/telemetry.hpp"

namespace vtrack {

namespace {

double parse_num(const std::string& token, const std::string& origin,
                 int lineno) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw ConfigError(origin, lineno, "expected a number, got '" + token + "'");
  }
  return v;
}

}  // namespace

SegmentSpec parse_segment_line(const std::string& line,
                               const std::string& origin, int lineno) {
  std::istringstream in(line);
  std::string kind;
  in >> kind;
  SegmentSpec seg;
  if (kind == "straight") {
    seg.kind = SegmentSpec::Kind::Straight;
  } else if (kind == "arc") {
    seg.kind = SegmentSpec::Kind::Arc;
  } else if (kind == "clothoid") {
    seg.kind = SegmentSpec::Kind::Clothoid;
  } else {
    throw ConfigError(origin, lineno,
                      "unknown segment kind '" + kind +
                          "' (expected straight, arc or clothoid)");
  }
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin, lineno,
                        "segment attribute must be key=value, got '" + token +
                            "'");
    }
    const std::string key = token.substr(0, eq);
    const double val = parse_num(token.substr(eq + 1), origin, lineno);
    if (key == "length") {
      seg.length = val;
    } else if (key == "radius") {
      seg.radius = val;
    } else if (key == "angle") {
      seg.angle_deg = val;
    } else if (key == "speed") {
      seg.speed = val;
    } else {
      throw ConfigError(origin, lineno,
                        "unknown segment attribute '" + key + "'");
    }
  }
  return seg;
}

std::string segment_to_line(const SegmentSpec& seg) {
  std::ostringstream out;
  switch (seg.kind) {
    case SegmentSpec::Kind::Straight:
      out << "straight length=" << format_double(seg.length);
      break;
    case SegmentSpec::Kind::Arc:
      out << "arc radius=" << format_double(seg.radius)
          << " angle=" << format_double(seg.angle_deg);
      break;
    case SegmentSpec::Kind::Clothoid:
      out << "clothoid length=" << format_double(seg.length);
      break;
  }
  if (seg.speed != 0.0) out << " speed=" << format_double(seg.speed);
  return out.str();
}

ScenarioConfig scenario_from_config(const Config& cfg) {
  ScenarioConfig sc;

  cfg.check_keys("plant", {"m", "Iz", "Ir", "Lf", "Lr", "Cf", "Cr", "R", "g",
                           "wheel_mode", "slip_stiffness"});
  VehicleParams& p = sc.params;
  p.m = cfg.get_double("plant", "m", p.m);
  p.Iz = cfg.get_double("plant", "Iz", p.Iz);
  p.Ir = cfg.get_double("plant", "Ir", p.Ir);
  p.Lf = cfg.get_double("plant", "Lf", p.Lf);
  p.Lr = cfg.get_double("plant", "Lr", p.Lr);
  p.Cf = cfg.get_double("plant", "Cf", p.Cf);
  p.Cr = cfg.get_double("plant", "Cr", p.Cr);
  p.R = cfg.get_double("plant", "R", p.R);
  p.g = cfg.get_double("plant", "g", p.g);
  const std::string mode =
      cfg.get_string("plant", "wheel_mode", "quasi-static");
  if (mode == "quasi-static") {
    sc.plant.wheel_mode = WheelMode::QuasiStatic;
  } else if (mode == "dynamic") {
    sc.plant.wheel_mode = WheelMode::Dynamic;
  } else {
    throw ConfigError("unknown wheel_mode '" + mode +
                      "' (expected quasi-static or dynamic)");
  }
  sc.plant.slip_stiffness =
      cfg.get_double("plant", "slip_stiffness", sc.plant.slip_stiffness);

  cfg.check_keys("scenario", {"controller", "dt", "duration", "seed",
                              "cf_scale", "cr_scale", "warmup"});
  sc.controller = controller_kind_from_string(
      cfg.get_string("scenario", "controller", to_string(sc.controller)));
  sc.dt = cfg.get_double("scenario", "dt", sc.dt);
  sc.duration = cfg.get_double("scenario", "duration", sc.duration);
  sc.seed = std::uint64_t(cfg.get_int("scenario", "seed", std::int64_t(sc.seed)));
  sc.cf_scale = cfg.get_double("scenario", "cf_scale", sc.cf_scale);
  sc.cr_scale = cfg.get_double("scenario", "cr_scale", sc.cr_scale);
  sc.warmup = cfg.get_double("scenario", "warmup", sc.warmup);

  cfg.check_keys("noise", {"speed_sigma", "vy_sigma", "yaw_rate_sigma",
                           "lateral_sigma", "wheel_accel_sigma"});
  NoiseConfig& nz = sc.noise;
  nz.speed_sigma = cfg.get_double("noise", "speed_sigma", nz.speed_sigma);
  nz.vy_sigma = cfg.get_double("noise", "vy_sigma", nz.vy_sigma);
  nz.yaw_rate_sigma =
      cfg.get_double("noise", "yaw_rate_sigma", nz.yaw_rate_sigma);
  nz.lateral_sigma = cfg.get_double("noise", "lateral_sigma", nz.lateral_sigma);
  nz.wheel_accel_sigma =
      cfg.get_double("noise", "wheel_accel_sigma", nz.wheel_accel_sigma);

  cfg.check_keys("limits", {"torque_max", "steer_max"});
  ActuatorLimits limits;
  limits.torque_max = cfg.get_double("limits", "torque_max", limits.torque_max);
  limits.steer_max = cfg.get_double("limits", "steer_max", limits.steer_max);
  sc.flatness.limits = limits;
  sc.mfc_flat.limits = limits;
  sc.mfc_natural.limits = limits;

  cfg.check_keys("flatness",
                 {"K1_1", "K1_2", "K2_1", "K2_2", "K2_3", "diff_span",
                  "det_rel_tol", "exact_y2_dot", "hold_torque", "hold_steer"});
  FlatnessControllerConfig& fl = sc.flatness;
  fl.gains.K1_1 = cfg.get_double("flatness", "K1_1", fl.gains.K1_1);
  fl.gains.K1_2 = cfg.get_double("flatness", "K1_2", fl.gains.K1_2);
  fl.gains.K2_1 = cfg.get_double("flatness", "K2_1", fl.gains.K2_1);
  fl.gains.K2_2 = cfg.get_double("flatness", "K2_2", fl.gains.K2_2);
  fl.gains.K2_3 = cfg.get_double("flatness", "K2_3", fl.gains.K2_3);
  fl.diff_span = cfg.get_double("flatness", "diff_span", fl.diff_span);
  fl.det_rel_tol = cfg.get_double("flatness", "det_rel_tol", fl.det_rel_tol);
  fl.exact_y2_dot = cfg.get_bool("flatness", "exact_y2_dot", fl.exact_y2_dot);
  fl.u_hold.torque = cfg.get_double("flatness", "hold_torque", 0.0);
  fl.u_hold.steer = cfg.get_double("flatness", "hold_steer", 0.0);

  cfg.check_keys("mfc_flat", {"alpha1", "span1", "KP1", "KI1", "alpha2",
                              "span2", "KP2", "KI2", "hold_torque",
                              "hold_steer"});
  MfcFlatConfig& mf = sc.mfc_flat;
  mf.lon.alpha = cfg.get_double("mfc_flat", "alpha1", mf.lon.alpha);
  mf.lon.span = cfg.get_double("mfc_flat", "span1", mf.lon.span);
  mf.lon.gains.KP = cfg.get_double("mfc_flat", "KP1", mf.lon.gains.KP);
  mf.lon.gains.KI = cfg.get_double("mfc_flat", "KI1", mf.lon.gains.KI);
  mf.lat.alpha = cfg.get_double("mfc_flat", "alpha2", mf.lat.alpha);
  mf.lat.span = cfg.get_double("mfc_flat", "span2", mf.lat.span);
  mf.lat.gains.KP = cfg.get_double("mfc_flat", "KP2", mf.lat.gains.KP);
  mf.lat.gains.KI = cfg.get_double("mfc_flat", "KI2", mf.lat.gains.KI);
  mf.u_hold.torque = cfg.get_double("mfc_flat", "hold_torque", 0.0);
  mf.u_hold.steer = cfg.get_double("mfc_flat", "hold_steer", 0.0);

  cfg.check_keys("mfc_natural",
                 {"alpha1", "span1", "KP1", "alpha2", "span2", "KP2", "KD2",
                  "diff_span", "hold_torque", "hold_steer"});
  MfcNaturalConfig& mn = sc.mfc_natural;
  mn.lon.alpha = cfg.get_double("mfc_natural", "alpha1", mn.lon.alpha);
  mn.lon.span = cfg.get_double("mfc_natural", "span1", mn.lon.span);
  mn.lon.gains.KP = cfg.get_double("mfc_natural", "KP1", mn.lon.gains.KP);
  mn.lat.alpha = cfg.get_double("mfc_natural", "alpha2", mn.lat.alpha);
  mn.lat.span = cfg.get_double("mfc_natural", "span2", mn.lat.span);
  mn.lat.gains.KP = cfg.get_double("mfc_natural", "KP2", mn.lat.gains.KP);
  mn.lat.gains.KD = cfg.get_double("mfc_natural", "KD2", mn.lat.gains.KD);
  mn.diff_span = cfg.get_double("mfc_natural", "diff_span", mn.diff_span);
  mn.u_hold.torque = cfg.get_double("mfc_natural", "hold_torque", 0.0);
  mn.u_hold.steer = cfg.get_double("mfc_natural", "hold_steer", 0.0);

  cfg.check_keys("track", {"default_speed", "ramp_accel", "path_ds"});
  sc.track.default_speed =
      cfg.get_double("track", "default_speed", sc.track.default_speed);
  sc.track.ramp_accel =
      cfg.get_double("track", "ramp_accel", sc.track.ramp_accel);
  sc.track.path_ds = cfg.get_double("track", "path_ds", sc.track.path_ds);

  const auto seg_items = cfg.items("segments");
  if (!seg_items.empty()) {
    sc.track.segments.clear();
    for (const auto& item : seg_items) {
      sc.track.segments.push_back(
          parse_segment_line(item.value, cfg.origin(), item.line));
    }
  }
  return sc;
}

Config scenario_to_config(const ScenarioConfig& sc) {
  Config cfg;
  auto put = [&cfg](const std::string& s, const std::string& k, double v) {
    cfg.set(s, k, format_double(v));
  };

  const VehicleParams& p = sc.params;
  put("plant", "m", p.m);
  put("plant", "Iz", p.Iz);
  put("plant", "Ir", p.Ir);
  put("plant", "Lf", p.Lf);
  put("plant", "Lr", p.Lr);
  put("plant", "Cf", p.Cf);
  put("plant", "Cr", p.Cr);
  put("plant", "R", p.R);
  put("plant", "g", p.g);
  cfg.set("plant", "wheel_mode",
          sc.plant.wheel_mode == WheelMode::QuasiStatic ? "quasi-static"
                                                        : "dynamic");
  put("plant", "slip_stiffness", sc.plant.slip_stiffness);

  cfg.set("scenario", "controller", to_string(sc.controller));
  put("scenario", "dt", sc.dt);
  put("scenario", "duration", sc.duration);
  cfg.set("scenario", "seed", std::to_string(sc.seed));
  put("scenario", "cf_scale", sc.cf_scale);
  put("scenario", "cr_scale", sc.cr_scale);
  put("scenario", "warmup", sc.warmup);

  put("noise", "speed_sigma", sc.noise.speed_sigma);
  put("noise", "vy_sigma", sc.noise.vy_sigma);
  put("noise", "yaw_rate_sigma", sc.noise.yaw_rate_sigma);
  put("noise", "lateral_sigma", sc.noise.lateral_sigma);
  put("noise", "wheel_accel_sigma", sc.noise.wheel_accel_sigma);

  put("limits", "torque_max", sc.flatness.limits.torque_max);
  put("limits", "steer_max", sc.flatness.limits.steer_max);

  put("flatness", "K1_1", sc.flatness.gains.K1_1);
  put("flatness", "K1_2", sc.flatness.gains.K1_2);
  put("flatness", "K2_1", sc.flatness.gains.K2_1);
  put("flatness", "K2_2", sc.flatness.gains.K2_2);
  put("flatness", "K2_3", sc.flatness.gains.K2_3);
  put("flatness", "diff_span", sc.flatness.diff_span);
  put("flatness", "det_rel_tol", sc.flatness.det_rel_tol);
  cfg.set("flatness", "exact_y2_dot", sc.flatness.exact_y2_dot ? "true" : "false");
  put("flatness", "hold_torque", sc.flatness.u_hold.torque);
  put("flatness", "hold_steer", sc.flatness.u_hold.steer);

  put("mfc_flat", "alpha1", sc.mfc_flat.lon.alpha);
  put("mfc_flat", "span1", sc.mfc_flat.lon.span);
  put("mfc_flat", "KP1", sc.mfc_flat.lon.gains.KP);
  put("mfc_flat", "KI1", sc.mfc_flat.lon.gains.KI);
  put("mfc_flat", "alpha2", sc.mfc_flat.lat.alpha);
  put("mfc_flat", "span2", sc.mfc_flat.lat.span);
  put("mfc_flat", "KP2", sc.mfc_flat.lat.gains.KP);
  put("mfc_flat", "KI2", sc.mfc_flat.lat.gains.KI);
  put("mfc_flat", "hold_torque", sc.mfc_flat.u_hold.torque);
  put("mfc_flat", "hold_steer", sc.mfc_flat.u_hold.steer);

  put("mfc_natural", "alpha1", sc.mfc_natural.lon.alpha);
  put("mfc_natural", "span1", sc.mfc_natural.lon.span);
  put("mfc_natural", "KP1", sc.mfc_natural.lon.gains.KP);
  put("mfc_natural", "alpha2", sc.mfc_natural.lat.alpha);
  put("mfc_natural", "span2", sc.mfc_natural.lat.span);
  put("mfc_natural", "KP2", sc.mfc_natural.lat.gains.KP);
  put("mfc_natural", "KD2", sc.mfc_natural.lat.gains.KD);
  put("mfc_natural", "diff_span", sc.mfc_natural.diff_span);
  put("mfc_natural", "hold_torque", sc.mfc_natural.u_hold.torque);
  put("mfc_natural", "hold_steer", sc.mfc_natural.u_hold.steer);

  put("track", "default_speed", sc.track.default_speed);
  put("track", "ramp_accel", sc.track.ramp_accel);
  put("track", "path_ds", sc.track.path_ds);
  for (const auto& seg : sc.track.segments) {
    cfg.add_item("segments", segment_to_line(seg));
  }
  return cfg;
}

std::vector<std::pair<double, double>> perturbations_from_config(
    const Config& cfg) {
  std::vector<std::pair<double, double>> out;
  for (const auto& v : cfg.all("compare", "perturb")) {
    std::istringstream in(v);
    double cf = 0.0, cr = 0.0;
    if (!(in >> cf >> cr)) {
      throw ConfigError("malformed [compare] perturb entry '" + v +
                        "' (expected: perturb = CF CR)");
    }
    out.emplace_back(cf, cr);
  }
  return out;
}

}  // namespace vtrack
