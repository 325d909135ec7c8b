#include "vtrack/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <optional>
#include <thread>

#include "vtrack/errors.hpp"

namespace vtrack {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Flatness:
      return "flatness";
    case ControllerKind::MfcFlat:
      return "mfc-flat";
    case ControllerKind::MfcNatural:
      return "mfc-natural";
  }
  return "?";
}

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "flatness") return ControllerKind::Flatness;
  if (name == "mfc-flat") return ControllerKind::MfcFlat;
  if (name == "mfc-natural") return ControllerKind::MfcNatural;
  throw ConfigError("unknown controller '" + name +
                    "' (expected flatness, mfc-flat or mfc-natural)");
}

std::string to_string(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::Completed:
      return "completed";
    case RunOutcome::OffTrack:
      return "off-track";
    case RunOutcome::Diverged:
      return "diverged";
    case RunOutcome::ControllerFault:
      return "controller-fault";
  }
  return "?";
}

const ActuatorLimits& ScenarioConfig::active_limits() const {
  switch (controller) {
    case ControllerKind::Flatness:
      return flatness.limits;
    case ControllerKind::MfcFlat:
      return mfc_flat.limits;
    case ControllerKind::MfcNatural:
    default:
      return mfc_natural.limits;
  }
}

double ScenarioConfig::effective_warmup() const {
  if (warmup >= 0.0) return warmup;
  double span = 0.0;
  switch (controller) {
    case ControllerKind::Flatness:
      span = flatness.diff_span;
      break;
    case ControllerKind::MfcFlat:
      span = std::max(mfc_flat.lon.span, mfc_flat.lat.span);
      break;
    case ControllerKind::MfcNatural:
      span = std::max({mfc_natural.lon.span, mfc_natural.lat.span,
                       mfc_natural.diff_span});
      break;
  }
  return 3.0 * span;
}

TrackingMetrics compute_metrics(const TelemetryLog& log, double warmup,
                                const ActuatorLimits& limits, double dt) {
  TrackingMetrics m;
  m.warmup = warmup;
  const std::size_t ct = log.column("t");
  const std::size_t clat = log.column("e_lat");
  const std::size_t cpsi = log.column("e_psi");
  const std::size_t cv = log.column("e_v");
  const std::size_t ctw = log.column("T_w");
  const std::size_t cdl = log.column("delta");

  double lat2 = 0.0, yaw2 = 0.0, v2 = 0.0;
  std::size_t n = 0, sat = 0;
  for (std::size_t r = 0; r < log.rows(); ++r) {
    if (log.at(r, ct) < warmup) continue;
    const double el = log.at(r, clat);
    const double ep = log.at(r, cpsi);
    const double ev = log.at(r, cv);
    const double tw = log.at(r, ctw);
    const double dl = log.at(r, cdl);
    lat2 += el * el;
    yaw2 += ep * ep;
    v2 += ev * ev;
    m.lat_max = std::max(m.lat_max, std::abs(el));
    m.yaw_max = std::max(m.yaw_max, std::abs(ep));
    m.effort_torque += tw * tw * dt;
    m.effort_steer += dl * dl * dt;
    if (std::abs(tw) >= limits.torque_max * (1.0 - 1e-12) ||
        std::abs(dl) >= limits.steer_max * (1.0 - 1e-12)) {
      ++sat;
    }
    ++n;
  }
  if (n > 0) {
    m.lat_rms = std::sqrt(lat2 / double(n));
    m.yaw_rms = std::sqrt(yaw2 / double(n));
    m.speed_rms = std::sqrt(v2 / double(n));
    m.sat_duty = double(sat) / double(n);
  }
  m.samples = n;
  return m;
}

std::vector<std::pair<std::string, std::string>> metrics_kv(
    const TrackingMetrics& m, RunOutcome outcome) {
  return {{"outcome", to_string(outcome)},
          {"lat_max", format_double(m.lat_max)},
          {"lat_rms", format_double(m.lat_rms)},
          {"yaw_max", format_double(m.yaw_max)},
          {"yaw_rms", format_double(m.yaw_rms)},
          {"speed_rms", format_double(m.speed_rms)},
          {"effort_torque", format_double(m.effort_torque)},
          {"effort_steer", format_double(m.effort_steer)},
          {"sat_duty", format_double(m.sat_duty)},
          {"warmup", format_double(m.warmup)},
          {"samples", std::to_string(m.samples)}};
}

namespace {

std::vector<std::string> telemetry_columns(ControllerKind kind) {
  std::vector<std::string> cols = {"t",   "Vx", "Vy",  "psi_dot", "psi",
                                   "X",   "Y",  "T_w", "delta",   "e_lat",
                                   "e_psi", "e_v"};
  if (kind == ControllerKind::Flatness) {
    cols.insert(cols.end(), {"e_y1", "e_y2", "det_delta"});
  } else {
    cols.insert(cols.end(), {"F1_est", "F2_est", "u1", "u2", "e1", "e2"});
  }
  return cols;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.params.validate();
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");

  // References and controller beliefs use nominal parameters; the plant
  // runs the perturbed ones.
  const ReferenceTrajectory traj = generate_track(cfg.track, cfg.params, cfg.dt);
  const VehicleParams plant_params =
      cfg.params.perturbed(cfg.cf_scale, cfg.cr_scale);
  const Plant plant(plant_params, cfg.plant);

  RunResult res;
  res.telemetry = TelemetryLog(telemetry_columns(cfg.controller));

  std::optional<FlatnessController> flat_ctrl;
  std::optional<MfcFlatController> mfc_flat_ctrl;
  std::optional<MfcNaturalController> mfc_nat_ctrl;
  switch (cfg.controller) {
    case ControllerKind::Flatness:
      flat_ctrl.emplace(cfg.params, cfg.flatness, cfg.dt);
      break;
    case ControllerKind::MfcFlat:
      mfc_flat_ctrl.emplace(cfg.mfc_flat, cfg.dt);
      break;
    case ControllerKind::MfcNatural:
      mfc_nat_ctrl.emplace(cfg.mfc_natural, cfg.dt);
      break;
  }

  const double duration = cfg.duration > 0.0
                              ? std::min(cfg.duration, traj.duration())
                              : traj.duration();
  const auto steps = std::size_t(std::floor(duration / cfg.dt));

  VehicleState state = traj.initial_state(plant_params);
  ControlInput prev_u = cfg.active_limits().clamp(ControlInput{});
  std::size_t hint = 0;
  std::vector<double> row(res.telemetry.columns().size());

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = double(k) * cfg.dt;
    const ReferenceSample& ref = traj.sample(std::min(k, traj.size() - 1));
    const PathProjection proj =
        traj.path().project_hinted(state.X, state.Y, state.psi, &hint);
    if (!proj.in_corridor) {
      res.outcome = RunOutcome::OffTrack;
      res.message = "left the corridor at t = " + std::to_string(t) +
                    " s (deviation " + std::to_string(proj.deviation) + " m)";
      break;
    }

    const double e_lat = proj.deviation;
    const double e_psi = proj.heading_error;
    const double e_v = ref.Vx - state.Vx;

    // controller-visible measurements
    const auto& nz = cfg.noise;
    const double vx_m =
        add_noise(state.Vx, nz.speed_sigma, cfg.seed, NoiseChannel::Speed, k);
    const double vy_m = add_noise(state.Vy, nz.vy_sigma, cfg.seed,
                                  NoiseChannel::LateralVelocity, k);
    const double rate_m = add_noise(state.psi_dot, nz.yaw_rate_sigma, cfg.seed,
                                    NoiseChannel::YawRate, k);
    const double dev_m = add_noise(proj.deviation, nz.lateral_sigma, cfg.seed,
                                   NoiseChannel::LateralDeviation, k);
    // longitudinal acceleration as sensed under the input currently held
    const WheelAccels wa_truth = plant.wheel_accels(state, prev_u);
    const double ax_m =
        add_noise(wa_truth.front * plant_params.R, nz.wheel_accel_sigma,
                  cfg.seed, NoiseChannel::WheelAccel, k);

    ControlInput u;
    double extra[6] = {0, 0, 0, 0, 0, 0};
    std::size_t n_extra = 0;
    try {
      switch (cfg.controller) {
        case ControllerKind::Flatness: {
          FlatMeasurement meas;
          meas.y1 = vx_m;
          meas.y2 = cfg.params.Lf * cfg.params.m * vy_m - cfg.params.Iz * rate_m;
          meas.y1_dot = ax_m;
          if (cfg.flatness.exact_y2_dot) {
            meas.y2_dot = flat_y2_rate(state, plant_params);
          }
          FlatReference fref{ref.Vx, ref.Vx_dot, ref.y2, ref.y2_dot,
                             ref.y2_ddot};
          const auto out = flat_ctrl->step(meas, fref, t);
          u = out.u;
          extra[0] = out.e_y1;
          extra[1] = out.e_y2;
          extra[2] = out.det;
          n_extra = 3;
          break;
        }
        case ControllerKind::MfcFlat: {
          const double y2_m =
              cfg.params.Lf * cfg.params.m * vy_m - cfg.params.Iz * rate_m;
          MfcFlatRefs refs{ref.Vx, ref.Vx_dot, ref.y2, ref.y2_dot};
          const auto out = mfc_flat_ctrl->step(vx_m, y2_m, refs, t);
          u = out.u;
          extra[0] = out.F1;
          extra[1] = out.F2;
          extra[2] = out.u.torque;
          extra[3] = out.u.steer;
          extra[4] = out.e1;
          extra[5] = out.e2;
          n_extra = 6;
          break;
        }
        case ControllerKind::MfcNatural: {
          MfcNaturalRefs refs{ref.Vx, ref.Vx_dot};
          const auto out = mfc_nat_ctrl->step(vx_m, dev_m, refs, t);
          u = out.u;
          extra[0] = out.F1;
          extra[1] = out.F2;
          extra[2] = out.u.torque;
          extra[3] = out.u.steer;
          extra[4] = out.e1;
          extra[5] = out.e2;
          n_extra = 6;
          break;
        }
      }
    } catch (const ModelError& err) {
      res.outcome = RunOutcome::ControllerFault;
      res.message = err.what();
      break;
    }

    row[0] = t;
    row[1] = state.Vx;
    row[2] = state.Vy;
    row[3] = state.psi_dot;
    row[4] = state.psi;
    row[5] = state.X;
    row[6] = state.Y;
    row[7] = u.torque;
    row[8] = u.steer;
    row[9] = e_lat;
    row[10] = e_psi;
    row[11] = e_v;
    for (std::size_t i = 0; i < n_extra; ++i) row[12 + i] = extra[i];
    res.telemetry.add_row(row);

    prev_u = u;
    try {
      state = plant.step(state, u, cfg.dt);
    } catch (const std::runtime_error& err) {
      res.outcome = RunOutcome::Diverged;
      res.message = err.what();
      break;
    }
  }

  res.metrics_partial = res.outcome != RunOutcome::Completed;
  res.metrics = compute_metrics(res.telemetry, cfg.effective_warmup(),
                                cfg.active_limits(), cfg.dt);
  return res;
}

namespace {

std::string variant_name(double cf, double cr) {
  if (cf == 1.0 && cr == 1.0) return "nominal";
  char buf[48];
  std::snprintf(buf, sizeof buf, "cf%.2f_cr%.2f", cf, cr);
  return buf;
}

}  // namespace

TelemetryLog ComparisonTable::as_log() const {
  TelemetryLog log({"controller", "cf_scale", "cr_scale", "outcome", "rank",
                    "lat_rms", "lat_max", "yaw_rms", "speed_rms",
                    "effort_torque", "effort_steer", "sat_duty"});
  // controller/outcome are categorical; comparison.csv writes them as
  // indices (see README: 0=flatness, 1=mfc-flat, 2=mfc-natural;
  // 0=completed, 1=off-track, 2=diverged, 3=controller-fault)
  for (const auto& e : entries) {
    const double row[12] = {double(int(e.controller)),
                            e.cf_scale,
                            e.cr_scale,
                            double(int(e.outcome)),
                            double(e.rank),
                            e.metrics.lat_rms,
                            e.metrics.lat_max,
                            e.metrics.yaw_rms,
                            e.metrics.speed_rms,
                            e.metrics.effort_torque,
                            e.metrics.effort_steer,
                            e.metrics.sat_duty};
    log.add_row(row);
  }
  return log;
}

ComparisonTable compare_controllers(
    const ScenarioConfig& base,
    const std::vector<std::pair<double, double>>& perturbations,
    const std::string& out_dir) {
  std::vector<std::pair<double, double>> variants;
  variants.emplace_back(base.cf_scale, base.cr_scale);
  variants.insert(variants.end(), perturbations.begin(), perturbations.end());
  const ControllerKind kinds[] = {ControllerKind::Flatness,
                                  ControllerKind::MfcFlat,
                                  ControllerKind::MfcNatural};

  struct Job {
    ScenarioConfig cfg;
    std::size_t variant;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (const auto kind : kinds) {
      ScenarioConfig cfg = base;
      cfg.controller = kind;
      cfg.cf_scale = variants[v].first;
      cfg.cr_scale = variants[v].second;
      jobs.push_back({std::move(cfg), v});
    }
  }

  std::vector<std::future<RunResult>> futures;
  futures.reserve(jobs.size());
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async,
                                 [&job] { return run_scenario(job.cfg); }));
  }

  ComparisonTable table;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    RunResult res = futures[i].get();
    ComparisonEntry e;
    e.controller = jobs[i].cfg.controller;
    e.cf_scale = jobs[i].cfg.cf_scale;
    e.cr_scale = jobs[i].cfg.cr_scale;
    e.outcome = res.outcome;
    e.metrics = res.metrics;
    table.entries.push_back(e);
    if (!out_dir.empty()) {
      const std::string run_dir =
          out_dir + "/" + to_string(e.controller) + "_" +
          variant_name(e.cf_scale, e.cr_scale);
      std::filesystem::create_directories(run_dir);
      write_csv(res.telemetry, run_dir + "/telemetry.csv");
      write_kv(run_dir + "/metrics.txt", metrics_kv(res.metrics, res.outcome));
      emit_plot_data(res.telemetry, run_dir + "/plots");
    }
  }

  // rank completed runs by lateral RMS within each plant variant
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].variant == v &&
          table.entries[i].outcome == RunOutcome::Completed) {
        idx.push_back(i);
      }
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return table.entries[a].metrics.lat_rms < table.entries[b].metrics.lat_rms;
    });
    for (std::size_t r = 0; r < idx.size(); ++r) {
      table.entries[idx[r]].rank = int(r) + 1;
    }
  }

  if (!out_dir.empty()) {
    write_csv(table.as_log(), out_dir + "/comparison.csv");
  }
  return table;
}

}  // namespace vtrack
