#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vtrack/flatness.hpp"
#include "vtrack/mfc.hpp"
#include "vtrack/noise.hpp"
#include "vtrack/params.hpp"
#include "vtrack/plant.hpp"
#include "vtrack/telemetry.hpp"
#include "vtrack/track.hpp"

namespace vtrack {

enum class ControllerKind { Flatness, MfcFlat, MfcNatural };

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

/// Everything a closed-loop run needs. `params` are the nominal values used
/// for references and model-based control; the plant itself runs with
/// Cf*cf_scale, Cr*cr_scale.
struct ScenarioConfig {
  VehicleParams params;
  double cf_scale = 1.0;
  double cr_scale = 1.0;
  PlantConfig plant;
  ControllerKind controller = ControllerKind::Flatness;
  NoiseConfig noise;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double duration = 0.0;  // 0 = full track
  double warmup = -1.0;   // <0 = 3 * max estimator span of the controller
  TrackSpec track = TrackSpec::default_track();
  FlatnessControllerConfig flatness;
  MfcFlatConfig mfc_flat;
  MfcNaturalConfig mfc_natural;

  /// Limits of whichever controller is selected.
  const ActuatorLimits& active_limits() const;
  /// Effective warmup time (resolves the auto default).
  double effective_warmup() const;
};

struct TrackingMetrics {
  double lat_max = 0.0;        // [m]
  double lat_rms = 0.0;
  double yaw_max = 0.0;        // [rad]
  double yaw_rms = 0.0;
  double speed_rms = 0.0;      // [m/s]
  double effort_torque = 0.0;  // integral of T_w^2 dt
  double effort_steer = 0.0;   // integral of delta^2 dt
  double sat_duty = 0.0;       // fraction of steps at a limit
  double warmup = 0.0;         // excluded leading time [s]
  std::size_t samples = 0;     // rows included
};

enum class RunOutcome { Completed, OffTrack, Diverged, ControllerFault };

std::string to_string(RunOutcome outcome);

struct RunResult {
  RunOutcome outcome = RunOutcome::Completed;
  bool metrics_partial = false;  // true when the run ended early
  TrackingMetrics metrics;
  TelemetryLog telemetry;
  std::string message;  // fault description when not Completed
};

/// Closed-loop execution: plant integrates truth, the selected controller
/// sees noisy measurements, every step is logged, metrics accumulate after
/// the warmup window. Deterministic for a fixed config (incl. seed).
RunResult run_scenario(const ScenarioConfig& config);

/// Post-warmup metrics from a telemetry log (the same routine run_scenario
/// uses, so recomputation from a written CSV reproduces RunResult.metrics).
TrackingMetrics compute_metrics(const TelemetryLog& log, double warmup,
                                const ActuatorLimits& limits, double dt);

/// Serializes metrics + outcome as `key=value` lines.
std::vector<std::pair<std::string, std::string>> metrics_kv(
    const TrackingMetrics& m, RunOutcome outcome);

struct ComparisonEntry {
  ControllerKind controller;
  double cf_scale = 1.0;
  double cr_scale = 1.0;
  RunOutcome outcome = RunOutcome::Completed;
  TrackingMetrics metrics;
  int rank = 0;  // 1 = best lateral RMS within its plant variant; 0 = failed
};

struct ComparisonTable {
  std::vector<ComparisonEntry> entries;

  /// comparison.csv content (one row per entry).
  TelemetryLog as_log() const;
};

/// Runs every controller against the base plant and against each
/// (cf_scale, cr_scale) perturbation, in parallel workers, merged in a
/// fixed order. Failed runs are kept as marked rows, never dropped.
/// If out_dir is nonempty, per-run telemetry/metrics/plot files and the
/// table CSV are written beneath it.
ComparisonTable compare_controllers(
    const ScenarioConfig& base,
    const std::vector<std::pair<double, double>>& perturbations,
    const std::string& out_dir = "");

}  // namespace vtrack
