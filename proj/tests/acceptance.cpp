// Acceptance gate: every release-blocking property of the workbench, one
// printed PASS/FAIL line per check. Exit code is the number of failures,
// so `ctest` and shell pipelines both see the verdict.

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "vtrack/estimators.hpp"
#include "vtrack/flatness.hpp"
#include "vtrack/harness.hpp"
#include "vtrack/mfc.hpp"
#include "vtrack/noise.hpp"
#include "vtrack/params.hpp"
#include "vtrack/plant.hpp"
#include "vtrack/telemetry.hpp"
#include "vtrack/track.hpp"

using namespace vtrack;

namespace {

using Result = std::pair<bool, std::string>;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Differentiator recovers ramp slopes, the denoiser recovers constants, and
// the order-1 drift estimator is silent on a constant signal with zero input.
Result estimator_exactness() {
  const double period = 1e-3;
  const double span = 0.1;

  double ramp = 0.0;
  for (double a : {-5.0, 0.1, 3.0}) {
    SlidingWindow w(span, period);
    for (std::size_t i = 0; i < w.capacity() + 40; ++i) {
      const double t = double(i) * period;
      w.push(a * t + 0.7, t);
    }
    ramp = std::max(ramp, std::abs(*differentiate(w) - a) / std::abs(a));
  }

  SlidingWindow cw(span, period);
  for (std::size_t i = 0; i < cw.capacity(); ++i)
    cw.push(3.7, double(i) * period);
  const double cst = std::abs(*denoise(cw) - 3.7) / 3.7;

  SlidingWindow yw(span, period), uw(span, period);
  for (std::size_t i = 0; i < yw.capacity(); ++i) {
    const double t = double(i) * period;
    yw.push(2.5, t);
    uw.push(0.0, t);
  }
  const double idle = std::abs(*estimate_F_order1(yw, uw, 1.0));

  return {ramp < 1e-3 && cst < 1e-6 && idle < 1e-6,
          fmt("ramp slope rel %.1e (<1e-3), constant rel %.1e (<1e-6), "
              "idle drift %.1e (<1e-6)",
              ramp, cst, idle)};
}

// Constant drift of the ultra-local model is recovered through an arbitrary
// input history: y' = 2 + sin t and y'' = -1 + 2 cos 2t, closed forms pushed
// sample by sample.
Result drift_recovery() {
  const double period = 1e-3;

  double order1 = 0.0;
  {
    SlidingWindow yw(0.05, period), uw(0.05, period);
    for (std::size_t i = 0; double(i) * period <= 3.0; ++i) {
      const double t = double(i) * period;
      yw.push(2.0 * t + 1.0 - std::cos(t), t);
      uw.push(std::sin(t), t);
      if (auto f = estimate_F_order1(yw, uw, 1.0))
        order1 = std::max(order1, std::abs(*f - 2.0) / 2.0);
    }
  }

  double order2 = 0.0;
  {
    SlidingWindow yw(0.1, period), uw(0.1, period);
    for (std::size_t i = 0; i < yw.capacity(); ++i) {
      const double t = double(i) * period;
      yw.push(-0.5 * t * t + 0.5 * (1.0 - std::cos(2.0 * t)), t);
      uw.push(std::cos(2.0 * t), t);
    }
    order2 = std::abs(*estimate_F_order2(yw, uw, 2.0) + 1.0);
  }

  return {order1 < 0.01 && order2 < 0.02,
          fmt("order-1 rel %.1e (<1e-2), order-2 rel %.1e (<2e-2)", order1,
              order2)};
}

// Forward and inverse output maps invert each other on random admissible
// triples; the decoupling determinant agrees between its two code paths and
// never vanishes across the speed range.
Result flat_round_trip() {
  VehicleParams p;

  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double y1 = 1.0 + 49.0 * noise::uniform(31, 0, std::uint64_t(i), 0);
    const double y2 =
        4000.0 * (noise::uniform(31, 1, std::uint64_t(i), 0) - 0.5);
    const double y2d =
        2e4 * (noise::uniform(31, 2, std::uint64_t(i), 0) - 0.5);

    const ChassisTriple c = state_from_flat(y1, y2, y2d, p);
    VehicleState s;
    s.Vx = c.Vx;
    s.Vy = c.Vy;
    s.psi_dot = c.psi_dot;
    const FlatOutputs y = flat_outputs(s, p);
    worst = std::max(worst, std::abs(y.y1 - y1) / std::max(1.0, std::abs(y1)));
    worst = std::max(worst, std::abs(y.y2 - y2) / std::max(1.0, std::abs(y2)));
    worst = std::max(worst, std::abs(flat_y2_rate(s, p) - y2d) /
                                std::max(1.0, std::abs(y2d)));
  }

  double det_gap = 0.0;
  double det_min = HUGE_VAL;
  for (int i = 0; i <= 4900; ++i) {
    const double y1 = 1.0 + 0.01 * double(i);
    const double wf =
        300.0 * (noise::uniform(31, 3, std::uint64_t(i), 0) - 0.5);
    const double closed = delta_det_closed_form(y1, p, wf);
    const double entries = delta_matrix(y1, -120.0, 800.0, p, wf).det();
    det_gap = std::max(det_gap, std::abs(entries - closed) / std::abs(closed));
    det_min = std::min(det_min, std::abs(delta_det_closed_form(y1, p, 0.0)));
  }

  return {worst < 1e-9 && det_gap < 1e-9 && det_min > 0.0,
          fmt("round-trip rel %.1e (<1e-9), det route gap %.1e (<1e-9), "
              "min |det| %.3g (>0)",
              worst, det_gap, det_min)};
}

// Along a plant trajectory the forward difference of [y1; y2_dot] matches
// the input map plus drift; the residual is difference-quotient truncation
// and must halve when dt halves.
Result input_map_consistency() {
  VehicleParams p;
  Plant plant{p};
  const ControlInput u{40.0, 0.02};

  auto residuals = [&](double dt) {
    VehicleState s;
    s.Vx = 20.0;
    s.Vy = 0.3;
    s.psi_dot = 0.1;
    s.omega_f = s.omega_r = s.Vx / p.R;
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < int(0.5 / dt); ++i) {
      const WheelAccels w = plant.wheel_accels(s, u);
      const FlatOutputs y = flat_outputs(s, p);
      const double rate = flat_y2_rate(s, p);
      const DeltaMatrix d = delta_matrix(y.y1, y.y2, rate, p, w.front);
      const auto [phi1, phi2] = phi_term(y.y1, y.y2, rate, p, w);

      const VehicleState n = plant.step(s, u, dt);
      e1 = std::max(e1, std::abs((n.Vx - s.Vx) / dt -
                                 (d.d11 * u.torque + d.d12 * u.steer + phi1)));
      e2 = std::max(e2,
                    std::abs((flat_y2_rate(n, p) - rate) / dt -
                             (d.d21 * u.torque + d.d22 * u.steer + phi2)));
      s = n;
    }
    return std::pair{e1, e2};
  };

  const auto [c1, c2] = residuals(1e-3);
  const auto [f1, f2] = residuals(5e-4);
  const double r1 = c1 / f1;
  const double r2 = c2 / f2;
  const bool shrinks = r1 > 1.4 && r1 < 2.6 && r2 > 1.4 && r2 < 2.6;
  return {c1 < 1e-3 && c2 / 7000.0 < 1e-2 && shrinks,
          fmt("residuals %.1e / %.1e at dt=1ms; halving dt scales them by "
              "%.2f / %.2f (want ~2)",
              c1, c2, r1, r2)};
}

// The intelligent laws cancel the drift they are given, so two closed-loop
// runs differing only in that constant must produce the same error signal.
Result drift_invariance() {
  auto first_order = [](double F) {
    std::vector<double> e;
    const double alpha = 0.8, KP = 3.0, dt = 1e-3;
    double y = 0.4;
    for (int i = 0; i < 4000; ++i) {
      e.push_back(y);
      const double u = ip_control(F, 0.0, y, KP, alpha);
      y += (F + alpha * u) * dt;
    }
    return e;
  };
  auto second_order = [](double F) {
    std::vector<double> e;
    const double alpha = 23.5, KP = 4.0, KD = 4.0, dt = 1e-3;
    double y = 0.3, rate = -0.1;
    for (int i = 0; i < 4000; ++i) {
      e.push_back(y);
      const double u = ipd_control(F, 0.0, y, rate, KP, KD, alpha);
      const double acc = F + alpha * u;
      y += rate * dt + 0.5 * acc * dt * dt;
      rate += acc * dt;
    }
    return e;
  };

  double gap = 0.0;
  const auto a1 = first_order(-50.0), b1 = first_order(120.0);
  for (std::size_t i = 0; i < a1.size(); ++i)
    gap = std::max(gap, std::abs(a1[i] - b1[i]));
  const auto a2 = second_order(-50.0), b2 = second_order(120.0);
  for (std::size_t i = 0; i < a2.size(); ++i)
    gap = std::max(gap, std::abs(a2[i] - b2[i]));

  return {gap < 1e-9,
          fmt("max error gap %.1e (<1e-9) between drift -50 and 120", gap)};
}

// All three controllers track the full default course, noise off.
Result nominal_tracking() {
  bool ok = true;
  std::string detail;
  for (ControllerKind k : {ControllerKind::Flatness, ControllerKind::MfcFlat,
                           ControllerKind::MfcNatural}) {
    ScenarioConfig cfg;
    cfg.controller = k;
    cfg.noise = {0.0, 0.0, 0.0, 0.0, 0.0};
    const RunResult r = run_scenario(cfg);
    ok = ok && r.outcome == RunOutcome::Completed &&
         r.metrics.speed_rms < 0.1 && r.metrics.lat_rms < 0.1;
    detail += fmt("%s lat %.4f speed %.4f; ", to_string(k).c_str(),
                  r.metrics.lat_rms, r.metrics.speed_rms);
  }
  return {ok, detail + "(all <0.1)"};
}

// Softening both axles to 30% must break the model-based controller's run
// (or at least double its lateral RMS) while the deviation-feedback loop
// stays within 20% of its own nominal figure and wins the variant.
Result softened_tire_comparison() {
  ScenarioConfig base;
  const ComparisonTable table = compare_controllers(base, {{0.3, 0.3}});

  auto find = [&](ControllerKind k, double cf) -> const ComparisonEntry* {
    for (const auto& e : table.entries)
      if (e.controller == k && e.cf_scale == cf) return &e;
    return nullptr;
  };
  const auto* fl_nom = find(ControllerKind::Flatness, 1.0);
  const auto* fl_soft = find(ControllerKind::Flatness, 0.3);
  const auto* nat_nom = find(ControllerKind::MfcNatural, 1.0);
  const auto* nat_soft = find(ControllerKind::MfcNatural, 0.3);
  if (!fl_nom || !fl_soft || !nat_nom || !nat_soft)
    return {false, "comparison table is missing rows"};

  const bool fl_degraded =
      fl_soft->outcome != RunOutcome::Completed ||
      fl_soft->metrics.lat_rms >= 2.0 * fl_nom->metrics.lat_rms;
  const double shift =
      std::abs(nat_soft->metrics.lat_rms - nat_nom->metrics.lat_rms) /
      nat_nom->metrics.lat_rms;
  const bool nat_steady = nat_soft->outcome == RunOutcome::Completed &&
                          shift <= 0.2 && nat_soft->rank == 1;

  return {fl_degraded && nat_steady,
          fmt("flatness %s, lat %.3f -> %.3f (want >=2x or failed); "
              "deviation loop shift %.1f%% (<=20%%), rank %d (want 1)",
              to_string(fl_soft->outcome).c_str(), fl_nom->metrics.lat_rms,
              fl_soft->metrics.lat_rms, 100.0 * shift, nat_soft->rank)};
}

// Identical config and seed reproduce the telemetry byte for byte.
Result determinism() {
  ScenarioConfig cfg;
  cfg.controller = ControllerKind::MfcFlat;
  cfg.seed = 42;
  cfg.duration = 5.0;
  const RunResult a = run_scenario(cfg);
  const RunResult b = run_scenario(cfg);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "vtrack_acceptance";
  fs::create_directories(dir);
  write_csv(a.telemetry, (dir / "a.csv").string());
  write_csv(b.telemetry, (dir / "b.csv").string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string sa = slurp(dir / "a.csv");
  const std::string sb = slurp(dir / "b.csv");
  fs::remove_all(dir);

  return {!sa.empty() && sa == sb,
          fmt("repeated seeded run wrote %zu bytes, byte-identical: %s",
              sa.size(), sa == sb ? "yes" : "no")};
}

// The integrator keeps fourth order on a cornering maneuver: halving dt
// against a dt/16 reference must shrink the error ~16x.
Result integrator_order() {
  Plant plant{VehicleParams{}};
  VehicleState s0;
  s0.Vx = 20.0;
  s0.Vy = 0.5;
  s0.psi_dot = 0.2;
  s0.omega_f = s0.omega_r = s0.Vx / plant.params().R;
  const ControlInput u{50.0, 0.05};

  auto integrate = [&](double dt) {
    VehicleState s = s0;
    const int n = int(std::llround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = plant.step(s, u, dt);
    return s;
  };
  auto dist = [](const VehicleState& a, const VehicleState& b) {
    return std::sqrt(std::pow(a.Vx - b.Vx, 2) + std::pow(a.Vy - b.Vy, 2) +
                     std::pow(a.psi_dot - b.psi_dot, 2) +
                     std::pow(a.psi - b.psi, 2) + std::pow(a.X - b.X, 2) +
                     std::pow(a.Y - b.Y, 2));
  };

  const VehicleState ref = integrate(2e-3 / 16.0);
  const double e1 = dist(integrate(2e-3), ref);
  const double e2 = dist(integrate(1e-3), ref);
  const double order = std::log2(e1 / e2);
  return {order > 3.5 && order < 4.5,
          fmt("error %.2e -> %.2e when halving dt, observed order %.2f "
              "(want ~4)",
              e1, e2, order)};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    Result (*run)();
  };
  const Check checks[] = {
      {"estimator exactness", estimator_exactness},
      {"drift recovery", drift_recovery},
      {"flat map round-trip", flat_round_trip},
      {"input-map consistency", input_map_consistency},
      {"drift invariance", drift_invariance},
      {"nominal tracking", nominal_tracking},
      {"softened-tire comparison", softened_tire_comparison},
      {"determinism", determinism},
      {"integrator order", integrator_order},
  };
  const int total = int(sizeof checks / sizeof checks[0]);

  int failures = 0;
  for (int i = 0; i < total; ++i) {
    Result r{false, {}};
    try {
      r = checks[i].run();
    } catch (const std::exception& ex) {
      r = {false, fmt("threw: %s", ex.what())};
    }
    if (!r.first) ++failures;
    std::printf("%s  %d/%d %-26s %s\n", r.first ? "PASS" : "FAIL", i + 1,
                total, checks[i].name, r.second.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d checks passed\n", total - failures, total);
  return failures;
}
