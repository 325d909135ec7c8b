#include "vtrack/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtrack/errors.hpp"
#include "vtrack/plant.hpp"

namespace vtrack {

namespace {

constexpr double kJointTol = 1e-12;  // curvature continuity [1/m]

double wrap_pi(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

double arc_curvature(const SegmentSpec& seg, std::size_t index) {
  if (!(seg.radius > 0.0)) {
    throw DataError("segment " + std::to_string(index) +
                    ": arc radius must be positive");
  }
  if (seg.angle_deg == 0.0) {
    throw DataError("segment " + std::to_string(index) +
                    ": arc sweep angle must be nonzero");
  }
  return (seg.angle_deg > 0.0 ? 1.0 : -1.0) / seg.radius;
}

}  // namespace

TrackSpec TrackSpec::default_track() {
  TrackSpec t;
  auto straight = [](double len, double v) {
    SegmentSpec s;
    s.kind = SegmentSpec::Kind::Straight;
    s.length = len;
    s.speed = v;
    return s;
  };
  auto arc = [](double radius, double angle, double v) {
    SegmentSpec s;
    s.kind = SegmentSpec::Kind::Arc;
    s.radius = radius;
    s.angle_deg = angle;
    s.speed = v;
    return s;
  };
  auto clothoid_at = [](double len, double v) {
    SegmentSpec s;
    s.kind = SegmentSpec::Kind::Clothoid;
    s.length = len;
    s.speed = v;
    return s;
  };
  // ~2 km: two curves (R=120 left, R=50 right) joined by clothoids, speeds
  // 9..19.4 m/s (32..70 km/h). Curve complexes carry one constant speed so
  // every ramp (at 1.5 m/s^2) lands in a straight's tail, where the lateral
  // reference states are quiescent.
  t.segments = {straight(400.0, 16.7),
                clothoid_at(80.0, 14.0),
                arc(120.0, 90.0, 14.0),
                clothoid_at(80.0, 14.0),
                straight(180.0, 14.0),
                straight(270.0, 19.4),
                clothoid_at(110.0, 9.0),
                arc(50.0, -150.0, 9.0),
                clothoid_at(90.0, 9.0),
                straight(160.0, 9.0),
                straight(310.6, 16.7)};
  return t;
}

Path::Path(const TrackSpec& spec) {
  const auto& segs = spec.segments;
  if (segs.empty()) throw DataError("track has no segments");
  if (!(spec.path_ds > 0.0)) throw DataError("path_ds must be positive");

  segments_.reserve(segs.size());
  double s0 = 0.0, psi0 = 0.0, exit_kappa = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const SegmentSpec& seg = segs[i];
    SegmentGeom g;
    g.s0 = s0;
    g.psi0 = psi0;
    switch (seg.kind) {
      case SegmentSpec::Kind::Straight: {
        if (!(seg.length > 0.0)) {
          throw DataError("segment " + std::to_string(i) +
                          ": straight length must be positive");
        }
        g.length = seg.length;
        g.kappa0 = g.kappa1 = 0.0;
        break;
      }
      case SegmentSpec::Kind::Arc: {
        const double k = arc_curvature(seg, i);
        g.length = seg.radius * std::abs(seg.angle_deg) * M_PI / 180.0;
        g.kappa0 = g.kappa1 = k;
        break;
      }
      case SegmentSpec::Kind::Clothoid: {
        if (!(seg.length > 0.0)) {
          throw DataError("segment " + std::to_string(i) +
                          ": clothoid length must be positive");
        }
        g.length = seg.length;
        g.kappa0 = exit_kappa;
        if (i + 1 >= segs.size()) {
          g.kappa1 = 0.0;  // taper out at track end
        } else if (segs[i + 1].kind == SegmentSpec::Kind::Straight) {
          g.kappa1 = 0.0;
        } else if (segs[i + 1].kind == SegmentSpec::Kind::Arc) {
          g.kappa1 = arc_curvature(segs[i + 1], i + 1);
        } else {
          throw DataError("segment " + std::to_string(i) +
                          ": consecutive clothoids are not supported");
        }
        break;
      }
    }
    if (seg.kind != SegmentSpec::Kind::Clothoid &&
        std::abs(g.kappa0 - exit_kappa) > kJointTol) {
      throw DataError(
          "curvature jump at joint " + std::to_string(i) + ": " +
          std::to_string(exit_kappa) + " -> " + std::to_string(g.kappa0) +
          " 1/m; insert a clothoid");
    }
    segments_.push_back(g);
    s0 += g.length;
    psi0 += 0.5 * (g.kappa0 + g.kappa1) * g.length;
    exit_kappa = g.kappa1;
  }
  total_length_ = s0;

  const auto n = static_cast<std::size_t>(
      std::max<long long>(2, std::llround(std::ceil(total_length_ / spec.path_ds))));
  ds_ = total_length_ / double(n);
  pts_.resize(n + 1);
  double X = 0.0, Y = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = double(i) * ds_;
    pts_[i] = {s, X, Y, psi(s), kappa(s)};
    if (i < n) {
      // Simpson over [s, s+ds] with the analytic heading
      const double pm = psi(s + 0.5 * ds_);
      const double pe = psi(s + ds_);
      X += ds_ / 6.0 * (std::cos(pts_[i].psi) + 4.0 * std::cos(pm) + std::cos(pe));
      Y += ds_ / 6.0 * (std::sin(pts_[i].psi) + 4.0 * std::sin(pm) + std::sin(pe));
    }
  }
}

std::vector<double> Path::segment_starts() const {
  std::vector<double> out;
  out.reserve(segments_.size());
  for (const auto& g : segments_) out.push_back(g.s0);
  return out;
}

const Path::SegmentGeom& Path::segment_at(double s) const {
  // last segment whose s0 <= s
  std::size_t lo = 0, hi = segments_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (segments_[mid].s0 <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return segments_[lo];
}

double Path::kappa(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const SegmentGeom& g = segment_at(s);
  const double u = s - g.s0;
  return g.kappa0 + (g.kappa1 - g.kappa0) * u / g.length;
}

double Path::kappa_rate(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const SegmentGeom& g = segment_at(s);
  return (g.kappa1 - g.kappa0) / g.length;
}

double Path::psi(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const SegmentGeom& g = segment_at(s);
  const double u = s - g.s0;
  return g.psi0 + g.kappa0 * u +
         0.5 * (g.kappa1 - g.kappa0) * u * u / g.length;
}

void Path::position(double s, double& X, double& Y) const {
  s = std::clamp(s, 0.0, total_length_);
  const auto i = std::min<std::size_t>(pts_.size() - 1,
                                       std::size_t(std::floor(s / ds_)));
  const PathPoint& p = pts_[i];
  const double rem = s - p.s;
  if (rem <= 0.0) {
    X = p.X;
    Y = p.Y;
    return;
  }
  const double pm = psi(p.s + 0.5 * rem);
  const double pe = psi(s);
  X = p.X + rem / 6.0 * (std::cos(p.psi) + 4.0 * std::cos(pm) + std::cos(pe));
  Y = p.Y + rem / 6.0 * (std::sin(p.psi) + 4.0 * std::sin(pm) + std::sin(pe));
}

PathProjection Path::project_near(double X, double Y, double psi_v,
                                  std::size_t lo, std::size_t hi) const {
  std::size_t best = lo;
  double best_d2 = std::numeric_limits<double>::max();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double dx = X - pts_[i].X;
    const double dy = Y - pts_[i].Y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  // refine on the chords adjacent to the best grid point
  double out_d2 = std::numeric_limits<double>::max();
  double out_s = pts_[best].s, out_cross = 0.0;
  const std::size_t j0 = best > 0 ? best - 1 : 0;
  const std::size_t j1 = std::min(best, pts_.size() - 2);
  for (std::size_t j = j0; j <= j1; ++j) {
    const PathPoint& a = pts_[j];
    const PathPoint& b = pts_[j + 1];
    const double ex = b.X - a.X, ey = b.Y - a.Y;
    const double len2 = ex * ex + ey * ey;
    double tpar = ((X - a.X) * ex + (Y - a.Y) * ey) / len2;
    tpar = std::clamp(tpar, 0.0, 1.0);
    const double cx = a.X + tpar * ex, cy = a.Y + tpar * ey;
    const double ox = X - cx, oy = Y - cy;
    const double d2 = ox * ox + oy * oy;
    if (d2 < out_d2) {
      out_d2 = d2;
      out_s = a.s + tpar * (b.s - a.s);
      // perpendicular offset, left of tangent positive
      out_cross = (ex * oy - ey * ox) / std::sqrt(len2);
    }
  }
  PathProjection r;
  r.deviation = out_cross;
  r.s = out_s;
  r.heading_error = wrap_pi(psi_v - psi(out_s));
  r.in_corridor = std::abs(r.deviation) <= kCorridorHalfWidth;
  return r;
}

PathProjection Path::project(double X, double Y, double psi_v) const {
  return project_near(X, Y, psi_v, 0, pts_.size() - 1);
}

PathProjection Path::project_hinted(double X, double Y, double psi_v,
                                    std::size_t* hint,
                                    std::size_t window) const {
  const std::size_t n = pts_.size() - 1;
  const std::size_t c = std::min(*hint, n);
  const std::size_t lo = c > window ? c - window : 0;
  const std::size_t hi = std::min(n, c + window);
  PathProjection r = project_near(X, Y, psi_v, lo, hi);
  const auto idx = std::size_t(std::llround(r.s / ds_));
  // windowed minimum pinned to the window edge: distrust it, rescan fully
  if ((idx <= lo && lo > 0) || (idx >= hi && hi < n)) {
    r = project(X, Y, psi_v);
    *hint = std::size_t(std::llround(r.s / ds_));
    return r;
  }
  *hint = idx;
  return r;
}

SpeedProfile::SpeedProfile(const TrackSpec& spec,
                           const std::vector<double>& seg_starts,
                           double total_length) {
  const auto& segs = spec.segments;
  if (!(spec.ramp_accel > 0.0)) throw DataError("ramp_accel must be positive");
  std::vector<double> entry(segs.size());
  double carry = spec.default_speed;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].speed != 0.0) carry = segs[i].speed;
    if (!(carry >= kVxMin)) {
      throw DataError("segment " + std::to_string(i) + ": speed " +
                      std::to_string(carry) + " m/s below minimum " +
                      std::to_string(kVxMin));
    }
    entry[i] = carry;
  }

  nodes_.push_back({0.0, entry[0]});
  max_speed_ = entry[0];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double seg_end =
        (i + 1 < segs.size()) ? seg_starts[i + 1] : total_length;
    const double v0 = entry[i];
    const double v1 = (i + 1 < segs.size()) ? entry[i + 1] : entry[i];
    max_speed_ = std::max(max_speed_, std::max(v0, v1));
    if (v0 == v1) continue;
    const double seg_len = seg_end - seg_starts[i];
    double d = std::abs(v1 * v1 - v0 * v0) / (2.0 * spec.ramp_accel);
    d = std::min(d, 0.95 * seg_len);
    nodes_.push_back({seg_end - d, v0});
    nodes_.push_back({seg_end, v1});
    breaks_.push_back(seg_end - d);
    breaks_.push_back(seg_end);
  }
  if (nodes_.back().s < total_length) {
    nodes_.push_back({total_length, nodes_.back().v});
  }
}

double SpeedProfile::speed(double s) const {
  if (s <= nodes_.front().s) return nodes_.front().v;
  if (s >= nodes_.back().s) return nodes_.back().v;
  std::size_t lo = 0, hi = nodes_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (nodes_[mid].s <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Node& a = nodes_[lo];
  const Node& b = nodes_[hi];
  if (b.s == a.s) return b.v;
  return a.v + (b.v - a.v) * (s - a.s) / (b.s - a.s);
}

double SpeedProfile::speed_rate(double s) const {
  if (s <= nodes_.front().s || s >= nodes_.back().s) return 0.0;
  std::size_t lo = 0, hi = nodes_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (nodes_[mid].s <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Node& a = nodes_[lo];
  const Node& b = nodes_[hi];
  if (b.s == a.s) return 0.0;
  return (b.v - a.v) / (b.s - a.s);
}

ReferenceTrajectory::ReferenceTrajectory(const TrackSpec& spec,
                                         const VehicleParams& params,
                                         double dt)
    : path_(spec), dt_(dt) {
  if (!(dt > 0.0)) throw DataError("reference grid needs dt > 0");
  params.validate();
  const SpeedProfile profile(spec, path_.segment_starts(), path_.total_length());

  const double L = params.wheelbase();
  const double lfm = params.Lf * params.m;
  const double CrL = params.Cr * L;
  const double S = path_.total_length();

  // Lateral reference synthesis. The CG rides the path exactly when the
  // velocity-vector angle psi + Vy/Vx equals the path tangent, i.e.
  //   psi_dot = kappa*V - d/dt(Vy/V),
  // while every trajectory of the nominal chassis obeys the rear-axle
  // identity (input-independent):
  //   d/dt(Lf m Vy - Iz psi_dot) = -Lf m V psi_dot - Cr L (Vy - Lr psi_dot)/V.
  // Substituting the first into the second leaves one second-order ODE in
  // nu = Vy_ref, integrated here alongside s. Everything downstream (psi_dot,
  // y2 and its derivatives) is algebraic in (s, nu, nu_dot).
  struct SynthState {
    double s, nu, w;  // w = d nu / dt
  };
  auto psi_dot_of = [&](double nu, double w, double k, double V, double Vd) {
    return k * V - w / V + nu * Vd / (V * V);
  };
  auto psi_ddot_dyn = [&](double nu, double w, double pd, double V) {
    return (lfm * w + lfm * V * pd + CrL * (nu - params.Lr * pd) / V) /
           params.Iz;
  };
  auto deriv = [&](const SynthState& x) {
    const double sc = std::min(x.s, S);
    const double V = profile.speed(sc);
    const double Vp = profile.speed_rate(sc);
    const double Vd = Vp * V;          // dV/dt
    const double Vdd = Vp * Vp * V;    // d2V/dt2 (piecewise-linear profile)
    const double k = path_.kappa(sc);
    const double kp = path_.kappa_rate(sc);
    const double pd = psi_dot_of(x.nu, x.w, k, V, Vd);
    const double pdd = psi_ddot_dyn(x.nu, x.w, pd, V);
    SynthState d;
    d.s = V;
    d.nu = x.w;
    d.w = V * (kp * V * V + k * Vd - pdd) + 2.0 * x.w * Vd / V +
          x.nu * Vdd / V - 2.0 * x.nu * Vd * Vd / (V * V);
    return d;
  };

  auto fill = [&](double t, const SynthState& x) {
    ReferenceSample r;
    r.t = t;
    r.s = x.s;
    const double V = profile.speed(x.s);
    const double Vp = profile.speed_rate(x.s);
    const double Vd = Vp * V;
    const double k = path_.kappa(x.s);
    r.kappa = k;
    r.Vx = V;
    r.Vx_dot = Vd;
    path_.position(x.s, r.X, r.Y);
    r.psi = path_.psi(x.s);
    const double pd = psi_dot_of(x.nu, x.w, k, V, Vd);
    const double pdd = psi_ddot_dyn(x.nu, x.w, pd, V);
    r.psi_dot = pd;
    r.y2 = lfm * x.nu - params.Iz * pd;
    r.y2_dot = -lfm * V * pd - CrL * (x.nu - params.Lr * pd) / V;
    r.y2_ddot = -lfm * (Vd * pd + V * pdd) -
                CrL * ((x.w - params.Lr * pdd) / V -
                       (x.nu - params.Lr * pd) * Vd / (V * V));
    return r;
  };

  const auto max_steps = std::size_t(2.0 * S / (kVxMin * dt)) + 16;
  SynthState x{0.0, 0.0, 0.0};
  // steady-state start (exact on straights and constant arcs)
  x.nu = path_.kappa(0.0) * profile.speed(0.0) *
         (params.Lr - lfm * profile.speed(0.0) * profile.speed(0.0) / CrL);
  for (std::size_t k = 0; k <= max_steps; ++k) {
    samples_.push_back(fill(double(k) * dt, x));
    if (x.s >= S) break;
    const SynthState k1 = deriv(x);
    const SynthState k2 = deriv({x.s + 0.5 * dt * k1.s, x.nu + 0.5 * dt * k1.nu,
                                 x.w + 0.5 * dt * k1.w});
    const SynthState k3 = deriv({x.s + 0.5 * dt * k2.s, x.nu + 0.5 * dt * k2.nu,
                                 x.w + 0.5 * dt * k2.w});
    const SynthState k4 =
        deriv({x.s + dt * k3.s, x.nu + dt * k3.nu, x.w + dt * k3.w});
    x.s = std::min(S, x.s + dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s));
    x.nu += dt / 6.0 * (k1.nu + 2.0 * k2.nu + 2.0 * k3.nu + k4.nu);
    x.w += dt / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  }
  if (samples_.back().s < S - 0.01 * S) {
    throw DataError("speed profile never reaches the track end");
  }

  // Consistency: analytic y2_dot must match a centered difference of y2
  // away from the (known) curvature and ramp breakpoints.
  std::vector<double> breaks = profile.breakpoints();
  for (double b : path_.segment_starts()) breaks.push_back(b);
  breaks.push_back(S);
  std::sort(breaks.begin(), breaks.end());
  const double margin = 3.0 * profile.max_speed() * dt;
  double scale = 1.0;
  for (const auto& r : samples_) scale = std::max(scale, std::abs(r.y2_dot));
  for (std::size_t k = 1; k + 1 < samples_.size(); ++k) {
    const double sk = samples_[k].s;
    bool near_break = false;
    for (double b : breaks) {
      if (std::abs(sk - b) < margin) {
        near_break = true;
        break;
      }
    }
    if (near_break) continue;
    const double fd =
        (samples_[k + 1].y2 - samples_[k - 1].y2) / (2.0 * dt);
    if (std::abs(fd - samples_[k].y2_dot) > 0.01 * scale) {
      throw DataError("reference derivative inconsistency at t = " +
                      std::to_string(samples_[k].t) + " s");
    }
  }
}

VehicleState ReferenceTrajectory::initial_state(
    const VehicleParams& params) const {
  const ReferenceSample& r0 = samples_.front();
  VehicleState s;
  s.Vx = r0.Vx;
  s.psi_dot = r0.psi_dot;
  const double L = params.wheelbase();
  const double side =
      params.Lr - params.Lf * params.m * r0.Vx * r0.Vx / (params.Cr * L);
  s.Vy = r0.psi_dot * side;
  s.psi = r0.psi;
  s.X = r0.X;
  s.Y = r0.Y;
  s.omega_f = s.omega_r = r0.Vx / params.R;
  return s;
}

ReferenceTrajectory generate_track(const TrackSpec& spec,
                                   const VehicleParams& params, double dt) {
  return ReferenceTrajectory(spec, params, dt);
}

PathProjection lateral_deviation(const VehicleState& state, const Path& path) {
  return path.project(state.X, state.Y, state.psi);
}

}  // namespace vtrack
