#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "vtrack/errors.hpp"
#include "vtrack/track.hpp"

using namespace vtrack;

namespace {

SegmentSpec straight(double len, double v = 0.0) {
  SegmentSpec s;
  s.kind = SegmentSpec::Kind::Straight;
  s.length = len;
  s.speed = v;
  return s;
}

SegmentSpec arc(double radius, double angle_deg, double v = 0.0) {
  SegmentSpec s;
  s.kind = SegmentSpec::Kind::Arc;
  s.radius = radius;
  s.angle_deg = angle_deg;
  s.speed = v;
  return s;
}

SegmentSpec clothoid(double len, double v = 0.0) {
  SegmentSpec s;
  s.kind = SegmentSpec::Kind::Clothoid;
  s.length = len;
  s.speed = v;
  return s;
}

TrackSpec spec_of(std::vector<SegmentSpec> segs) {
  TrackSpec t;
  t.segments = std::move(segs);
  return t;
}

}  // namespace

TEST_CASE("straight track is the x axis") {
  Path p(spec_of({straight(500.0)}));
  CHECK(p.total_length() == doctest::Approx(500.0));
  for (const auto& pt : p.grid()) {
    CHECK(pt.psi == 0.0);
    CHECK(pt.kappa == 0.0);
    CHECK(pt.Y == 0.0);
    CHECK(pt.X == doctest::Approx(pt.s).epsilon(1e-12));
  }
  double X, Y;
  p.position(123.456, X, Y);
  CHECK(X == doctest::Approx(123.456).epsilon(1e-12));
  CHECK(Y == 0.0);
}

TEST_CASE("constant-radius arc has the analytic curvature and heading") {
  // Arcs cannot open a track (curvature would jump at the start line), so
  // taper in and out with clothoids.
  Path p(spec_of({clothoid(50.0), arc(100.0, 90.0), clothoid(50.0)}));
  const double arc_len = 100.0 * M_PI / 2.0;
  CHECK(p.total_length() == doctest::Approx(100.0 + arc_len));

  // interior of the arc
  for (double u : {10.0, 0.4 * arc_len, arc_len - 10.0}) {
    const double s = 50.0 + u;
    CHECK(p.kappa(s) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(p.kappa_rate(s) == 0.0);
    // heading = clothoid sweep + arc progression
    CHECK(p.psi(s) == doctest::Approx(0.25 + 0.01 * u).epsilon(1e-12));
  }
  // clothoid interior: linear curvature, quadratic heading
  CHECK(p.kappa(25.0) == doctest::Approx(0.005));
  CHECK(p.kappa_rate(25.0) == doctest::Approx(0.01 / 50.0));
  CHECK(p.psi(25.0) == doctest::Approx(0.5 * (0.01 / 50.0) * 25.0 * 25.0));
  // net heading = integral of curvature
  CHECK(p.psi(p.total_length()) ==
        doctest::Approx(0.25 + M_PI / 2.0 + 0.25).epsilon(1e-12));
}

TEST_CASE("heading equals the running integral of curvature") {
  Path p(TrackSpec::default_track());
  const double S = p.total_length();
  const int n = 200000;
  const double h = S / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    // midpoint rule; kappa is piecewise linear so this is near-exact except
    // for the cells straddling segment joints
    acc += p.kappa((i + 0.5) * h) * h;
  }
  CHECK(p.psi(S) == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("positions converge under grid refinement") {
  TrackSpec coarse = spec_of({clothoid(60.0), arc(80.0, 120.0), clothoid(60.0)});
  TrackSpec fine = coarse;
  fine.path_ds = 0.01;
  Path pc(coarse), pf(fine);
  REQUIRE(pc.total_length() == doctest::Approx(pf.total_length()));
  for (int i = 1; i <= 20; ++i) {
    const double s = pc.total_length() * double(i) / 21.0;
    double xc, yc, xf, yf;
    pc.position(s, xc, yc);
    pf.position(s, xf, yf);
    CHECK(xc == doctest::Approx(xf).epsilon(1e-9));
    CHECK(yc == doctest::Approx(yf).epsilon(1e-9));
  }
}

TEST_CASE("arc-length parametrization: chord length matches ds") {
  Path p(TrackSpec::default_track());
  for (double s : {100.0, 500.0, 900.0, 1500.0}) {
    double x0, y0, x1, y1;
    p.position(s, x0, y0);
    const double d = 0.05;
    p.position(s + d, x1, y1);
    CHECK(std::hypot(x1 - x0, y1 - y0) == doctest::Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("curvature-discontinuous joints are rejected by name") {
  CHECK_THROWS_WITH_AS(Path(spec_of({straight(100.0), arc(100.0, 90.0)})),
                       doctest::Contains("joint 1"), DataError);
  CHECK_THROWS_WITH_AS(Path(spec_of({straight(100.0), arc(100.0, 90.0)})),
                       doctest::Contains("insert a clothoid"), DataError);
  CHECK_THROWS_WITH_AS(Path(spec_of({arc(100.0, 45.0)})),
                       doctest::Contains("joint 0"), DataError);
  CHECK_THROWS_WITH_AS(
      Path(spec_of({straight(10.0), clothoid(10.0), clothoid(10.0)})),
      doctest::Contains("consecutive clothoids"), DataError);
  CHECK_THROWS_AS(Path(spec_of({})), DataError);
  CHECK_THROWS_AS(Path(spec_of({straight(-5.0)})), DataError);
  CHECK_THROWS_AS(Path(spec_of({arc(-100.0, 90.0), clothoid(1.0)})), DataError);
  CHECK_THROWS_AS(Path(spec_of({clothoid(10.0), arc(100.0, 0.0)})), DataError);
}

TEST_CASE("projection of on-path and laterally offset poses") {
  Path p(spec_of({straight(500.0)}));

  auto on = p.project(200.0, 0.0, 0.0);
  CHECK(std::abs(on.deviation) < 1e-12);
  CHECK(std::abs(on.heading_error) < 1e-12);
  CHECK(on.s == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(on.in_corridor);

  auto left = p.project(200.0, 0.5, 0.02);
  CHECK(left.deviation == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(left.heading_error == doctest::Approx(0.02).epsilon(1e-9));

  auto right = p.project(200.0, -1.5, 0.0);
  CHECK(right.deviation == doctest::Approx(-1.5).epsilon(1e-9));

  auto far = p.project(200.0, 25.0, 0.0);
  CHECK(far.deviation == doctest::Approx(25.0).epsilon(1e-9));
  CHECK_FALSE(far.in_corridor);

  // heading wraps to (-pi, pi]
  auto wrapped = p.project(200.0, 0.0, M_PI + 0.1);
  CHECK(wrapped.heading_error == doctest::Approx(0.1 - M_PI).epsilon(1e-9));
}

TEST_CASE("projection recovers constructed offsets on a curved track") {
  // Gentle single-bend layout: unlike the default track (whose hairpin
  // brings two passes within a couple of metres of each other), no part of
  // this path comes near any other, so the nearest point is always the one
  // the offset was built from.
  Path p(spec_of({straight(300.0), clothoid(80.0), arc(120.0, 60.0),
                  clothoid(80.0), straight(300.0)}));
  const auto& grid = p.grid();
  const std::size_t n = grid.size();
  for (std::size_t i = 200; i + 200 < n; i += 537) {
    const PathPoint& pt = grid[i];
    for (double d : {-2.0, 1.5}) {
      const double X = pt.X - d * std::sin(pt.psi);
      const double Y = pt.Y + d * std::cos(pt.psi);
      auto r = p.project(X, Y, pt.psi + 0.05);
      CHECK(r.deviation == doctest::Approx(d).epsilon(2e-4));
      CHECK(std::abs(r.s - pt.s) < 0.05);
      CHECK(r.heading_error == doctest::Approx(0.05).epsilon(1e-3));
    }
  }
}

TEST_CASE("hinted projection tracks the full scan") {
  Path p(spec_of({straight(300.0), clothoid(80.0), arc(120.0, 60.0),
                  clothoid(80.0), straight(300.0)}));
  const auto& grid = p.grid();
  std::size_t hint = 0;
  for (std::size_t i = 5; i < grid.size(); i += 40) {
    const PathPoint& pt = grid[i];
    const double X = pt.X - 0.8 * std::sin(pt.psi);
    const double Y = pt.Y + 0.8 * std::cos(pt.psi);
    auto fast = p.project_hinted(X, Y, pt.psi, &hint);
    auto full = p.project(X, Y, pt.psi);
    CHECK(fast.deviation == full.deviation);
    CHECK(fast.s == full.s);
    CHECK(fast.heading_error == full.heading_error);
  }
}

TEST_CASE("hinted projection stays on its own pass where the track self-approaches") {
  // The default track's hairpin return leg passes within a few metres of
  // the outbound leg. A global nearest-point scan may hop to the other
  // pass there; the windowed projection walked along the path must not.
  Path p(TrackSpec::default_track());
  const auto& grid = p.grid();
  std::size_t hint = 0;
  for (std::size_t i = 5; i + 5 < grid.size(); i += 40) {
    const PathPoint& pt = grid[i];
    const double X = pt.X - 0.8 * std::sin(pt.psi);
    const double Y = pt.Y + 0.8 * std::cos(pt.psi);
    auto r = p.project_hinted(X, Y, pt.psi, &hint);
    CHECK(r.deviation == doctest::Approx(0.8).epsilon(2e-4));
    CHECK(std::abs(r.s - pt.s) < 0.05);
  }
}

TEST_CASE("hinted projection rescans when the window minimum is pinned") {
  Path p(TrackSpec::default_track());
  double X, Y;
  p.position(1500.0, X, Y);
  std::size_t hint = 0;  // ~15000 grid points away from the true foot
  auto fast = p.project_hinted(X, Y, 0.0, &hint);
  auto full = p.project(X, Y, 0.0);
  CHECK(fast.s == full.s);
  CHECK(fast.deviation == full.deviation);
  CHECK(hint == std::size_t(std::llround(full.s / p.grid_ds())));
}

TEST_CASE("speed profile places ramps in the tail of the leading segment") {
  TrackSpec t = spec_of({straight(200.0, 10.0), straight(300.0, 20.0)});
  Path p(t);
  SpeedProfile prof(t, p.segment_starts(), p.total_length());

  // ramp distance: (20^2 - 10^2) / (2 * 1.5) = 100 m, so it spans [100, 200]
  CHECK(prof.speed(0.0) == doctest::Approx(10.0));
  CHECK(prof.speed(99.0) == doctest::Approx(10.0));
  CHECK(prof.speed(150.0) == doctest::Approx(15.0));
  CHECK(prof.speed(200.0) == doctest::Approx(20.0));
  CHECK(prof.speed(450.0) == doctest::Approx(20.0));
  CHECK(prof.speed_rate(50.0) == 0.0);
  CHECK(prof.speed_rate(150.0) == doctest::Approx(0.1));
  CHECK(prof.speed_rate(300.0) == 0.0);
  CHECK(prof.max_speed() == doctest::Approx(20.0));
  REQUIRE(prof.breakpoints().size() == 2);
  CHECK(prof.breakpoints()[0] == doctest::Approx(100.0));
  CHECK(prof.breakpoints()[1] == doctest::Approx(200.0));
}

TEST_CASE("speed profile caps ramps at 95 percent of the segment") {
  TrackSpec t = spec_of({straight(100.0, 5.0), straight(400.0, 30.0)});
  Path p(t);
  SpeedProfile prof(t, p.segment_starts(), p.total_length());
  // unconstrained ramp would need (900 - 25) / 3 = 291.7 m
  CHECK(prof.speed(5.0) == doctest::Approx(5.0));
  CHECK(prof.speed(100.0) == doctest::Approx(30.0));
  CHECK(prof.breakpoints().front() == doctest::Approx(5.0));
}

TEST_CASE("speeds below the model floor are rejected") {
  TrackSpec t = spec_of({straight(100.0, 10.0), straight(100.0, 0.3)});
  CHECK_THROWS_WITH_AS(ReferenceTrajectory(t, VehicleParams{}, 1e-3),
                       doctest::Contains("segment 1"), DataError);
}

TEST_CASE("straight-track reference is exactly quiescent laterally") {
  TrackSpec t = spec_of({straight(400.0, 20.0)});
  ReferenceTrajectory ref(t, VehicleParams{}, 1e-3);

  // 400 m at 20 m/s: 20001 grid samples, plus at most one overhang sample
  // when accumulated arc length lands a rounding error short of the end.
  CHECK(ref.size() >= 20001);
  CHECK(ref.size() <= 20002);
  CHECK(ref.duration() == doctest::Approx(20.0).epsilon(1e-3));
  for (std::size_t k = 0; k < ref.size(); k += 997) {
    const auto& r = ref.sample(k);
    CHECK(r.t == doctest::Approx(double(k) * 1e-3));
    CHECK(r.Vx == 20.0);
    CHECK(r.Vx_dot == 0.0);
    CHECK(r.kappa == 0.0);
    CHECK(r.psi == 0.0);
    CHECK(r.psi_dot == 0.0);
    CHECK(r.y2 == 0.0);
    CHECK(r.y2_dot == 0.0);
    CHECK(r.y2_ddot == 0.0);
    CHECK(r.Y == 0.0);
    CHECK(r.X == doctest::Approx(r.s).epsilon(1e-12));
    CHECK(r.s == doctest::Approx(20.0 * r.t).epsilon(1e-12));
  }

  VehicleParams params;
  VehicleState s0 = ref.initial_state(params);
  CHECK(s0.Vx == 20.0);
  CHECK(s0.Vy == 0.0);
  CHECK(s0.psi_dot == 0.0);
  CHECK(s0.omega_f == doctest::Approx(20.0 / params.R));
  CHECK(s0.omega_r == s0.omega_f);
}

TEST_CASE("reference settles to kinematic yaw rate on a constant arc") {
  TrackSpec t = spec_of({clothoid(100.0, 12.0), arc(100.0, 180.0),
                         clothoid(100.0), straight(100.0)});
  ReferenceTrajectory ref(t, VehicleParams{}, 1e-3);

  // mid-arc: transients from the clothoid entry are long gone
  const double s_mid = 100.0 + 50.0 * M_PI;
  std::size_t k_mid = 0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    if (ref.sample(k).s >= s_mid) {
      k_mid = k;
      break;
    }
  }
  REQUIRE(k_mid > 0);
  const auto& r = ref.sample(k_mid);
  CHECK(r.Vx == doctest::Approx(12.0));
  CHECK(r.kappa == doctest::Approx(0.01));
  CHECK(r.psi_dot == doctest::Approx(0.01 * 12.0).epsilon(1e-6));
  CHECK(std::abs(r.y2_ddot) < 1e-4);
}

TEST_CASE("reference samples are self-consistent under differencing") {
  VehicleParams params;
  const double dt = 1e-3;
  ReferenceTrajectory ref = generate_track(TrackSpec::default_track(), params, dt);
  const auto& path = ref.path();

  std::vector<double> breaks;
  for (double b : path.segment_starts()) breaks.push_back(b);
  breaks.push_back(path.total_length());

  std::size_t checked = 0;
  for (std::size_t k = 1; k + 1 < ref.size(); k += 7) {
    const auto& rm = ref.sample(k - 1);
    const auto& r = ref.sample(k);
    const auto& rp = ref.sample(k + 1);
    bool near_break = false;
    for (double b : breaks) {
      if (std::abs(r.s - b) < 1.0) near_break = true;
    }
    // ramp knots are not announced via segment_starts; skip accel regions
    if (near_break || rm.Vx_dot != 0.0 || rp.Vx_dot != 0.0) continue;
    ++checked;
    CHECK((rp.s - rm.s) / (2.0 * dt) == doctest::Approx(r.Vx).epsilon(1e-9));
    CHECK((rp.psi - rm.psi) / (2.0 * dt) ==
          doctest::Approx(r.kappa * r.Vx).epsilon(1e-6));
    CHECK((rp.X - rm.X) / (2.0 * dt) ==
          doctest::Approx(r.Vx * std::cos(r.psi)).scale(20.0).epsilon(1e-6));
    CHECK((rp.Y - rm.Y) / (2.0 * dt) ==
          doctest::Approx(r.Vx * std::sin(r.psi)).scale(20.0).epsilon(1e-6));
    CHECK((rp.y2 - rm.y2) / (2.0 * dt) ==
          doctest::Approx(r.y2_dot).scale(3000.0).epsilon(1e-4));
    CHECK((rp.y2_dot - rm.y2_dot) / (2.0 * dt) ==
          doctest::Approx(r.y2_ddot).scale(3000.0).epsilon(1e-3));
  }
  CHECK(checked > 10000);
}

TEST_CASE("default track covers two kilometres and builds cleanly") {
  TrackSpec t = TrackSpec::default_track();
  Path p(t);
  const double expected = 400.0 + 80.0 + 120.0 * M_PI / 2.0 + 80.0 + 180.0 +
                          270.0 + 110.0 + 50.0 * 150.0 * M_PI / 180.0 + 90.0 +
                          160.0 + 310.6;
  CHECK(p.total_length() == doctest::Approx(expected).epsilon(1e-12));
  auto starts = p.segment_starts();
  REQUIRE(starts.size() == t.segments.size());
  CHECK(starts.front() == 0.0);
  CHECK(starts[1] == doctest::Approx(400.0));
  for (std::size_t i = 1; i < starts.size(); ++i) {
    CHECK(starts[i] > starts[i - 1]);
  }

  ReferenceTrajectory ref = generate_track(t, VehicleParams{}, 1e-3);
  CHECK(ref.sample(0).s == 0.0);
  CHECK(ref.samples().back().s == p.total_length());
  CHECK(ref.duration() > 100.0);
  CHECK(ref.duration() < 200.0);

  // lateral_deviation agrees with the member projection
  VehicleState s;
  s.X = 10.0;
  s.Y = -0.8;
  s.psi = 0.01;
  auto a = lateral_deviation(s, p);
  auto b = p.project(s.X, s.Y, s.psi);
  CHECK(a.deviation == b.deviation);
  CHECK(a.s == b.s);
}
