#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vtrack/params.hpp"
#include "vtrack/plant.hpp"

namespace vtrack {

/// One piece of a track. Arcs carry a signed sweep angle (positive = left
/// turn); clothoids blend curvature linearly between their neighbours and
/// take their end curvature from the following segment.
struct SegmentSpec {
  enum class Kind { Straight, Arc, Clothoid };
  Kind kind = Kind::Straight;
  double length = 0.0;     // straight & clothoid [m]
  double radius = 0.0;     // arc [m]
  double angle_deg = 0.0;  // arc sweep, signed [deg]
  double speed = 0.0;      // target speed at segment entry [m/s]; 0 = carry
};

struct TrackSpec {
  std::vector<SegmentSpec> segments;
  double default_speed = 15.0;  // entry speed when the first segment has none
  double ramp_accel = 1.5;      // |dV/dt| used to place speed ramps [m/s^2]
  double path_ds = 0.1;         // path sampling pitch [m]

  /// The 2 km mixed loop used by the nominal and robustness scenarios.
  static TrackSpec default_track();
};

struct PathPoint {
  double s = 0.0;
  double X = 0.0;
  double Y = 0.0;
  double psi = 0.0;
  double kappa = 0.0;
};

/// Result of projecting a pose onto the path.
struct PathProjection {
  double deviation = 0.0;      // signed perpendicular distance, left positive [m]
  double heading_error = 0.0;  // psi - psi_path, wrapped to (-pi, pi] [rad]
  double s = 0.0;              // arc length of the closest point [m]
  bool in_corridor = true;     // |deviation| <= corridor half-width
};

inline constexpr double kCorridorHalfWidth = 20.0;  // [m]

/// C1 planar path with piecewise-linear curvature. Heading is analytic per
/// segment; positions are accumulated with Simpson quadrature on a uniform
/// arc-length grid.
class Path {
 public:
  /// Throws DataError on curvature-discontinuous joints (naming the joint)
  /// or unresolvable clothoids.
  Path(const TrackSpec& spec);

  double total_length() const { return total_length_; }
  double grid_ds() const { return ds_; }
  const std::vector<PathPoint>& grid() const { return pts_; }
  /// Arc-length positions of the segment entries (one per input segment).
  std::vector<double> segment_starts() const;

  double kappa(double s) const;
  double kappa_rate(double s) const;  // d kappa / d s
  double psi(double s) const;
  /// Exact-to-quadrature position at arbitrary s (grid point + analytic
  /// remainder).
  void position(double s, double& X, double& Y) const;

  /// Closest-point projection, scanning every grid point. Oracle-grade,
  /// O(grid size).
  PathProjection project(double X, double Y, double psi) const;

  /// Same result, scanning only a window of grid points around *hint;
  /// updates *hint to the new nearest index. The harness walks the path
  /// monotonically so a small window suffices.
  PathProjection project_hinted(double X, double Y, double psi,
                                std::size_t* hint,
                                std::size_t window = 250) const;

 private:
  struct SegmentGeom {
    double s0 = 0.0, length = 0.0;
    double kappa0 = 0.0, kappa1 = 0.0;
    double psi0 = 0.0;
  };

  const SegmentGeom& segment_at(double s) const;
  PathProjection project_near(double X, double Y, double psi,
                              std::size_t lo, std::size_t hi) const;

  std::vector<SegmentGeom> segments_;
  std::vector<PathPoint> pts_;
  double total_length_ = 0.0;
  double ds_ = 0.0;
};

/// Piecewise-linear-in-s speed profile: each segment's target speed is held
/// from its entry, with the ramp to the next target placed in the tail of
/// the current segment (sized by ramp_accel).
class SpeedProfile {
 public:
  SpeedProfile(const TrackSpec& spec, const std::vector<double>& seg_starts,
               double total_length);

  double speed(double s) const;
  double speed_rate(double s) const;  // dV/ds
  double max_speed() const { return max_speed_; }
  /// s-positions where dV/ds jumps (ramp ends/starts), for cross-checks
  /// that must skip non-smooth points.
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  struct Node {
    double s, v;
  };
  std::vector<Node> nodes_;  // piecewise-linear knots
  std::vector<double> breaks_;
  double max_speed_ = 0.0;
};

/// One row of the time-sampled reference.
struct ReferenceSample {
  double t = 0.0;
  double s = 0.0;
  double kappa = 0.0;
  double Vx = 0.0;        // speed reference [m/s]
  double Vx_dot = 0.0;    // its time derivative
  double X = 0.0, Y = 0.0;
  double psi = 0.0;
  double psi_dot = 0.0;   // kappa * Vx
  double y2 = 0.0;        // flat lateral output reference
  double y2_dot = 0.0;
  double y2_ddot = 0.0;
};

/// Time-indexed reference on the simulation grid. The lateral channels are
/// synthesized as an exact trajectory of the *nominal* chassis model whose
/// CG rides the path: the rear-axle force identity (which every model
/// trajectory satisfies regardless of inputs) is combined with the
/// path-following kinematics psi + Vy/Vx = path tangent, leaving one
/// second-order ODE in Vy_ref that is integrated along the track. y2 and
/// its derivatives follow algebraically, so a controller holding y1 = Vx
/// and y2 on their references holds the car on the path.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory(const TrackSpec& spec, const VehicleParams& params,
                      double dt);

  const Path& path() const { return path_; }
  double dt() const { return dt_; }
  double duration() const { return dt_ * double(samples_.size() - 1); }
  std::size_t size() const { return samples_.size(); }
  const ReferenceSample& sample(std::size_t k) const { return samples_[k]; }
  const std::vector<ReferenceSample>& samples() const { return samples_; }

  /// Steady-state initial chassis state on the path at t = 0.
  VehicleState initial_state(const VehicleParams& params) const;

 private:
  Path path_;
  double dt_;
  std::vector<ReferenceSample> samples_;
};

/// Builds path + speed profile + references. Throws DataError on malformed
/// geometry, speeds below kVxMin, or failed consistency cross-checks.
ReferenceTrajectory generate_track(const TrackSpec& spec,
                                   const VehicleParams& params, double dt);

/// Free-function form of the projection op (oracle path).
PathProjection lateral_deviation(const VehicleState& state, const Path& path);

}  // namespace vtrack
