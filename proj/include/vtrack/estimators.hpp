#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace vtrack {

/// Fixed-length ring buffer of uniformly sampled (value, time) pairs.
///
/// The requested span is rounded to the sample grid: the window holds
/// N+1 samples with N = round(span/period), covering exactly N*period
/// seconds once warm. Non-uniform pushes (sample-time drift beyond 1 ns)
/// are rejected, since every kernel below assumes an exact grid.
class SlidingWindow {
 public:
  SlidingWindow(double span, double period);

  /// Appends a sample; evicts the oldest once full.
  /// Throws DataError if t breaks the uniform grid.
  void push(double value, double t);

  /// True once the buffer first filled; estimators return no value before.
  bool warm() const { return count_ == capacity_; }

  void clear();

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  double period() const { return period_; }
  /// Grid-rounded window length N*period, the T (or tau) of the kernels.
  double span() const { return span_; }

  /// i = 0 addresses the oldest sample currently held.
  double value(std::size_t i) const;
  double time(std::size_t i) const;
  double latest_time() const;

 private:
  std::vector<double> values_;
  std::vector<double> times_;
  std::size_t capacity_ = 0;
  std::size_t head_ = 0;   // index of oldest
  std::size_t count_ = 0;
  double period_ = 0.0;
  double span_ = 0.0;
  bool has_last_t_ = false;
  double last_t_ = 0.0;
};

/// Estimator parameter block for the ultra-local channel estimators.
struct EstimatorConfig {
  double span = 0.05;  // window length [s]
  double alpha = 1.0;  // input gain of y^(nu) = F + alpha*u
  int nu = 1;          // derivation order

  /// Throws ModelError unless span >= 10*period, alpha != 0, nu in {1,2}.
  void validate(double period) const;
};

// All estimators below are composite-trapezoid quadratures of first-kind
// integral kernels over the window-relative coordinate sigma in [0, T],
// where sigma = 0 is the oldest sample. They are exact on low-degree
// polynomial signals up to O(period^2) quadrature error, which is what the
// tests pin down. A cold window yields std::nullopt.

/// Weighted average (2/T^2) * Integral (2T - 3 sigma) y dsigma.
/// Annihilates noise; on affine signals returns y at the *window start*,
/// i.e. the denoised value is delayed by the full span T.
std::optional<double> denoise(const SlidingWindow& window);

/// Derivative estimate -(6/T^3) * Integral (T - 2 sigma) y dsigma.
/// Exact slope for affine signals; for smooth signals it approximates the
/// derivative at the window midpoint t - T/2 (exact there on quadratics).
std::optional<double> differentiate(const SlidingWindow& window);

/// F of the first-order ultra-local model y' = F + alpha*u:
///   F = -(6/tau^3) * Integral [ (tau - 2 sigma) y
///                               + alpha sigma (tau - sigma) u ] dsigma.
/// Integration by parts shows this recovers a constant F exactly for any
/// input history u, which is what makes it usable inside the loop.
/// Throws DataError if the two windows have different geometry or their
/// newest samples are skewed by more than period/2.
std::optional<double> estimate_F_order1(const SlidingWindow& y_window,
                                        const SlidingWindow& u_window,
                                        double alpha);

/// F of the second-order model y'' = F + alpha*u:
///   F =  (60/tau^5) * Integral (tau^2 - 6 tau sigma + 6 sigma^2) y dsigma
///      - (30 alpha/tau^5) * Integral (tau - sigma)^2 sigma^2 u dsigma.
/// The y-kernel annihilates affine signals; the sign of its weight is fixed
/// by requiring the constant-F recovery identity (double integration by
/// parts with P(sigma) = sigma^2 (tau - sigma)^2 / 2).
std::optional<double> estimate_F_order2(const SlidingWindow& y_window,
                                        const SlidingWindow& u_window,
                                        double alpha);

}  // namespace vtrack
