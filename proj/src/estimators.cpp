#include "vtrack/estimators.hpp"

#include <cmath>
#include <string>

#include "vtrack/errors.hpp"

namespace vtrack {

namespace {
constexpr double kGridTol = 1e-9;  // allowed sample-time drift [s]
}

SlidingWindow::SlidingWindow(double span, double period) : period_(period) {
  if (!(period > 0.0) || !(span > 0.0)) {
    throw ModelError("sliding window needs positive span and period");
  }
  const auto n = static_cast<long long>(std::llround(span / period));
  if (n < 2) {
    throw ModelError("sliding window span " + std::to_string(span) +
                     " s too short for period " + std::to_string(period) + " s");
  }
  capacity_ = static_cast<std::size_t>(n) + 1;
  span_ = static_cast<double>(n) * period;
  values_.assign(capacity_, 0.0);
  times_.assign(capacity_, 0.0);
}

void SlidingWindow::push(double value, double t) {
  if (has_last_t_ && std::abs(t - last_t_ - period_) > kGridTol) {
    throw DataError("non-uniform sample time: expected t=" +
                    std::to_string(last_t_ + period_) + " s, got " +
                    std::to_string(t) + " s");
  }
  const std::size_t slot = (head_ + count_) % capacity_;
  if (count_ == capacity_) {
    values_[head_] = value;
    times_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  } else {
    values_[slot] = value;
    times_[slot] = t;
    ++count_;
  }
  last_t_ = t;
  has_last_t_ = true;
}

void SlidingWindow::clear() {
  head_ = 0;
  count_ = 0;
  has_last_t_ = false;
}

double SlidingWindow::value(std::size_t i) const {
  return values_[(head_ + i) % capacity_];
}

double SlidingWindow::time(std::size_t i) const {
  return times_[(head_ + i) % capacity_];
}

double SlidingWindow::latest_time() const {
  return has_last_t_ ? last_t_ : 0.0;
}

void EstimatorConfig::validate(double period) const {
  if (!(span >= 10.0 * period)) {
    throw ModelError("estimator span must cover at least 10 sample periods");
  }
  if (alpha == 0.0) {
    throw ModelError("ultra-local gain alpha must be nonzero");
  }
  if (nu != 1 && nu != 2) {
    throw ModelError("derivation order nu must be 1 or 2");
  }
}

namespace {

// Composite trapezoid of kernel(sigma) * window value over sigma in [0, T].
template <typename Kernel>
double quadrature(const SlidingWindow& w, Kernel kernel) {
  const std::size_t n = w.size();        // == capacity once warm
  const double h = w.period();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = static_cast<double>(i) * h;
    const double weight = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    acc += weight * kernel(sigma) * w.value(i);
  }
  return acc;
}

void check_aligned(const SlidingWindow& y, const SlidingWindow& u) {
  if (y.capacity() != u.capacity() ||
      std::abs(y.period() - u.period()) > 1e-12) {
    throw DataError("F estimator windows differ in length or period");
  }
  const double skew = std::abs(y.latest_time() - u.latest_time());
  if (y.warm() && u.warm() && skew > 0.5 * y.period()) {
    throw DataError("F estimator windows misaligned by " +
                    std::to_string(skew) + " s");
  }
}

}  // namespace

std::optional<double> denoise(const SlidingWindow& window) {
  if (!window.warm()) return std::nullopt;
  const double T = window.span();
  const double integral =
      quadrature(window, [&](double s) { return 2.0 * T - 3.0 * s; });
  return 2.0 / (T * T) * integral;
}

std::optional<double> differentiate(const SlidingWindow& window) {
  if (!window.warm()) return std::nullopt;
  const double T = window.span();
  const double integral =
      quadrature(window, [&](double s) { return T - 2.0 * s; });
  return -6.0 / (T * T * T) * integral;
}

std::optional<double> estimate_F_order1(const SlidingWindow& y_window,
                                        const SlidingWindow& u_window,
                                        double alpha) {
  check_aligned(y_window, u_window);
  if (!y_window.warm() || !u_window.warm()) return std::nullopt;
  const double tau = y_window.span();
  const double iy =
      quadrature(y_window, [&](double s) { return tau - 2.0 * s; });
  const double iu =
      quadrature(u_window, [&](double s) { return s * (tau - s); });
  const double t3 = tau * tau * tau;
  return -6.0 / t3 * (iy + alpha * iu);
}

std::optional<double> estimate_F_order2(const SlidingWindow& y_window,
                                        const SlidingWindow& u_window,
                                        double alpha) {
  check_aligned(y_window, u_window);
  if (!y_window.warm() || !u_window.warm()) return std::nullopt;
  const double tau = y_window.span();
  const double iy = quadrature(y_window, [&](double s) {
    return tau * tau - 6.0 * tau * s + 6.0 * s * s;
  });
  const double iu = quadrature(u_window, [&](double s) {
    const double r = tau - s;
    return r * r * s * s;
  });
  const double t5 = std::pow(tau, 5);
  return 60.0 / t5 * iy - 30.0 * alpha / t5 * iu;
}

}  // namespace vtrack
