#pragma once

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on vector ODEs, with
// Hermite dense output.  Works forward and backward in time.

#include "symcap/common.hpp"

#include <limits>
#include <string>
#include <vector>

namespace symcap {

struct FlowEscape : std::runtime_error {
  explicit FlowEscape(const std::string& msg) : std::runtime_error(msg) {}
};
struct StepUnderflow : std::runtime_error {
  explicit StepUnderflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 = heuristic
  long max_steps = 500000;
  // Hard bound on |y|; exceeding it aborts the integration.  Flows of
  // compactly supported Hamiltonians stay bounded, so escape is a bug in the
  // caller's setup and is reported as such.
  double max_norm = std::numeric_limits<double>::infinity();
};

struct OdeResult {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> derivs;  // f(t_i, y_i), for dense output
  long steps_accepted = 0;
  long steps_rejected = 0;

  const Vec& back() const { return states.back(); }
};

template <typename Rhs>
OdeResult integrate_ode(Rhs&& rhs, double t0, double t1, const Vec& y0,
                        const OdeOptions& opts = {}) {
  OdeResult out;
  out.times.push_back(t0);
  out.states.push_back(y0);
  out.derivs.push_back(rhs(t0, y0));
  if (t0 == t1) return out;

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  double h = opts.initial_step > 0.0 ? opts.initial_step : span / 100.0;
  h = std::min(h, span);

  // Dormand-Prince coefficients
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  double t = t0;
  Vec y = y0;
  Vec k1 = out.derivs.front();

  for (long step = 0; step < opts.max_steps; ++step) {
    double remaining = dir * (t1 - t);
    if (remaining <= 1e-14 * std::max(1.0, std::fabs(t1))) {
      out.times.back() = t1;  // snap float-rounding residue
      return out;
    }
    if (h > remaining) h = remaining;
    if (h < 1e-15 * std::max(1.0, std::fabs(t)))
      throw StepUnderflow("integrate_ode: step size underflow at t=" +
                          std::to_string(t));
    const double hs = dir * h;

    Vec k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
    Vec k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    Vec k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec k6 = rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = rhs(t + hs, ynew);
    Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      double sc = opts.abs_tol +
                  opts.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      double r = err[i] / sc;
      norm += r * r;
    }
    norm = std::sqrt(norm / static_cast<double>(y.size()));

    if (norm <= 1.0) {
      t += hs;
      y = ynew;
      k1 = k7;  // FSAL
      out.times.push_back(t);
      out.states.push_back(y);
      out.derivs.push_back(k1);
      ++out.steps_accepted;
      if (y.norm() > opts.max_norm)
        throw FlowEscape("integrate_ode: trajectory escaped |y| > " +
                         std::to_string(opts.max_norm));
    } else {
      ++out.steps_rejected;
    }
    double factor = 0.9 * std::pow(std::max(norm, 1e-12), -0.2);
    h *= std::clamp(factor, 0.2, 2.5);
  }
  throw std::runtime_error("integrate_ode: max step count exceeded");
}

// Cubic Hermite interpolation between accepted nodes.
inline Vec ode_sample(const OdeResult& r, double t) {
  require(!r.times.empty(), "ode_sample: empty result");
  const bool forward = r.times.back() >= r.times.front();
  if ((forward && t <= r.times.front()) || (!forward && t >= r.times.front()))
    return r.states.front();
  if ((forward && t >= r.times.back()) || (!forward && t <= r.times.back()))
    return r.states.back();
  std::size_t lo = 0, hi = r.times.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (forward ? (r.times[mid] <= t) : (r.times[mid] >= t))
      lo = mid;
    else
      hi = mid;
  }
  double dt = r.times[hi] - r.times[lo];
  if (dt == 0.0) return r.states[lo];
  double u = (t - r.times[lo]) / dt;
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  double h10 = u * (1 - u) * (1 - u);
  double h01 = u * u * (3 - 2 * u);
  double h11 = u * u * (u - 1);
  return h00 * r.states[lo] + h10 * dt * r.derivs[lo] + h01 * r.states[hi] +
         h11 * dt * r.derivs[hi];
}

}  // namespace symcap
