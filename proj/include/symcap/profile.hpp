#pragma once

// C^1 piecewise-cubic scalar profiles.  These carry radial Hamiltonians
// H(x) = h(pi |x|^2), truncation ramps f with 0 <= f' <= 1, and shell
// plateau functions.  All slope bounds and root solves are exact per piece
// (the derivative of a cubic is a quadratic), so the closed-form oracles
// downstream share the same interpolant as the evaluator.

#include "symcap/common.hpp"

#include <memory>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace symcap {

class Curve1D {
 public:
  virtual ~Curve1D() = default;
  virtual double value(double s) const = 0;
  virtual double deriv(double s) const = 0;
  virtual double second(double s) const = 0;
  // Beyond this point the curve is constant (0 for zero-tail profiles).
  virtual double support_end() const = 0;
};

struct CubicPiece {
  double s0 = 0.0, s1 = 0.0;        // interval [s0, s1]
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // a + b t + c t^2 + d t^3, t = s - s0

  double value(double s) const {
    double t = s - s0;
    return a + t * (b + t * (c + t * d));
  }
  double deriv(double s) const {
    double t = s - s0;
    return b + t * (2.0 * c + t * 3.0 * d);
  }
  double second(double s) const {
    double t = s - s0;
    return 2.0 * c + 6.0 * d * t;
  }
};

class PiecewiseCubic final : public Curve1D {
 public:
  enum class Tail { Zero, Constant };

  PiecewiseCubic() : tail_(Tail::Zero) {}

  // Hermite data: (s, value, slope) per knot, strictly increasing s.
  static PiecewiseCubic hermite(
      const std::vector<std::tuple<double, double, double>>& knots,
      Tail tail = Tail::Zero) {
    require(knots.size() >= 2, "profile needs at least two knots");
    PiecewiseCubic p;
    p.tail_ = tail;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      auto [s0, y0, m0] = knots[i];
      auto [s1, y1, m1] = knots[i + 1];
      require(s1 > s0, "profile knots must be strictly increasing");
      double dt = s1 - s0;
      CubicPiece piece;
      piece.s0 = s0;
      piece.s1 = s1;
      piece.a = y0;
      piece.b = m0;
      piece.c = (3.0 * (y1 - y0) / dt - 2.0 * m0 - m1) / dt;
      piece.d = (m0 + m1 - 2.0 * (y1 - y0) / dt) / (dt * dt);
      p.pieces_.push_back(piece);
    }
    auto [se, ye, me] = knots.back();
    p.end_s_ = se;
    p.end_value_ = ye;
    if (tail == Tail::Zero) {
      require(std::fabs(ye) < 1e-14 && std::fabs(me) < 1e-14,
              "zero-tail profile must end with value 0 and slope 0");
      p.end_value_ = 0.0;
    } else {
      require(std::fabs(me) < 1e-14,
              "constant-tail profile must end with slope 0");
    }
    return p;
  }

  // Catmull-Rom style C^1 interpolation through (s, value) knots.
  static PiecewiseCubic interpolate(
      const std::vector<std::pair<double, double>>& knots,
      Tail tail = Tail::Zero) {
    require(knots.size() >= 2, "profile needs at least two knots");
    std::vector<std::tuple<double, double, double>> h;
    h.reserve(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
      double m;
      if (i == 0)
        m = (knots[1].second - knots[0].second) /
            (knots[1].first - knots[0].first);
      else if (i + 1 == knots.size())
        m = 0.0;  // flat into the tail
      else
        m = (knots[i + 1].second - knots[i - 1].second) /
            (knots[i + 1].first - knots[i - 1].first);
      h.emplace_back(knots[i].first, knots[i].second, m);
    }
    return hermite(h, tail);
  }

  double value(double s) const override {
    if (pieces_.empty()) return 0.0;
    if (s >= end_s_) return end_value_;
    if (s < pieces_.front().s0) {
      // constant extension to the left of the first knot
      return pieces_.front().a;
    }
    return piece_at(s).value(s);
  }
  double deriv(double s) const override {
    if (pieces_.empty() || s >= end_s_ || s < pieces_.front().s0) return 0.0;
    return piece_at(s).deriv(s);
  }
  double second(double s) const override {
    if (pieces_.empty() || s >= end_s_ || s < pieces_.front().s0) return 0.0;
    return piece_at(s).second(s);
  }
  double support_end() const override { return end_s_; }

  double start() const { return pieces_.empty() ? 0.0 : pieces_.front().s0; }
  double end_value() const { return end_value_; }
  const std::vector<CubicPiece>& pieces() const { return pieces_; }
  Tail tail() const { return tail_; }

  // Exact sup of |h'| over the whole line (tails have slope 0).
  double sup_abs_deriv() const {
    double best = 0.0;
    for (const auto& p : pieces_) {
      double dt = p.s1 - p.s0;
      best = std::max(best, std::fabs(p.deriv(p.s0)));
      best = std::max(best, std::fabs(p.deriv(p.s1)));
      if (p.d != 0.0) {
        double tv = -p.c / (3.0 * p.d);  // vertex of the derivative parabola
        if (tv > 0.0 && tv < dt)
          best = std::max(best, std::fabs(p.b + tv * (2.0 * p.c + 3.0 * p.d * tv)));
      }
    }
    return best;
  }

  double max_value() const {
    double best = std::max(0.0, end_value_);
    for (const auto& p : pieces_) {
      best = std::max({best, p.value(p.s0), p.value(p.s1)});
      // interior extrema where h' = 0
      for (double t : deriv_roots_local(p, 0.0))
        best = std::max(best, p.value(p.s0 + t));
    }
    return best;
  }

  double min_value() const {
    double best = std::min(0.0, end_value_);
    if (tail_ == Tail::Constant) best = end_value_;
    for (const auto& p : pieces_) {
      best = std::min({best, p.value(p.s0), p.value(p.s1)});
      for (double t : deriv_roots_local(p, 0.0))
        best = std::min(best, p.value(p.s0 + t));
    }
    return best;
  }

  struct DerivRoot {
    double s = 0.0;
    bool tangential = false;  // h'' vanishes at the root
  };

  // All solutions of h'(s) = k, interior to the pieces.  Pieces on which
  // h' == k identically are reported separately as degenerate intervals.
  std::vector<DerivRoot> solve_deriv_equal(
      double k, std::vector<std::pair<double, double>>* degenerate = nullptr,
      double tol = 1e-12) const {
    std::vector<DerivRoot> roots;
    for (const auto& p : pieces_) {
      double dt = p.s1 - p.s0;
      if (std::fabs(p.c) < tol && std::fabs(p.d) < tol) {
        if (std::fabs(p.b - k) < tol) {
          if (degenerate) degenerate->emplace_back(p.s0, p.s1);
        }
        continue;
      }
      for (double t : deriv_roots_local(p, k)) {
        DerivRoot r;
        r.s = p.s0 + t;
        r.tangential = std::fabs(p.second(r.s)) < 1e-9;
        roots.push_back(r);
      }
    }
    std::sort(roots.begin(), roots.end(),
              [](const DerivRoot& a, const DerivRoot& b) { return a.s < b.s; });
    // merge duplicates at piece joints
    std::vector<DerivRoot> out;
    for (const auto& r : roots) {
      if (!out.empty() && std::fabs(out.back().s - r.s) < 1e-11) continue;
      out.push_back(r);
    }
    return out;
  }

  // Values of h at interior critical points (h' = 0), the left edge, and the
  // tail.  For a radial Hamiltonian these are exactly the critical values.
  std::vector<double> critical_values() const {
    std::vector<double> vals;
    vals.push_back(value(start()));  // origin of the radial coordinate
    vals.push_back(end_value_);
    std::vector<std::pair<double, double>> degen;
    for (const auto& r : solve_deriv_equal(0.0, &degen)) vals.push_back(value(r.s));
    for (const auto& [a, b] : degen) vals.push_back(value(0.5 * (a + b)));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-10; }),
               vals.end());
    return vals;
  }

 private:
  const CubicPiece& piece_at(double s) const {
    std::size_t lo = 0, hi = pieces_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (s < pieces_[mid].s0)
        hi = mid;
      else
        lo = mid;
    }
    return pieces_[lo];
  }

  // roots of p'(t) = k inside (0, dt), local coordinate
  static std::vector<double> deriv_roots_local(const CubicPiece& p, double k) {
    std::vector<double> out;
    double dt = p.s1 - p.s0;
    double A = 3.0 * p.d, B = 2.0 * p.c, C = p.b - k;
    auto push = [&](double t) {
      if (t > 1e-13 && t < dt - 1e-13) out.push_back(t);
    };
    if (std::fabs(A) < 1e-14) {
      if (std::fabs(B) > 1e-14) push(-C / B);
      return out;
    }
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return out;
    double sq = std::sqrt(disc);
    // numerically stable quadratic roots
    double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    push(q / A);
    if (q != 0.0) push(C / q);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<CubicPiece> pieces_;
  double end_s_ = 0.0;
  double end_value_ = 0.0;
  Tail tail_;
};

// f composed with g, value-wise: (f.g)(s) = f(g(s)).  Used for slope-capped
// truncations K = f(H).
class ComposedCurve final : public Curve1D {
 public:
  ComposedCurve(std::shared_ptr<const Curve1D> outer,
                std::shared_ptr<const Curve1D> inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}

  double value(double s) const override { return outer_->value(inner_->value(s)); }
  double deriv(double s) const override {
    return outer_->deriv(inner_->value(s)) * inner_->deriv(s);
  }
  double second(double s) const override {
    double g = inner_->value(s), gp = inner_->deriv(s);
    return outer_->second(g) * gp * gp + outer_->deriv(g) * inner_->second(s);
  }
  double support_end() const override { return inner_->support_end(); }

 private:
  std::shared_ptr<const Curve1D> outer_, inner_;
};

// --- profile builders ----------------------------------------------------

// Monotone piece rising from (s0, y0) to (s1, y1) whose slope profile is a
// trapezoid: linear ease-in/out of width `ramp`, constant slope in between.
// The peak slope is (y1 - y0) / (s1 - s0 - ramp); the result is piecewise
// quadratic, hence exactly representable.
inline void append_trapezoid_rise(
    std::vector<std::tuple<double, double, double>>& knots, double s0,
    double y0, double s1, double y1, double ramp) {
  double run = s1 - s0;
  require(run > 0.0, "trapezoid rise needs positive run");
  require(ramp > 0.0 && 2.0 * ramp < run, "ramp width out of range");
  double v = (y1 - y0) / (run - ramp);  // peak slope (signed)
  // Quadratic ease-in/out of width `ramp` on each side (average slope v/2)
  // and an exactly linear middle of slope v; the slope profile is a
  // trapezoid and sup |h'| = |v| is attained on the whole middle piece.
  double yA = y0 + v * ramp * 0.5;
  double yB = y1 - v * ramp * 0.5;
  knots.emplace_back(s0, y0, 0.0);
  knots.emplace_back(s0 + ramp, yA, v);
  knots.emplace_back(s1 - ramp, yB, v);
  knots.emplace_back(s1, y1, 0.0);
}

// Simple radial profile: plateau at `max_value` on [0, s_plateau], then a
// slope-bounded monotone descent to 0 at s_end.  Peak descent slope is
// max_value / (s_end - s_plateau - ramp).
inline PiecewiseCubic plateau_descent_profile(double max_value,
                                              double s_plateau, double s_end,
                                              double ramp) {
  require(max_value >= 0.0, "plateau value must be nonnegative");
  std::vector<std::tuple<double, double, double>> knots;
  knots.emplace_back(0.0, max_value, 0.0);
  append_trapezoid_rise(knots, s_plateau, max_value, s_end, 0.0, ramp);
  // drop the duplicated plateau knot if s_plateau == 0
  if (std::get<0>(knots[1]) <= std::get<0>(knots[0]))
    knots.erase(knots.begin());
  return PiecewiseCubic::hermite(knots, PiecewiseCubic::Tail::Zero);
}

// Monotone ramp on [u0, u1]: 0 before u0, rising to `target` at u1, constant
// after.  Peak slope target / (u1 - u0 - ramp); callers pick the run long
// enough that the peak slope meets their cap.
inline PiecewiseCubic monotone_ramp(double u0, double u1, double target,
                                    double ramp) {
  std::vector<std::tuple<double, double, double>> knots;
  if (u0 > 0.0) knots.emplace_back(0.0, 0.0, 0.0);
  append_trapezoid_rise(knots, u0, 0.0, u1, target, ramp);
  return PiecewiseCubic::hermite(knots, PiecewiseCubic::Tail::Constant);
}

// Pointwise scaling: c * h, exact on the cubic pieces.
inline PiecewiseCubic scaled_profile(const PiecewiseCubic& p, double c) {
  std::vector<std::tuple<double, double, double>> knots;
  const auto& pieces = p.pieces();
  if (pieces.empty()) return p;
  for (const auto& piece : pieces)
    knots.emplace_back(piece.s0, c * piece.value(piece.s0),
                       c * piece.deriv(piece.s0));
  knots.emplace_back(p.support_end(), c * p.end_value(), 0.0);
  return PiecewiseCubic::hermite(knots, p.tail());
}

// Pointwise sum of two zero-tail profiles; exact because cubics on the merged
// breakpoint grid are determined by endpoint values and slopes.
inline PiecewiseCubic add_profiles(const PiecewiseCubic& a,
                                   const PiecewiseCubic& b) {
  require(a.tail() == PiecewiseCubic::Tail::Zero &&
              b.tail() == PiecewiseCubic::Tail::Zero,
          "profile sum expects zero-tail profiles");
  std::vector<double> breaks;
  for (const auto& p : a.pieces()) breaks.push_back(p.s0);
  for (const auto& p : b.pieces()) breaks.push_back(p.s0);
  breaks.push_back(a.support_end());
  breaks.push_back(b.support_end());
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double x, double y) { return std::fabs(x - y) < 1e-14; }),
               breaks.end());
  std::vector<std::tuple<double, double, double>> knots;
  for (double s : breaks)
    knots.emplace_back(s, a.value(s) + b.value(s), a.deriv(s) + b.deriv(s));
  return PiecewiseCubic::hermite(knots, PiecewiseCubic::Tail::Zero);
}

// Shell bump used by plateau Hamiltonians on thickened hypersurfaces:
// supported in (-tau/2, tau/2), equal to height on [-tau/4, tau/4], strictly
// monotone in between.
inline PiecewiseCubic shell_bump(double tau, double height, double ramp_frac = 0.25) {
  require(tau > 0.0 && height > 0.0, "shell bump needs positive width/height");
  double ramp = ramp_frac * (tau / 4.0);
  // shifted coordinate u = t + tau/2, support [0, tau], plateau [tau/4, 3tau/4]
  std::vector<std::tuple<double, double, double>> knots;
  append_trapezoid_rise(knots, 0.0, 0.0, tau / 4.0, height, ramp);
  append_trapezoid_rise(knots, 3.0 * tau / 4.0, height, tau, 0.0, ramp);
  return PiecewiseCubic::hermite(knots, PiecewiseCubic::Tail::Zero);
}

}  // namespace symcap
