#pragma once

// Truncated Fourier loops in R^{2n} carrying the H^{1/2} geometry: inner
// product, sign splitting, the action functional a(x) + b(x) and its
// H^{1/2} gradient, plus the linear graph-to-cotangent change of frame.
//
// Synthesis convention: x(t) = sum_k R(k t) x_k where R acts per (q,p) pair
// as the rotation z -> e^{-2 pi i k t} z.  Positive modes rotate clockwise;
// with this orientation a(x) = 1/2 |x^+|^2 - 1/2 |x^-|^2 equals minus the
// symplectic area of the straight-line capping disc, and the counterclockwise
// circle z e^{2 pi i t} (a winding +1 Hamiltonian orbit) sits in the k = -1
// mode.

#include "symcap/common.hpp"
#include "symcap/hamiltonian.hpp"

#include <complex>
#include <vector>

namespace symcap {

class FourierLoop {
 public:
  FourierLoop(int dim, int k_max)
      : dim_(dim), k_max_(k_max), coeffs_(Mat::Zero(dim, 2 * k_max + 1)) {
    require(dim >= 2 && dim % 2 == 0, "loop dimension must be even");
    require(k_max >= 1, "k_max must be positive");
  }

  static FourierLoop constant(const Vec& c, int k_max) {
    FourierLoop x(static_cast<int>(c.size()), k_max);
    x.set_coefficient(0, c);
    return x;
  }

  // Exact projection of equispaced samples onto modes |k| <= k_max.  With
  // n_samples >= 2 k_max + 1 the projection reproduces band-limited loops.
  static FourierLoop from_samples(const std::vector<Vec>& samples, int k_max) {
    require(!samples.empty(), "no samples");
    const int dim = static_cast<int>(samples.front().size());
    const int n = static_cast<int>(samples.size());
    FourierLoop x(dim, k_max);
    for (int k = -k_max; k <= k_max; ++k) {
      Vec acc = Vec::Zero(dim);
      for (int j = 0; j < n; ++j) {
        double th = 2.0 * kPi * k * static_cast<double>(j) / n;
        // inverse rotation R(-k t_j): per pair z -> e^{+2 pi i k t_j} z
        double c = std::cos(th), s = std::sin(th);
        for (int i = 0; i + 1 < dim; i += 2) {
          double q = samples[j][i], p = samples[j][i + 1];
          acc[i] += c * q - s * p;
          acc[i + 1] += s * q + c * p;
        }
      }
      x.set_coefficient(k, acc / static_cast<double>(n));
    }
    return x;
  }

  int dim() const { return dim_; }
  int k_max() const { return k_max_; }

  Vec coefficient(int k) const {
    require(std::abs(k) <= k_max_, "mode index out of range");
    return coeffs_.col(k + k_max_);
  }
  void set_coefficient(int k, const Vec& v) {
    require(std::abs(k) <= k_max_, "mode index out of range");
    require(v.size() == dim_, "coefficient dimension mismatch");
    coeffs_.col(k + k_max_) = v;
  }

  Vec evaluate(double t) const {
    Vec out = Vec::Zero(dim_);
    for (int k = -k_max_; k <= k_max_; ++k) {
      double th = 2.0 * kPi * k * t;
      double c = std::cos(th), s = std::sin(th);
      const auto col = coeffs_.col(k + k_max_);
      for (int i = 0; i + 1 < dim_; i += 2) {
        // z -> e^{-2 pi i k t} z
        out[i] += c * col[i] + s * col[i + 1];
        out[i + 1] += -s * col[i] + c * col[i + 1];
      }
    }
    return out;
  }

  Vec velocity(double t) const {
    Vec out = Vec::Zero(dim_);
    for (int k = -k_max_; k <= k_max_; ++k) {
      if (k == 0) continue;
      double w = 2.0 * kPi * k;
      double th = w * t;
      double c = std::cos(th), s = std::sin(th);
      const auto col = coeffs_.col(k + k_max_);
      for (int i = 0; i + 1 < dim_; i += 2) {
        out[i] += w * (-s * col[i] + c * col[i + 1]);
        out[i + 1] += w * (-c * col[i] - s * col[i + 1]);
      }
    }
    return out;
  }

  // x(t + tau) as a loop: per pair z_k -> e^{-2 pi i k tau} z_k.
  FourierLoop time_shift(double tau) const {
    FourierLoop out(dim_, k_max_);
    for (int k = -k_max_; k <= k_max_; ++k) {
      double th = 2.0 * kPi * k * tau;
      double c = std::cos(th), s = std::sin(th);
      const auto col = coeffs_.col(k + k_max_);
      Vec v(dim_);
      for (int i = 0; i + 1 < dim_; i += 2) {
        v[i] = c * col[i] + s * col[i + 1];
        v[i + 1] = -s * col[i] + c * col[i + 1];
      }
      out.set_coefficient(k, v);
    }
    return out;
  }

  FourierLoop& operator+=(const FourierLoop& o) {
    require(compatible(o), "loop shape mismatch");
    coeffs_ += o.coeffs_;
    return *this;
  }
  FourierLoop& operator-=(const FourierLoop& o) {
    require(compatible(o), "loop shape mismatch");
    coeffs_ -= o.coeffs_;
    return *this;
  }
  FourierLoop& operator*=(double a) {
    coeffs_ *= a;
    return *this;
  }
  friend FourierLoop operator+(FourierLoop a, const FourierLoop& b) { return a += b; }
  friend FourierLoop operator-(FourierLoop a, const FourierLoop& b) { return a -= b; }
  friend FourierLoop operator*(double a, FourierLoop x) { return x *= a; }

  bool compatible(const FourierLoop& o) const {
    return dim_ == o.dim_ && k_max_ == o.k_max_;
  }

  const Mat& raw() const { return coeffs_; }

 private:
  int dim_, k_max_;
  Mat coeffs_;  // column k + k_max holds the mode-k coefficient
};

// <x,y> = <x_0,y_0> + 2 pi sum |k| <x_k,y_k>.
inline double h12_inner(const FourierLoop& x, const FourierLoop& y) {
  require(x.dim() == y.dim(), "loop dimension mismatch");
  const int kx = x.k_max(), ky = y.k_max();
  double acc = x.coefficient(0).dot(y.coefficient(0));
  for (int k = -std::min(kx, ky); k <= std::min(kx, ky); ++k) {
    if (k == 0) continue;
    acc += 2.0 * kPi * std::abs(k) * x.coefficient(k).dot(y.coefficient(k));
  }
  return acc;
}

inline double h12_norm(const FourierLoop& x) {
  return std::sqrt(std::max(0.0, h12_inner(x, x)));
}

struct LoopSplit {
  FourierLoop minus, zero, plus;
};

inline LoopSplit split(const FourierLoop& x) {
  LoopSplit s{FourierLoop(x.dim(), x.k_max()), FourierLoop(x.dim(), x.k_max()),
              FourierLoop(x.dim(), x.k_max())};
  for (int k = -x.k_max(); k <= x.k_max(); ++k) {
    if (k < 0)
      s.minus.set_coefficient(k, x.coefficient(k));
    else if (k == 0)
      s.zero.set_coefficient(0, x.coefficient(0));
    else
      s.plus.set_coefficient(k, x.coefficient(k));
  }
  return s;
}

// Quadratic part a(x) = 1/2 |x^+|^2 - 1/2 |x^-|^2 (H^{1/2} norms), computed
// directly from coefficients.
inline double quadratic_action(const FourierLoop& x) {
  double acc = 0.0;
  for (int k = 1; k <= x.k_max(); ++k) {
    double w = kPi * k;  // (1/2) * 2 pi |k|
    acc += w * x.coefficient(k).squaredNorm();
    acc -= w * x.coefficient(-k).squaredNorm();
  }
  return acc;
}

// Signed symplectic area of the straight-line capping disc,
// (1/2) integral of omega0(x(t), x'(t)) dt; a(x) = -area for every truncated
// loop, which pins the orientation convention.
inline double capping_area(const FourierLoop& x, int n_nodes = 0) {
  int n = n_nodes > 0 ? n_nodes : 4 * x.k_max();
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double t = static_cast<double>(j) / n;
    acc += symplectic_form(x.evaluate(t), x.velocity(t));
  }
  return 0.5 * acc / n;
}

// Full action A_H(x) = a(x) + integral_0^1 H(t, x(t)) dt.  The time integral
// uses composite Simpson so that Hamiltonians that are not periodic in t are
// handled at full order.
inline double loop_action(const Hamiltonian& h, const FourierLoop& x,
                          int n_nodes = 0) {
  int n = n_nodes > 0 ? n_nodes : 4 * x.k_max();
  if (n % 2) ++n;
  double b = 0.0;
  for (int j = 0; j <= n; ++j) {
    double t = static_cast<double>(j) / n;
    double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    b += w * h.value(t, x.evaluate(t));
  }
  b /= 3.0 * n;
  return quadratic_action(x) + b;
}

// H^{1/2} gradient of A_H: x^+ - x^- plus the metric-inverse image of the
// pointwise gradient field t -> grad H(t, x(t)) (mode k scaled by
// 1/(2 pi |k|); mode 0 unscaled).
inline FourierLoop loop_action_gradient(const Hamiltonian& h,
                                        const FourierLoop& x, int n_nodes = 0) {
  int n = n_nodes > 0 ? n_nodes : 4 * x.k_max();
  std::vector<Vec> g(n);
  for (int j = 0; j < n; ++j) {
    double t = static_cast<double>(j) / n;
    g[j] = h.gradient(t, x.evaluate(t));
  }
  FourierLoop gb = FourierLoop::from_samples(g, x.k_max());
  FourierLoop out(x.dim(), x.k_max());
  for (int k = -x.k_max(); k <= x.k_max(); ++k) {
    Vec v = gb.coefficient(k);
    if (k != 0) v /= 2.0 * kPi * std::abs(k);
    if (k > 0)
      v += x.coefficient(k);
    else if (k < 0)
      v -= x.coefficient(k);
    out.set_coefficient(k, v);
  }
  return out;
}

// Distance that ignores the start-phase of the parametrization: coarse scan
// over phases followed by ternary refinement around the best one.
inline double loop_distance_mod_shift(const FourierLoop& a,
                                      const FourierLoop& b, int n_phase = 64) {
  auto dist = [&](double tau) { return h12_norm(a.time_shift(tau) - b); };
  double best = std::numeric_limits<double>::infinity(), best_tau = 0.0;
  for (int i = 0; i < n_phase; ++i) {
    double tau = static_cast<double>(i) / n_phase;
    double d = dist(tau);
    if (d < best) {
      best = d;
      best_tau = tau;
    }
  }
  double lo = best_tau - 1.0 / n_phase, hi = best_tau + 1.0 / n_phase;
  for (int it = 0; it < 60; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (dist(m1) < dist(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(best, dist(0.5 * (lo + hi)));
}

// --- graph-to-cotangent frame ----------------------------------------------

struct CotangentPoint {
  Vec base;   // point of the diagonal, as a phase point in R^{2n}
  Vec fiber;  // cotangent coordinates over it, in R^{2n}
};

// ((q,p),(Q,P)) -> base ((q+Q)/2, (p+P)/2), fiber (p-P, Q-q).  Pulls the
// canonical form sum d(fiber) ^ d(base) back to (-omega0) + omega0, so graphs
// of Hamiltonian diffeomorphisms become Lagrangian sections.
inline CotangentPoint graph_to_cotangent(const Vec& x, const Vec& y) {
  require(x.size() == y.size() && x.size() % 2 == 0, "phase point mismatch");
  const int d = static_cast<int>(x.size());
  CotangentPoint out;
  out.base = Vec(d);
  out.fiber = Vec(d);
  for (int i = 0; i + 1 < d; i += 2) {
    double q = x[i], p = x[i + 1], qq = y[i], pp = y[i + 1];
    out.base[i] = 0.5 * (q + qq);
    out.base[i + 1] = 0.5 * (p + pp);
    out.fiber[i] = p - pp;
    out.fiber[i + 1] = qq - q;
  }
  return out;
}

// The differential of graph_to_cotangent as a (2d x 2d) matrix acting on
// stacked tangent vectors (dx, dy) -> (dbase, dfiber).
inline Mat graph_to_cotangent_matrix(int dim) {
  Mat m = Mat::Zero(2 * dim, 2 * dim);
  for (int i = 0; i + 1 < dim; i += 2) {
    int q = i, p = i + 1, qq = dim + i, pp = dim + i + 1;
    m(q, q) = 0.5;
    m(q, qq) = 0.5;
    m(p, p) = 0.5;
    m(p, pp) = 0.5;
    m(dim + i, p) = 1.0;
    m(dim + i, pp) = -1.0;
    m(dim + i + 1, qq) = 1.0;
    m(dim + i + 1, q) = -1.0;
  }
  return m;
}

}  // namespace symcap
