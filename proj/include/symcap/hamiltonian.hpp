#pragma once

// Compactly supported Hamiltonians on standard R^{2n} and the algebra on
// them: sharp composition, inverse, time reparametrization, slope-capped
// truncation, simplicity and admissibility classification, E^+ and the
// Hofer norm.

#include "symcap/common.hpp"
#include "symcap/integrator.hpp"
#include "symcap/profile.hpp"

#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace symcap {

class Hamiltonian;
using HamPtr = std::shared_ptr<const Hamiltonian>;

class Hamiltonian : public std::enable_shared_from_this<Hamiltonian> {
 public:
  virtual ~Hamiltonian() = default;

  int dim() const { return dim_; }
  // Value vanishes identically for |x| >= support_radius(), all t in [0,1].
  double support_radius() const { return support_radius_; }
  virtual bool autonomous() const { return true; }
  virtual bool is_zero() const { return false; }
  // Nesting depth of flow-defined descriptors; deep nests switch to value
  // finite differences to keep evaluation cost linear in the nest.
  virtual int composition_depth() const { return 0; }

  virtual double value(double t, const Vec& x) const = 0;

  virtual Vec gradient(double t, const Vec& x) const {
    return fd_gradient(t, x);
  }
  virtual Mat hessian(double t, const Vec& x) const { return fd_hessian(t, x); }

  // X_H with omega0(X_H, .) = -dH: per pair (-dH/dp, +dH/dq).
  Vec field(double t, const Vec& x) const {
    return apply_complex_structure(gradient(t, x));
  }

  // Closed-form per-time extrema when the structure provides them; the
  // generic sampling maximizer is used otherwise.
  virtual std::optional<double> exact_max(double /*t*/) const { return {}; }
  virtual std::optional<double> exact_min(double /*t*/) const { return {}; }

  // Radial structure hook: profile h with H(x) = h(pi |x|^2), if any.
  virtual std::shared_ptr<const Curve1D> radial_profile() const { return nullptr; }

 protected:
  Hamiltonian(int dim, double support_radius)
      : dim_(dim), support_radius_(support_radius) {
    require(dim >= 2 && dim % 2 == 0, "Hamiltonian dimension must be even");
    require(support_radius >= 0.0, "support radius must be nonnegative");
  }

  Vec fd_gradient(double t, const Vec& x) const {
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i) {
      double h = 2e-4 * (1.0 + std::fabs(x[i]));
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (value(t, xp) - value(t, xm)) / (2.0 * h);
    }
    return g;
  }
  Mat fd_hessian(double t, const Vec& x) const {
    Mat m(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      double h = 5e-4 * (1.0 + std::fabs(x[i]));
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      Vec gp = gradient(t, xp), gm = gradient(t, xm);
      m.col(i) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (m + m.transpose());
  }

  int dim_;
  double support_radius_;
};

class ZeroHamiltonian final : public Hamiltonian {
 public:
  explicit ZeroHamiltonian(int dim) : Hamiltonian(dim, 0.0) {}
  bool is_zero() const override { return true; }
  double value(double, const Vec&) const override { return 0.0; }
  Vec gradient(double, const Vec&) const override { return Vec::Zero(dim_); }
  Mat hessian(double, const Vec&) const override { return Mat::Zero(dim_, dim_); }
  std::optional<double> exact_max(double) const override { return 0.0; }
  std::optional<double> exact_min(double) const override { return 0.0; }
  std::shared_ptr<const Curve1D> radial_profile() const override {
    static const auto zero = std::make_shared<PiecewiseCubic>();
    return zero;
  }
};

// H(x) = h(pi |x|^2).
class RadialHamiltonian final : public Hamiltonian {
 public:
  RadialHamiltonian(int dim, std::shared_ptr<const Curve1D> profile)
      : Hamiltonian(dim, std::sqrt(std::max(0.0, profile->support_end()) / kPi)),
        profile_(std::move(profile)) {}

  double value(double, const Vec& x) const override {
    return profile_->value(radial_area(x));
  }
  Vec gradient(double, const Vec& x) const override {
    return (2.0 * kPi * profile_->deriv(radial_area(x))) * x;
  }
  Mat hessian(double, const Vec& x) const override {
    double s = radial_area(x);
    Mat m = (2.0 * kPi * profile_->deriv(s)) * Mat::Identity(dim_, dim_);
    m += (4.0 * kPi * kPi * profile_->second(s)) * (x * x.transpose());
    return m;
  }
  std::optional<double> exact_max(double) const override {
    if (auto* pc = dynamic_cast<const PiecewiseCubic*>(profile_.get()))
      return pc->max_value();
    return {};
  }
  std::optional<double> exact_min(double) const override {
    if (auto* pc = dynamic_cast<const PiecewiseCubic*>(profile_.get()))
      return pc->min_value();
    return {};
  }
  std::shared_ptr<const Curve1D> radial_profile() const override { return profile_; }

 private:
  std::shared_ptr<const Curve1D> profile_;
};

// Generic evaluable Hamiltonian with a declared support bound.  The gradient
// callback is optional; finite differences fill in otherwise.
class FunctionalHamiltonian final : public Hamiltonian {
 public:
  using ValueFn = std::function<double(double, const Vec&)>;
  using GradFn = std::function<Vec(double, const Vec&)>;

  FunctionalHamiltonian(int dim, double support_radius, ValueFn value,
                        GradFn grad = nullptr, bool autonomous = false)
      : Hamiltonian(dim, support_radius),
        value_(std::move(value)),
        grad_(std::move(grad)),
        autonomous_(autonomous) {}

  bool autonomous() const override { return autonomous_; }
  double value(double t, const Vec& x) const override {
    check_phase_point(x);
    return value_(t, x);
  }
  Vec gradient(double t, const Vec& x) const override {
    return grad_ ? grad_(t, x) : fd_gradient(t, x);
  }

 private:
  ValueFn value_;
  GradFn grad_;
  bool autonomous_;
};

class ScaledHamiltonian final : public Hamiltonian {
 public:
  ScaledHamiltonian(double factor, HamPtr inner)
      : Hamiltonian(inner->dim(), inner->support_radius()),
        factor_(factor),
        inner_(std::move(inner)) {}

  bool autonomous() const override { return inner_->autonomous(); }
  bool is_zero() const override { return factor_ == 0.0 || inner_->is_zero(); }
  double value(double t, const Vec& x) const override {
    return factor_ * inner_->value(t, x);
  }
  Vec gradient(double t, const Vec& x) const override {
    return factor_ * inner_->gradient(t, x);
  }
  Mat hessian(double t, const Vec& x) const override {
    return factor_ * inner_->hessian(t, x);
  }
  std::optional<double> exact_max(double t) const override {
    auto mx = inner_->exact_max(t), mn = inner_->exact_min(t);
    if (factor_ >= 0.0) return mx ? std::optional<double>(factor_ * *mx) : std::nullopt;
    return mn ? std::optional<double>(factor_ * *mn) : std::nullopt;
  }
  std::optional<double> exact_min(double t) const override {
    auto mx = inner_->exact_max(t), mn = inner_->exact_min(t);
    if (factor_ >= 0.0) return mn ? std::optional<double>(factor_ * *mn) : std::nullopt;
    return mx ? std::optional<double>(factor_ * *mx) : std::nullopt;
  }
  std::shared_ptr<const Curve1D> radial_profile() const override {
    auto p = inner_->radial_profile();
    if (!p) return nullptr;
    return std::make_shared<ScaledCurve>(factor_, p);
  }
  double factor() const { return factor_; }
  const HamPtr& inner() const { return inner_; }

 private:
  class ScaledCurve final : public Curve1D {
   public:
    ScaledCurve(double f, std::shared_ptr<const Curve1D> c)
        : f_(f), c_(std::move(c)) {}
    double value(double s) const override { return f_ * c_->value(s); }
    double deriv(double s) const override { return f_ * c_->deriv(s); }
    double second(double s) const override { return f_ * c_->second(s); }
    double support_end() const override { return c_->support_end(); }

   private:
    double f_;
    std::shared_ptr<const Curve1D> c_;
  };

  double factor_;
  HamPtr inner_;
};

class SumHamiltonian final : public Hamiltonian {
 public:
  SumHamiltonian(HamPtr a, HamPtr b)
      : Hamiltonian(a->dim(), std::max(a->support_radius(), b->support_radius())),
        a_(std::move(a)),
        b_(std::move(b)) {
    require(a_->dim() == b_->dim(), "dimension mismatch in sum");
  }
  bool autonomous() const override { return a_->autonomous() && b_->autonomous(); }
  double value(double t, const Vec& x) const override {
    return a_->value(t, x) + b_->value(t, x);
  }
  Vec gradient(double t, const Vec& x) const override {
    return a_->gradient(t, x) + b_->gradient(t, x);
  }
  Mat hessian(double t, const Vec& x) const override {
    return a_->hessian(t, x) + b_->hessian(t, x);
  }
  std::shared_ptr<const Curve1D> radial_profile() const override {
    auto pa = a_->radial_profile(), pb = b_->radial_profile();
    if (!pa || !pb) return nullptr;
    return std::make_shared<SumCurve>(pa, pb);
  }

 private:
  class SumCurve final : public Curve1D {
   public:
    SumCurve(std::shared_ptr<const Curve1D> a, std::shared_ptr<const Curve1D> b)
        : a_(std::move(a)), b_(std::move(b)) {}
    double value(double s) const override { return a_->value(s) + b_->value(s); }
    double deriv(double s) const override { return a_->deriv(s) + b_->deriv(s); }
    double second(double s) const override { return a_->second(s) + b_->second(s); }
    double support_end() const override {
      return std::max(a_->support_end(), b_->support_end());
    }

   private:
    std::shared_ptr<const Curve1D> a_, b_;
  };

  HamPtr a_, b_;
};

// Smooth monotone time change on [0,1] with lambda(0)=0, lambda(1)=1.
struct TimeProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::string name;

  static TimeProfile identity() {
    return {[](double t) { return t; }, [](double) { return 1.0; }, "identity"};
  }
  static TimeProfile square() {
    return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; },
            "square"};
  }
  static TimeProfile smoothstep() {
    return {[](double t) { return t * t * (3.0 - 2.0 * t); },
            [](double t) { return 6.0 * t * (1.0 - t); }, "smoothstep"};
  }
};

// H^lambda(t,x) = lambda'(t) H(lambda(t), x); its flow is the lambda-time
// reparametrization of the flow of H.
class ReparametrizedHamiltonian final : public Hamiltonian {
 public:
  ReparametrizedHamiltonian(HamPtr inner, TimeProfile lambda)
      : Hamiltonian(inner->dim(), inner->support_radius()),
        inner_(std::move(inner)),
        lambda_(std::move(lambda)) {
    require(std::fabs(lambda_.value(0.0)) < 1e-12 &&
                std::fabs(lambda_.value(1.0) - 1.0) < 1e-12,
            "time profile must fix the endpoints 0 and 1");
  }
  bool autonomous() const override { return false; }
  double value(double t, const Vec& x) const override {
    return lambda_.deriv(t) * inner_->value(lambda_.value(t), x);
  }
  Vec gradient(double t, const Vec& x) const override {
    return lambda_.deriv(t) * inner_->gradient(lambda_.value(t), x);
  }
  Mat hessian(double t, const Vec& x) const override {
    return lambda_.deriv(t) * inner_->hessian(lambda_.value(t), x);
  }
  std::optional<double> exact_max(double t) const override {
    double d = lambda_.deriv(t);
    auto mx = inner_->exact_max(lambda_.value(t));
    auto mn = inner_->exact_min(lambda_.value(t));
    if (d >= 0.0) return mx ? std::optional<double>(d * *mx) : std::nullopt;
    return mn ? std::optional<double>(d * *mn) : std::nullopt;
  }
  std::optional<double> exact_min(double t) const override {
    double d = lambda_.deriv(t);
    auto mx = inner_->exact_max(lambda_.value(t));
    auto mn = inner_->exact_min(lambda_.value(t));
    if (d >= 0.0) return mn ? std::optional<double>(d * *mn) : std::nullopt;
    return mx ? std::optional<double>(d * *mx) : std::nullopt;
  }
  const HamPtr& inner() const { return inner_; }
  const TimeProfile& time_profile() const { return lambda_; }

 private:
  HamPtr inner_;
  TimeProfile lambda_;
};

// f(H) for a scalar ramp f; used by slope-capped truncations.
class ComposedHamiltonian final : public Hamiltonian {
 public:
  ComposedHamiltonian(std::shared_ptr<const Curve1D> outer, HamPtr inner)
      : Hamiltonian(inner->dim(), inner->support_radius()),
        outer_(std::move(outer)),
        inner_(std::move(inner)) {}
  bool autonomous() const override { return inner_->autonomous(); }
  double value(double t, const Vec& x) const override {
    return outer_->value(inner_->value(t, x));
  }
  Vec gradient(double t, const Vec& x) const override {
    return outer_->deriv(inner_->value(t, x)) * inner_->gradient(t, x);
  }
  Mat hessian(double t, const Vec& x) const override {
    double v = inner_->value(t, x);
    Vec g = inner_->gradient(t, x);
    return outer_->second(v) * (g * g.transpose()) +
           outer_->deriv(v) * inner_->hessian(t, x);
  }
  std::shared_ptr<const Curve1D> radial_profile() const override {
    auto p = inner_->radial_profile();
    if (!p) return nullptr;
    return std::make_shared<ComposedCurve>(outer_, p);
  }

 private:
  std::shared_ptr<const Curve1D> outer_;
  HamPtr inner_;
};

namespace detail {
// One flow solve for the inner Hamiltonian; shared by the sharp product and
// the inverse.  Integrates dy/ds = X_H(s, y) between s0 and s1.
inline Vec flow_point(const Hamiltonian& h, const Vec& x, double s0, double s1,
                      double tol = 1e-12) {
  if (h.is_zero()) return x;
  OdeOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-2;
  opts.max_norm = 64.0 * (h.support_radius() + 1.0) + x.norm();
  auto rhs = [&h](double s, const Vec& y) { return h.field(s, y); };
  return integrate_ode(rhs, s0, s1, x, opts).back();
}

// Flow point together with the Jacobian of the flow map, from the matrix
// variational equation dY/ds = J grad^2 H(s, y) Y.
inline std::pair<Vec, Mat> flow_with_jacobian(const Hamiltonian& h,
                                              const Vec& x, double s0,
                                              double s1, double tol = 1e-12) {
  const int d = h.dim();
  if (h.is_zero()) return {x, Mat::Identity(d, d)};
  Vec y0(d + d * d);
  y0.head(d) = x;
  Mat id = Mat::Identity(d, d);
  for (int c = 0; c < d; ++c) y0.segment(d + c * d, d) = id.col(c);
  OdeOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-2;
  opts.max_norm = 1e9;
  auto rhs = [&h, d](double s, const Vec& y) {
    Vec xx = y.head(d);
    Mat a = h.hessian(s, xx);
    Mat ja(d, d);
    for (int i = 0; i + 1 < d; i += 2) {
      ja.row(i) = -a.row(i + 1);
      ja.row(i + 1) = a.row(i);
    }
    Vec out(d + d * d);
    out.head(d) = apply_complex_structure(h.gradient(s, xx));
    for (int c = 0; c < d; ++c)
      out.segment(d + c * d, d) = ja * y.segment(d + c * d, d);
    return out;
  };
  Vec yT = integrate_ode(rhs, s0, s1, y0, opts).back();
  Mat jac(d, d);
  for (int c = 0; c < d; ++c) jac.col(c) = yT.segment(d + c * d, d);
  return {yT.head(d), jac};
}
}  // namespace detail

// (H # K)(t,x) = H(t,x) + K(t, (phi_H^t)^{-1}(x)); generates phi_H . phi_K.
class SharpHamiltonian final : public Hamiltonian {
 public:
  // phi_H keeps points inside the closed support ball of H, so the pulled
  // back K-term vanishes outside max(r_H, r_K).
  SharpHamiltonian(HamPtr h, HamPtr k)
      : Hamiltonian(h->dim(),
                    std::max(h->support_radius(), k->support_radius())),
        h_(std::move(h)),
        k_(std::move(k)) {
    require(h_->dim() == k_->dim(), "dimension mismatch in sharp product");
  }
  bool autonomous() const override { return false; }
  bool is_zero() const override { return h_->is_zero() && k_->is_zero(); }
  double value(double t, const Vec& x) const override {
    double v = h_->value(t, x);
    if (!k_->is_zero()) v += k_->value(t, detail::flow_point(*h_, x, t, 0.0));
    return v;
  }
  int composition_depth() const override {
    return 1 + std::max(h_->composition_depth(), k_->composition_depth());
  }
  Vec gradient(double t, const Vec& x) const override {
    if (h_->composition_depth() > 0) return fd_gradient(t, x);
    Vec g = h_->gradient(t, x);
    if (!k_->is_zero()) {
      auto [y, jac] = detail::flow_with_jacobian(*h_, x, t, 0.0);
      g += jac.transpose() * k_->gradient(t, y);
    }
    return g;
  }
  const HamPtr& left() const { return h_; }
  const HamPtr& right() const { return k_; }

 private:
  HamPtr h_, k_;
};

// K^-(t,x) = -K(t, phi_K^t(x)); generates the inverse flow of K.
class InverseHamiltonian final : public Hamiltonian {
 public:
  explicit InverseHamiltonian(HamPtr k)
      : Hamiltonian(k->dim(), k->support_radius()), k_(std::move(k)) {}
  // an autonomous K is conserved along its own flow, so K^- inherits
  // time-independence
  bool autonomous() const override { return k_->autonomous(); }
  bool is_zero() const override { return k_->is_zero(); }
  double value(double t, const Vec& x) const override {
    if (k_->is_zero()) return 0.0;
    return -k_->value(t, detail::flow_point(*k_, x, 0.0, t));
  }
  int composition_depth() const override {
    return 1 + k_->composition_depth();
  }
  Vec gradient(double t, const Vec& x) const override {
    if (k_->is_zero()) return Vec::Zero(dim_);
    if (k_->composition_depth() > 0) return fd_gradient(t, x);
    auto [y, jac] = detail::flow_with_jacobian(*k_, x, 0.0, t);
    return -(jac.transpose() * k_->gradient(t, y));
  }
  const HamPtr& inner() const { return k_; }

 private:
  HamPtr k_;
};

// --- constructors ---------------------------------------------------------

inline HamPtr make_zero(int dim) { return std::make_shared<ZeroHamiltonian>(dim); }

inline HamPtr make_radial(int dim, std::shared_ptr<const Curve1D> profile) {
  return std::make_shared<RadialHamiltonian>(dim, std::move(profile));
}
inline HamPtr make_radial(int dim, const PiecewiseCubic& profile) {
  return make_radial(dim, std::make_shared<PiecewiseCubic>(profile));
}

inline HamPtr scale(double factor, HamPtr h) {
  return std::make_shared<ScaledHamiltonian>(factor, std::move(h));
}

inline HamPtr sum(HamPtr a, HamPtr b) {
  return std::make_shared<SumHamiltonian>(std::move(a), std::move(b));
}

inline HamPtr compose_sharp(HamPtr h, HamPtr k) {
  return std::make_shared<SharpHamiltonian>(std::move(h), std::move(k));
}

inline HamPtr inverse(HamPtr k) {
  return std::make_shared<InverseHamiltonian>(std::move(k));
}

inline HamPtr reparametrize(HamPtr h, TimeProfile lambda) {
  return std::make_shared<ReparametrizedHamiltonian>(std::move(h),
                                                     std::move(lambda));
}

// --- per-time extrema and the derived norms -------------------------------

struct ExtremumOptions {
  int coarse_grid = 25;      // points per axis on the support box (2D); scaled
                             // down with dimension
  int ascent_starts = 6;     // best coarse points promoted to local ascent
  int max_ascent_iters = 200;
  double tol = 1e-10;
};

namespace detail {

inline double local_extremum(const Hamiltonian& h, double t, Vec x, double sign,
                             const ExtremumOptions& o) {
  double f = sign * h.value(t, x);
  for (int it = 0; it < o.max_ascent_iters; ++it) {
    Vec g = sign * h.gradient(t, x);
    double gn = g.norm();
    if (gn < o.tol) break;
    double step = 0.5 / (1.0 + gn);
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Vec xn = x + step * g;
      double fn = sign * h.value(t, xn);
      if (fn > f + 1e-16) {
        x = xn;
        f = fn;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return sign * f;
}

// Max (sign=+1) or min (sign=-1) of H(t, .) by coarse sampling plus ascent,
// with grid refinement until two successive refinements agree to 1e-8.
inline double sampled_extremum(const Hamiltonian& h, double t, double sign,
                               const ExtremumOptions& o) {
  const int d = h.dim();
  const double r = h.support_radius();
  if (r == 0.0) return 0.0;
  // per-axis count shrinks with dimension to keep the lattice tractable
  int per_axis = std::max(5, static_cast<int>(std::round(
                                 std::pow(static_cast<double>(o.coarse_grid),
                                          2.0 / static_cast<double>(d)))));
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int refine = 0; refine < 6; ++refine) {
    std::vector<Vec> pts;
    std::vector<int> idx(d, 0);
    for (;;) {
      Vec x(d);
      for (int i = 0; i < d; ++i)
        x[i] = -r + 2.0 * r * (idx[i] + 0.5) / per_axis;
      if (x.norm() <= r * 1.05) pts.push_back(x);
      int i = 0;
      while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
      if (i == d) break;
    }
    pts.push_back(Vec::Zero(d));
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      vals[i] = sign * h.value(t, pts[i]);
    });
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    double best = 0.0;  // H vanishes outside the support, so 0 is attained
    int starts = std::min<std::size_t>(o.ascent_starts, order.size());
    for (int s = 0; s < starts; ++s) {
      double v = sign * local_extremum(h, t, pts[order[s]], sign, o);
      best = std::max(best, v);
    }
    double result = sign * best;
    if (refine > 0 && std::fabs(result - prev) < 1e-8) return result;
    prev = result;
    per_axis = per_axis * 2 - 1;
  }
  return prev;
}

}  // namespace detail

inline double max_at_time(const Hamiltonian& h, double t,
                          const ExtremumOptions& o = {}) {
  if (auto v = h.exact_max(t)) return *v;
  return detail::sampled_extremum(h, t, +1.0, o);
}

inline double min_at_time(const Hamiltonian& h, double t,
                          const ExtremumOptions& o = {}) {
  if (auto v = h.exact_min(t)) return *v;
  return detail::sampled_extremum(h, t, -1.0, o);
}

namespace detail {
// Composite-Simpson time quadrature with doubling until 1e-8 agreement.
inline double time_quadrature(const std::function<double(double)>& f,
                              bool autonomous) {
  if (autonomous) return f(0.0);
  int n = 16;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int refine = 0; refine < 8; ++refine) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double a = static_cast<double>(i) / n, b = static_cast<double>(i + 1) / n;
      acc += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    if (refine > 0 && std::fabs(acc - prev) < 1e-8) return acc;
    prev = acc;
    n *= 2;
  }
  return prev;
}
}  // namespace detail

// E^+(H) = integral over [0,1] of max_x H(t,x).
inline double e_plus(const Hamiltonian& h, const ExtremumOptions& o = {}) {
  return detail::time_quadrature(
      [&](double t) { return max_at_time(h, t, o); }, h.autonomous());
}

// Hofer norm: integral of (max_x H - min_x H).
inline double hofer_norm(const Hamiltonian& h, const ExtremumOptions& o = {}) {
  return detail::time_quadrature(
      [&](double t) { return max_at_time(h, t, o) - min_at_time(h, t, o); },
      h.autonomous());
}

// --- simplicity and admissibility -----------------------------------------

struct SimplicityReport {
  bool is_simple = false;
  double max_value = 0.0;
  std::vector<double> critical_values;
  std::vector<double> unresolved_values;  // critical values off both bands
  bool plateau_found = false;
  Vec plateau_witness;
};

// Classification for time-independent H: nonnegative, plateau at the max,
// critical values only {0, max}.
inline SimplicityReport classify_simple(const Hamiltonian& h,
                                        double tol = 1e-9,
                                        std::uint64_t seed = 20240901) {
  require(h.autonomous(), "simplicity is defined for time-independent H");
  SimplicityReport rep;

  if (h.is_zero()) {
    rep.is_simple = true;
    rep.max_value = 0.0;
    rep.critical_values = {0.0};
    rep.plateau_found = true;
    rep.plateau_witness = Vec::Zero(h.dim());
    return rep;
  }

  if (auto profile = h.radial_profile()) {
    // exact path: critical values of the profile, plateau at the max
    if (auto* pc = dynamic_cast<const PiecewiseCubic*>(profile.get())) {
      rep.max_value = pc->max_value();
      rep.critical_values = pc->critical_values();
    } else {
      // dense scan of the generic curve
      double send = profile->support_end();
      rep.max_value = 0.0;
      int n = 4000;
      double prev_d = 0.0;
      for (int i = 0; i <= n; ++i) {
        double s = send * i / n;
        rep.max_value = std::max(rep.max_value, profile->value(s));
        double d = profile->deriv(s);
        if (i > 0 && prev_d * d <= 0.0 && (prev_d != 0.0 || d != 0.0)) {
          double root = find_root([&](double u) { return profile->deriv(u); },
                                  send * (i - 1) / n, s);
          rep.critical_values.push_back(profile->value(root));
        }
        prev_d = d;
      }
      rep.critical_values.push_back(profile->value(0.0));
      rep.critical_values.push_back(0.0);
    }
  } else {
    // sampled search for critical points of a generic descriptor
    const int d = h.dim();
    const double r = h.support_radius();
    rep.max_value = max_at_time(h, 0.0);
    Rng rng(seed);
    std::vector<Vec> starts;
    for (int i = 0; i < 200; ++i) starts.push_back(rng.ball_point(d, r));
    starts.push_back(Vec::Zero(d));
    std::vector<std::optional<double>> found(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
      Vec x = starts[i];
      for (int it = 0; it < 400; ++it) {
        Vec g = h.gradient(0.0, x);
        double gn = g.norm();
        if (gn < 1e-10) { found[i] = h.value(0.0, x); return; }
        // descend |grad|^2 via damped Newton on the gradient
        Mat hess = h.hessian(0.0, x);
        Vec step = hess.colPivHouseholderQr().solve(-g);
        if (!all_finite(step) || step.norm() > r) step = -g;
        double fl = gn;
        bool ok = false;
        for (int bt = 0; bt < 30; ++bt) {
          Vec xn = x + step;
          if (h.gradient(0.0, xn).norm() < fl) { x = xn; ok = true; break; }
          step *= 0.5;
        }
        if (!ok) return;
      }
    });
    for (const auto& v : found)
      if (v) rep.critical_values.push_back(*v);
    rep.critical_values.push_back(0.0);  // everything outside the support
    std::sort(rep.critical_values.begin(), rep.critical_values.end());
    rep.critical_values.erase(
        std::unique(rep.critical_values.begin(), rep.critical_values.end(),
                    [&](double a, double b) { return std::fabs(a - b) < tol * 10; }),
        rep.critical_values.end());
  }

  double band = std::max(tol, 1e-7 * (1.0 + std::fabs(rep.max_value)));
  bool nonneg = rep.max_value > -band;
  for (double v : rep.critical_values) {
    if (v < -band) nonneg = false;
    if (std::fabs(v) > band && std::fabs(v - rep.max_value) > band)
      rep.unresolved_values.push_back(v);
  }

  // plateau witness: a point attaining the max whose neighborhood stays flat
  Vec witness;
  if (auto profile = h.radial_profile()) {
    double send = profile->support_end();
    for (int i = 0; i <= 2000; ++i) {
      double s = send * i / 2000.0;
      if (std::fabs(profile->value(s) - rep.max_value) < band &&
          std::fabs(profile->deriv(s)) < band) {
        witness = Vec::Zero(h.dim());
        witness[0] = std::sqrt(s / kPi);
        break;
      }
    }
  } else {
    Rng rng(seed + 1);
    for (int i = 0; i < 400 && witness.size() == 0; ++i) {
      Vec x = rng.ball_point(h.dim(), h.support_radius());
      if (std::fabs(h.value(0.0, x) - rep.max_value) < band) witness = x;
    }
  }
  if (witness.size() > 0) {
    rep.plateau_found = true;
    double eps = 1e-4 * (1.0 + h.support_radius());
    Rng rng(seed + 2);
    for (int i = 0; i < 16; ++i) {
      Vec y = witness + rng.ball_point(h.dim(), eps);
      if (std::fabs(h.value(0.0, y) - rep.max_value) > band) {
        rep.plateau_found = false;
        break;
      }
    }
    rep.plateau_witness = witness;
  }

  rep.is_simple = nonneg && rep.unresolved_values.empty() && rep.plateau_found &&
                  rep.max_value >= 0.0;
  return rep;
}

struct AdmissibilityReport {
  bool admissible = false;
  double sup_slope = 0.0;   // sup |h'|; non-constant minimal period is 1/sup
  double margin = 0.0;      // 1 - sup_slope
};

// A radial Hamiltonian h(pi |x|^2) has non-constant T-periodic orbits exactly
// at levels with |h'(s)| = 1/T, so absence of periods T <= 1 is sup |h'| < 1.
// Equality means a period-1 orbit exists and is rejected.
inline AdmissibilityReport is_admissible_radial(const Curve1D& profile,
                                                bool /*contractible_only*/ = true) {
  AdmissibilityReport rep;
  if (auto* pc = dynamic_cast<const PiecewiseCubic*>(&profile)) {
    rep.sup_slope = pc->sup_abs_deriv();
  } else {
    // dense scan with a sampled Lipschitz safety term for the derivative
    double send = profile.support_end();
    int n = 20000;
    double sup = 0.0, lip = 0.0, prev = profile.deriv(0.0);
    for (int i = 1; i <= n; ++i) {
      double d = profile.deriv(send * i / n);
      sup = std::max(sup, std::fabs(d));
      lip = std::max(lip, std::fabs(d - prev));
      prev = d;
    }
    rep.sup_slope = sup + 0.5 * lip;
  }
  rep.margin = 1.0 - rep.sup_slope;
  rep.admissible = rep.sup_slope < 1.0 - 1e-12;
  return rep;
}

inline AdmissibilityReport is_admissible_radial(const Hamiltonian& h,
                                                bool contractible_only = true) {
  auto p = h.radial_profile();
  require(p != nullptr, "admissibility criterion needs a radial Hamiltonian");
  return is_admissible_radial(*p, contractible_only);
}

// --- slope-capped truncation ----------------------------------------------

// For time-independent H whose critical values lie in [0, eps*maxH] u {maxH},
// returns K = f(H) with f = 0 on [0, eps*maxH], 0 <= f' <= 1, and
// max K = (1-eps) maxH - delta exactly.  Slopes at most 1 mean K inherits
// the absence of fast periodic orbits from H.
inline HamPtr epsilon_truncate(HamPtr h, double eps, double delta,
                               double class_tol = 1e-9) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
  auto rep = classify_simple(*h, class_tol);
  double max_h = rep.max_value;
  require(delta > 0.0 && delta < (1.0 - eps) * max_h,
          "delta out of range (0, (1-eps) max H)");
  double shelf = eps * max_h;
  for (double v : rep.critical_values) {
    require(v <= shelf + class_tol * (1.0 + max_h) ||
                std::fabs(v - max_h) <= class_tol * (1.0 + max_h),
            "H is not in the eps-class: critical value at " + format_double(v));
  }
  double target = (1.0 - eps) * max_h - delta;
  double ramp = delta / 10.0;  // smoothing width; peak slope stays below 1
  auto f = std::make_shared<PiecewiseCubic>(
      monotone_ramp(shelf, max_h, target, ramp));
  if (h->radial_profile()) {
    auto curve = std::make_shared<ComposedCurve>(f, h->radial_profile());
    return make_radial(h->dim(), curve);
  }
  return std::make_shared<ComposedHamiltonian>(f, std::move(h));
}

}  // namespace symcap
