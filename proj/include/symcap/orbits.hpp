#pragma once

// Contractible 1-periodic orbits and action spectra: two-stage search
// (shooting Newton on the time-1 map, then Gauss-Newton on the spectral
// collocation equation), plus the closed-form oracle for radial
// Hamiltonians, where non-constant orbits sit exactly at levels with
// integer slope h'(s) and have action h(s) - s h'(s).

#include "symcap/common.hpp"
#include "symcap/flow.hpp"
#include "symcap/hamiltonian.hpp"
#include "symcap/loop.hpp"

#include <map>
#include <optional>
#include <vector>

namespace symcap {

struct PeriodicOrbit {
  FourierLoop loop;
  double action = 0.0;
  double residual = 0.0;       // time-1 closure residual at the start point
  double loop_residual = 0.0;  // collocation residual after refinement
  bool constant = false;
  bool degenerate = false;  // det(id - monodromy) below tolerance
  double det_id_minus = 0.0;
  int winding = 0;
  double level = 0.0;  // radial area pi |x|^2 along the orbit

  PeriodicOrbit() : loop(2, 1) {}
};

struct SpectrumEntry {
  double action = 0.0;
  int multiplicity = 1;
  int winding = 0;
  bool degenerate = false;       // degenerate orbit or tangential root
  bool band = false;             // continuum of orbits sharing this action
  double residual = 0.0;
};

struct ActionSpectrum {
  std::vector<SpectrumEntry> entries;  // sorted by action, pairwise separated
  double cluster_tol = 1e-7;
  bool oracle_certified = false;  // true when produced by the closed form

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(entries.size());
    for (const auto& e : entries) v.push_back(e.action);
    return v;
  }
  std::optional<double> nearest(double a) const {
    std::optional<double> best;
    for (const auto& e : entries)
      if (!best || std::fabs(e.action - a) < std::fabs(*best - a))
        best = e.action;
    return best;
  }
  bool contains(double a, double tol) const {
    auto n = nearest(a);
    return n && std::fabs(*n - a) <= tol;
  }
  // least gap between consecutive distinct values
  double least_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < entries.size(); ++i)
      g = std::min(g, entries[i].action - entries[i - 1].action);
    return g;
  }
};

inline ActionSpectrum cluster_actions(std::vector<SpectrumEntry> raw,
                                      double tol) {
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.action < b.action;
  });
  ActionSpectrum sp;
  sp.cluster_tol = tol;
  for (const auto& e : raw) {
    if (!sp.entries.empty() &&
        std::fabs(sp.entries.back().action - e.action) <= tol) {
      auto& last = sp.entries.back();
      last.multiplicity += e.multiplicity;
      last.degenerate = last.degenerate || e.degenerate;
      last.band = last.band || e.band;
      last.residual = std::max(last.residual, e.residual);
    } else {
      sp.entries.push_back(e);
    }
  }
  return sp;
}

// --- closed-form oracle for radial Hamiltonians -----------------------------

// Non-constant 1-periodic orbits of h(pi|x|^2) live at levels s with
// h'(s) = k, k a nonzero integer (winding k, minimal period 1/|h'|), and have
// action h(s) - s k.  Constant orbits contribute the critical values.  On a
// piece where h' == k identically the action h - s k is constant in s; such
// bands are flagged rather than sampled.
inline ActionSpectrum radial_spectrum_oracle(const Curve1D& profile,
                                             double cluster_tol = 1e-7) {
  std::vector<SpectrumEntry> raw;
  bool all_clean = true;

  auto add_critical = [&](double v) {
    SpectrumEntry e;
    e.action = v;
    e.winding = 0;
    raw.push_back(e);
  };

  if (auto* pc = dynamic_cast<const PiecewiseCubic*>(&profile)) {
    for (double v : pc->critical_values()) add_critical(v);
    int slope_cap = static_cast<int>(std::floor(pc->sup_abs_deriv() + 1e-12));
    for (int k = -slope_cap; k <= slope_cap; ++k) {
      if (k == 0) continue;
      std::vector<std::pair<double, double>> bands;
      for (const auto& root : pc->solve_deriv_equal(k, &bands)) {
        SpectrumEntry e;
        e.action = pc->value(root.s) - root.s * k;
        e.winding = k;
        e.degenerate = root.tangential;
        if (root.tangential) all_clean = false;
        raw.push_back(e);
      }
      for (const auto& [a, b] : bands) {
        SpectrumEntry e;
        double mid = 0.5 * (a + b);
        e.action = pc->value(mid) - mid * k;
        e.winding = k;
        e.band = true;
        e.degenerate = true;
        all_clean = false;
        raw.push_back(e);
      }
    }
  } else {
    // dense scan + bisection for generic curves
    double send = profile.support_end();
    const int n = 40000;
    double sup = 0.0;
    std::vector<double> d(n + 1);
    for (int i = 0; i <= n; ++i) {
      d[i] = profile.deriv(send * i / n);
      sup = std::max(sup, std::fabs(d[i]));
    }
    add_critical(profile.value(0.0));
    add_critical(0.0);
    int slope_cap = static_cast<int>(std::floor(sup + 1e-9));
    for (int k = -slope_cap; k <= slope_cap; ++k) {
      if (k == 0 && true) {
        // critical interior values via sign changes of h'
        for (int i = 1; i <= n; ++i)
          if (d[i - 1] * d[i] < 0.0) {
            double s = find_root(
                [&](double u) { return profile.deriv(u); },
                send * (i - 1) / n, send * i / n, 1e-12);
            add_critical(profile.value(s));
          }
        continue;
      }
      for (int i = 1; i <= n; ++i) {
        double f0 = d[i - 1] - k, f1 = d[i] - k;
        if (f0 * f1 < 0.0) {
          double s = find_root(
              [&](double u) { return profile.deriv(u) - k; },
              send * (i - 1) / n, send * i / n, 1e-12);
          SpectrumEntry e;
          e.action = profile.value(s) - s * k;
          e.winding = k;
          raw.push_back(e);
        }
      }
    }
  }
  ActionSpectrum sp = cluster_actions(std::move(raw), cluster_tol);
  sp.oracle_certified = all_clean;
  return sp;
}

inline ActionSpectrum radial_spectrum_oracle(const Hamiltonian& h,
                                             double cluster_tol = 1e-7) {
  auto p = h.radial_profile();
  require(p != nullptr, "oracle needs a radial Hamiltonian");
  return radial_spectrum_oracle(*p, cluster_tol);
}

// --- search -----------------------------------------------------------------

struct OrbitSearchOptions {
  int radial_seeds = 240;        // along the q1 axis, covering the support
  int lattice_per_axis = 0;      // optional full lattice for non-radial H
  double newton_tol = 1e-9;
  int max_newton = 40;
  int k_max = 24;                // Fourier truncation of the orbit loops
  int refine_iters = 4;          // Gauss-Newton passes on the collocation eq.
  double dedup_loop_tol = 1e-5;
  double cluster_tol = 1e-7;
  double degenerate_tol = 1e-6;
  FlowOptions flow;
};

namespace detail {

inline int winding_of_loop(const FourierLoop& loop, int n_nodes = 128) {
  // accumulated argument of the dominant complex pair
  int d = loop.dim();
  int best_pair = 0;
  double best_amp = -1.0;
  for (int i = 0; i + 1 < d; i += 2) {
    double amp = 0.0;
    for (int j = 0; j < 8; ++j) {
      Vec x = loop.evaluate(j / 8.0);
      amp += x[i] * x[i] + x[i + 1] * x[i + 1];
    }
    if (amp > best_amp) {
      best_amp = amp;
      best_pair = i;
    }
  }
  if (best_amp < 1e-18) return 0;
  double total = 0.0, prev = 0.0;
  bool first = true;
  for (int j = 0; j <= n_nodes; ++j) {
    Vec x = loop.evaluate(static_cast<double>(j) / n_nodes);
    double th = std::atan2(x[best_pair + 1], x[best_pair]);
    if (!first) {
      double dth = th - prev;
      while (dth > kPi) dth -= 2.0 * kPi;
      while (dth < -kPi) dth += 2.0 * kPi;
      total += dth;
    }
    prev = th;
    first = false;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// Gauss-Newton on the collocation residual x'(t_j) - X_H(t_j, x(t_j)).
inline double refine_collocation(const Hamiltonian& h, FourierLoop& loop,
                                 int iters) {
  const int d = loop.dim();
  const int km = loop.k_max();
  const int modes = 2 * km + 1;
  const int n = 4 * km;

  auto residual = [&](const FourierLoop& x, Eigen::VectorXd& r) {
    r.resize(n * d);
    for (int j = 0; j < n; ++j) {
      double t = static_cast<double>(j) / n;
      Vec rr = x.velocity(t) - h.field(t, x.evaluate(t));
      r.segment(j * d, d) = rr;
    }
    return r.norm() / std::sqrt(static_cast<double>(n));
  };

  Eigen::VectorXd r;
  double res = residual(loop, r);
  for (int it = 0; it < iters; ++it) {
    Mat jac = Mat::Zero(n * d, modes * d);
    for (int j = 0; j < n; ++j) {
      double t = static_cast<double>(j) / n;
      Vec x = loop.evaluate(t);
      Mat hess = h.hessian(t, x);
      Mat dxh(d, d);  // D X_H = J * Hess
      for (int i = 0; i + 1 < d; i += 2) {
        dxh.row(i) = -hess.row(i + 1);
        dxh.row(i + 1) = hess.row(i);
      }
      for (int k = -km; k <= km; ++k) {
        double th = 2.0 * kPi * k * t, w = 2.0 * kPi * k;
        double c = std::cos(th), s = std::sin(th);
        // evaluation rotation R and its time derivative, per pair blocks
        Mat rot = Mat::Zero(d, d), drot = Mat::Zero(d, d);
        for (int i = 0; i + 1 < d; i += 2) {
          rot(i, i) = c;
          rot(i, i + 1) = s;
          rot(i + 1, i) = -s;
          rot(i + 1, i + 1) = c;
          drot(i, i) = -w * s;
          drot(i, i + 1) = w * c;
          drot(i + 1, i) = -w * c;
          drot(i + 1, i + 1) = -w * s;
        }
        jac.block(j * d, (k + km) * d, d, d) = drot - dxh * rot;
      }
    }
    Eigen::VectorXd delta =
        jac.colPivHouseholderQr().solve(-r.cast<double>());
    if (!delta.allFinite()) break;
    FourierLoop trial = loop;
    double step = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 12; ++bt) {
      trial = loop;
      for (int k = -km; k <= km; ++k) {
        Vec c0 = loop.coefficient(k);
        trial.set_coefficient(k, c0 + step * delta.segment((k + km) * d, d));
      }
      Eigen::VectorXd r2;
      double res2 = residual(trial, r2);
      if (res2 < res) {
        loop = trial;
        r = r2;
        res = res2;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved || res < 1e-13) break;
  }
  return res;
}

}  // namespace detail

struct OrbitSearchResult {
  std::vector<PeriodicOrbit> orbits;
  int seeds_tried = 0;
  int seeds_diverged = 0;
};

inline OrbitSearchResult find_orbits(const Hamiltonian& h,
                                     const OrbitSearchOptions& opts = {}) {
  OrbitSearchResult result;
  const int d = h.dim();
  const double r_sup = h.support_radius();

  // the zero Hamiltonian (or empty support): constant orbits only
  if (h.is_zero() || r_sup == 0.0) {
    PeriodicOrbit o;
    o.loop = FourierLoop::constant(Vec::Zero(d), opts.k_max);
    o.constant = true;
    o.action = 0.0;
    o.det_id_minus = 0.0;
    o.degenerate = true;
    result.orbits.push_back(o);
    return result;
  }

  std::vector<Vec> seeds;
  for (int i = 0; i < opts.radial_seeds; ++i) {
    Vec x = Vec::Zero(d);
    x[0] = r_sup * (i + 0.5) / opts.radial_seeds;
    seeds.push_back(x);
  }
  if (opts.lattice_per_axis > 1) {
    std::vector<int> idx(d, 0);
    for (;;) {
      Vec x(d);
      for (int i = 0; i < d; ++i)
        x[i] = -r_sup + 2.0 * r_sup * (idx[i] + 0.5) / opts.lattice_per_axis;
      if (x.norm() < r_sup) seeds.push_back(x);
      int i = 0;
      while (i < d && ++idx[i] == opts.lattice_per_axis) idx[i++] = 0;
      if (i == d) break;
    }
  }
  result.seeds_tried = static_cast<int>(seeds.size());

  struct Hit {
    Vec x;
    double residual;
    Mat mono;
    double det_id_minus;
  };
  std::vector<std::optional<Hit>> hits(seeds.size());
  std::atomic<int> diverged{0};

  parallel_for(seeds.size(), [&](std::size_t si) {
    Vec x = seeds[si];
    double res = std::numeric_limits<double>::infinity();
    Mat mono;
    double det = 0.0;
    bool ok = false;
    // F == 0 trivially outside the support, so the iteration is confined to
    // the (slightly inflated) support ball; the outside region contributes
    // one synthetic constant orbit below.
    const double ball = r_sup * (1.0 + 1e-9);
    for (int it = 0; it < opts.max_newton; ++it) {
      MonodromyMatrix m;
      Vec fx;
      try {
        m = monodromy(h, x, 1.0, opts.flow);
        fx = flow_map(h, x, 0.0, 1.0, opts.flow) - x;
      } catch (const std::exception&) {
        break;
      }
      res = fx.norm();
      mono = m.matrix;
      det = m.det_id_minus;
      if (res < opts.newton_tol * (1.0 + x.norm())) {
        ok = true;
        break;
      }
      Mat a = m.matrix - Mat::Identity(d, d);
      Vec step = a.completeOrthogonalDecomposition().solve(-fx);
      if (!all_finite(step)) break;
      double limit = 0.25 * (1.0 + x.norm());
      if (step.norm() > limit) step *= limit / step.norm();
      // backtracking on the closure residual
      bool better = false;
      double scale = 1.0;
      for (int bt = 0; bt < 12; ++bt) {
        Vec xn = x + scale * step;
        if (xn.norm() > ball) {
          scale *= 0.5;
          continue;
        }
        double rn;
        try {
          rn = (flow_map(h, xn, 0.0, 1.0, opts.flow) - xn).norm();
        } catch (const std::exception&) {
          rn = std::numeric_limits<double>::infinity();
        }
        if (rn < res) {
          x = xn;
          better = true;
          break;
        }
        scale *= 0.5;
      }
      if (!better) break;
    }
    if (ok && x.norm() < r_sup * (1.0 - 1e-12))
      hits[si] = Hit{x, res, mono, det};
    else
      diverged.fetch_add(ok ? 0 : 1);
  });
  result.seeds_diverged = diverged.load();

  // deterministic merge in seed order, dedup by loop distance
  auto constant_at = [&](const Vec& x) {
    for (int j = 0; j <= 8; ++j)
      if (h.field(j / 8.0, x).norm() > 1e-9 * (1.0 + x.norm())) return false;
    return true;
  };

  for (std::size_t si = 0; si < hits.size(); ++si) {
    if (!hits[si]) continue;
    const Hit& hit = *hits[si];
    PeriodicOrbit o;
    o.residual = hit.residual;
    o.det_id_minus = hit.det_id_minus;
    o.degenerate = std::fabs(hit.det_id_minus) < opts.degenerate_tol;
    o.level = radial_area(hit.x);
    if (constant_at(hit.x)) {
      o.constant = true;
      o.loop = FourierLoop::constant(hit.x, opts.k_max);
      o.loop_residual = 0.0;
      o.action = integrate_1d(
          [&](double t) { return h.value(t, hit.x); }, 0.0, 1.0, 1e-12);
    } else {
      Trajectory traj = integrate(h, hit.x, 0.0, 1.0, opts.flow);
      int n = 4 * opts.k_max;
      std::vector<Vec> samples(n);
      for (int j = 0; j < n; ++j)
        samples[j] = traj.sample(static_cast<double>(j) / n);
      o.loop = FourierLoop::from_samples(samples, opts.k_max);
      o.loop_residual = detail::refine_collocation(h, o.loop, opts.refine_iters);
      o.winding = detail::winding_of_loop(o.loop);
      // action from the trajectory itself: robust even when the loop's
      // Fourier series converges slowly (e.g. reparametrized orbits with a
      // velocity jump at the seam)
      double area = 0.5 * integrate_1d(
                              [&](double t) {
                                Vec x = traj.sample(t);
                                return symplectic_form(x, h.field(t, x));
                              },
                              0.0, 1.0, 1e-12);
      double bterm = integrate_1d(
          [&](double t) { return h.value(t, traj.sample(t)); }, 0.0, 1.0,
          1e-12);
      o.action = -area + bterm;
    }

    bool duplicate = false;
    for (const auto& prev : result.orbits) {
      if (std::fabs(prev.action - o.action) > 1e-6) continue;
      if (prev.constant && o.constant) {
        duplicate = true;  // same critical value: keep one representative
        break;
      }
      if (prev.constant != o.constant) continue;
      if (loop_distance_mod_shift(prev.loop, o.loop) < opts.dedup_loop_tol ||
          std::fabs(prev.level - o.level) <
              1e-7 * (1.0 + prev.level)) {  // same radial circle family
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.orbits.push_back(o);
  }

  // the region outside the support consists of constant orbits of action 0
  bool has_zero_constant = false;
  for (const auto& o : result.orbits)
    if (o.constant && std::fabs(o.action) < 1e-9) has_zero_constant = true;
  if (!has_zero_constant) {
    PeriodicOrbit o;
    Vec x = Vec::Zero(d);
    x[0] = r_sup * 1.25;
    o.loop = FourierLoop::constant(x, opts.k_max);
    o.constant = true;
    o.action = 0.0;
    o.degenerate = true;
    o.level = radial_area(x);
    result.orbits.push_back(o);
  }

  std::sort(result.orbits.begin(), result.orbits.end(),
            [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
              if (a.action != b.action) return a.action < b.action;
              return a.level < b.level;
            });
  return result;
}

inline double action_of(const Hamiltonian& h, const PeriodicOrbit& orbit) {
  return loop_action(h, orbit.loop);
}

inline ActionSpectrum spectrum(const Hamiltonian& h,
                               const OrbitSearchOptions& opts = {}) {
  OrbitSearchResult res = find_orbits(h, opts);
  std::vector<SpectrumEntry> raw;
  for (const auto& o : res.orbits) {
    SpectrumEntry e;
    e.action = o.action;
    e.winding = o.winding;
    e.degenerate = o.degenerate;
    e.residual = std::max(o.residual, o.loop_residual);
    raw.push_back(e);
  }
  return cluster_actions(std::move(raw), opts.cluster_tol);
}

}  // namespace symcap
