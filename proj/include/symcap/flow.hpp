#pragma once

// Hamiltonian flows: trajectories, time-1 maps, the linearized (monodromy)
// flow, and displacement certificates on sample clouds.

#include "symcap/common.hpp"
#include "symcap/hamiltonian.hpp"
#include "symcap/integrator.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace symcap {

struct FlowOptions {
  // Kept looser than the evaluation tolerance of composed descriptors,
  // whose values carry inner flow-solve noise.
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  // escape bound as a multiple of the support radius (plus the start point)
  double escape_factor = 8.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> velocities;
  double energy_drift = 0.0;  // max |H(x(t)) - H(x(0))| for autonomous H

  Vec sample(double t) const {
    OdeResult r;
    r.times = times;
    r.states = states;
    r.derivs = velocities;
    return ode_sample(r, t);
  }
  const Vec& back() const { return states.back(); }
};

inline Trajectory integrate(const Hamiltonian& h, const Vec& x0, double t0,
                            double t1, const FlowOptions& opts = {}) {
  check_phase_point(x0);
  require(x0.size() == h.dim(), "initial point dimension mismatch");
  OdeOptions oo;
  oo.rel_tol = opts.rel_tol;
  oo.abs_tol = opts.abs_tol;
  oo.max_norm = opts.escape_factor * (h.support_radius() + 1.0) + x0.norm();
  auto rhs = [&h](double t, const Vec& y) { return h.field(t, y); };
  OdeResult r = integrate_ode(rhs, t0, t1, x0, oo);
  Trajectory traj;
  traj.times = std::move(r.times);
  traj.states = std::move(r.states);
  traj.velocities = std::move(r.derivs);
  if (h.autonomous()) {
    double h0 = h.value(0.0, traj.states.front());
    for (const auto& x : traj.states)
      traj.energy_drift =
          std::max(traj.energy_drift, std::fabs(h.value(0.0, x) - h0));
  }
  return traj;
}

inline Vec flow_map(const Hamiltonian& h, const Vec& x0, double t0, double t1,
                    const FlowOptions& opts = {}) {
  if (h.is_zero() || x0.norm() >= h.support_radius())
    return x0;  // the field vanishes along the whole (constant) trajectory
  return integrate(h, x0, t0, t1, opts).back();
}

inline Vec time_one_map(const Hamiltonian& h, const Vec& x0,
                        const FlowOptions& opts = {}) {
  return flow_map(h, x0, 0.0, 1.0, opts);
}

struct MonodromyMatrix {
  Mat matrix;                  // d phi^1_H at the start point
  double symplectic_residual;  // |M^T J M - J|
  double det_id_minus;         // det(id - M); 0 marks a degenerate orbit

  bool nondegenerate(double tol = 1e-8) const {
    return std::fabs(det_id_minus) > tol;
  }
};

// Integrates the variational equation dY/dt = J grad^2 H(t, x(t)) Y alongside
// the trajectory itself.
inline MonodromyMatrix monodromy(const Hamiltonian& h, const Vec& x0,
                                 double t1 = 1.0, const FlowOptions& opts = {}) {
  const int d = h.dim();
  auto [y, jac] = detail::flow_with_jacobian(h, x0, 0.0, t1, opts.rel_tol);
  MonodromyMatrix m;
  m.matrix = jac;
  Mat j = symplectic_form_matrix(d);
  m.symplectic_residual = (m.matrix.transpose() * j * m.matrix - j).norm();
  m.det_id_minus = (Mat::Identity(d, d) - m.matrix).determinant();
  return m;
}

// --- displacement certificates ---------------------------------------------

struct SampleCloud {
  std::vector<Vec> points;
  double covering_radius = 0.0;  // declared by the generator
};

namespace detail {
// Uniform-grid hash for nearest-neighbor queries below a cutoff.
class GridIndex {
 public:
  GridIndex(const std::vector<Vec>& pts, double cell) : cell_(cell), pts_(pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      cells_[key(pts[i])].push_back(i);
  }

  // min distance from q to the point set, or +inf if above ~one cell
  double nearest(const Vec& q) const {
    double best = std::numeric_limits<double>::infinity();
    std::vector<long> base = coords(q);
    std::vector<long> offset(base.size(), -1);
    for (;;) {
      std::vector<long> c(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) c[i] = base[i] + offset[i];
      auto it = cells_.find(hash_coords(c));
      if (it != cells_.end())
        for (std::size_t idx : it->second)
          best = std::min(best, (pts_[idx] - q).norm());
      std::size_t i = 0;
      while (i < offset.size() && ++offset[i] == 2) offset[i++] = -1;
      if (i == offset.size()) break;
    }
    return best;
  }

 private:
  std::vector<long> coords(const Vec& q) const {
    std::vector<long> c(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i)
      c[i] = static_cast<long>(std::floor(q[i] / cell_));
    return c;
  }
  static std::size_t hash_coords(const std::vector<long>& c) {
    std::size_t h = 1469598103934665603ull;
    for (long v : c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
  std::size_t key(const Vec& q) const { return hash_coords(coords(q)); }

  double cell_;
  const std::vector<Vec>& pts_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> cells_;
};
}  // namespace detail

struct DisplacementReport {
  bool displaced = false;
  double min_distance = 0.0;
  double margin = 0.0;
};

// Certifies that the time-1 flow of K moves the sampled set off itself by
// more than `margin`.  The cloud must cover the set at radius <= margin/4;
// the check is conservative and fails on ties.
inline DisplacementReport displacement_check(const Hamiltonian& k,
                                             const SampleCloud& cloud,
                                             double margin,
                                             const FlowOptions& opts = {}) {
  require(!cloud.points.empty(), "displacement check needs a nonempty cloud");
  require(cloud.covering_radius <= margin / 4.0 + 1e-15,
          "cloud covering radius exceeds margin/4");
  std::vector<Vec> moved(cloud.points.size());
  parallel_for(cloud.points.size(), [&](std::size_t i) {
    moved[i] = time_one_map(k, cloud.points[i], opts);
  });
  detail::GridIndex index(cloud.points, std::max(margin, 1e-12));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : moved) best = std::min(best, index.nearest(q));
  DisplacementReport rep;
  rep.min_distance = best;
  rep.margin = margin;
  rep.displaced = best > margin;
  return rep;
}

// Lattice cloud filling a Euclidean ball, with its covering radius.
inline SampleCloud ball_cloud(int dim, double radius, double covering_radius,
                              const Vec& center = Vec()) {
  SampleCloud cloud;
  double step = 2.0 * covering_radius / std::sqrt(static_cast<double>(dim));
  long n = static_cast<long>(std::ceil(radius / step));
  std::vector<long> idx(dim, -n);
  for (;;) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = idx[i] * step;
    if (x.norm() <= radius) {
      if (center.size() == dim) x += center;
      cloud.points.push_back(x);
    }
    int i = 0;
    while (i < dim && ++idx[i] > n) idx[i++] = -n;
    if (i == dim) break;
  }
  cloud.covering_radius = covering_radius;
  return cloud;
}

}  // namespace symcap
