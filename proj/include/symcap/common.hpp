#pragma once

// Shared linear-algebra aliases, the standard symplectic structure on R^{2n},
// and small numeric utilities used across the library.
//
// Phase-space convention (fixed for the whole library):
//   coordinates are interleaved, x = (q_1, p_1, q_2, p_2, ..., q_n, p_n),
//   omega0 = sum_i dq_i ^ dp_i,
//   X_H is defined by omega0(X_H, .) = -dH(.), i.e. X_H = (-dH/dp, +dH/dq)
//   per pair.  For H = pi (q^2 + p^2) this gives X_H = (-2 pi p, 2 pi q).

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace symcap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

inline void check_phase_point(const Vec& x) {
  require(x.size() >= 2 && x.size() % 2 == 0,
          "phase point must have even dimension >= 2");
  require(all_finite(x), "phase point has non-finite coordinates");
}

// Multiplication by i per (q,p) pair: (q,p) -> (-p, q).
inline Mat standard_complex_structure(int dim) {
  Mat j = Mat::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; i += 2) {
    j(i, i + 1) = -1.0;
    j(i + 1, i) = 1.0;
  }
  return j;
}

// Matrix of omega0: omega0(u, v) = u^T * Omega * v.
inline Mat symplectic_form_matrix(int dim) {
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i + 1 < dim; i += 2) {
    m(i, i + 1) = 1.0;
    m(i + 1, i) = -1.0;
  }
  return m;
}

inline double symplectic_form(const Vec& u, const Vec& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < u.size(); i += 2)
    s += u[i] * v[i + 1] - u[i + 1] * v[i];
  return s;
}

// In-place i-multiplication, avoids building the matrix.
inline Vec apply_complex_structure(const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
    y[i] = -x[i + 1];
    y[i + 1] = x[i];
  }
  return y;
}

// pi |x|^2, the symplectic area coordinate used by radial Hamiltonians.
inline double radial_area(const Vec& x) { return kPi * x.squaredNorm(); }

// Deterministic RNG wrapper; every stochastic routine takes a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(gen_);
  }
  double normal(double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    return d(gen_);
  }
  int uniform_int(int a, int b) {
    std::uniform_int_distribution<int> d(a, b);
    return d(gen_);
  }
  Vec uniform_vec(int dim, double a, double b) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(a, b);
    return v;
  }
  // Uniform sample from the closed ball of given radius.
  Vec ball_point(int dim, double radius) {
    Vec v(dim);
    for (;;) {
      for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
      if (v.squaredNorm() <= 1.0) return radius * v;
    }
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
inline int& worker_count_ref() {
  static int n = [] {
    if (const char* env = std::getenv("SYMCAP_WORKERS")) {
      int k = std::atoi(env);
      if (k >= 1) return k;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }();
  return n;
}
}  // namespace detail

inline int worker_count() { return detail::worker_count_ref(); }
inline void set_worker_count(int n) { detail::worker_count_ref() = std::max(1, n); }

// Chunked parallel map over [0, n).  The body must be pure with respect to
// shared state; results are written to per-index slots so the output is
// independent of scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int workers = std::min<std::size_t>(worker_count(), n ? n : 1);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("parallel_for: worker threw");
}

// Fixed-format float printing so that reports are byte-reproducible.
inline std::string format_double(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  // normalize negative zero
  if (std::string(buf) == "-0") return "0";
  return buf;
}

// Adaptive composite Simpson quadrature on [a, b].
inline double integrate_1d(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-10, int max_depth = 24) {
  auto simpson = [&](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  std::function<double(double, double, double, double, int)> rec =
      [&](double lo, double hi, double whole, double eps, int depth) -> double {
    double mid = 0.5 * (lo + hi);
    double left = simpson(lo, mid), right = simpson(mid, hi);
    double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15.0 * eps)
      return left + right + diff / 15.0;
    return rec(lo, mid, left, eps / 2.0, depth - 1) +
           rec(mid, hi, right, eps / 2.0, depth - 1);
  };
  return rec(a, b, simpson(a, b), tol, max_depth);
}

// Brent-style scalar root bracketing refinement on [a, b] with f(a)*f(b) <= 0.
inline double find_root(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  require(fa * fb <= 0.0, "find_root: endpoints do not bracket a root");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  for (int i = 0; i < max_iter && b - a > tol; ++i) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace symcap
