#include <catch2/catch_amalgamated.hpp>

#include "symcap/flow.hpp"
#include "symcap/hamiltonian.hpp"

using namespace symcap;

namespace {

Vec pt2(double q, double p) {
  Vec x(2);
  x << q, p;
  return x;
}

// h(s) = s up to s=1, then smooth descent to 0; linear near the origin so
// that H = pi(q^2+p^2) there.
HamPtr quadratic_like(int dim) {
  auto prof = PiecewiseCubic::hermite(
      {{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}, {3.0, 0.0, 0.0}});
  return make_radial(dim, prof);
}

}  // namespace

TEST_CASE("field sign convention: H = pi(q^2+p^2) gives (-2 pi p, 2 pi q)") {
  auto h = quadratic_like(2);
  Vec x = pt2(0.3, -0.2);
  Vec f = h->field(0.0, x);
  CHECK(f[0] == Catch::Approx(-2.0 * kPi * x[1]).epsilon(1e-12));
  CHECK(f[1] == Catch::Approx(2.0 * kPi * x[0]).epsilon(1e-12));
}

TEST_CASE("zero Hamiltonian evaluates to zero with zero field") {
  auto z = make_zero(4);
  Vec x(4);
  x << 0.1, 0.2, -0.3, 0.4;
  CHECK(z->value(0.5, x) == 0.0);
  CHECK(z->field(0.5, x).norm() == 0.0);
}

TEST_CASE("radial plateau value at the origin") {
  auto prof = plateau_descent_profile(0.7, 0.3, 1.0, 0.1);
  auto h = make_radial(2, prof);
  CHECK(h->value(0.0, pt2(0.0, 0.0)) == Catch::Approx(0.7));
  CHECK(h->value(0.3, pt2(0.05, -0.05)) == Catch::Approx(0.7));
  // gradient vanishes on the plateau
  CHECK(h->gradient(0.0, pt2(0.1, 0.1)).norm() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("radial gradient and hessian match finite differences") {
  auto prof = plateau_descent_profile(0.9, 0.2, 1.2, 0.15);
  auto h = make_radial(2, prof);
  for (auto [q, p] : {std::pair{0.35, 0.1}, {0.5, -0.3}, {0.15, 0.52}}) {
    Vec x = pt2(q, p);
    Vec g = h->gradient(0.0, x);
    for (int i = 0; i < 2; ++i) {
      Vec xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      double fd = (h->value(0.0, xp) - h->value(0.0, xm)) / 2e-6;
      CHECK(g[i] == Catch::Approx(fd).margin(2e-7));
    }
    Mat hess = h->hessian(0.0, x);
    for (int i = 0; i < 2; ++i) {
      Vec xp = x, xm = x;
      xp[i] += 1e-5;
      xm[i] -= 1e-5;
      Vec gd = (h->gradient(0.0, xp) - h->gradient(0.0, xm)) / 2e-5;
      for (int j = 0; j < 2; ++j)
        CHECK(hess(j, i) == Catch::Approx(gd[j]).margin(2e-5));
    }
  }
}

TEST_CASE("e_plus: trivial and separable cases") {
  CHECK(e_plus(*make_zero(2)) == 0.0);

  auto prof = plateau_descent_profile(0.8, 0.2, 1.0, 0.1);
  auto h = make_radial(2, prof);
  CHECK(e_plus(*h) == Catch::Approx(0.8));

  // time factor lambda'(t) = 2t integrates to 1, so E+ stays max h
  auto hl = reparametrize(h, TimeProfile::square());
  CHECK(e_plus(*hl) == Catch::Approx(0.8).margin(1e-7));

  // independent path through the sampled maximizer
  auto prof2 = std::make_shared<PiecewiseCubic>(prof);
  auto generic = std::make_shared<FunctionalHamiltonian>(
      2, std::sqrt(1.0 / kPi),
      [prof2](double t, const Vec& x) {
        return (1.0 + 0.5 * t) * prof2->value(radial_area(x));
      },
      nullptr, false);
  CHECK(e_plus(*generic) == Catch::Approx(1.25 * 0.8).margin(1e-6));
}

TEST_CASE("hofer norm of a simple Hamiltonian is its max") {
  auto h = make_radial(4, plateau_descent_profile(0.45, 0.1, 0.8, 0.1));
  CHECK(hofer_norm(*h) == Catch::Approx(0.45).margin(1e-9));
}

TEST_CASE("inverse of a radial Hamiltonian is -K pointwise and has E+ = -min K") {
  // profile with a negative dip: h in [-0.3, 0]
  auto prof = PiecewiseCubic::hermite(
      {{0.0, -0.3, 0.0}, {0.5, -0.3, 0.0}, {1.2, 0.0, 0.0}});
  auto k = make_radial(2, prof);
  auto kinv = inverse(k);
  // radial flows preserve |x|, so K^-(t,x) = -K(x)
  for (auto [q, p] : {std::pair{0.2, 0.1}, {0.4, -0.3}, {0.0, 0.55}}) {
    Vec x = pt2(q, p);
    CHECK(kinv->value(0.3, x) == Catch::Approx(-k->value(0.0, x)).margin(1e-9));
  }
  double eplus_inv = e_plus(*kinv);
  CHECK(eplus_inv == Catch::Approx(0.3).margin(1e-6));
  // Hofer norm is invariant under the inverse
  CHECK(hofer_norm(*kinv) == Catch::Approx(hofer_norm(*k)).margin(1e-6));
}

TEST_CASE("sharp product with zero is the identity") {
  auto h = make_radial(2, plateau_descent_profile(0.6, 0.2, 1.0, 0.1));
  auto hz = compose_sharp(h, make_zero(2));
  for (auto [q, p] : {std::pair{0.1, 0.2}, {0.45, -0.15}}) {
    Vec x = pt2(q, p);
    CHECK(hz->value(0.37, x) == h->value(0.37, x));
  }
}

TEST_CASE("K sharp K^- vanishes pointwise") {
  auto k = make_radial(2, plateau_descent_profile(0.5, 0.15, 0.9, 0.1));
  auto zero_like = compose_sharp(k, inverse(k));
  for (auto [q, p] : {std::pair{0.2, 0.1}, {0.35, -0.25}, {0.05, 0.4}}) {
    Vec x = pt2(q, p);
    CHECK(zero_like->value(0.4, x) == Catch::Approx(0.0).margin(1e-8));
  }
}

TEST_CASE("reparametrization evaluates as lambda'(t) H(lambda(t), x)") {
  auto h = make_radial(2, plateau_descent_profile(0.6, 0.2, 1.0, 0.1));
  auto hl = reparametrize(h, TimeProfile::square());
  Vec x = pt2(0.3, 0.3);
  for (double t : {0.0, 0.25, 0.7, 1.0})
    CHECK(hl->value(t, x) == 2.0 * t * h->value(t * t, x));
  // endpoint violation is rejected
  TimeProfile bad{[](double t) { return 0.5 * t; }, [](double) { return 0.5; },
                  "bad"};
  CHECK_THROWS_AS(reparametrize(h, bad), std::invalid_argument);
}

TEST_CASE("simplicity classification") {
  CHECK(classify_simple(*make_zero(2)).is_simple);

  auto good = make_radial(2, plateau_descent_profile(0.8, 0.2, 1.0, 0.1));
  auto rep = classify_simple(*good);
  CHECK(rep.is_simple);
  CHECK(rep.max_value == Catch::Approx(0.8));
  CHECK(rep.plateau_found);

  // interior shelf at half height is not simple; witness value ~ 0.4
  auto shelf = PiecewiseCubic::hermite({{0.0, 0.8, 0.0},
                                        {0.2, 0.8, 0.0},
                                        {0.45, 0.4, 0.0},
                                        {0.6, 0.4, 0.0},
                                        {1.0, 0.0, 0.0}});
  auto bad = make_radial(2, shelf);
  auto rep2 = classify_simple(*bad);
  CHECK_FALSE(rep2.is_simple);
  REQUIRE_FALSE(rep2.unresolved_values.empty());
  CHECK(rep2.unresolved_values.front() == Catch::Approx(0.4).margin(1e-6));
}

TEST_CASE("radial admissibility criterion") {
  auto slow = plateau_descent_profile(0.72, 0.1, 1.0, 0.1);  // peak slope 0.9
  CHECK(is_admissible_radial(slow).admissible);
  CHECK(is_admissible_radial(slow).sup_slope == Catch::Approx(0.9));

  auto fast = plateau_descent_profile(1.2, 0.1, 1.0, 0.1);  // peak slope 1.5
  CHECK_FALSE(is_admissible_radial(fast).admissible);

  CHECK(is_admissible_radial(*make_zero(2)).admissible);
}

TEST_CASE("admissibility boundary: orbit of period 1/|h'| exists") {
  // h'(s0) = -1.5 on the constant-slope stretch: the circle at that level
  // closes at t = 2/3
  auto fast = plateau_descent_profile(1.2, 0.1, 1.0, 0.1);
  auto h = make_radial(2, fast);
  std::vector<std::pair<double, double>> bands;
  fast.solve_deriv_equal(-1.5, &bands);
  REQUIRE_FALSE(bands.empty());
  double s0 = 0.5 * (bands.front().first + bands.front().second);
  Vec x0 = pt2(std::sqrt(s0 / kPi), 0.0);
  Vec x = flow_map(*h, x0, 0.0, 2.0 / 3.0);
  CHECK((x - x0).norm() < 1e-8);
  // and it does not close at any earlier sampled fraction
  Vec xh = flow_map(*h, x0, 0.0, 1.0 / 3.0);
  CHECK((xh - x0).norm() > 0.1);
}

TEST_CASE("epsilon truncation: exact max, ordering, admissibility") {
  // admissible simple H with max 1 (peak slope 1/(1.3-0.2-0.1) = 1 exactly is
  // too tight; widen the run)
  auto prof = plateau_descent_profile(1.0, 0.2, 1.5, 0.1);
  REQUIRE(is_admissible_radial(prof).admissible);
  auto h = make_radial(2, prof);

  double eps = 0.5, delta = 0.1;
  auto k = epsilon_truncate(h, eps, delta);
  double target = (1.0 - eps) * 1.0 - delta;

  // max K attained on the plateau of H, exactly the constructed value
  CHECK(k->value(0.0, pt2(0.0, 0.0)) == target);
  auto krep = classify_simple(*k);
  CHECK(krep.is_simple);
  CHECK(krep.max_value == Catch::Approx(target).margin(1e-9));

  // f' <= 1 gives K <= H pointwise
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Vec x = rng.ball_point(2, h->support_radius());
    CHECK(k->value(0.0, x) <= h->value(0.0, x) + 1e-12);
  }

  // admissibility inherited
  CHECK(is_admissible_radial(*k).admissible);

  CHECK_THROWS_AS(epsilon_truncate(h, eps, 0.9), std::invalid_argument);

  // a shelf above eps*max H violates the class requirement
  auto shelf = PiecewiseCubic::hermite({{0.0, 1.0, 0.0},
                                        {0.2, 1.0, 0.0},
                                        {0.8, 0.6, 0.0},
                                        {1.1, 0.6, 0.0},
                                        {2.0, 0.0, 0.0}});
  auto hbad = make_radial(2, shelf);
  CHECK_THROWS_AS(epsilon_truncate(hbad, 0.3, 0.05), std::invalid_argument);
}

TEST_CASE("epsilon truncation accepts a shelf at exactly eps*max") {
  auto shelf = PiecewiseCubic::hermite({{0.0, 1.0, 0.0},
                                        {0.3, 1.0, 0.0},
                                        {1.0, 0.3, 0.0},
                                        {1.3, 0.3, 0.0},
                                        {2.2, 0.0, 0.0}});
  auto h = make_radial(2, shelf);
  auto k = epsilon_truncate(h, 0.3, 0.05);
  CHECK(k->value(0.0, pt2(0.0, 0.0)) == Catch::Approx(0.7 - 0.05));
  // the shelf region maps to exactly zero
  double s_shelf = 1.15;  // on the shelf plateau
  Vec x = pt2(std::sqrt(s_shelf / kPi), 0.0);
  CHECK(k->value(0.0, x) == Catch::Approx(0.0).margin(1e-15));
}
