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

// linear-in-s region gives the rotation z -> e^{2 pi i t} z
HamPtr rotation_like() {
  auto prof = PiecewiseCubic::hermite(
      {{0.0, 0.0, 1.0}, {4.0, 4.0, 1.0}, {8.0, 0.0, 0.0}});
  return make_radial(2, prof);
}

}  // namespace

TEST_CASE("zero Hamiltonian: constant trajectory") {
  auto z = make_zero(2);
  auto traj = integrate(*z, pt2(0.4, -0.1), 0.0, 1.0);
  CHECK((traj.back() - pt2(0.4, -0.1)).norm() == 0.0);
}

TEST_CASE("unit rotation returns after time 1") {
  auto h = rotation_like();
  Vec x0 = pt2(1.0, 0.0);
  Vec x1 = flow_map(*h, x0, 0.0, 1.0);
  CHECK((x1 - x0).norm() < 1e-9);
  // quarter turn is counterclockwise: (1,0) -> (0,1)
  Vec xq = flow_map(*h, x0, 0.0, 0.25);
  CHECK(xq[0] == Catch::Approx(0.0).margin(1e-9));
  CHECK(xq[1] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("half-speed level is 2-periodic: x(1) = -x(0)") {
  // h'(s0) = 1/2 on the constant-slope stretch
  auto prof = plateau_descent_profile(0.45, 0.1, 1.3, 0.2);  // peak slope 0.45
  std::vector<std::pair<double, double>> bands;
  prof.solve_deriv_equal(-0.45, &bands);
  REQUIRE(!bands.empty());
  // rescale: profile with slope exactly -1/2 via scaling the value
  auto h = scale(0.5 / 0.45, make_radial(2, prof));
  double s0 = 0.5 * (bands.front().first + bands.front().second);
  Vec x0 = pt2(std::sqrt(s0 / kPi), 0.0);
  Vec x1 = flow_map(*h, x0, 0.0, 1.0);
  CHECK((x1 + x0).norm() < 1e-8);
}

TEST_CASE("energy drift is tracked and small") {
  auto h = rotation_like();
  auto traj = integrate(*h, pt2(0.7, 0.2), 0.0, 3.0);
  CHECK(traj.energy_drift < 1e-8);
}

TEST_CASE("time-1 map is the identity outside the support") {
  auto h = make_radial(2, plateau_descent_profile(0.5, 0.1, 0.7, 0.1));
  Vec far = pt2(2.0, 1.0);
  CHECK((time_one_map(*h, far) - far).norm() == 0.0);
}

TEST_CASE("flow composition: phi_{H#K} = phi_H o phi_K on samples") {
  auto h = make_radial(2, plateau_descent_profile(0.5, 0.2, 1.1, 0.1));
  // a non-radial companion: shifted bump
  auto prof_k = plateau_descent_profile(0.3, 0.05, 0.5, 0.05);
  auto pk = std::make_shared<PiecewiseCubic>(prof_k);
  Vec c(2);
  c << 0.2, 0.0;
  auto k = std::make_shared<FunctionalHamiltonian>(
      2, std::sqrt(0.5 / kPi) + 0.2,
      [pk, c](double, const Vec& x) { return pk->value(radial_area(x - c)); },
      [pk, c](double, const Vec& x) {
        return Vec(2.0 * kPi * pk->deriv(radial_area(x - c)) * (x - c));
      },
      true);
  auto hk = compose_sharp(h, HamPtr(k));
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Vec x = rng.ball_point(2, 0.45);
    Vec via_sharp = time_one_map(*hk, x);
    Vec via_comp = time_one_map(*h, time_one_map(*k, x));
    worst = std::max(worst, (via_sharp - via_comp).norm());
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("inverse flow: phi_{K^-} undoes phi_K") {
  auto k = make_radial(2, plateau_descent_profile(0.4, 0.1, 0.9, 0.1));
  auto kinv = inverse(k);
  Rng rng(13);
  for (int i = 0; i < 6; ++i) {
    Vec x = rng.ball_point(2, 0.5);
    Vec y = time_one_map(*kinv, time_one_map(*k, x));
    CHECK((y - x).norm() < 1e-8);
  }
}

TEST_CASE("double inverse recovers K") {
  auto k = make_radial(2, plateau_descent_profile(0.4, 0.1, 0.9, 0.1));
  auto kinv2 = inverse(inverse(k));
  // (K^-)^- (t,x) = K(t, phi_K^t (phi_K^t)^{-1} x) = K(t,x): two nested flow
  // solves cancel pointwise
  Rng rng(29);
  for (int i = 0; i < 6; ++i) {
    Vec x = rng.ball_point(2, 0.55);
    double t = rng.uniform(0.0, 1.0);
    CHECK(kinv2->value(t, x) == Catch::Approx(k->value(t, x)).margin(1e-9));
  }
  // generators agree, so the flows coincide
  for (auto [q, p] : {std::pair{0.3, -0.2}, {0.15, 0.4}}) {
    Vec x = pt2(q, p);
    double t = 0.62;
    CHECK((kinv2->field(t, x) - k->field(t, x)).norm() < 1e-6);
  }
}

TEST_CASE("monodromy: identity for the zero Hamiltonian") {
  auto z = make_zero(2);
  auto m = monodromy(*z, pt2(0.3, 0.1));
  CHECK((m.matrix - Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK(std::fabs(m.det_id_minus) < 1e-12);
  CHECK_FALSE(m.nondegenerate());
}

TEST_CASE("monodromy of a radial circle orbit is the transverse shear") {
  // Rotating-frame linearization at a winding-k circle of radius r:
  //   M = [[1, 0], [4 pi^2 r^2 h''(s0), 1]],
  // unipotent because the orbit comes in a rotational family, hence
  // det(id - M) = 0 and the orbit is degenerate as a fixed point.
  auto prof = PiecewiseCubic::hermite(
      {{0.0, 2.0, 0.0}, {2.0, 0.0, -2.0}, {3.0, 0.0, 0.0}});
  // on [0,2]: h(s) = 2 - s^2/2, so h'(s0) = -1 at s0 = 1 with h'' = -1
  std::vector<PiecewiseCubic::DerivRoot> roots = prof.solve_deriv_equal(-1.0);
  REQUIRE(!roots.empty());
  REQUIRE_FALSE(roots.front().tangential);
  auto h = make_radial(2, prof);
  double s0 = roots.front().s;
  REQUIRE(s0 == Catch::Approx(1.0));
  double r2 = s0 / kPi;
  Vec x0 = pt2(std::sqrt(r2), 0.0);
  auto m = monodromy(*h, x0);
  CHECK(m.symplectic_residual < 1e-7);
  double c = 4.0 * kPi * kPi * r2 * prof.second(s0);
  CHECK(m.matrix(0, 0) == Catch::Approx(1.0).margin(1e-7));
  CHECK(m.matrix(1, 1) == Catch::Approx(1.0).margin(1e-7));
  CHECK(m.matrix(0, 1) == Catch::Approx(0.0).margin(1e-7));
  CHECK(m.matrix(1, 0) == Catch::Approx(c).margin(1e-6));
  CHECK(std::fabs(m.det_id_minus) < 1e-8);
}

TEST_CASE("constant orbit at an elliptic critical point is nondegenerate") {
  // h'(0) = 1/2: the origin is a fixed point with monodromy R(pi) = -id
  auto prof = PiecewiseCubic::hermite(
      {{0.0, 0.0, 0.5}, {1.0, 0.5, 0.5}, {2.0, 0.0, 0.0}});
  auto h = make_radial(2, prof);
  auto m = monodromy(*h, pt2(0.0, 0.0));
  CHECK((m.matrix + Mat::Identity(2, 2)).norm() < 1e-8);
  CHECK(m.det_id_minus == Catch::Approx(4.0).margin(1e-7));
  CHECK(m.nondegenerate());
}

TEST_CASE("displacement check: zero Hamiltonian never displaces") {
  auto cloud = ball_cloud(2, 0.3, 0.01);
  auto rep = displacement_check(*make_zero(2), cloud, 0.05);
  CHECK_FALSE(rep.displaced);
  CHECK(rep.min_distance == 0.0);
}

TEST_CASE("displacement check enforces the covering contract") {
  auto cloud = ball_cloud(2, 0.3, 0.1);
  CHECK_THROWS_AS(displacement_check(*make_zero(2), cloud, 0.05),
                  std::invalid_argument);
}

TEST_CASE("translation shear displaces a disc") {
  // K = g(p) with g'(p) ~ 3 on the disc: translates q by -3
  auto g = monotone_ramp(0.0, 2.0, 5.4, 0.2);  // slope 3 on [0.2, 1.8]
  auto shear = std::make_shared<FunctionalHamiltonian>(
      2, 10.0,
      [g](double, const Vec& x) { return g.value(x[1] + 1.0); },
      [g](double, const Vec& x) {
        Vec out(2);
        out << 0.0, g.deriv(x[1] + 1.0);
        return out;
      },
      true);
  // flow: qdot = -g'(p) = -3, pdot = 0 on |p| <= 0.8
  Vec x0 = pt2(0.1, 0.2);
  Vec x1 = time_one_map(*shear, x0);
  CHECK(x1[0] == Catch::Approx(x0[0] - 3.0).margin(1e-9));
  CHECK(x1[1] == Catch::Approx(x0[1]).margin(1e-12));

  auto cloud = ball_cloud(2, 0.5, 0.05);
  auto rep = displacement_check(*shear, cloud, 0.2);
  CHECK(rep.displaced);
  CHECK(rep.min_distance > 1.9);

  // monotonicity: a subset of a displaced set is displaced
  auto small_cloud = ball_cloud(2, 0.2, 0.05);
  CHECK(displacement_check(*shear, small_cloud, 0.2).displaced);
}

TEST_CASE("escape from the integration box is fatal") {
  // outward field grows linearly; not compactly supported, so declare a tiny
  // support and watch the guard fire
  auto bad = std::make_shared<FunctionalHamiltonian>(
      2, 0.1, [](double, const Vec& x) { return x[0] * x[1]; },
      [](double, const Vec& x) {
        Vec g(2);
        g << x[1], x[0];
        return g;
      },
      true);
  Vec x0 = pt2(0.01, 0.01);
  CHECK_THROWS(integrate(*bad, x0, 0.0, 200.0));
}
