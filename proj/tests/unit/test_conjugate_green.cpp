#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "tonelli/conjugate.hpp"
#include "tonelli/fixtures.hpp"
#include "tonelli/green.hpp"

using namespace tonelli;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("conjugate scan on a free orbit stays positive throughout") {
  Fixture fx = make_fixture("flat");
  ConjugateReport rep = conjugate_scan(fx.hamiltonian, fx.scan_seeds.front(), 50.0, 0.05);

  CHECK(rep.horizon == 50.0);
  CHECK(rep.sample_times.size() == 1000);
  CHECK(rep.dets.size() == 1000);
  CHECK(rep.zeros.empty());
  CHECK(rep.grazing.empty());
  CHECK(rep.warnings.empty());

  // Vertical frame flowed for time t has base block (t / sqrt(1 + t^2)) I
  // after column normalization, so the scanned determinant is its cube.
  for (size_t k = 0; k < rep.sample_times.size(); ++k) {
    double t = rep.sample_times[k];
    double c = t / std::sqrt(1.0 + t * t);
    CHECK(rep.dets[k] == doctest::Approx(c * c * c).epsilon(1e-12));
  }
  CHECK(rep.sample_times.front() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(rep.sample_times.back() == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("conjugate scan finds half-period zeros at an elliptic rest point") {
  Fixture fx = make_fixture("pendulum");
  PhasePoint center(Vec::Constant(1, 0.5), Vec::Zero(1));
  ConjugateReport rep = conjugate_scan(fx.hamiltonian, center, 1.2, 0.05);

  // Linearization q'' = -omega^2 q with omega = 2 pi: the vertical direction
  // returns to the vertical at every half period t = k / 2.
  REQUIRE(rep.zeros.size() == 2);
  CHECK(rep.zeros[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.zeros[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.grazing.empty());
}

TEST_CASE("conjugate zero count and locations are stable under grid refinement") {
  Fixture fx = make_fixture("pendulum");
  PhasePoint seed(Vec::Constant(1, 0.55), Vec::Zero(1));
  ConjugateReport coarse = conjugate_scan(fx.hamiltonian, seed, 2.0, 0.05);
  ConjugateReport dense = conjugate_scan(fx.hamiltonian, seed, 2.0, 0.005);

  // Librating orbit of small amplitude: one conjugate point per half period,
  // with the anharmonic period slightly above 1, so the fourth zero sits
  // beyond the horizon.
  REQUIRE(coarse.zeros.size() == 3);
  REQUIRE(dense.zeros.size() == 3);
  for (size_t k = 0; k < coarse.zeros.size(); ++k) {
    CHECK(std::abs(coarse.zeros[k] - dense.zeros[k]) <= 1e-3);
    CHECK(std::abs(coarse.zeros[k] - 0.5 * static_cast<double>(k + 1)) < 0.02);
  }
}

TEST_CASE("quadratic tangency is reported as grazing, not as a zero") {
  // Synthetic cocycle whose vertical determinant dips to 1e-14 at t = 1
  // without changing sign.
  HamiltonianSpec H;
  H.dim = 1;
  H.value = [](const Vec&, const Vec&) { return 0.0; };
  H.grad_q = [](const Vec& q, const Vec&) { return Vec(Vec::Zero(q.size())); };
  H.grad_p = [](const Vec& q, const Vec&) { return Vec(Vec::Zero(q.size())); };
  H.exact_flow = [](const PhasePoint& x, double) { return x; };
  H.exact_tangent_flow = [](const PhasePoint&, double t) {
    Mat J = Mat::Identity(2, 2);
    J(0, 1) = (t - 1.0) * (t - 1.0) + 1e-14;
    return J;
  };

  ConjugateReport rep = conjugate_scan(H, PhasePoint(Vec::Zero(1), Vec::Zero(1)), 2.0, 0.1);
  CHECK(rep.zeros.empty());
  REQUIRE(rep.grazing.size() == 1);
  CHECK(rep.grazing[0] == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("grazing") != std::string::npos);
}

TEST_CASE("conjugate scan batch matches per-seed scans") {
  Fixture fx = make_fixture("flat");
  std::vector<PhasePoint> seeds;
  seeds.push_back(fx.scan_seeds.front());
  seeds.push_back(PhasePoint(vec3(0.4, 0.1, 0.9), vec3(-0.2, 0.6, 0.1)));

  std::vector<ConjugateReport> batch = conjugate_scan_batch(fx.hamiltonian, seeds, 10.0, 0.05);
  REQUIRE(batch.size() == 2);
  for (size_t i = 0; i < seeds.size(); ++i) {
    ConjugateReport single = conjugate_scan(fx.hamiltonian, seeds[i], 10.0, 0.05);
    CHECK(batch[i].zeros.empty());
    REQUIRE(batch[i].dets.size() == single.dets.size());
    for (size_t k = 0; k < single.dets.size(); ++k) CHECK(batch[i].dets[k] == single.dets[k]);
  }
}

TEST_CASE("green bundles of the free flow are reciprocal-horizon graphs") {
  Fixture fx = make_fixture("flat");
  std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0};

  GreenBundleEstimate minus = green_bundle(fx.hamiltonian, fx.scan_seeds.front(),
                                           GreenSide::Minus, horizons);
  REQUIRE(minus.history.size() == 4);
  for (size_t k = 0; k < horizons.size(); ++k) {
    Mat expect = Mat::Identity(3, 3) / horizons[k];
    CHECK((minus.history[k] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(minus.horizon == 8.0);
  CHECK(minus.symmetry_defect == 0.0);
  CHECK(minus.residual == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_FALSE(minus.converged);
  CHECK(minus.warnings.empty());

  GreenBundleEstimate plus = green_bundle(fx.hamiltonian, fx.scan_seeds.front(),
                                          GreenSide::Plus, horizons);
  for (size_t k = 0; k < horizons.size(); ++k) {
    Mat expect = -Mat::Identity(3, 3) / horizons[k];
    CHECK((plus.history[k] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK_FALSE(plus.converged);
}

TEST_CASE("green bundle of the free flow converges once horizons reach 2^20") {
  Fixture fx = make_fixture("flat");
  std::vector<double> horizons;
  for (int k = 0; k <= 20; ++k) horizons.push_back(static_cast<double>(1 << k));

  GreenBundleEstimate est = green_bundle(fx.hamiltonian, fx.scan_seeds.front(),
                                         GreenSide::Minus, horizons);
  CHECK(est.converged);
  CHECK(est.residual == doctest::Approx(std::pow(2.0, -20)).epsilon(1e-12));
  // The limit bundle is the zero section: || S_T || = 1 / T.
  Eigen::JacobiSVD<Mat> svd(est.S);
  CHECK(svd.singularValues()(0) <= 1.01 / horizons.back());
}

TEST_CASE("hyperbolic rest point green bundles carry the stable and unstable slopes") {
  Fixture fx = make_fixture("pendulum");
  PhasePoint saddle(Vec::Zero(1), Vec::Zero(1));
  std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  const double kTwoPi = 2.0 * M_PI;

  GreenBundleEstimate minus = green_bundle(fx.hamiltonian, saddle, GreenSide::Minus, horizons);
  GreenBundleEstimate plus = green_bundle(fx.hamiltonian, saddle, GreenSide::Plus, horizons);

  // Linearization p' = 4 pi^2 q gives eigendirections p = +-(2 pi) q; the
  // backward-vertical limit is the unstable one, the forward-vertical limit
  // the stable one.
  CHECK(minus.converged);
  CHECK(plus.converged);
  CHECK(minus.S(0, 0) == doctest::Approx(kTwoPi).epsilon(1e-4));
  CHECK(plus.S(0, 0) == doctest::Approx(-kTwoPi).epsilon(1e-4));
  CHECK(minus.S(0, 0) - plus.S(0, 0) == doctest::Approx(2.0 * kTwoPi).epsilon(1e-4));
}

TEST_CASE("green bundle refuses an orbit with conjugate points") {
  Fixture fx = make_fixture("pendulum");
  PhasePoint center(Vec::Constant(1, 0.5), Vec::Zero(1));
  std::vector<double> horizons = {1.0, 2.0};
  try {
    green_bundle(fx.hamiltonian, center, GreenSide::Plus, horizons);
    FAIL("expected a conjugate-point error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("conjugate") != std::string::npos);
  }
}

TEST_CASE("green bundle validates its horizon schedule") {
  Fixture fx = make_fixture("flat");
  const PhasePoint& x0 = fx.scan_seeds.front();
  CHECK_THROWS_AS(green_bundle(fx.hamiltonian, x0, GreenSide::Minus, {}), Error);
  CHECK_THROWS_AS(green_bundle(fx.hamiltonian, x0, GreenSide::Minus, {1.0}), Error);
  CHECK_THROWS_AS(green_bundle(fx.hamiltonian, x0, GreenSide::Minus, {2.0, 1.0}), Error);
  CHECK_THROWS_AS(green_bundle(fx.hamiltonian, x0, GreenSide::Minus, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(green_bundle(fx.hamiltonian, x0, GreenSide::Minus, {-1.0, 2.0}), Error);
}

TEST_CASE("boundedness probe of the free flow grows like sqrt(1 + T^2)") {
  Fixture fx = make_fixture("flat");
  TangentVector v(Vec::Zero(3), Vec::Unit(3, 0));
  std::vector<double> horizons = {1.0, 2.0, 3.0};

  BoundednessProbe probe = boundedness_probe(fx.hamiltonian, fx.scan_seeds.front(), v, horizons);
  REQUIRE(probe.forward_norms.size() == 3);
  REQUIRE(probe.backward_norms.size() == 3);
  for (size_t k = 0; k < horizons.size(); ++k) {
    double expect = std::sqrt(1.0 + horizons[k] * horizons[k]);
    CHECK(probe.forward_norms[k] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(probe.backward_norms[k] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(probe.forward_min == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("boundedness probe separates stable and unstable saddle directions") {
  Fixture fx = make_fixture("pendulum");
  PhasePoint saddle(Vec::Zero(1), Vec::Zero(1));
  std::vector<double> horizons = {1.0, 2.0, 3.0};
  const double kTwoPi = 2.0 * M_PI;
  double scale = std::sqrt(1.0 + kTwoPi * kTwoPi);

  TangentVector unstable(Vec::Constant(1, 1.0 / scale), Vec::Constant(1, kTwoPi / scale));
  BoundednessProbe up = boundedness_probe(fx.hamiltonian, saddle, unstable, horizons);
  CHECK(up.forward_min > 100.0);
  CHECK(up.backward_min < 1e-3);

  TangentVector stable(Vec::Constant(1, 1.0 / scale), Vec::Constant(1, -kTwoPi / scale));
  BoundednessProbe down = boundedness_probe(fx.hamiltonian, saddle, stable, horizons);
  CHECK(down.forward_min < 1e-3);
  CHECK(down.backward_min > 100.0);

  CHECK_THROWS_AS(boundedness_probe(fx.hamiltonian, saddle, stable, {}), Error);
}
