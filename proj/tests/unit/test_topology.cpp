#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "tonelli/fixtures.hpp"
#include "tonelli/topology.hpp"

using namespace tonelli;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

void check_winding(const Eigen::MatrixXi& got, const Eigen::MatrixXi& expect) {
  REQUIRE(got.rows() == expect.rows());
  REQUIRE(got.cols() == expect.cols());
  for (int a = 0; a < got.rows(); ++a)
    for (int b = 0; b < got.cols(); ++b) CHECK(got(a, b) == expect(a, b));
}

}  // namespace

TEST_CASE("graph sections pass the two-sheet scan") {
  Fixture zs = make_fixture("zero-section");
  zs.manifold->grid_resolution = {8, 8, 8};
  GraphTestResult a = graph_test(*zs.manifold);
  CHECK(a.is_graph);
  CHECK_FALSE(a.base_rank_deficient);
  CHECK_FALSE(a.witness.has_value());
  CHECK(a.warnings.empty());

  Fixture hel = make_fixture("helical-torus");
  hel.manifold->grid_resolution = {16, 16, 16};
  GraphTestResult b = graph_test(*hel.manifold);
  CHECK(b.is_graph);
  CHECK_FALSE(b.base_rank_deficient);
}

TEST_CASE("folded base projection yields a two-sheet witness and a fold flag") {
  Fixture fx = make_fixture("fold-torus");
  fx.manifold->grid_resolution = {32, 32, 32};
  GraphTestResult res = graph_test(*fx.manifold);

  CHECK_FALSE(res.is_graph);
  CHECK(res.base_rank_deficient);
  CHECK_FALSE(res.warnings.empty());
  REQUIRE(res.witness.has_value());
  // Two sheets over the fold: nearly equal bases, fibers a macroscopic arc of
  // the unit circle apart.
  CHECK(res.witness->base_dist < 0.02);
  CHECK(res.witness->fiber_dist > 0.5);
  CHECK(res.witness->fiber_dist < 1.0);
  CHECK(std::abs(res.witness->theta_a[2] - res.witness->theta_b[2]) > 0.05);
}

TEST_CASE("null-homotopic base circle is not a graph and has antipodal fibers") {
  Fixture fx = make_fixture("degree-zero-torus");
  fx.manifold->grid_resolution = {16, 16, 16};
  GraphTestResult res = graph_test(*fx.manifold);

  CHECK_FALSE(res.is_graph);
  CHECK(res.base_rank_deficient);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->fiber_dist == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.witness->base_dist < 1e-12);
}

TEST_CASE("separatrix torus fails the graph test without a fold") {
  Fixture fx = make_fixture("separatrix-torus");
  fx.manifold->grid_resolution = {8, 8, 8};
  GraphTestResult res = graph_test(*fx.manifold);

  CHECK_FALSE(res.is_graph);
  // The base projection never degenerates: the two sheets meet the base
  // transversally, unlike a fold.
  CHECK_FALSE(res.base_rank_deficient);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->base_dist <= 1e-12);
  CHECK(res.witness->fiber_dist > 3.6);
}

TEST_CASE("graph test requires matching parameter and base dimensions") {
  ParamSubmanifold m;
  m.name = "curve";
  m.param_dim = 1;
  m.ambient_dim = 2;
  m.grid_resolution = {8};
  m.embed = [](const Vec& theta) {
    Vec q(2);
    q << theta[0], 0.0;
    return PhasePoint(q, Vec::Zero(2));
  };
  CHECK_THROWS_AS(graph_test(m), Error);
}

TEST_CASE("base winding matrices mark the homotopy class of each embedding") {
  auto expect_for = [](std::initializer_list<int> diag, int rows, int cols) {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(rows, cols);
    int i = 0;
    for (int d : diag) m(i, i) = d, ++i;
    return m;
  };

  for (const char* name : {"zero-section", "helical-torus", "fold-torus"}) {
    Fixture fx = make_fixture(name);
    WindingResult w = homotopy_degree(*fx.manifold);
    CHECK(w.ok);
    CHECK(w.failures.empty());
    check_winding(w.winding, expect_for({1, 1, 1}, 3, 3));
  }

  Fixture dz = make_fixture("degree-zero-torus");
  WindingResult wdz = homotopy_degree(*dz.manifold);
  CHECK(wdz.ok);
  check_winding(wdz.winding, expect_for({1, 1, 0}, 3, 3));

  Fixture eq = make_fixture("equilibrium-torus");
  WindingResult weq = homotopy_degree(*eq.manifold);
  CHECK(weq.ok);
  check_winding(weq.winding, expect_for({1, 1}, 2, 2));

  Fixture sep = make_fixture("separatrix-torus");
  WindingResult wsep = homotopy_degree(*sep.manifold);
  CHECK(wsep.ok);
  check_winding(wsep.winding, expect_for({1, 1, 0}, 3, 3));
}

TEST_CASE("canonical two-form integrates to zero on Lagrangian patches") {
  // Flat section q = (s, t, 0.3), p = 0.
  auto flat_section = [](double s, double t) {
    return PhasePoint(vec3(s, t, 0.3), Vec::Zero(3));
  };
  CHECK(stokes_check(flat_section, 16, 16) == 0.0);

  // Helical slice at fixed third parameter: constant fiber, so the restricted
  // two-form vanishes identically.
  Fixture fx = make_fixture("helical-torus");
  auto slice = [&fx](double s, double t) { return fx.manifold->embed(vec3(s, t, 0.37)); };
  CHECK(stokes_check(slice, 16, 16) == 0.0);
}

TEST_CASE("canonical two-form integral matches a closed-form half patch") {
  // Sigma(s, t) = ((s, t, 0); (0, cos 2 pi s, 0)) over s in [0, 1/2]:
  // omega(d_s, d_t) = 2 pi sin(2 pi s), integral = 2.
  auto patch = [](double s, double t) {
    Vec p = Vec::Zero(3);
    p[1] = std::cos(kTwoPi * s);
    return PhasePoint(vec3(s, t, 0.0), p);
  };
  double fd_result = stokes_check(patch, 512, 8, 0.5, 1.0);
  CHECK(fd_result == doctest::Approx(2.0).epsilon(1e-4));

  std::function<Mat(double, double)> jac = [](double s, double) {
    Mat T = Mat::Zero(6, 2);
    T(0, 0) = 1.0;
    T(4, 0) = -kTwoPi * std::sin(kTwoPi * s);
    T(1, 1) = 1.0;
    return T;
  };
  double jac_result = stokes_check(patch, 512, 8, 0.5, 1.0, &jac);
  CHECK(jac_result == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(std::abs(fd_result - jac_result) <= 1e-6);

  CHECK_THROWS_AS(stokes_check(patch, 1, 8, 0.5, 1.0), Error);
}
