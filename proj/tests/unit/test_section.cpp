#include <cmath>

#include "doctest.h"
#include "tonelli/section.hpp"

using namespace tonelli;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("constant winding field averages to a flat section") {
  // Field (1, 2, 0): every orbit closes after time one with first-coordinate
  // gain one, and the averaged lift is theta_1 + 1/2.
  ParamField field = [](const Vec&) { return vec3(1.0, 2.0, 0.0); };
  SectionOptions opts;
  opts.grid = {9, 9, 9};
  SectionField sf = section_from_average(field, opts);

  CHECK(sf.warnings.empty());
  REQUIRE(sf.w.size() == 729);
  REQUIRE(sf.drift.size() == 729);
  for (double w : sf.w) CHECK(w == doctest::Approx(0.5).epsilon(1e-12));
  for (double d : sf.drift) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sf.min_drift == doctest::Approx(1.0).epsilon(1e-12));

  // The level set {theta_1 + 1/2 = 0 mod 1} is the plane theta_1 = 1/2; at
  // an odd resolution it cuts one edge per transverse column.
  CHECK(sf.vertices.size() == 81);
  for (const auto& v : sf.vertices) CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sf.faces.size() == 81);
  for (const auto& f : sf.faces) {
    CHECK(f.size() == 4);
    for (int idx : f) {
      CHECK(idx >= 0);
      CHECK(idx < static_cast<int>(sf.vertices.size()));
    }
  }

  // Trilinear interpolation of a constant is that constant.
  CHECK(sf.w_at(vec3(0.123, 0.777, 0.4)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("non-closing orbits are rejected before averaging") {
  ParamField field = [](const Vec&) { return vec3(1.0, std::sqrt(2.0), 0.0); };
  SectionOptions opts;
  opts.grid = {9, 9, 9};
  CHECK_THROWS_AS(section_from_average(field, opts), Error);
}
