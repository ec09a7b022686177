#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

/// 2x2 integer matrix acting on first-homology classes of a 2-torus leaf.
struct IntMat2 {
  std::int64_t a = 1, b = 0, c = 0, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
  bool is_minus_identity() const { return a == -1 && b == 0 && c == 0 && d == -1; }
};

struct IntVec2 {
  std::int64_t x = 0, y = 0;
  bool operator==(const IntVec2& o) const { return x == o.x && y == o.y; }
};

/// Overflow-checked product; returns false instead of wrapping.
bool mat_vec_checked(const IntMat2& A, const IntVec2& v, IntVec2& out);
bool mat_mul_checked(const IntMat2& A, const IntMat2& B, IntMat2& out);

enum class MatrixClass { FiniteOrder, Parabolic, Hyperbolic };
MatrixClass matrix_class(const IntMat2& A);

enum class OrbitClass { FiniteOrbit, ParabolicGrowth, HyperbolicGrowth };
std::string orbit_class_name(OrbitClass c);

struct HomologyAction {
  IntMat2 A;
  IntVec2 v0{1, 0};

  void validate() const;  // throws unless det A == 1
};

struct HomologyIteration {
  std::vector<IntVec2> sequence;  // v0, A v0, ... (truncated at revisit or overflow)
  OrbitClass classification = OrbitClass::FiniteOrbit;
  bool bounded = false;
  int period = 0;       // >0 iff a revisit of v0 was witnessed
  bool overflow = false;
  bool decided = true;  // false iff overflow hit before the revisit window closed
  std::optional<double> limit_angle;  // canonical projective angle in [0, 1/2)
  std::optional<std::pair<double, double>> angle_pair;  // the two accumulation angles
};

/// Integer-exact iteration v -> A v. Bounded orbits of an SL(2,Z) element are
/// purely periodic with period <= 12, so a missing revisit in that window
/// decides unboundedness; the growth class then follows from the trace.
HomologyIteration homology_iterate(const HomologyAction& h, int n_max);

/// (|A^n v0| / |v0|)^(1/n), accumulated on normalized doubles.
double measured_growth(const IntMat2& A, const IntVec2& v0, int n);

/// (|tr| + sqrt(tr^2 - 4)) / 2 for |tr| > 2, else 1.
double spectral_radius_oracle(const IntMat2& A);

/// Projective angle of the dominant eigendirection, in [0, 1/2). |tr| > 2 only.
double unstable_angle_oracle(const IntMat2& A);

/// Standard generators of SL(2,Z).
IntMat2 sl2_generator_s();  // [[1,1],[0,1]]
IntMat2 sl2_generator_t();  // [[1,0],[1,1]]

/// Product of generators; letters[i] == 0 picks S, anything else picks T.
/// Throws on overflow.
IntMat2 sl2_word(const std::vector<int>& letters);

}  // namespace tonelli
