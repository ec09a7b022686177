#include "tonelli/homology.hpp"

#include <cmath>
#include <limits>

namespace tonelli {

namespace {

bool checked_addmul(std::int64_t a, std::int64_t x, std::int64_t b, std::int64_t y,
                    std::int64_t& out) {
  __int128 r = static_cast<__int128>(a) * x + static_cast<__int128>(b) * y;
  if (r > std::numeric_limits<std::int64_t>::max() ||
      r < std::numeric_limits<std::int64_t>::min())
    return false;
  out = static_cast<std::int64_t>(r);
  return true;
}

double canonical_half_angle(double x, double y) {
  double a = wrap_coord(std::atan2(y, x) / (2.0 * M_PI));
  return a < 0.5 ? a : a - 0.5;
}

// Integer eigenvector of a parabolic element (the shear axis).
IntVec2 parabolic_axis(const IntMat2& A) {
  std::int64_t s = A.trace() > 0 ? 1 : -1;  // (A - s I) is nilpotent
  IntVec2 v{A.b, s - A.a};
  if (v.x == 0 && v.y == 0) v = IntVec2{s - A.d, A.c};
  return v;
}

}  // namespace

bool mat_vec_checked(const IntMat2& A, const IntVec2& v, IntVec2& out) {
  IntVec2 r;
  if (!checked_addmul(A.a, v.x, A.b, v.y, r.x)) return false;
  if (!checked_addmul(A.c, v.x, A.d, v.y, r.y)) return false;
  out = r;
  return true;
}

bool mat_mul_checked(const IntMat2& A, const IntMat2& B, IntMat2& out) {
  IntMat2 r;
  if (!checked_addmul(A.a, B.a, A.b, B.c, r.a)) return false;
  if (!checked_addmul(A.a, B.b, A.b, B.d, r.b)) return false;
  if (!checked_addmul(A.c, B.a, A.d, B.c, r.c)) return false;
  if (!checked_addmul(A.c, B.b, A.d, B.d, r.d)) return false;
  out = r;
  return true;
}

MatrixClass matrix_class(const IntMat2& A) {
  std::int64_t tr = A.trace();
  if (tr > 2 || tr < -2) return MatrixClass::Hyperbolic;
  if (tr == 2 || tr == -2)
    return (A.is_identity() || A.is_minus_identity()) ? MatrixClass::FiniteOrder
                                                      : MatrixClass::Parabolic;
  return MatrixClass::FiniteOrder;  // |tr| < 2: elliptic, order 3, 4 or 6
}

std::string orbit_class_name(OrbitClass c) {
  switch (c) {
    case OrbitClass::FiniteOrbit: return "finite-orbit";
    case OrbitClass::ParabolicGrowth: return "parabolic-growth";
    case OrbitClass::HyperbolicGrowth: return "hyperbolic-growth";
  }
  return "?";
}

void HomologyAction::validate() const {
  if (A.det() != 1) throw Error("homology action must have determinant 1");
}

HomologyIteration homology_iterate(const HomologyAction& h, int n_max) {
  h.validate();
  // A bounded lattice orbit is purely periodic (A is invertible over Z) and
  // its period divides the order of A on the orbit: elliptic elements have
  // order <= 6, -parabolic shears fix their axis up to sign (period 2),
  // everything else bounded is a fixed vector. 12 steps witness all cases.
  constexpr int kRevisitWindow = 12;

  HomologyIteration out;
  out.sequence.push_back(h.v0);
  IntVec2 v = h.v0;
  for (int n = 1; n <= n_max; ++n) {
    IntVec2 next;
    if (!mat_vec_checked(h.A, v, next)) {
      out.overflow = true;
      out.decided = static_cast<int>(out.sequence.size()) > kRevisitWindow;
      break;
    }
    v = next;
    out.sequence.push_back(v);
    if (v == h.v0) {
      out.bounded = true;
      out.period = n;
      out.classification = OrbitClass::FiniteOrbit;
      return out;
    }
  }

  if (static_cast<int>(out.sequence.size()) <= kRevisitWindow && !out.overflow &&
      n_max <= kRevisitWindow) {
    // Caller did not allow the revisit window to close.
    out.decided = false;
  }

  // No revisit: unbounded. The growth class is forced by the trace.
  out.bounded = false;
  out.classification = matrix_class(h.A) == MatrixClass::Hyperbolic
                           ? OrbitClass::HyperbolicGrowth
                           : OrbitClass::ParabolicGrowth;

  if (out.classification == OrbitClass::HyperbolicGrowth) {
    // Normalized power iteration; converges at rate spectral_radius^-2.
    double ux = static_cast<double>(h.v0.x), uy = static_cast<double>(h.v0.y);
    double nrm = std::hypot(ux, uy);
    if (nrm > 0) {
      ux /= nrm;
      uy /= nrm;
      for (int k = 0; k < 400; ++k) {
        double nx = static_cast<double>(h.A.a) * ux + static_cast<double>(h.A.b) * uy;
        double ny = static_cast<double>(h.A.c) * ux + static_cast<double>(h.A.d) * uy;
        double nn = std::hypot(nx, ny);
        ux = nx / nn;
        uy = ny / nn;
      }
      double alpha = canonical_half_angle(ux, uy);
      out.limit_angle = alpha;
      out.angle_pair = std::make_pair(alpha, alpha + 0.5);
    }
  } else {
    IntVec2 axis = parabolic_axis(h.A);
    double alpha =
        canonical_half_angle(static_cast<double>(axis.x), static_cast<double>(axis.y));
    out.limit_angle = alpha;
    out.angle_pair = std::make_pair(alpha, alpha + 0.5);
  }
  return out;
}

double measured_growth(const IntMat2& A, const IntVec2& v0, int n) {
  if (n < 1) throw Error("measured_growth: need n >= 1");
  double ux = static_cast<double>(v0.x), uy = static_cast<double>(v0.y);
  double nrm = std::hypot(ux, uy);
  if (nrm == 0) return 1.0;
  ux /= nrm;
  uy /= nrm;
  double log_acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double nx = static_cast<double>(A.a) * ux + static_cast<double>(A.b) * uy;
    double ny = static_cast<double>(A.c) * ux + static_cast<double>(A.d) * uy;
    double nn = std::hypot(nx, ny);
    log_acc += std::log(nn);
    ux = nx / nn;
    uy = ny / nn;
  }
  return std::exp(log_acc / n);
}

double spectral_radius_oracle(const IntMat2& A) {
  double tr = std::abs(static_cast<double>(A.trace()));
  if (tr <= 2.0) return 1.0;
  return (tr + std::sqrt(tr * tr - 4.0)) / 2.0;
}

double unstable_angle_oracle(const IntMat2& A) {
  double tr = static_cast<double>(A.trace());
  if (std::abs(tr) <= 2.0) throw Error("unstable_angle_oracle: matrix is not hyperbolic");
  double disc = std::sqrt(tr * tr - 4.0);
  double lambda = (tr > 0) ? (tr + disc) / 2.0 : (tr - disc) / 2.0;  // dominant eigenvalue
  double e1x = static_cast<double>(A.b), e1y = lambda - static_cast<double>(A.a);
  double e2x = lambda - static_cast<double>(A.d), e2y = static_cast<double>(A.c);
  if (std::hypot(e1x, e1y) >= std::hypot(e2x, e2y))
    return canonical_half_angle(e1x, e1y);
  return canonical_half_angle(e2x, e2y);
}

IntMat2 sl2_generator_s() { return IntMat2{1, 1, 0, 1}; }
IntMat2 sl2_generator_t() { return IntMat2{1, 0, 1, 1}; }

IntMat2 sl2_word(const std::vector<int>& letters) {
  IntMat2 acc;
  for (int l : letters) {
    IntMat2 g = (l == 0) ? sl2_generator_s() : sl2_generator_t();
    IntMat2 next;
    if (!mat_mul_checked(acc, g, next)) throw Error("sl2_word: entry overflow");
    acc = next;
  }
  return acc;
}

}  // namespace tonelli
