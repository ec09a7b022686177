#pragma once

#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

/// Frame of tangent vectors spanning a candidate subspace, stored as the
/// columns of a 2d x k matrix in stacked (dq, dp) coordinates.
struct SubspaceFrame {
  Mat cols;

  SubspaceFrame() = default;
  explicit SubspaceFrame(Mat columns);
  static SubspaceFrame from_tangents(const std::vector<TangentVector>& vs);

  int ambient() const { return static_cast<int>(cols.rows()) / 2; }
  int dim() const { return static_cast<int>(cols.cols()); }

  TangentVector column(int i) const;

  /// Ratio of smallest to largest singular value; 0 for a rank-deficient frame.
  double rank_ratio() const;
  bool full_rank(double rank_tol = 1e-8) const;
};

/// Orthonormalize columns (thin QR); spanned subspace is unchanged.
Mat orthonormal_columns(const Mat& cols);

/// k x k matrix of the canonical form restricted to the frame:
/// entries omega(col_i, col_j). Exactly antisymmetric by construction.
Mat restricted_form(const SubspaceFrame& frame);

struct KernelInfo {
  int dim = 0;
  /// k x dim matrix of kernel coefficient vectors in the frame basis,
  /// orthonormal columns.
  Mat basis;
  std::vector<std::string> warnings;
};

/// Null space of an antisymmetric form matrix via SVD. Singular values below
/// rank_tol times the largest are treated as zero; for the zero matrix the
/// kernel is everything. Checks antisymmetry of the input and emits a warning
/// when k minus the kernel dimension is odd (the rank of an antisymmetric
/// matrix is even, so an odd defect means the tolerance split is unreliable).
KernelInfo form_kernel(const Mat& form, double rank_tol = 1e-8);

/// Largest singular value of the restricted form. With orthonormalize set the
/// frame is orthonormalized first, making the value frame-independent; zero
/// exactly when the spanned subspace is isotropic.
double lagrangian_defect(const SubspaceFrame& frame, bool orthonormalize = true);

/// Largest principal angle between the spanned subspace and the vertical
/// subspace dq = 0, in [0, pi/2].
double vertical_angle(const SubspaceFrame& frame);

}  // namespace tonelli
