#include "tonelli/symplectic.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace tonelli {

SubspaceFrame::SubspaceFrame(Mat columns) : cols(std::move(columns)) {
  if (cols.rows() % 2 != 0) throw Error("SubspaceFrame: odd ambient dimension");
  if (cols.cols() < 1) throw Error("SubspaceFrame: empty frame");
}

SubspaceFrame SubspaceFrame::from_tangents(const std::vector<TangentVector>& vs) {
  if (vs.empty()) throw Error("SubspaceFrame: empty frame");
  int d = vs.front().dim();
  Mat cols(2 * d, static_cast<int>(vs.size()));
  for (size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].dim() != d) throw Error("SubspaceFrame: mixed dimensions");
    cols.col(static_cast<Eigen::Index>(i)) = vs[i].stacked();
  }
  return SubspaceFrame(std::move(cols));
}

TangentVector SubspaceFrame::column(int i) const {
  return TangentVector::from_stacked(cols.col(i));
}

double SubspaceFrame::rank_ratio() const {
  Eigen::JacobiSVD<Mat> svd(cols);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

bool SubspaceFrame::full_rank(double rank_tol) const {
  if (dim() > 2 * ambient()) return false;
  return rank_ratio() > rank_tol;
}

Mat orthonormal_columns(const Mat& cols) {
  Eigen::HouseholderQR<Mat> qr(cols);
  Mat Q = qr.householderQ() * Mat::Identity(cols.rows(), cols.cols());
  return Q;
}

Mat restricted_form(const SubspaceFrame& frame) {
  int k = frame.dim();
  int d = frame.ambient();
  Mat M = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    auto dq_i = frame.cols.col(i).head(d);
    auto dp_i = frame.cols.col(i).tail(d);
    for (int j = i + 1; j < k; ++j) {
      auto dq_j = frame.cols.col(j).head(d);
      auto dp_j = frame.cols.col(j).tail(d);
      double w = dq_i.dot(dp_j) - dq_j.dot(dp_i);
      M(i, j) = w;
      M(j, i) = -w;
    }
  }
  return M;
}

KernelInfo form_kernel(const Mat& form, double rank_tol) {
  if (form.rows() != form.cols()) throw Error("form_kernel: matrix not square");
  int k = static_cast<int>(form.rows());
  double scale = std::max(1.0, form.cwiseAbs().maxCoeff());
  if ((form + form.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error("form_kernel: matrix not antisymmetric");

  KernelInfo info;
  Eigen::JacobiSVD<Mat> svd(form, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  if (s(0) == 0.0) {
    info.dim = k;
    info.basis = Mat::Identity(k, k);
    return info;
  }
  double thresh = rank_tol * s(0);
  int null_dim = 0;
  for (int i = 0; i < k; ++i)
    if (s(i) <= thresh) ++null_dim;
  info.dim = null_dim;
  info.basis = svd.matrixV().rightCols(null_dim);
  int rank = k - null_dim;
  if (rank % 2 != 0)
    info.warnings.push_back(
        "form_kernel: odd rank after tolerance split; kernel dimension unreliable");
  return info;
}

double lagrangian_defect(const SubspaceFrame& frame, bool orthonormalize) {
  SubspaceFrame f = orthonormalize ? SubspaceFrame(orthonormal_columns(frame.cols)) : frame;
  Mat M = restricted_form(f);
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

double vertical_angle(const SubspaceFrame& frame) {
  int d = frame.ambient();
  Mat U = orthonormal_columns(frame.cols);
  // vertical subspace has the orthonormal basis [0; I], so the product below
  // is just the fiber block of U
  Mat overlap = U.bottomRows(d).transpose();
  Eigen::JacobiSVD<Mat> svd(overlap);
  const Vec& s = svd.singularValues();
  double c = std::clamp(s(s.size() - 1), 0.0, 1.0);
  return std::acos(c);
}

}  // namespace tonelli
