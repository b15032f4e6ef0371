#include "stokes_mutant/subspace.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace sm {

CMat orth(const CMat& A, double rel_tol) {
  if (A.cols() == 0) return CMat(A.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return CMat(A.rows(), 0);
  int r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

CMat null_space(const CMat& M, double rel_tol) {
  const int n = static_cast<int>(M.cols());
  if (M.rows() == 0) return CMat::Identity(n, n);
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double top = s.size() ? s(0) : 0.0;
  int r = 0;
  if (top > 0)
    while (r < s.size() && s(r) > rel_tol * top) ++r;
  return svd.matrixV().rightCols(n - r);
}

CMat intersect(const CMat& A, const CMat& B, double rel_tol) {
  const int n = static_cast<int>(A.rows());
  CMat a = orth(A, rel_tol), b = orth(B, rel_tol);
  if (a.cols() == 0 || b.cols() == 0) return CMat(n, 0);
  CMat stacked(n, a.cols() + b.cols());
  stacked << a, -b;
  CMat k = null_space(stacked, rel_tol);
  return orth(a * k.topRows(a.cols()), rel_tol);
}

double subspace_distance(const CMat& A, const CMat& B) {
  if (A.cols() != B.cols()) return 1.0;
  if (A.cols() == 0) return 0.0;
  CMat a = orth(A, 1e-13), b = orth(B, 1e-13);
  if (a.cols() != b.cols()) return 1.0;
  // ||(I - P_a) b|| is sin of the largest angle and stays accurate near 0
  CMat res = b - a * (a.adjoint() * b);
  Eigen::JacobiSVD<CMat> svd(res);
  return std::min(1.0, svd.singularValues()(0));
}

double principal_angle(const CMat& A, const CMat& B) {
  if (A.cols() != B.cols()) return kPi / 2;
  return std::asin(subspace_distance(A, B));
}

CMat graded_null_space(const CMat& M, const std::vector<int>& parity, double rel_tol) {
  const int n = static_cast<int>(M.cols());
  std::vector<CMat> parts;
  int total = 0;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (parity[i] == p) idx.push_back(i);
    if (idx.empty()) continue;
    CMat sub(M.rows(), idx.size());
    for (size_t j = 0; j < idx.size(); ++j) sub.col(j) = M.col(idx[j]);
    CMat k = null_space(sub, rel_tol);
    CMat full = CMat::Zero(n, k.cols());
    for (size_t j = 0; j < idx.size(); ++j) full.row(idx[j]) = k.row(j);
    parts.push_back(full);
    total += static_cast<int>(k.cols());
  }
  CMat out(n, total);
  int c = 0;
  for (auto& p : parts) {
    out.middleCols(c, p.cols()) = p;
    c += static_cast<int>(p.cols());
  }
  return out;
}

}  // namespace sm

namespace sm {

double gram_distance_up_to_signs(const CMat& G, const CMat& target) {
  const int m = static_cast<int>(G.rows());
  if (G.rows() != target.rows() || G.cols() != target.cols()) return 1e300;
  std::vector<double> s(m, 1.0);
  for (int j = 1; j < m; ++j) {
    int best = -1;
    double big = 0;
    for (int i = 0; i < j; ++i) {
      const double w = std::max(std::abs(target(i, j)), std::abs(target(j, i)));
      if (w > big) big = w, best = i;
    }
    if (best < 0) continue;
    const cplx t = std::abs(target(best, j)) >= std::abs(target(j, best)) ? target(best, j) : target(j, best);
    const cplx g = std::abs(target(best, j)) >= std::abs(target(j, best)) ? G(best, j) : G(j, best);
    s[j] = s[best] * ((g / t).real() < 0 ? -1.0 : 1.0);
  }
  double worst = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(s[i] * s[j] * G(i, j) - target(i, j)));
  return worst;
}

}  // namespace sm
