#include "ncml/ncalgebra.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ncml {

namespace {

void check_finite(const MatC& m) {
  if (!m.allFinite()) throw NonFiniteEntry();
}

struct Svd {
  MatC u, v;       // thin factors
  VecR sigma;
};

Svd weighted_svd(const KernelOperator& A) {
  check_finite(A.a);
  Eigen::BDCSVD<MatC> svd(A.materialize(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.sigma = svd.singularValues();
  return out;
}

VecR sqrt_vec(const VecR& w) { return w.array().sqrt().matrix(); }
VecR inv_sqrt_vec(const VecR& w) { return w.array().rsqrt().matrix(); }

// Wraps a materialized matrix M back into kernel coordinates with row weights
// r and column weights c: kernel = diag(r)^{-1/2} M diag(c)^{-1/2}.
KernelOperator from_materialized(const MatC& M, const VecR& r, const VecR& c) {
  MatC k = inv_sqrt_vec(r).asDiagonal() * M * inv_sqrt_vec(c).asDiagonal();
  return KernelOperator(std::move(k), r, c);
}

}  // namespace

KernelOperator::KernelOperator(MatC m, VecR r, VecR c)
    : a(std::move(m)), row_w(std::move(r)), col_w(std::move(c)) {
  if (row_w.size() != a.rows() || col_w.size() != a.cols())
    throw ShapeMismatch("weight lengths do not match matrix shape");
  if ((row_w.array() <= 0.0).any() || (col_w.array() <= 0.0).any())
    throw Error("measure weights must be strictly positive");
}

MatC KernelOperator::materialize() const {
  return sqrt_vec(row_w).asDiagonal() * a * sqrt_vec(col_w).asDiagonal();
}

KernelOperator unit_weighted(MatC m) {
  VecR r = VecR::Ones(m.rows()), c = VecR::Ones(m.cols());
  return KernelOperator(std::move(m), std::move(r), std::move(c));
}

double schatten_norm(const KernelOperator& A, const SchattenExponent& p) {
  check_finite(A.a);
  Eigen::BDCSVD<MatC> svd(A.materialize());
  const VecR& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  if (p.is_inf()) return s(0);
  double pv = p.value();
  if (pv == 2.0) return s.norm();
  if (pv == 1.0) return s.sum();
  double top = s(0);
  if (top == 0.0) return 0.0;
  // scale by the top value to avoid overflow for large p
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, pv);
  return top * std::pow(acc, 1.0 / pv);
}

Complex dual_pairing(const KernelOperator& A, const KernelOperator& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) throw ShapeMismatch();
  if ((A.row_w - B.col_w).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + A.row_w.cwiseAbs().maxCoeff()) ||
      (A.col_w - B.row_w).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + A.col_w.cwiseAbs().maxCoeff()))
    throw ShapeMismatch("pairing weights do not match");
  check_finite(A.a);
  check_finite(B.a);
  Complex acc(0, 0);
  for (Eigen::Index s = 0; s < A.rows(); ++s)
    for (Eigen::Index t = 0; t < A.cols(); ++t)
      acc += A.row_w(s) * A.col_w(t) * A.a(s, t) * B.a(t, s);
  return acc;
}

KernelOperator adjoint(const KernelOperator& A) {
  return KernelOperator(A.a.adjoint(), A.col_w, A.row_w);
}

std::pair<KernelOperator, KernelOperator> polar_decompose(const KernelOperator& A) {
  Svd svd = weighted_svd(A);
  const double cut = svd.sigma.size() ? kRankEps * svd.sigma(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < svd.sigma.size() && svd.sigma(rank) > cut) ++rank;
  MatC u_hat = svd.u.leftCols(rank) * svd.v.leftCols(rank).adjoint();
  MatC h_hat = svd.v * svd.sigma.asDiagonal() * svd.v.adjoint();
  KernelOperator u = from_materialized(u_hat, A.row_w, A.col_w);
  KernelOperator h = from_materialized(h_hat, A.col_w, A.col_w);
  return {std::move(u), std::move(h)};
}

KernelOperator mazur_map(const KernelOperator& A, const SchattenExponent& p,
                         const SchattenExponent& q) {
  if (p.is_inf() || q.is_inf()) throw InfiniteExponent();
  Svd svd = weighted_svd(A);
  const double e = p.value() / q.value();
  VecR pow_sigma(svd.sigma.size());
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
    pow_sigma(i) = svd.sigma(i) > 0.0 ? std::pow(svd.sigma(i), e) : 0.0;
  MatC m_hat = svd.u * pow_sigma.asDiagonal() * svd.v.adjoint();
  return from_materialized(m_hat, A.row_w, A.col_w);
}

KernelOperator norming_element(const KernelOperator& A, const SchattenExponent& p) {
  Svd svd = weighted_svd(A);
  if (svd.sigma.size() == 0 || svd.sigma(0) <= 0.0) throw ZeroOperator();
  MatC b_hat;
  if (p.is_inf()) {
    // rank-one dual from the top singular pair; ties broken by first index
    b_hat = svd.v.col(0) * svd.u.col(0).adjoint();
  } else if (p.value() == 1.0) {
    b_hat = svd.v * svd.u.adjoint();
  } else {
    double pv = p.value();
    double np = schatten_norm(A, p);
    VecR d(svd.sigma.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
      d(i) = std::pow(svd.sigma(i) / np, pv - 1.0);
    b_hat = svd.v * d.asDiagonal() * svd.u.adjoint();
  }
  // dual element carries transposed weights
  return from_materialized(b_hat, A.col_w, A.row_w);
}

KernelOperator kernel_compose(const KernelOperator& A, const KernelOperator& B) {
  if (A.cols() != B.rows()) throw ShapeMismatch();
  if ((A.col_w - B.row_w).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + A.col_w.cwiseAbs().maxCoeff()))
    throw ShapeMismatch("inner weights do not match");
  MatC c = A.a * A.col_w.asDiagonal() * B.a;
  return KernelOperator(std::move(c), A.row_w, B.col_w);
}

KernelOperator amplify(const MatC& alpha, const KernelOperator& A) {
  const Eigen::Index n = alpha.rows(), m = alpha.cols();
  MatC big(n * A.rows(), m * A.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      big.block(i * A.rows(), j * A.cols(), A.rows(), A.cols()) = alpha(i, j) * A.a;
  VecR r = A.row_w.replicate(n, 1);
  VecR c = A.col_w.replicate(m, 1);
  return KernelOperator(std::move(big), std::move(r), std::move(c));
}

}  // namespace ncml
