#ifndef NCML_NCALGEBRA_HPP
#define NCML_NCALGEBRA_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "ncml/errors.hpp"

namespace ncml {

using Complex = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

// Schatten exponent p in [1, inf]; infinity is a distinguished value, not a
// float sentinel.
class SchattenExponent {
 public:
  SchattenExponent() : p_(2.0), inf_(false) {}
  explicit SchattenExponent(double p) : p_(p), inf_(false) {
    if (!(p >= 1.0)) throw Error("Schatten exponent must be >= 1");
  }
  static SchattenExponent infinity() {
    SchattenExponent e;
    e.inf_ = true;
    e.p_ = 0.0;
    return e;
  }

  bool is_inf() const { return inf_; }
  double value() const {
    if (inf_) throw InfiniteExponent();
    return p_;
  }
  // Holder conjugate: 1 <-> inf, else p/(p-1).
  SchattenExponent conjugate() const {
    if (inf_) return SchattenExponent(1.0);
    if (p_ == 1.0) return infinity();
    return SchattenExponent(p_ / (p_ - 1.0));
  }
  double inverse() const { return inf_ ? 0.0 : 1.0 / p_; }  // 1/p with 1/inf = 0

  bool operator==(const SchattenExponent& o) const {
    return inf_ == o.inf_ && (inf_ || p_ == o.p_);
  }

 private:
  double p_;
  bool inf_;
};

// Integral operator on L2 of a weighted point set: matrix A with row measure
// weights r and column measure weights c. All spectral quantities are read
// off the materialized matrix diag(r)^{1/2} A diag(c)^{1/2}, so counting and
// quadrature measures share one code path.
struct KernelOperator {
  MatC a;
  VecR row_w;
  VecR col_w;

  KernelOperator() = default;
  KernelOperator(MatC m, VecR r, VecR c);

  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index cols() const { return a.cols(); }

  MatC materialize() const;
};

KernelOperator unit_weighted(MatC m);

// lp norm of the singular values of the materialized matrix; operator norm at
// p = inf. Throws NonFiniteEntry on NaN/Inf input.
double schatten_norm(const KernelOperator& A, const SchattenExponent& p);

// <A,B> = sum_{s,t} r_s c_t A(s,t) B(t,s); B must carry the transposed weight
// structure. Equals trace(materialize(A) * materialize(B)).
Complex dual_pairing(const KernelOperator& A, const KernelOperator& B);

// Adjoint in the weighted geometry: conjugate transpose with swapped weights.
KernelOperator adjoint(const KernelOperator& A);

// A = u h with h = (A*A)^{1/2} in the weighted geometry; u partial isometry
// on the support of h.
std::pair<KernelOperator, KernelOperator> polar_decompose(const KernelOperator& A);

// Mazur map u |A|^{p/q}; satisfies ||M(A)||_q = ||A||_p^{p/q}. Finite
// exponents only.
KernelOperator mazur_map(const KernelOperator& A, const SchattenExponent& p,
                         const SchattenExponent& q);

// Element B with ||B||_{p'} = 1 and <A,B> = ||A||_p (duality attained).
KernelOperator norming_element(const KernelOperator& A, const SchattenExponent& p);

// C(s,u) = sum_t c_t A(s,t) B(t,u); the measure-weighted operator product.
KernelOperator kernel_compose(const KernelOperator& A, const KernelOperator& B);

// Kronecker amplification alpha (x) A with replicated weights; matrix norms
// multiply across the tensor factors.
KernelOperator amplify(const MatC& alpha, const KernelOperator& A);

// Relative threshold below which singular values count as zero for
// polar/Mazur support decisions.
inline constexpr double kRankEps = 1e-12;

}  // namespace ncml

#endif  // NCML_NCALGEBRA_HPP
