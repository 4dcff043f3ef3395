#ifndef NCML_NORMS_HPP
#define NCML_NORMS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ncml/ncalgebra.hpp"

namespace ncml {

// Exact fraction used for Holder-tuple validation and config parsing.
// Infinity is encoded as 1/0.
struct Frac {
  long long num = 0;
  long long den = 1;

  static Frac infinity() { return Frac{1, 0}; }
  static Frac of(long long n, long long d = 1);
  static Frac parse(const std::string& s);  // "inf", "2", "4/3", "2.5"

  bool is_inf() const { return den == 0; }
  Frac reciprocal() const;  // 1/inf = 0
  SchattenExponent exponent() const;
  std::string to_string() const;
};

// (p_1,...,p_n; p) with sum 1/p_i = 1/p, checked exactly on the fractions.
class HolderTuple {
 public:
  HolderTuple(std::vector<Frac> inputs, Frac output);

  int arity() const { return static_cast<int>(in_.size()); }
  const SchattenExponent& input(int i) const { return in_[static_cast<std::size_t>(i)]; }
  const SchattenExponent& output() const { return out_; }
  const Frac& input_frac(int i) const { return in_frac_[static_cast<std::size_t>(i)]; }
  const Frac& output_frac() const { return out_frac_; }
  std::string to_string() const;

 private:
  std::vector<Frac> in_frac_;
  Frac out_frac_;
  std::vector<SchattenExponent> in_;
  SchattenExponent out_;
};

// ---------------------------------------------------------------------------
// Coordinate model of an L_p space. Coordinates are complex vectors; the norm
// is (nu * sum sigma^p)^{1/p} over the singular values of the materialized
// matrix (plain Schatten classes have nu = 1, the finite-group Plancherel
// trace has nu = 1/|G|). Pairings are bilinear; `dual` is the pairing
// partner, and norming elements live in the dual's coordinates.
// ---------------------------------------------------------------------------

struct LpSpace {
  Eigen::Index dim = 0;
  double nu = 1.0;
  bool algebra = false;  // norming stays inside the subalgebra
  std::function<MatC(const VecC&)> to_mat;
  std::function<VecC(const MatC&)> from_mat;
  const LpSpace* dual = nullptr;           // pairing partner; self for algebras
  std::shared_ptr<const LpSpace> partner;  // keeps a cross partner alive
  std::function<VecC(const VecC&)> pairing_apply;  // dual coords -> functional coords
  std::function<VecC(const VecC&)> pairing_solve;  // inverse

  // amplification structure (absent for base spaces)
  int amp_level = 1;
  std::shared_ptr<const LpSpace> base;
  std::function<VecC(const VecC&, int, int)> block_get;
  std::function<void(VecC&, int, int, const VecC&)> block_add;

  double norm(const VecC& x, const SchattenExponent& p) const;
  VecC norming(const VecC& x, const SchattenExponent& p) const;  // dual coords
  Complex pair(const VecC& x, const VecC& z) const;
};

using LpSpacePtr = std::shared_ptr<const LpSpace>;

// Square weighted kernels (Schatten classes of L2 of a weighted point set).
LpSpacePtr make_kernel_space(VecR row_w, VecR col_w);
// Matrix subalgebra spanned by `basis` with trace weight nu * Tr.
LpSpacePtr make_algebra_space(std::vector<MatC> basis, double trace_weight);
// Amplifications S_p^N (x) base, block-compatible with make_amplified_map.
LpSpacePtr make_amplified_kernel_space(const VecR& row_w, const VecR& col_w, int N);
LpSpacePtr make_amplified_algebra_space(const std::vector<MatC>& basis,
                                        double trace_weight, int N);

// ---------------------------------------------------------------------------
// Multilinear maps between coordinate spaces.
// ---------------------------------------------------------------------------

struct MultilinearMap {
  int n = 1;
  std::vector<LpSpacePtr> in;
  LpSpacePtr out;
  std::function<VecC(const std::vector<VecC>&)> eval;
  // optional closed-form adjoint: z_i in in[i]->dual coords with
  // pair(T(x_1..x_n), y) = pair(x_i, z_i); the estimator materializes a
  // basis adjoint when absent.
  std::function<VecC(int, const std::vector<VecC>&, const VecC&)> slot_adjoint;
};

// Adjoint of the slot-i linearization with the other inputs fixed,
// materialized by evaluating T on a coordinate basis. Throws DimensionCap
// when the slot dimension exceeds the cap.
std::function<VecC(const VecC&)> adjoint_slot_map(const MultilinearMap& T, int slot,
                                                  const std::vector<VecC>& fixed,
                                                  Eigen::Index dimension_cap = 4096);

// Dense coefficient tensor T[o, a_1, ..., a_n] between coordinate spaces.
struct TensorMap {
  int n = 1;
  Eigen::Index out_dim = 0;
  std::vector<Eigen::Index> in_dims;
  VecC coeff;  // flat, o slowest then a_1 ... a_n

  VecC apply(const std::vector<VecC>& x) const;
  // functional coordinates C_i[a] = sum coeff * g[o] * prod_{j != i} x_j[a_j]
  VecC slot_contract(int i, const std::vector<VecC>& x, const VecC& g) const;
};

MultilinearMap make_tensor_map(std::shared_ptr<const TensorMap> t,
                               std::vector<LpSpacePtr> in, LpSpacePtr out);

// Multiplicative amplification of a tensor map at level N; `in_amp`/`out_amp`
// must come from the matching make_amplified_* factory.
MultilinearMap make_amplified_map(std::shared_ptr<const TensorMap> base, int N,
                                  std::vector<LpSpacePtr> in_amp, LpSpacePtr out_amp);

// ---------------------------------------------------------------------------
// Norm estimation: alternating duality ascent (generalized power method).
// Estimates are lower bounds attained at the returned certificate.
// ---------------------------------------------------------------------------

struct EstimatorOptions {
  int restarts = 16;
  int max_iters = 80;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int amplified_restarts = 4;  // fresh restarts per level above 1
  std::vector<std::vector<VecC>> warm_starts;
};

struct NormEstimate {
  enum class Status { Converged, NoConvergence, Degenerate };
  double value = 0.0;
  std::vector<VecC> certificate;
  int iterations = 0;
  int restarts_used = 0;
  Status status = Status::Degenerate;
};

NormEstimate multilinear_norm_estimate(const MultilinearMap& T, const HolderTuple& ht,
                                       const EstimatorOptions& opts);

// Lower bound for the (p_1,...,p_n)-mb norm at amplification level N; levels
// are chained with embedded warm starts, so the result is non-decreasing in N.
using SpaceFactory = std::function<LpSpacePtr(int level)>;
NormEstimate mb_norm_lower_bound(std::shared_ptr<const TensorMap> base,
                                 const std::vector<SpaceFactory>& in_spaces,
                                 const SpaceFactory& out_space, const HolderTuple& ht,
                                 int N, const EstimatorOptions& opts);

// ||T(cert)||_p / prod ||cert_i||_{p_i}; certificates must reproduce the
// estimate value.
double reevaluate(const MultilinearMap& T, const HolderTuple& ht,
                  const NormEstimate& est);

}  // namespace ncml

#endif  // NCML_NORMS_HPP
