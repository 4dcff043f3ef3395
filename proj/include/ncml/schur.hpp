#ifndef NCML_SCHUR_HPP
#define NCML_SCHUR_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncml/group_model.hpp"
#include "ncml/ncalgebra.hpp"

namespace ncml {

// Symbols are closures first, tables second; quadrature groups need off-grid
// evaluation since contraction arguments like t_{i-1} t_i^{-1} land between
// grid points.

struct FiniteSymbol {
  int arity = 1;
  std::function<Complex(std::span<const int>)> eval;

  // optional product factorization phi(t_0..t_n) = left(t_0..t_m) * right(t_m..t_n)
  struct Factorization {
    int split = 1;  // m
    std::shared_ptr<FiniteSymbol> left, right;
  };
  std::shared_ptr<Factorization> factor;
};

struct QuadSymbol {
  int arity = 1;
  std::function<Complex(std::span<const GVec>)> eval;
  double max_abs_estimate = 0.0;

  struct Factorization {
    int split = 1;
    std::shared_ptr<QuadSymbol> left, right;
  };
  std::shared_ptr<Factorization> factor;
  // set when this symbol is lift_symbol(base): phi(t_0..t_n) =
  // base(t_0 t_1^{-1}, ..., t_{n-1} t_n^{-1}); enables cached differences.
  std::shared_ptr<QuadSymbol> lifted_base;
};

// phi~(s_0,...,s_n) = phi(s_0 s_1^{-1}, ..., s_{n-1} s_n^{-1})
FiniteSymbol lift_symbol(const FiniteSymbol& phi, const FiniteGroup& g);
QuadSymbol lift_symbol(const QuadSymbol& phi, const QuadratureGroup& g);

// Sampled sup-norm estimate over a window (exact enumeration for finite
// groups of tractable size). Stores the result in the symbol and returns it.
double estimate_max_abs(QuadSymbol& phi, const QuadratureGroup& g,
                        std::uint64_t seed = 7, int samples = 4096);

// Dense tabulation over a finite point list.
struct TabulatedSymbol {
  int arity = 0;
  Eigen::Index npoints = 0;
  VecC values;  // row-major over index tuples, size npoints^arity

  Complex at(std::span<const Eigen::Index> idx) const;
};

TabulatedSymbol truncate_symbol(const FiniteSymbol& phi, const FiniteGroup& g,
                                const std::vector<int>& points);
TabulatedSymbol truncate_symbol(const QuadSymbol& phi, const QuadratureGroup& g,
                                const std::vector<int>& grid_idx);

// Shape header plus row-major "re im" pairs.
std::string dump_tabulated(const TabulatedSymbol& t);

// M_phi(A_1,...,A_n)(t_0,t_n) =
//   integral phi(t_0,...,t_n) A_1(t_0,t_1) ... A_n(t_{n-1},t_n) dt_1...dt_{n-1}
// over the measured point set shared by the kernels. The middle integrals use
// the kernels' inner measure weights.
KernelOperator schur_apply(const TabulatedSymbol& phi,
                           const std::vector<KernelOperator>& a);
KernelOperator schur_apply(const FiniteGroup& g, const FiniteSymbol& phi,
                           const std::vector<int>& points,
                           const std::vector<KernelOperator>& a);
KernelOperator schur_apply(const QuadratureGroup& g, const QuadSymbol& phi,
                           const std::vector<int>& grid_idx,
                           const std::vector<KernelOperator>& a);

}  // namespace ncml

#endif  // NCML_SCHUR_HPP
