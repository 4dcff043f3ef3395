#ifndef NCML_FOURIER_HPP
#define NCML_FOURIER_HPP

#include <functional>
#include <vector>

#include "ncml/group_model.hpp"
#include "ncml/ncalgebra.hpp"
#include "ncml/schur.hpp"

namespace ncml {

// ---------------------------------------------------------------------------
// Finite groups: exact dense-matrix semantics. lambda(f)(t,u) = f(t u^{-1}),
// the convolution operator by f on l2(G) with counting measure.
// ---------------------------------------------------------------------------

struct FiniteAlgebraElement {
  const FiniteGroup* g = nullptr;
  VecC f;       // coefficient function
  MatC lambda;  // materialized lambda(f)
};

MatC lambda_matrix(const FiniteGroup& g, const VecC& f);
FiniteAlgebraElement lambda_of(const FiniteGroup& g, VecC f);
VecC convolve(const FiniteGroup& g, const VecC& f, const VecC& h);

// Coefficient recovery for x in the group von Neumann algebra: f(t) = x(t,e).
VecC coefficients_of(const FiniteGroup& g, const MatC& x);

// Plancherel trace tau = (1/N) Tr; gives ||lambda(f)||_{L2} = ||f||_2.
Complex plancherel_trace(const FiniteGroup& g, const MatC& x);
double finite_lp_norm(const FiniteGroup& g, const MatC& x, const SchattenExponent& p);
Complex finite_lp_pairing(const FiniteGroup& g, const MatC& x, const MatC& y);

// T_phi(x_1,...,x_n) = lambda(h), h(u) = sum_{t_1...t_n = u} phi(t) prod f_i(t_i).
FiniteAlgebraElement fourier_apply_finite(const FiniteGroup& g, const FiniteSymbol& phi,
                                          const std::vector<FiniteAlgebraElement>& x);

// i_{p,F}(x) = mu(F)^{-1/p} P_F x P_F as a plain Schatten-class kernel.
KernelOperator compress(const FiniteGroup& g, const MatC& x, const FiniteWindow& F,
                        const SchattenExponent& p);

// h_V^{2/p} where k_V = |V|^{-1/2} lambda(1_V) (Delta == 1 on finite groups);
// requires V = V^{-1}; the result has unit L_p norm.
FiniteAlgebraElement h_V(const FiniteGroup& g, const FiniteWindow& V,
                         const SchattenExponent& p);

// ---------------------------------------------------------------------------
// Quadrature groups: kernel-only semantics. An element Delta^a lambda(f)
// Delta^b is never materialized as an operator; it meets the experiments only
// through P_F . P_F compressions and pairings.
// ---------------------------------------------------------------------------

struct QuadratureAlgebraElement {
  const QuadratureGroup* g = nullptr;
  double a = 0.0;
  double b = 0.0;
  SchattenExponent p{2.0};
  std::function<Complex(const GVec&)> f;
  ChartBox support;  // chart box containing supp(f)

  // Same element presented with a different embedding parameter:
  // Delta^a lambda(f) Delta^b = Delta^{a'} lambda(Delta^{b'-b} f) Delta^{b'}.
  QuadratureAlgebraElement with_theta(double theta) const;
};

// kappa_p^theta: a = (1-theta)/p, b = theta/p; identity embedding at p = inf.
QuadratureAlgebraElement kappa_embed(const QuadratureGroup& g,
                                     std::function<Complex(const GVec&)> f,
                                     const ChartBox& support,
                                     const SchattenExponent& p, double theta);

// Kernel of P_F T_phi(x_1,...,x_n) P_F on the grid points of F:
//   (t_0,t_n) -> int phi(t_0 t_1^{-1},...,t_{n-1} t_n^{-1})
//                f_1(t_0 t_1^{-1}) ... f_n(t_{n-1} t_n^{-1})
//                Delta^{a_1}(t_0) Delta^{b_1+a_2}(t_1) ... Delta^{b_n}(t_n)
//                Delta((t_1 ... t_n)^{-1}) dt_1 ... dt_{n-1},
// the middle variables integrated over the whole grid. For n = 1 this is
// exactly 1_F(s) Delta^a(s) (phi f)(s t^{-1}) Delta^{b-1}(t) 1_F(t).
KernelOperator compressed_fourier_kernel(const QuadratureGroup& g, const QuadSymbol& phi,
                                         const std::vector<QuadratureAlgebraElement>& x,
                                         const Window& F, bool allow_expensive = false);

// i_{p,F}(x) = mu(F)^{-1/p} times the n = 1 kernel.
KernelOperator compress(const QuadratureAlgebraElement& x, const Window& F,
                        const SchattenExponent& p);

// Compressed kernel of k_V = ||1_V Delta^{-1/4}||_2^{-1} lambda(1_V Delta^{-1/4})
// Delta^{1/2}; pointwise self-adjoint for symmetric V.
KernelOperator h_V_compressed(const QuadratureGroup& g, const Window& V, const Window& F);

// Check that every middle integration variable reachable from the supports
// stays inside the grid cover.
bool middles_reachable_in_grid(const QuadratureGroup& g,
                               const std::vector<QuadratureAlgebraElement>& x,
                               const Window& F);

}  // namespace ncml

#endif  // NCML_FOURIER_HPP
