#ifndef NCML_GROUP_MODEL_HPP
#define NCML_GROUP_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ncml/errors.hpp"

namespace ncml {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Finite groups: exact Cayley-table arithmetic, counting measure, Δ ≡ 1.
// ---------------------------------------------------------------------------

struct FiniteGroup {
  int order = 0;
  Eigen::MatrixXi cayley;    // cayley(i,j) = index of i·j
  std::vector<int> inv;      // inv[i]·i = identity
  int identity = 0;
  std::string name;

  int mul(int i, int j) const { return cayley(i, j); }
  int inverse(int i) const { return inv[static_cast<std::size_t>(i)]; }
};

FiniteGroup make_cyclic(int n);
FiniteGroup make_dihedral(int m);    // order 2m
FiniteGroup make_symmetric(int m);   // order m!, m <= 5
FiniteGroup make_from_table(const Eigen::MatrixXi& table,
                            const std::string& name = "table");

// Restriction to a subset of element indices; throws NotASubgroup when the
// subset is not closed under multiplication and inverse.
FiniteGroup make_subgroup(const FiniteGroup& g, const std::vector<int>& elements);

// Window of a finite group: a set of element indices.
using FiniteWindow = std::vector<int>;

// [μ(sF \ F) + μ(F \ sF)] / μ(F) with counting measure.
double folner_ratio(const FiniteGroup& g, const FiniteWindow& F, int s);

// ---------------------------------------------------------------------------
// Quadrature groups: exact closed-form element arithmetic on coordinates plus
// a weighted sample grid implementing the left Haar integral. Windows are
// axis-aligned boxes in chart coordinates (log a, b) for ax+b, plain
// coordinates for the segment models.
// ---------------------------------------------------------------------------

using GVec = Eigen::Vector2d;  // element coordinates; 1-d models use [0] only

struct ChartBox {
  GVec lo = GVec::Zero();
  GVec hi = GVec::Zero();

  bool contains(const GVec& c, int dim, double eps = 0.0) const {
    for (int d = 0; d < dim; ++d)
      if (c[d] < lo[d] - eps || c[d] > hi[d] + eps) return false;
    return true;
  }
  bool contains_box(const ChartBox& other, int dim, double eps = 0.0) const {
    for (int d = 0; d < dim; ++d)
      if (other.lo[d] < lo[d] - eps || other.hi[d] > hi[d] + eps) return false;
    return true;
  }
};

enum class QuadKind { AxB, RealSegment, IntSegment };

struct QuadratureGroup {
  QuadKind kind = QuadKind::RealSegment;
  int dim = 1;
  std::string name;
  GVec identity = GVec::Zero();

  std::function<GVec(const GVec&, const GVec&)> mul;
  std::function<GVec(const GVec&)> inv;
  std::function<double(const GVec&)> modular;

  std::function<GVec(const GVec&)> to_chart;
  std::function<GVec(const GVec&)> from_chart;
  // Interval arithmetic for product/inverse sets of chart boxes; used for
  // support bookkeeping (SupportEscape checks).
  std::function<ChartBox(const ChartBox&, const ChartBox&)> box_mul;
  std::function<ChartBox(const ChartBox&)> box_inv;

  std::vector<GVec> grid;      // sample points, group coordinates
  std::vector<double> weight;  // strictly positive Haar quadrature weights
  ChartBox cover;              // chart box covered by the grid
  bool exact = false;          // grid sums are exact integrals (Z-segment)

  double modular_pow(const GVec& x, double z) const;  // Δ^z(x), Δ≡1 shortcut
};

// ax+b group: elements (a,b), a>0, mul((a,b),(a',b')) = (aa', ab'+b),
// Δ(a,b) = 1/a, left Haar a^{-2} da db. Grid log-uniform in a over [1/R, R],
// uniform in b over [-S, S], midpoint weights in (log a, b).
QuadratureGroup make_axb(double R, double S, int n_a, int n_b);

// (R,+) with Lebesgue measure sampled on [-L, L]; unimodular.
QuadratureGroup make_real_segment(double L, int n);

// (Z,+) with counting measure on {-M..M}; integrals of compactly supported
// functions inside the grid are exact.
QuadratureGroup make_int_segment(int M);

Complex haar_integral(const QuadratureGroup& g,
                      const std::function<Complex(const GVec&)>& f);

struct Window {
  ChartBox box;
  bool symmetrized = false;  // membership tests box ∪ box⁻¹

  bool contains(const QuadratureGroup& g, const GVec& x) const;
};

std::vector<int> window_indices(const QuadratureGroup& g, const Window& w);
double window_measure(const QuadratureGroup& g, const Window& w);

double folner_ratio(const QuadratureGroup& g, const Window& F, const GVec& s);

// Ordered nested windows F_1 ⊆ F_2 ⊆ ... with their quadrature measures.
struct FolnerSequence {
  std::vector<Window> windows;
  std::vector<double> measures;
};

FolnerSequence make_folner_sequence(const QuadratureGroup& g,
                                    const std::vector<ChartBox>& boxes);

// Smooth compactly supported bump in chart coordinates, value `amplitude` at
// the box center, exactly zero outside the box.
std::function<Complex(const GVec&)> chart_bump(const QuadratureGroup& g,
                                               const ChartBox& support,
                                               Complex amplitude = Complex(1, 0));

}  // namespace ncml

#endif  // NCML_GROUP_MODEL_HPP
