#include "ncml/schur.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "ncml/parallel.hpp"

namespace ncml {

namespace {

constexpr int kMaxArity = 8;

void validate_inputs(int arity, const std::vector<KernelOperator>& a) {
  const int n = static_cast<int>(a.size());
  if (arity != n + 1) throw ArityMismatch();
  if (n < 1) throw ArityMismatch("need at least one kernel");
  if (arity > kMaxArity) throw ArityMismatch("arity too large");
  const Eigen::Index m = a[0].rows();
  for (const auto& k : a)
    if (k.rows() != m || k.cols() != m) throw ShapeMismatch("kernels must be square and equal-sized");
  for (int i = 0; i + 1 < n; ++i)
    if ((a[i].col_w - a[i + 1].row_w).cwiseAbs().maxCoeff() >
        1e-9 * (1.0 + a[i].col_w.cwiseAbs().maxCoeff()))
      throw ShapeMismatch("inner measure weights do not chain");
}

// Core contraction: out(t0,tn) = sum over middles of
// phi(t0,..,tn) * prod A_i(t_{i-1},t_i) * prod_j w_j(t_j).
KernelOperator contract(int n, Eigen::Index m,
                        const std::function<Complex(const Eigen::Index*)>& phi,
                        const std::vector<KernelOperator>& a) {
  MatC out(m, m);
  if (n == 1) {
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      Eigen::Index idx[2];
      idx[0] = static_cast<Eigen::Index>(s);
      for (Eigen::Index t = 0; t < m; ++t) {
        idx[1] = t;
        out(idx[0], t) = phi(idx) * a[0].a(idx[0], t);
      }
    });
  } else if (n == 2) {
    const VecR& w = a[0].col_w;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      Eigen::Index idx[3];
      idx[0] = static_cast<Eigen::Index>(s);
      for (Eigen::Index t = 0; t < m; ++t) {
        idx[2] = t;
        Complex acc(0, 0);
        for (Eigen::Index u = 0; u < m; ++u) {
          Complex a0 = a[0].a(idx[0], u);
          Complex a1 = a[1].a(u, t);
          if (a0 == Complex(0, 0) || a1 == Complex(0, 0)) continue;
          idx[1] = u;
          acc += w(u) * phi(idx) * a0 * a1;
        }
        out(idx[0], t) = acc;
      }
    });
  } else {
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      std::array<Eigen::Index, kMaxArity> idx{};
      idx[0] = static_cast<Eigen::Index>(s);
      for (Eigen::Index t = 0; t < m; ++t) {
        idx[n] = t;
        Complex acc(0, 0);
        // odometer over middle indices idx[1..n-1]
        for (int i = 1; i < n; ++i) idx[i] = 0;
        for (;;) {
          Complex term(1, 0);
          double w = 1.0;
          for (int i = 1; i <= n; ++i) term *= a[i - 1].a(idx[i - 1], idx[i]);
          for (int i = 1; i < n; ++i) w *= a[i - 1].col_w(idx[i]);
          if (term != Complex(0, 0)) acc += w * phi(idx.data()) * term;
          int d = n - 1;
          while (d >= 1 && ++idx[d] == m) idx[d--] = 0;
          if (d < 1) break;
        }
        out(idx[0], t) = acc;
      }
    });
  }
  return KernelOperator(std::move(out), a.front().row_w, a.back().col_w);
}

std::vector<KernelOperator> slice(const std::vector<KernelOperator>& a, int from, int to) {
  return std::vector<KernelOperator>(a.begin() + from, a.begin() + to);
}

}  // namespace

FiniteSymbol lift_symbol(const FiniteSymbol& phi, const FiniteGroup& g) {
  FiniteSymbol out;
  out.arity = phi.arity + 1;
  auto base = phi.eval;
  const FiniteGroup* gp = &g;
  int n = phi.arity;
  out.eval = [base, gp, n](std::span<const int> s) -> Complex {
    std::array<int, kMaxArity> d{};
    for (int i = 0; i < n; ++i) d[i] = gp->mul(s[i], gp->inverse(s[i + 1]));
    return base(std::span<const int>(d.data(), n));
  };
  if (phi.factor) {
    auto f = std::make_shared<FiniteSymbol::Factorization>();
    f->split = phi.factor->split;
    f->left = std::make_shared<FiniteSymbol>(lift_symbol(*phi.factor->left, g));
    f->right = std::make_shared<FiniteSymbol>(lift_symbol(*phi.factor->right, g));
    out.factor = f;
  }
  return out;
}

QuadSymbol lift_symbol(const QuadSymbol& phi, const QuadratureGroup& g) {
  QuadSymbol out;
  out.arity = phi.arity + 1;
  auto base = phi.eval;
  auto mul = g.mul;
  auto inv = g.inv;
  int n = phi.arity;
  out.eval = [base, mul, inv, n](std::span<const GVec> s) -> Complex {
    std::array<GVec, kMaxArity> d;
    for (int i = 0; i < n; ++i) d[i] = mul(s[i], inv(s[i + 1]));
    return base(std::span<const GVec>(d.data(), n));
  };
  out.lifted_base = std::make_shared<QuadSymbol>(phi);
  out.max_abs_estimate = phi.max_abs_estimate;
  if (phi.factor) {
    auto f = std::make_shared<QuadSymbol::Factorization>();
    f->split = phi.factor->split;
    f->left = std::make_shared<QuadSymbol>(lift_symbol(*phi.factor->left, g));
    f->right = std::make_shared<QuadSymbol>(lift_symbol(*phi.factor->right, g));
    out.factor = f;
  }
  return out;
}

double estimate_max_abs(QuadSymbol& phi, const QuadratureGroup& g,
                        std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.grid.size() - 1);
  double best = 0.0;
  std::vector<GVec> args(static_cast<std::size_t>(phi.arity));
  for (int k = 0; k < samples; ++k) {
    for (auto& v : args) v = g.grid[pick(rng)];
    best = std::max(best, std::abs(phi.eval(std::span<const GVec>(args.data(), args.size()))));
  }
  phi.max_abs_estimate = best;
  return best;
}

Complex TabulatedSymbol::at(std::span<const Eigen::Index> idx) const {
  Eigen::Index flat = 0;
  for (int d = 0; d < arity; ++d) flat = flat * npoints + idx[static_cast<std::size_t>(d)];
  return values(flat);
}

TabulatedSymbol truncate_symbol(const FiniteSymbol& phi, const FiniteGroup& g,
                                const std::vector<int>& points) {
  (void)g;
  if (points.empty()) throw EmptyWindow();
  TabulatedSymbol t;
  t.arity = phi.arity;
  t.npoints = static_cast<Eigen::Index>(points.size());
  Eigen::Index total = 1;
  for (int d = 0; d < t.arity; ++d) total *= t.npoints;
  t.values.resize(total);
  std::array<int, kMaxArity> args{};
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (int d = t.arity - 1; d >= 0; --d) {
      args[d] = points[static_cast<std::size_t>(rest % t.npoints)];
      rest /= t.npoints;
    }
    t.values(flat) = phi.eval(std::span<const int>(args.data(), static_cast<std::size_t>(t.arity)));
  }
  return t;
}

TabulatedSymbol truncate_symbol(const QuadSymbol& phi, const QuadratureGroup& g,
                                const std::vector<int>& grid_idx) {
  if (grid_idx.empty()) throw EmptyWindow();
  TabulatedSymbol t;
  t.arity = phi.arity;
  t.npoints = static_cast<Eigen::Index>(grid_idx.size());
  Eigen::Index total = 1;
  for (int d = 0; d < t.arity; ++d) total *= t.npoints;
  t.values.resize(total);
  std::array<GVec, kMaxArity> args;
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (int d = t.arity - 1; d >= 0; --d) {
      args[d] = g.grid[static_cast<std::size_t>(grid_idx[static_cast<std::size_t>(rest % t.npoints)])];
      rest /= t.npoints;
    }
    t.values(flat) = phi.eval(std::span<const GVec>(args.data(), static_cast<std::size_t>(t.arity)));
  }
  return t;
}

std::string dump_tabulated(const TabulatedSymbol& t) {
  std::ostringstream os;
  os.precision(17);
  os << "arity " << t.arity << " npoints " << t.npoints << "\n";
  for (Eigen::Index i = 0; i < t.values.size(); ++i)
    os << t.values(i).real() << " " << t.values(i).imag() << "\n";
  return os.str();
}

KernelOperator schur_apply(const TabulatedSymbol& phi, const std::vector<KernelOperator>& a) {
  validate_inputs(phi.arity, a);
  if (a[0].rows() != phi.npoints) throw ShapeMismatch("tabulation does not match kernels");
  const int n = static_cast<int>(a.size());
  auto eval = [&phi, n](const Eigen::Index* idx) {
    return phi.at(std::span<const Eigen::Index>(idx, static_cast<std::size_t>(n + 1)));
  };
  return contract(n, a[0].rows(), eval, a);
}

KernelOperator schur_apply(const FiniteGroup& g, const FiniteSymbol& phi,
                           const std::vector<int>& points,
                           const std::vector<KernelOperator>& a) {
  validate_inputs(phi.arity, a);
  if (static_cast<Eigen::Index>(points.size()) != a[0].rows())
    throw ShapeMismatch("point list does not match kernels");
  const int n = static_cast<int>(a.size());
  if (phi.factor && n >= 2) {
    int m = phi.factor->split;
    if (m >= 1 && m < n) {
      KernelOperator left = schur_apply(g, *phi.factor->left, points, slice(a, 0, m));
      KernelOperator right = schur_apply(g, *phi.factor->right, points, slice(a, m, n));
      return kernel_compose(left, right);
    }
  }
  auto eval = [&phi, &points, n](const Eigen::Index* idx) {
    std::array<int, kMaxArity> args{};
    for (int d = 0; d <= n; ++d) args[d] = points[static_cast<std::size_t>(idx[d])];
    return phi.eval(std::span<const int>(args.data(), static_cast<std::size_t>(n + 1)));
  };
  return contract(n, a[0].rows(), eval, a);
}

KernelOperator schur_apply(const QuadratureGroup& g, const QuadSymbol& phi,
                           const std::vector<int>& grid_idx,
                           const std::vector<KernelOperator>& a) {
  validate_inputs(phi.arity, a);
  const Eigen::Index m = a[0].rows();
  if (static_cast<Eigen::Index>(grid_idx.size()) != m)
    throw ShapeMismatch("point list does not match kernels");
  const int n = static_cast<int>(a.size());
  if (phi.factor && n >= 2) {
    int sp = phi.factor->split;
    if (sp >= 1 && sp < n) {
      KernelOperator left = schur_apply(g, *phi.factor->left, grid_idx, slice(a, 0, sp));
      KernelOperator right = schur_apply(g, *phi.factor->right, grid_idx, slice(a, sp, n));
      return kernel_compose(left, right);
    }
  }
  std::vector<GVec> pts(grid_idx.size());
  for (std::size_t i = 0; i < grid_idx.size(); ++i)
    pts[i] = g.grid[static_cast<std::size_t>(grid_idx[i])];

  if (phi.lifted_base) {
    // cache pairwise differences t_{i-1} t_i^{-1}
    std::vector<GVec> diff(static_cast<std::size_t>(m) * m);
    for (Eigen::Index s = 0; s < m; ++s)
      for (Eigen::Index t = 0; t < m; ++t)
        diff[static_cast<std::size_t>(s) * m + t] =
            g.mul(pts[static_cast<std::size_t>(s)], g.inv(pts[static_cast<std::size_t>(t)]));
    auto base = phi.lifted_base->eval;
    auto eval = [&diff, base, m, n](const Eigen::Index* idx) {
      std::array<GVec, kMaxArity> args;
      for (int d = 0; d < n; ++d)
        args[d] = diff[static_cast<std::size_t>(idx[d]) * m + idx[d + 1]];
      return base(std::span<const GVec>(args.data(), static_cast<std::size_t>(n)));
    };
    return contract(n, m, eval, a);
  }

  auto eval = [&phi, &pts, n](const Eigen::Index* idx) {
    std::array<GVec, kMaxArity> args;
    for (int d = 0; d <= n; ++d) args[d] = pts[static_cast<std::size_t>(idx[d])];
    return phi.eval(std::span<const GVec>(args.data(), static_cast<std::size_t>(n + 1)));
  };
  return contract(n, m, eval, a);
}

}  // namespace ncml
