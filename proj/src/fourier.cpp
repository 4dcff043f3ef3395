#include "ncml/fourier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <array>
#include <cmath>

#include "ncml/parallel.hpp"

namespace ncml {

namespace {
constexpr int kMaxArity = 8;
}

MatC lambda_matrix(const FiniteGroup& g, const VecC& f) {
  if (f.size() != g.order) throw LengthMismatch();
  MatC m(g.order, g.order);
  for (int t = 0; t < g.order; ++t)
    for (int u = 0; u < g.order; ++u) m(t, u) = f(g.mul(t, g.inverse(u)));
  return m;
}

FiniteAlgebraElement lambda_of(const FiniteGroup& g, VecC f) {
  FiniteAlgebraElement x;
  x.g = &g;
  x.lambda = lambda_matrix(g, f);
  x.f = std::move(f);
  return x;
}

VecC convolve(const FiniteGroup& g, const VecC& f, const VecC& h) {
  if (f.size() != g.order || h.size() != g.order) throw LengthMismatch();
  VecC out = VecC::Zero(g.order);
  for (int s = 0; s < g.order; ++s) {
    if (f(s) == Complex(0, 0)) continue;
    for (int u = 0; u < g.order; ++u) out(u) += f(s) * h(g.mul(g.inverse(s), u));
  }
  return out;
}

VecC coefficients_of(const FiniteGroup& g, const MatC& x) {
  if (x.rows() != g.order || x.cols() != g.order) throw ShapeMismatch();
  return x.col(g.identity);
}

Complex plancherel_trace(const FiniteGroup& g, const MatC& x) {
  return x.trace() / static_cast<double>(g.order);
}

double finite_lp_norm(const FiniteGroup& g, const MatC& x, const SchattenExponent& p) {
  if (!x.allFinite()) throw NonFiniteEntry();
  Eigen::BDCSVD<MatC> svd(x);
  const VecR& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  if (p.is_inf()) return s(0);
  const double nu = 1.0 / static_cast<double>(g.order);
  const double pv = p.value();
  double top = s(0);
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, pv);
  return top * std::pow(nu * acc, 1.0 / pv);
}

Complex finite_lp_pairing(const FiniteGroup& g, const MatC& x, const MatC& y) {
  return (x * y).trace() / static_cast<double>(g.order);
}

FiniteAlgebraElement fourier_apply_finite(const FiniteGroup& g, const FiniteSymbol& phi,
                                          const std::vector<FiniteAlgebraElement>& x) {
  const int n = static_cast<int>(x.size());
  if (phi.arity != n || n < 1 || n > kMaxArity) throw ArityMismatch();
  for (const auto& xi : x)
    if (xi.g != &g) throw GroupMismatch();
  const int N = g.order;
  VecC h = VecC::Zero(N);
  std::array<int, kMaxArity> t{};
  for (;;) {
    Complex w(1, 0);
    for (int i = 0; i < n; ++i) w *= x[static_cast<std::size_t>(i)].f(t[i]);
    if (w != Complex(0, 0)) {
      int u = t[0];
      for (int i = 1; i < n; ++i) u = g.mul(u, t[i]);
      h(u) += phi.eval(std::span<const int>(t.data(), static_cast<std::size_t>(n))) * w;
    }
    int d = n - 1;
    while (d >= 0 && ++t[d] == N) t[d--] = 0;
    if (d < 0) break;
  }
  return lambda_of(g, std::move(h));
}

KernelOperator compress(const FiniteGroup& g, const MatC& x, const FiniteWindow& F,
                        const SchattenExponent& p) {
  if (F.empty()) throw EmptyWindow();
  if (x.rows() != g.order || x.cols() != g.order) throw ShapeMismatch();
  const Eigen::Index m = static_cast<Eigen::Index>(F.size());
  const double scale = std::pow(static_cast<double>(F.size()), -p.inverse());
  MatC sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      sub(i, j) = scale * x(F[static_cast<std::size_t>(i)], F[static_cast<std::size_t>(j)]);
  return unit_weighted(std::move(sub));
}

FiniteAlgebraElement h_V(const FiniteGroup& g, const FiniteWindow& V,
                         const SchattenExponent& p) {
  if (V.empty()) throw AsymmetricWindow("empty window");
  std::vector<char> in(static_cast<std::size_t>(g.order), 0);
  for (int v : V) in[static_cast<std::size_t>(v)] = 1;
  for (int v : V)
    if (!in[static_cast<std::size_t>(g.inverse(v))]) throw AsymmetricWindow();

  VecC f0 = VecC::Zero(g.order);
  const double c = 1.0 / std::sqrt(static_cast<double>(V.size()));
  for (int v : V) f0(v) = c;
  MatC k = lambda_matrix(g, f0);  // real symmetric, hence self-adjoint

  Eigen::SelfAdjointEigenSolver<MatC> es(k);
  const VecR& ev = es.eigenvalues();
  const double cut = kRankEps * ev.cwiseAbs().maxCoeff();
  const double e = 2.0 * p.inverse();  // 2/p, zero at p = inf
  VecR pw(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double a = std::abs(ev(i));
    if (a <= cut)
      pw(i) = 0.0;
    else
      pw(i) = (e == 0.0) ? 1.0 : std::pow(a, e);
  }
  MatC h = es.eigenvectors() * pw.asDiagonal() * es.eigenvectors().adjoint();
  FiniteAlgebraElement out;
  out.g = &g;
  out.lambda = std::move(h);
  out.f = coefficients_of(g, out.lambda);
  return out;
}

// ---------------------------------------------------------------------------

QuadratureAlgebraElement QuadratureAlgebraElement::with_theta(double theta) const {
  if (theta < 0.0 || theta > 1.0) throw BadTheta();
  QuadratureAlgebraElement out = *this;
  if (p.is_inf()) return out;  // identity embedding, nothing to re-weight
  const double pinv = p.inverse();
  out.a = (1.0 - theta) * pinv;
  out.b = theta * pinv;
  const double shift = out.b - b;  // f' = Delta^{b'-b} f
  if (shift != 0.0) {
    auto base = f;
    const QuadratureGroup* gp = g;
    out.f = [base, gp, shift](const GVec& s) {
      return std::pow(gp->modular(s), shift) * base(s);
    };
  }
  return out;
}

QuadratureAlgebraElement kappa_embed(const QuadratureGroup& g,
                                     std::function<Complex(const GVec&)> f,
                                     const ChartBox& support,
                                     const SchattenExponent& p, double theta) {
  if (theta < 0.0 || theta > 1.0) throw BadTheta();
  QuadratureAlgebraElement x;
  x.g = &g;
  x.p = p;
  x.f = std::move(f);
  x.support = support;
  if (p.is_inf()) {
    x.a = x.b = 0.0;
  } else {
    x.a = (1.0 - theta) / p.value();
    x.b = theta / p.value();
  }
  return x;
}

namespace {

ChartBox effective_box(const QuadratureGroup& g, const Window& w) {
  if (!w.symmetrized) return w.box;
  ChartBox ib = g.box_inv(w.box);
  ChartBox hull;
  for (int d = 0; d < g.dim; ++d) {
    hull.lo[d] = std::min(w.box.lo[d], ib.lo[d]);
    hull.hi[d] = std::max(w.box.hi[d], ib.hi[d]);
  }
  return hull;
}

void validate_elements(const QuadratureGroup& g,
                       const std::vector<QuadratureAlgebraElement>& x) {
  double inv_sum = 0.0;
  for (const auto& xi : x) {
    if (xi.g != &g) throw GroupMismatch();
    if (std::abs(xi.a + xi.b - xi.p.inverse()) > 1e-9)
      throw HolderViolation("a + b must equal 1/p");
    inv_sum += xi.p.inverse();
    if (!g.cover.contains_box(xi.support, g.dim, 1e-9))
      throw SupportEscape("coefficient support outside grid");
  }
  if (inv_sum > 1.0 + 1e-9) throw HolderViolation("sum of 1/p_i exceeds 1");
}

}  // namespace

bool middles_reachable_in_grid(const QuadratureGroup& g,
                               const std::vector<QuadratureAlgebraElement>& x,
                               const Window& F) {
  ChartBox reach = effective_box(g, F);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    reach = g.box_mul(g.box_inv(x[i].support), reach);
    if (!g.cover.contains_box(reach, g.dim, 1e-9)) return false;
  }
  return true;
}

KernelOperator compressed_fourier_kernel(const QuadratureGroup& g, const QuadSymbol& phi,
                                         const std::vector<QuadratureAlgebraElement>& x,
                                         const Window& F, bool allow_expensive) {
  const int n = static_cast<int>(x.size());
  if (phi.arity != n || n < 1 || n > kMaxArity) throw ArityMismatch();
  if (n >= 3 && !allow_expensive)
    throw Error("n >= 3 quadrature kernels are O(M^3) per entry; pass allow_expensive");
  validate_elements(g, x);

  std::vector<int> idxF = window_indices(g, F);
  const Eigen::Index m = static_cast<Eigen::Index>(idxF.size());
  if (m == 0) throw EmptyWindow();

  std::vector<GVec> pts(idxF.size());
  VecR wF(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    pts[static_cast<std::size_t>(i)] = g.grid[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
    wF(i) = g.weight[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
  }

  // Delta exponents: t_0 gets a_1; middle t_j gets b_j + a_{j+1} - 1 (the -1
  // absorbs Delta((t_1...t_n)^{-1})); t_n gets b_n - 1.
  VecR d0(m), dn(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d0(i) = g.modular_pow(pts[static_cast<std::size_t>(i)], x[0].a);
    dn(i) = g.modular_pow(pts[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(n - 1)].b - 1.0);
  }

  MatC out(m, m);

  if (n == 1) {
    auto f1 = x[0].f;
    auto peval = phi.eval;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      for (Eigen::Index t = 0; t < m; ++t) {
        GVec d = g.mul(pts[s], g.inv(pts[static_cast<std::size_t>(t)]));
        Complex fv = f1(d);
        if (fv == Complex(0, 0)) {
          out(static_cast<Eigen::Index>(s), t) = Complex(0, 0);
          continue;
        }
        GVec arg[1] = {d};
        out(static_cast<Eigen::Index>(s), t) =
            peval(std::span<const GVec>(arg, 1)) * fv * d0(static_cast<Eigen::Index>(s)) * dn(t);
      }
    });
  } else if (n == 2) {
    const std::size_t M = g.grid.size();
    // per-middle-point weight w(u) * Delta^{b1+a2-1}(u)
    VecR wmid(static_cast<Eigen::Index>(M));
    for (std::size_t u = 0; u < M; ++u)
      wmid(static_cast<Eigen::Index>(u)) =
          g.weight[u] * g.modular_pow(g.grid[u], x[0].b + x[1].a - 1.0);
    // cache differences and coefficient values
    std::vector<GVec> dl(static_cast<std::size_t>(m) * M), dr(M * static_cast<std::size_t>(m));
    std::vector<Complex> f1v(dl.size()), f2v(dr.size());
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      for (std::size_t u = 0; u < M; ++u) {
        GVec d = g.mul(pts[s], g.inv(g.grid[u]));
        dl[s * M + u] = d;
        f1v[s * M + u] = x[0].f(d);
      }
    });
    parallel_for(M, [&](std::size_t u) {
      for (std::size_t t = 0; t < static_cast<std::size_t>(m); ++t) {
        GVec d = g.mul(g.grid[u], g.inv(pts[t]));
        dr[u * static_cast<std::size_t>(m) + t] = d;
        f2v[u * static_cast<std::size_t>(m) + t] = x[1].f(d);
      }
    });
    auto peval = phi.eval;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      for (std::size_t t = 0; t < static_cast<std::size_t>(m); ++t) {
        Complex acc(0, 0);
        for (std::size_t u = 0; u < M; ++u) {
          Complex a1 = f1v[s * M + u];
          if (a1 == Complex(0, 0)) continue;
          Complex a2 = f2v[u * static_cast<std::size_t>(m) + t];
          if (a2 == Complex(0, 0)) continue;
          GVec args[2] = {dl[s * M + u], dr[u * static_cast<std::size_t>(m) + t]};
          acc += wmid(static_cast<Eigen::Index>(u)) * peval(std::span<const GVec>(args, 2)) * a1 * a2;
        }
        out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
            acc * d0(static_cast<Eigen::Index>(s)) * dn(static_cast<Eigen::Index>(t));
      }
    });
  } else {
    const std::size_t M = g.grid.size();
    std::vector<VecR> wmid(static_cast<std::size_t>(n - 1));
    for (int j = 1; j < n; ++j) {
      VecR w(static_cast<Eigen::Index>(M));
      for (std::size_t u = 0; u < M; ++u)
        w(static_cast<Eigen::Index>(u)) =
            g.weight[u] *
            g.modular_pow(g.grid[u], x[static_cast<std::size_t>(j - 1)].b + x[static_cast<std::size_t>(j)].a - 1.0);
      wmid[static_cast<std::size_t>(j - 1)] = std::move(w);
    }
    auto peval = phi.eval;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
      std::array<std::size_t, kMaxArity> mid{};
      std::array<GVec, kMaxArity> diffs;
      for (std::size_t t = 0; t < static_cast<std::size_t>(m); ++t) {
        Complex acc(0, 0);
        for (int j = 0; j < n - 1; ++j) mid[static_cast<std::size_t>(j)] = 0;
        for (;;) {
          // tuple (t_0, mid..., t_n); compute chained differences
          Complex w(1, 0);
          GVec prev = pts[s];
          bool zero = false;
          for (int j = 0; j < n; ++j) {
            GVec cur = (j < n - 1) ? g.grid[mid[static_cast<std::size_t>(j)]] : pts[t];
            GVec d = g.mul(prev, g.inv(cur));
            Complex fv = x[static_cast<std::size_t>(j)].f(d);
            if (fv == Complex(0, 0)) { zero = true; break; }
            diffs[static_cast<std::size_t>(j)] = d;
            w *= fv;
            if (j < n - 1) w *= wmid[static_cast<std::size_t>(j)](static_cast<Eigen::Index>(mid[static_cast<std::size_t>(j)]));
            prev = cur;
          }
          if (!zero)
            acc += peval(std::span<const GVec>(diffs.data(), static_cast<std::size_t>(n))) * w;
          int d = n - 2;
          while (d >= 0 && ++mid[static_cast<std::size_t>(d)] == M) mid[static_cast<std::size_t>(d)--] = 0;
          if (d < 0) break;
        }
        out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
            acc * d0(static_cast<Eigen::Index>(s)) * dn(static_cast<Eigen::Index>(t));
      }
    });
  }

  return KernelOperator(std::move(out), wF, wF);
}

KernelOperator compress(const QuadratureAlgebraElement& x, const Window& F,
                        const SchattenExponent& p) {
  const QuadratureGroup& g = *x.g;
  std::vector<int> idxF = window_indices(g, F);
  const Eigen::Index m = static_cast<Eigen::Index>(idxF.size());
  if (m == 0) throw EmptyWindow();
  double mu = 0.0;
  for (int i : idxF) mu += g.weight[static_cast<std::size_t>(i)];
  const double scale = std::pow(mu, -p.inverse());

  std::vector<GVec> pts(idxF.size());
  VecR wF(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    pts[static_cast<std::size_t>(i)] = g.grid[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
    wF(i) = g.weight[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
  }
  MatC out(m, m);
  for (Eigen::Index s = 0; s < m; ++s) {
    double da = g.modular_pow(pts[static_cast<std::size_t>(s)], x.a);
    for (Eigen::Index t = 0; t < m; ++t) {
      GVec d = g.mul(pts[static_cast<std::size_t>(s)], g.inv(pts[static_cast<std::size_t>(t)]));
      out(s, t) = scale * da * x.f(d) * g.modular_pow(pts[static_cast<std::size_t>(t)], x.b - 1.0);
    }
  }
  return KernelOperator(std::move(out), wF, wF);
}

KernelOperator h_V_compressed(const QuadratureGroup& g, const Window& V, const Window& F) {
  // symmetry check on the grid
  for (const auto& s : g.grid) {
    if (V.contains(g, s) != V.contains(g, g.inv(s))) throw AsymmetricWindow();
  }
  double c2 = 0.0;  // ||1_V Delta^{-1/4}||_2^2 = int_V Delta^{-1/2}
  for (std::size_t i = 0; i < g.grid.size(); ++i)
    if (V.contains(g, g.grid[i])) c2 += g.weight[i] * g.modular_pow(g.grid[i], -0.5);
  if (!(c2 > 0.0)) throw EmptyWindow();
  const double c = 1.0 / std::sqrt(c2);

  std::vector<int> idxF = window_indices(g, F);
  const Eigen::Index m = static_cast<Eigen::Index>(idxF.size());
  if (m == 0) throw EmptyWindow();
  std::vector<GVec> pts(idxF.size());
  VecR wF(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    pts[static_cast<std::size_t>(i)] = g.grid[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
    wF(i) = g.weight[static_cast<std::size_t>(idxF[static_cast<std::size_t>(i)])];
  }
  MatC out(m, m);
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index t = 0; t < m; ++t) {
      GVec d = g.mul(pts[static_cast<std::size_t>(s)], g.inv(pts[static_cast<std::size_t>(t)]));
      if (!V.contains(g, d)) {
        out(s, t) = Complex(0, 0);
        continue;
      }
      out(s, t) = c * g.modular_pow(d, -0.25) *
                  g.modular_pow(pts[static_cast<std::size_t>(t)], -0.5);
    }
  }
  return KernelOperator(std::move(out), wF, wF);
}

}  // namespace ncml
