#include "ncml/group_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ncml {

namespace {

void validate_group(const FiniteGroup& g) {
  const int n = g.order;
  if (n < 1 || g.cayley.rows() != n || g.cayley.cols() != n)
    throw TableNotAGroup("table is not square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int v = g.cayley(i, j);
      if (v < 0 || v >= n) throw TableNotAGroup("entry out of range");
    }
  const int e = g.identity;
  for (int i = 0; i < n; ++i) {
    if (g.cayley(e, i) != i || g.cayley(i, e) != i)
      throw TableNotAGroup("identity fails");
    if (g.cayley(i, g.inv[i]) != e || g.cayley(g.inv[i], i) != e)
      throw TableNotAGroup("inverse fails");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (g.cayley(g.cayley(i, j), k) != g.cayley(i, g.cayley(j, k)))
          throw TableNotAGroup("associativity fails");
}

FiniteGroup finish_group(Eigen::MatrixXi table, std::string name) {
  FiniteGroup g;
  g.order = static_cast<int>(table.rows());
  g.cayley = std::move(table);
  g.name = std::move(name);

  int e = -1;
  for (int i = 0; i < g.order && e < 0; ++i) {
    bool ok = true;
    for (int j = 0; j < g.order; ++j)
      if (g.cayley(i, j) != j || g.cayley(j, i) != j) { ok = false; break; }
    if (ok) e = i;
  }
  if (e < 0) throw TableNotAGroup("no identity");
  g.identity = e;

  g.inv.assign(g.order, -1);
  for (int i = 0; i < g.order; ++i) {
    for (int j = 0; j < g.order; ++j)
      if (g.cayley(i, j) == e && g.cayley(j, i) == e) { g.inv[i] = j; break; }
    if (g.inv[i] < 0) throw TableNotAGroup("no inverse");
  }
  validate_group(g);
  return g;
}

}  // namespace

FiniteGroup make_cyclic(int n) {
  if (n < 1) throw TableNotAGroup("cyclic order must be >= 1");
  Eigen::MatrixXi t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = (i + j) % n;
  return finish_group(std::move(t), "Z" + std::to_string(n));
}

FiniteGroup make_dihedral(int m) {
  if (m < 1) throw TableNotAGroup("dihedral parameter must be >= 1");
  // elements: r^k (index k), s r^k (index m+k); s r^k s = r^{-k}
  const int n = 2 * m;
  auto idx = [m](int flip, int rot) { return flip * m + ((rot % m) + m) % m; };
  Eigen::MatrixXi t(n, n);
  for (int i = 0; i < n; ++i) {
    int fi = i / m, ri = i % m;
    for (int j = 0; j < n; ++j) {
      int fj = j / m, rj = j % m;
      // (s^fi r^ri)(s^fj r^rj) = s^{fi+fj} r^{(-1)^{fj} ri + rj}
      int rot = (fj ? -ri : ri) + rj;
      t(i, j) = idx((fi + fj) % 2, rot);
    }
  }
  return finish_group(std::move(t), "D" + std::to_string(m));
}

FiniteGroup make_symmetric(int m) {
  if (m < 1 || m > 5) throw TableNotAGroup("symmetric group supported for m in [1,5]");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const int n = static_cast<int>(perms.size());
  std::map<std::vector<int>, int> rank;
  for (int i = 0; i < n; ++i) rank[perms[i]] = i;
  Eigen::MatrixXi t(n, n);
  std::vector<int> comp(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int x = 0; x < m; ++x) comp[x] = perms[i][perms[j][x]];
      t(i, j) = rank[comp];
    }
  return finish_group(std::move(t), "S" + std::to_string(m));
}

FiniteGroup make_from_table(const Eigen::MatrixXi& table, const std::string& name) {
  if (table.rows() != table.cols() || table.rows() < 1)
    throw TableNotAGroup("table is not square");
  return finish_group(table, name);
}

FiniteGroup make_subgroup(const FiniteGroup& g, const std::vector<int>& elements) {
  std::vector<int> elems = elements;
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  if (elems.empty()) throw NotASubgroup("empty subset");
  std::vector<int> pos(g.order, -1);
  for (std::size_t k = 0; k < elems.size(); ++k) {
    if (elems[k] < 0 || elems[k] >= g.order) throw NotASubgroup("index out of range");
    pos[elems[k]] = static_cast<int>(k);
  }
  const int n = static_cast<int>(elems.size());
  Eigen::MatrixXi t(n, n);
  for (int i = 0; i < n; ++i) {
    if (pos[g.inverse(elems[i])] < 0) throw NotASubgroup("not closed under inverse");
    for (int j = 0; j < n; ++j) {
      int prod = g.mul(elems[i], elems[j]);
      if (pos[prod] < 0) throw NotASubgroup("not closed under multiplication");
      t(i, j) = pos[prod];
    }
  }
  return finish_group(std::move(t), g.name + "-sub" + std::to_string(n));
}

double folner_ratio(const FiniteGroup& g, const FiniteWindow& F, int s) {
  if (F.empty()) throw EmptyWindow();
  std::vector<char> in(g.order, 0);
  for (int x : F) in[static_cast<std::size_t>(x)] = 1;
  int sF_not_F = 0, F_not_sF = 0;
  for (int x : F) {
    int sx = g.mul(s, x);
    if (!in[static_cast<std::size_t>(sx)]) ++sF_not_F;  // sF \ F
    int sinv_x = g.mul(g.inverse(s), x);
    if (!in[static_cast<std::size_t>(sinv_x)]) ++F_not_sF;  // F \ sF
  }
  return static_cast<double>(sF_not_F + F_not_sF) / static_cast<double>(F.size());
}

// ---------------------------------------------------------------------------

double QuadratureGroup::modular_pow(const GVec& x, double z) const {
  if (z == 0.0) return 1.0;
  double m = modular(x);
  return m == 1.0 ? 1.0 : std::pow(m, z);
}

namespace {

ChartBox interval_mul_shift(const ChartBox& b1, const ChartBox& b2) {
  // product set of ax+b chart boxes: (u,v)·(u',v') = (u+u', e^u v' + v)
  ChartBox r;
  r.lo[0] = b1.lo[0] + b2.lo[0];
  r.hi[0] = b1.hi[0] + b2.hi[0];
  double elo = std::exp(b1.lo[0]), ehi = std::exp(b1.hi[0]);
  double c1 = elo * b2.lo[1], c2 = elo * b2.hi[1], c3 = ehi * b2.lo[1], c4 = ehi * b2.hi[1];
  double mn = std::min(std::min(c1, c2), std::min(c3, c4));
  double mx = std::max(std::max(c1, c2), std::max(c3, c4));
  r.lo[1] = mn + b1.lo[1];
  r.hi[1] = mx + b1.hi[1];
  return r;
}

ChartBox interval_inv_axb(const ChartBox& b) {
  // inverse set: (u,v) -> (-u, -v e^{-u})
  ChartBox r;
  r.lo[0] = -b.hi[0];
  r.hi[0] = -b.lo[0];
  double elo = std::exp(-b.hi[0]), ehi = std::exp(-b.lo[0]);
  double c1 = -b.lo[1] * elo, c2 = -b.lo[1] * ehi, c3 = -b.hi[1] * elo, c4 = -b.hi[1] * ehi;
  r.lo[1] = std::min(std::min(c1, c2), std::min(c3, c4));
  r.hi[1] = std::max(std::max(c1, c2), std::max(c3, c4));
  return r;
}

}  // namespace

QuadratureGroup make_axb(double R, double S, int n_a, int n_b) {
  if (!(R > 1.0) || !(S > 0.0) || n_a < 2 || n_b < 2) throw BadGridParams();
  QuadratureGroup g;
  g.kind = QuadKind::AxB;
  g.dim = 2;
  g.name = "axb";
  g.identity = GVec(1.0, 0.0);
  g.mul = [](const GVec& x, const GVec& y) { return GVec(x[0] * y[0], x[0] * y[1] + x[1]); };
  g.inv = [](const GVec& x) { return GVec(1.0 / x[0], -x[1] / x[0]); };
  g.modular = [](const GVec& x) { return 1.0 / x[0]; };
  g.to_chart = [](const GVec& x) { return GVec(std::log(x[0]), x[1]); };
  g.from_chart = [](const GVec& c) { return GVec(std::exp(c[0]), c[1]); };
  g.box_mul = interval_mul_shift;
  g.box_inv = interval_inv_axb;

  const double U = std::log(R);
  const double du = 2.0 * U / n_a;
  const double db = 2.0 * S / n_b;
  g.grid.reserve(static_cast<std::size_t>(n_a) * n_b);
  g.weight.reserve(g.grid.capacity());
  for (int i = 0; i < n_a; ++i) {
    double u = -U + (i + 0.5) * du;
    for (int j = 0; j < n_b; ++j) {
      double b = -S + (j + 0.5) * db;
      g.grid.push_back(g.from_chart(GVec(u, b)));
      // left Haar a^{-2} da db = e^{-u} du db in (u, b)
      g.weight.push_back(std::exp(-u) * du * db);
    }
  }
  g.cover.lo = GVec(-U, -S);
  g.cover.hi = GVec(U, S);
  return g;
}

QuadratureGroup make_real_segment(double L, int n) {
  if (!(L > 0.0) || n < 2) throw BadGridParams();
  QuadratureGroup g;
  g.kind = QuadKind::RealSegment;
  g.dim = 1;
  g.name = "rseg";
  g.identity = GVec::Zero();
  g.mul = [](const GVec& x, const GVec& y) { return GVec(x[0] + y[0], 0.0); };
  g.inv = [](const GVec& x) { return GVec(-x[0], 0.0); };
  g.modular = [](const GVec&) { return 1.0; };
  g.to_chart = [](const GVec& x) { return x; };
  g.from_chart = [](const GVec& c) { return c; };
  g.box_mul = [](const ChartBox& a, const ChartBox& b) {
    ChartBox r;
    r.lo[0] = a.lo[0] + b.lo[0];
    r.hi[0] = a.hi[0] + b.hi[0];
    return r;
  };
  g.box_inv = [](const ChartBox& b) {
    ChartBox r;
    r.lo[0] = -b.hi[0];
    r.hi[0] = -b.lo[0];
    return r;
  };
  const double dx = 2.0 * L / n;
  for (int i = 0; i < n; ++i) {
    g.grid.push_back(GVec(-L + (i + 0.5) * dx, 0.0));
    g.weight.push_back(dx);
  }
  g.cover.lo = GVec(-L, 0.0);
  g.cover.hi = GVec(L, 0.0);
  return g;
}

QuadratureGroup make_int_segment(int M) {
  if (M < 1) throw BadGridParams();
  QuadratureGroup g;
  g.kind = QuadKind::IntSegment;
  g.dim = 1;
  g.name = "zseg";
  g.identity = GVec::Zero();
  g.mul = [](const GVec& x, const GVec& y) { return GVec(x[0] + y[0], 0.0); };
  g.inv = [](const GVec& x) { return GVec(-x[0], 0.0); };
  g.modular = [](const GVec&) { return 1.0; };
  g.to_chart = [](const GVec& x) { return x; };
  g.from_chart = [](const GVec& c) { return c; };
  g.box_mul = [](const ChartBox& a, const ChartBox& b) {
    ChartBox r;
    r.lo[0] = a.lo[0] + b.lo[0];
    r.hi[0] = a.hi[0] + b.hi[0];
    return r;
  };
  g.box_inv = [](const ChartBox& b) {
    ChartBox r;
    r.lo[0] = -b.hi[0];
    r.hi[0] = -b.lo[0];
    return r;
  };
  for (int k = -M; k <= M; ++k) {
    g.grid.push_back(GVec(static_cast<double>(k), 0.0));
    g.weight.push_back(1.0);
  }
  g.cover.lo = GVec(static_cast<double>(-M), 0.0);
  g.cover.hi = GVec(static_cast<double>(M), 0.0);
  g.exact = true;
  return g;
}

Complex haar_integral(const QuadratureGroup& g,
                      const std::function<Complex(const GVec&)>& f) {
  Complex acc(0, 0);
  for (std::size_t i = 0; i < g.grid.size(); ++i) acc += g.weight[i] * f(g.grid[i]);
  return acc;
}

bool Window::contains(const QuadratureGroup& g, const GVec& x) const {
  const double eps = 1e-12;
  if (box.contains(g.to_chart(x), g.dim, eps)) return true;
  if (symmetrized && box.contains(g.to_chart(g.inv(x)), g.dim, eps)) return true;
  return false;
}

std::vector<int> window_indices(const QuadratureGroup& g, const Window& w) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < g.grid.size(); ++i)
    if (w.contains(g, g.grid[i])) idx.push_back(static_cast<int>(i));
  return idx;
}

double window_measure(const QuadratureGroup& g, const Window& w) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.grid.size(); ++i)
    if (w.contains(g, g.grid[i])) m += g.weight[i];
  return m;
}

double folner_ratio(const QuadratureGroup& g, const Window& F, const GVec& s) {
  double mu_F = window_measure(g, F);
  if (!(mu_F > 0.0)) throw EmptyWindow();
  const GVec sinv = g.inv(s);
  double num = 0.0;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    const GVec& t = g.grid[i];
    bool in_F = F.contains(g, t);
    bool in_sF = F.contains(g, g.mul(sinv, t));  // t in sF iff s^{-1} t in F
    if (in_F != in_sF) num += g.weight[i];
  }
  return num / mu_F;
}

FolnerSequence make_folner_sequence(const QuadratureGroup& g,
                                    const std::vector<ChartBox>& boxes) {
  FolnerSequence seq;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    if (k > 0 && !boxes[k].contains_box(boxes[k - 1], g.dim, 1e-12))
      throw EmptyWindow("folner windows must be nested");
    Window w;
    w.box = boxes[k];
    double m = window_measure(g, w);
    if (!(m > 0.0)) throw EmptyWindow();
    seq.windows.push_back(w);
    seq.measures.push_back(m);
  }
  return seq;
}

std::function<Complex(const GVec&)> chart_bump(const QuadratureGroup& g,
                                               const ChartBox& support,
                                               Complex amplitude) {
  auto to_chart = g.to_chart;
  int dim = g.dim;
  ChartBox box = support;
  return [to_chart, dim, box, amplitude](const GVec& x) -> Complex {
    GVec c = to_chart(x);
    double v = 1.0;
    for (int d = 0; d < dim; ++d) {
      double mid = 0.5 * (box.lo[d] + box.hi[d]);
      double half = 0.5 * (box.hi[d] - box.lo[d]);
      double t = (c[d] - mid) / half;
      if (!(std::abs(t) < 1.0)) return Complex(0, 0);
      v *= std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
    return amplitude * v;
  };
}

}  // namespace ncml
