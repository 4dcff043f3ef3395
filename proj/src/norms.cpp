#include "ncml/norms.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ncml/parallel.hpp"

namespace ncml {

// ---------------------------------------------------------------------------
// Fractions and Holder tuples
// ---------------------------------------------------------------------------

namespace {
long long gcd_ll(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}
}  // namespace

Frac Frac::of(long long n, long long d) {
  if (d == 0) return infinity();
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = gcd_ll(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Frac{n, d};
}

Frac Frac::parse(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) throw ConfigError("empty exponent");
  std::string low = t;
  std::transform(low.begin(), low.end(), low.begin(), ::tolower);
  if (low == "inf" || low == "infinity" || low == "oo") return infinity();
  auto slash = t.find('/');
  try {
    if (slash != std::string::npos) {
      long long n = std::stoll(t.substr(0, slash));
      long long d = std::stoll(t.substr(slash + 1));
      if (d == 0) throw ConfigError("zero denominator");
      return of(n, d);
    }
    auto dot = t.find('.');
    if (dot != std::string::npos) {
      std::string frac = t.substr(dot + 1);
      if (frac.size() > 9) throw ConfigError("too many decimals");
      long long scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      long long whole = dot == 0 ? 0 : std::stoll(t.substr(0, dot));
      long long part = frac.empty() ? 0 : std::stoll(frac);
      return of(whole * scale + (whole < 0 ? -part : part), scale);
    }
    return of(std::stoll(t), 1);
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad exponent: " + s);
  }
}

Frac Frac::reciprocal() const {
  if (is_inf()) return Frac{0, 1};
  if (num == 0) return infinity();
  return of(den, num);
}

SchattenExponent Frac::exponent() const {
  if (is_inf()) return SchattenExponent::infinity();
  return SchattenExponent(static_cast<double>(num) / static_cast<double>(den));
}

std::string Frac::to_string() const {
  if (is_inf()) return "inf";
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

HolderTuple::HolderTuple(std::vector<Frac> inputs, Frac output)
    : in_frac_(std::move(inputs)), out_frac_(output) {
  if (in_frac_.empty()) throw HolderViolation("empty tuple");
  long long sn = 0, sd = 1;  // sum of reciprocals
  for (const auto& f : in_frac_) {
    if (!f.is_inf() && f.num < f.den) throw HolderViolation("exponent below 1");
    Frac r = f.reciprocal();
    long long n2 = sn * r.den + r.num * sd;
    long long d2 = sd * r.den;
    long long g = gcd_ll(n2, d2);
    sn = n2 / (g ? g : 1);
    sd = d2 / (g ? g : 1);
    in_.push_back(f.exponent());
  }
  Frac target = out_frac_.reciprocal();
  if (sn * target.den != target.num * sd)
    throw HolderViolation("sum of 1/p_i does not equal 1/p");
  out_ = out_frac_.exponent();
}

std::string HolderTuple::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < in_frac_.size(); ++i) {
    if (i) s += ",";
    s += in_frac_[i].to_string();
  }
  s += ";" + out_frac_.to_string();
  return s;
}

// ---------------------------------------------------------------------------
// LpSpace
// ---------------------------------------------------------------------------

namespace {

double schatten_from_singvals(const VecR& s, const SchattenExponent& p, double nu) {
  if (s.size() == 0) return 0.0;
  if (p.is_inf()) return s(0);
  double top = s(0);
  if (top == 0.0) return 0.0;
  double pv = p.value();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, pv);
  return top * std::pow(nu * acc, 1.0 / pv);
}

}  // namespace

double LpSpace::norm(const VecC& x, const SchattenExponent& p) const {
  MatC m = to_mat(x);
  if (!m.allFinite()) throw NonFiniteEntry();
  Eigen::BDCSVD<MatC> svd(m);
  return schatten_from_singvals(svd.singularValues(), p, nu);
}

VecC LpSpace::norming(const VecC& x, const SchattenExponent& p) const {
  MatC m = to_mat(x);
  if (!m.allFinite()) throw NonFiniteEntry();
  Eigen::BDCSVD<MatC> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecR& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) throw ZeroOperator();
  MatC z;
  if (p.is_inf()) {
    if (!algebra) {
      // rank-one dual; ties in the top singular value broken by first index
      z = svd.matrixV().col(0) * svd.matrixU().col(0).adjoint();
    } else {
      Eigen::Index k = 1;
      while (k < s.size() && s(k) >= s(0) * (1.0 - 1e-12)) ++k;
      MatC e = MatC::Zero(s.size(), s.size());
      for (Eigen::Index i = 0; i < k; ++i) e(i, i) = Complex(1, 0);
      z = svd.matrixV() * e * svd.matrixU().adjoint() / (nu * static_cast<double>(k));
    }
  } else if (p.value() == 1.0) {
    z = svd.matrixV() * svd.matrixU().adjoint();
  } else {
    const double pv = p.value();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / s(0), pv);
    // d_i = (s_i/s_0)^{p-1} (nu * sum (s_i/s_0)^p)^{-1/p'}; scale-free in s_0
    const double t = std::pow(nu * acc, -(pv - 1.0) / pv);
    VecR d(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) d(i) = std::pow(s(i) / s(0), pv - 1.0) * t;
    z = svd.matrixV() * d.asDiagonal() * svd.matrixU().adjoint();
  }
  return dual->from_mat(z);
}

Complex LpSpace::pair(const VecC& x, const VecC& z) const {
  VecC c = pairing_apply(z);
  Complex acc(0, 0);
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += x(i) * c(i);
  return acc;
}

// ---------------------------------------------------------------------------
// Space factories
// ---------------------------------------------------------------------------

namespace {

VecR replicate(const VecR& w, int n) { return w.replicate(n, 1); }

// Builds a cross-linked (primal, dual) pair of kernel spaces at amplification
// level N; block accessors address m x m blocks of the big matrix.
std::pair<std::shared_ptr<LpSpace>, std::shared_ptr<LpSpace>> kernel_pair(
    const VecR& r, const VecR& c, int N) {
  if (r.size() != c.size()) throw ShapeMismatch("kernel spaces must be square");
  const Eigen::Index m = r.size();
  const Eigen::Index big = m * N;

  auto build = [&](VecR rw, VecR cw) {
    auto sp = std::make_shared<LpSpace>();
    sp->dim = big * big;
    sp->nu = 1.0;
    sp->algebra = false;
    VecR rs = rw.array().sqrt().matrix();
    VecR cs = cw.array().sqrt().matrix();
    sp->to_mat = [rs, cs, big](const VecC& x) -> MatC {
      Eigen::Map<const MatC> a(x.data(), big, big);
      return rs.asDiagonal() * a * cs.asDiagonal();
    };
    sp->from_mat = [rs, cs, big](const MatC& mmat) -> VecC {
      MatC a = rs.cwiseInverse().asDiagonal() * mmat * cs.cwiseInverse().asDiagonal();
      return Eigen::Map<const VecC>(a.data(), big * big);
    };
    VecR rwc = rw, cwc = cw;
    sp->pairing_apply = [rwc, cwc, big](const VecC& z) -> VecC {
      Eigen::Map<const MatC> zb(z.data(), big, big);
      MatC out(big, big);
      for (Eigen::Index s = 0; s < big; ++s)
        for (Eigen::Index t = 0; t < big; ++t) out(s, t) = rwc(s) * cwc(t) * zb(t, s);
      return Eigen::Map<const VecC>(out.data(), big * big);
    };
    sp->pairing_solve = [rwc, cwc, big](const VecC& fc) -> VecC {
      Eigen::Map<const MatC> f(fc.data(), big, big);
      MatC out(big, big);
      for (Eigen::Index t = 0; t < big; ++t)
        for (Eigen::Index s = 0; s < big; ++s) out(t, s) = f(s, t) / (rwc(s) * cwc(t));
      return Eigen::Map<const VecC>(out.data(), big * big);
    };
    sp->amp_level = N;
    if (N > 1) {
      sp->block_get = [m, big](const VecC& x, int j, int k) -> VecC {
        Eigen::Map<const MatC> a(x.data(), big, big);
        MatC blk = a.block(j * m, k * m, m, m);
        return Eigen::Map<const VecC>(blk.data(), m * m);
      };
      sp->block_add = [m, big](VecC& x, int j, int k, const VecC& v) {
        Eigen::Map<MatC> a(x.data(), big, big);
        Eigen::Map<const MatC> blk(v.data(), m, m);
        a.block(j * m, k * m, m, m) += blk;
      };
    }
    return sp;
  };

  auto primal = build(replicate(r, N), replicate(c, N));
  auto dualsp = build(replicate(c, N), replicate(r, N));
  primal->dual = dualsp.get();
  primal->partner = dualsp;
  dualsp->dual = primal.get();
  dualsp->partner = primal;
  if (N > 1) {
    auto basep = kernel_pair(r, c, 1);
    primal->base = basep.first;
    dualsp->base = basep.second;
  }
  return {primal, dualsp};
}

std::shared_ptr<LpSpace> algebra_space_impl(std::vector<MatC> basis, double nu,
                                            int amp_level, Eigen::Index base_dim) {
  if (basis.empty()) throw ShapeMismatch("empty basis");
  const Eigen::Index D = basis[0].rows();
  for (const auto& b : basis)
    if (b.rows() != D || b.cols() != D) throw ShapeMismatch("basis shapes differ");
  const Eigen::Index K = static_cast<Eigen::Index>(basis.size());

  auto sp = std::make_shared<LpSpace>();
  sp->dim = K;
  sp->nu = nu;
  sp->algebra = true;

  auto bmat = std::make_shared<MatC>(D * D, K);
  for (Eigen::Index k = 0; k < K; ++k)
    bmat->col(k) = Eigen::Map<const VecC>(basis[static_cast<std::size_t>(k)].data(), D * D);
  auto qr = std::make_shared<Eigen::ColPivHouseholderQR<MatC>>(*bmat);

  sp->to_mat = [bmat, D](const VecC& x) -> MatC {
    VecC v = (*bmat) * x;
    return Eigen::Map<const MatC>(v.data(), D, D);
  };
  sp->from_mat = [qr, D](const MatC& m) -> VecC {
    return qr->solve(Eigen::Map<const VecC>(m.data(), D * D));
  };

  // bilinear pairing gram: P_{kl} = nu * Tr(B_k B_l)
  MatC gram(K, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = 0; l < K; ++l)
      gram(k, l) = nu * (basis[static_cast<std::size_t>(k)].array() *
                         basis[static_cast<std::size_t>(l)].transpose().array())
                            .sum();
  auto pmat = std::make_shared<MatC>(std::move(gram));
  auto lu = std::make_shared<Eigen::PartialPivLU<MatC>>(*pmat);
  sp->pairing_apply = [pmat](const VecC& z) -> VecC { return (*pmat) * z; };
  sp->pairing_solve = [lu](const VecC& c) -> VecC { return lu->solve(c); };
  sp->dual = sp.get();  // self-dual under the trace pairing

  sp->amp_level = amp_level;
  if (amp_level > 1) {
    const Eigen::Index bd = base_dim;
    sp->block_get = [bd, amp_level](const VecC& x, int j, int k) -> VecC {
      return x.segment((static_cast<Eigen::Index>(j) * amp_level + k) * bd, bd);
    };
    sp->block_add = [bd, amp_level](VecC& x, int j, int k, const VecC& v) {
      x.segment((static_cast<Eigen::Index>(j) * amp_level + k) * bd, bd) += v;
    };
  }
  return sp;
}

}  // namespace

LpSpacePtr make_kernel_space(VecR row_w, VecR col_w) {
  return kernel_pair(row_w, col_w, 1).first;
}

LpSpacePtr make_amplified_kernel_space(const VecR& row_w, const VecR& col_w, int N) {
  return kernel_pair(row_w, col_w, N).first;
}

LpSpacePtr make_algebra_space(std::vector<MatC> basis, double trace_weight) {
  return algebra_space_impl(std::move(basis), trace_weight, 1, 0);
}

LpSpacePtr make_amplified_algebra_space(const std::vector<MatC>& basis,
                                        double trace_weight, int N) {
  const Eigen::Index D = basis[0].rows();
  std::vector<MatC> amp;
  amp.reserve(static_cast<std::size_t>(N) * N * basis.size());
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      for (const auto& b : basis) {
        MatC big = MatC::Zero(N * D, N * D);
        big.block(j * D, k * D, D, D) = b;
        amp.push_back(std::move(big));
      }
  auto sp = algebra_space_impl(std::move(amp), trace_weight, N,
                               static_cast<Eigen::Index>(basis.size()));
  sp->base = algebra_space_impl(std::vector<MatC>(basis), trace_weight, 1, 0);
  return sp;
}

// ---------------------------------------------------------------------------
// Tensor maps and amplification
// ---------------------------------------------------------------------------

VecC TensorMap::apply(const std::vector<VecC>& x) const {
  VecC out = VecC::Zero(out_dim);
  const Eigen::Index total = coeff.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Complex c = coeff(flat);
    if (c != Complex(0, 0)) {
      Complex prod = c;
      for (int i = 1; i <= n; ++i)
        prod *= x[static_cast<std::size_t>(i - 1)](idx[static_cast<std::size_t>(i)]);
      out(idx[0]) += prod;
    }
    int d = n;
    while (d >= 0) {
      Eigen::Index lim = (d == 0) ? out_dim : in_dims[static_cast<std::size_t>(d - 1)];
      if (++idx[static_cast<std::size_t>(d)] < lim) break;
      idx[static_cast<std::size_t>(d)--] = 0;
    }
  }
  return out;
}

VecC TensorMap::slot_contract(int slot, const std::vector<VecC>& x, const VecC& g) const {
  VecC out = VecC::Zero(in_dims[static_cast<std::size_t>(slot)]);
  const Eigen::Index total = coeff.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Complex c = coeff(flat);
    if (c != Complex(0, 0)) {
      Complex prod = c * g(idx[0]);
      for (int i = 1; i <= n; ++i) {
        if (i - 1 == slot) continue;
        prod *= x[static_cast<std::size_t>(i - 1)](idx[static_cast<std::size_t>(i)]);
      }
      out(idx[static_cast<std::size_t>(slot + 1)]) += prod;
    }
    int d = n;
    while (d >= 0) {
      Eigen::Index lim = (d == 0) ? out_dim : in_dims[static_cast<std::size_t>(d - 1)];
      if (++idx[static_cast<std::size_t>(d)] < lim) break;
      idx[static_cast<std::size_t>(d)--] = 0;
    }
  }
  return out;
}

MultilinearMap make_tensor_map(std::shared_ptr<const TensorMap> t,
                               std::vector<LpSpacePtr> in, LpSpacePtr out) {
  MultilinearMap m;
  m.n = t->n;
  m.in = std::move(in);
  m.out = std::move(out);
  if (static_cast<int>(m.in.size()) != m.n) throw ArityMismatch();
  for (int i = 0; i < m.n; ++i)
    if (m.in[static_cast<std::size_t>(i)]->dim != t->in_dims[static_cast<std::size_t>(i)])
      throw ShapeMismatch("space/tensor dims differ");
  if (m.out->dim != t->out_dim) throw ShapeMismatch("space/tensor dims differ");
  m.eval = [t](const std::vector<VecC>& x) { return t->apply(x); };
  auto in_spaces = m.in;
  m.slot_adjoint = [t, in_spaces, out = m.out](int i, const std::vector<VecC>& x,
                                               const VecC& y) -> VecC {
    VecC g = out->pairing_apply(y);
    VecC c = t->slot_contract(i, x, g);
    return in_spaces[static_cast<std::size_t>(i)]->pairing_solve(c);
  };
  return m;
}

namespace {

VecC block_get_any(const LpSpace& sp, const VecC& x, int j, int k) {
  if (sp.amp_level == 1) return x;  // only block (0,0) exists
  return sp.block_get(x, j, k);
}

}  // namespace

MultilinearMap make_amplified_map(std::shared_ptr<const TensorMap> base, int N,
                                  std::vector<LpSpacePtr> in_amp, LpSpacePtr out_amp) {
  MultilinearMap m;
  m.n = base->n;
  m.in = std::move(in_amp);
  m.out = std::move(out_amp);
  const int n = m.n;
  auto in_spaces = m.in;
  auto out_space = m.out;

  m.eval = [base, N, n, in_spaces, out_space](const std::vector<VecC>& X) -> VecC {
    VecC Y = VecC::Zero(out_space->dim);
    std::vector<VecC> blocks(static_cast<std::size_t>(n));
    std::vector<int> k(static_cast<std::size_t>(n) + 1, 0);
    for (;;) {
      for (int i = 0; i < n; ++i)
        blocks[static_cast<std::size_t>(i)] = in_spaces[static_cast<std::size_t>(i)]->block_get(
            X[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)],
            k[static_cast<std::size_t>(i) + 1]);
      VecC y = base->apply(blocks);
      out_space->block_add(Y, k[0], k[static_cast<std::size_t>(n)], y);
      int d = n;
      while (d >= 0 && ++k[static_cast<std::size_t>(d)] == N) k[static_cast<std::size_t>(d)--] = 0;
      if (d < 0) break;
    }
    return Y;
  };

  m.slot_adjoint = [base, N, n, in_spaces, out_space](int slot, const std::vector<VecC>& X,
                                                      const VecC& W) -> VecC {
    const LpSpace& base_out = *out_space->base;
    const LpSpace& base_in = *in_spaces[static_cast<std::size_t>(slot)]->base;
    const LpSpace& dual_amp = *in_spaces[static_cast<std::size_t>(slot)]->dual;

    // cache base_out.pairing_apply over the W blocks: out block (j,k) pairs
    // against W block (k,j)
    std::vector<VecC> gcache(static_cast<std::size_t>(N) * N);
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        gcache[static_cast<std::size_t>(j) * N + k] = base_out.pairing_apply(
            block_get_any(*out_space->dual, W, k, j));

    std::vector<VecC> acc(static_cast<std::size_t>(N) * N,
                          VecC::Zero(base_in.dim));
    std::vector<VecC> blocks(static_cast<std::size_t>(n));
    std::vector<int> k(static_cast<std::size_t>(n) + 1, 0);
    for (;;) {
      for (int i = 0; i < n; ++i)
        blocks[static_cast<std::size_t>(i)] = in_spaces[static_cast<std::size_t>(i)]->block_get(
            X[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)],
            k[static_cast<std::size_t>(i) + 1]);
      const VecC& g = gcache[static_cast<std::size_t>(k[0]) * N + k[static_cast<std::size_t>(n)]];
      acc[static_cast<std::size_t>(k[static_cast<std::size_t>(slot)]) * N +
          k[static_cast<std::size_t>(slot) + 1]] += base->slot_contract(slot, blocks, g);
      int d = n;
      while (d >= 0 && ++k[static_cast<std::size_t>(d)] == N) k[static_cast<std::size_t>(d)--] = 0;
      if (d < 0) break;
    }

    VecC Z = VecC::Zero(dual_amp.dim);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        dual_amp.block_add(Z, b, a,
                           base_in.pairing_solve(acc[static_cast<std::size_t>(a) * N + b]));
    return Z;
  };
  return m;
}

std::function<VecC(const VecC&)> adjoint_slot_map(const MultilinearMap& T, int slot,
                                                  const std::vector<VecC>& fixed,
                                                  Eigen::Index dimension_cap) {
  const LpSpace& in = *T.in[static_cast<std::size_t>(slot)];
  if (in.dim > dimension_cap) throw DimensionCap();
  auto mat = std::make_shared<MatC>(T.out->dim, in.dim);
  std::vector<VecC> args = fixed;
  for (Eigen::Index k = 0; k < in.dim; ++k) {
    VecC e = VecC::Zero(in.dim);
    e(k) = Complex(1, 0);
    args[static_cast<std::size_t>(slot)] = e;
    mat->col(k) = T.eval(args);
  }
  auto out_space = T.out;
  auto in_space = T.in[static_cast<std::size_t>(slot)];
  return [mat, out_space, in_space](const VecC& y) -> VecC {
    VecC c = mat->transpose() * out_space->pairing_apply(y);
    return in_space->pairing_solve(c);
  };
}

// ---------------------------------------------------------------------------
// Alternating duality ascent
// ---------------------------------------------------------------------------

namespace {

struct RunResult {
  double val = 0.0;
  std::vector<VecC> cert;
  int iters = 0;
  bool converged = false;
  bool dead = false;
};

RunResult run_restart(const MultilinearMap& T, const HolderTuple& ht,
                      std::vector<VecC> x, int max_iters, double tol) {
  const int n = T.n;
  RunResult res;
  for (int i = 0; i < n; ++i) {
    double nx = T.in[static_cast<std::size_t>(i)]->norm(x[static_cast<std::size_t>(i)],
                                                        ht.input(i));
    if (!(nx > 0.0)) {
      res.dead = true;
      return res;
    }
    x[static_cast<std::size_t>(i)] /= nx;
  }
  double val = T.out->norm(T.eval(x), ht.output());
  res.val = val;
  res.cert = x;
  double prev = val;
  double eta = 1.0;
  int stall = 0;

  for (int iter = 1; iter <= max_iters; ++iter) {
    for (int i = 0; i < n; ++i) {
      VecC ty = T.eval(x);
      double tn = T.out->norm(ty, ht.output());
      if (!(tn > 1e-300)) continue;
      VecC y = T.out->norming(ty, ht.output());
      VecC z;
      if (T.slot_adjoint) {
        z = T.slot_adjoint(i, x, y);
      } else {
        z = adjoint_slot_map(T, i, x)(y);
      }
      const LpSpace& dual_i = *T.in[static_cast<std::size_t>(i)]->dual;
      SchattenExponent q = ht.input(i).conjugate();
      double zn = dual_i.norm(z, q);
      if (!(zn > 1e-300)) continue;
      VecC xn = dual_i.norming(z, q);  // unit p_i norm, in primal coords
      if (eta >= 1.0) {
        x[static_cast<std::size_t>(i)] = std::move(xn);
      } else {
        VecC mix = x[static_cast<std::size_t>(i)] + eta * xn;
        double nm = T.in[static_cast<std::size_t>(i)]->norm(mix, ht.input(i));
        if (nm > 0.0) x[static_cast<std::size_t>(i)] = mix / nm;
      }
    }
    double v2 = T.out->norm(T.eval(x), ht.output());
    if (v2 > res.val) {
      res.val = v2;
      res.cert = x;
    }
    res.iters = iter;
    if (v2 + 1e-15 < prev) eta = std::max(0.5 * eta, 1.0 / 16.0);
    double gain = std::abs(v2 - prev) / std::max(std::abs(v2), 1e-300);
    prev = v2;
    if (gain < tol) {
      if (++stall >= 2) {
        res.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }
  return res;
}

VecC ginibre(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecC v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

NormEstimate multilinear_norm_estimate(const MultilinearMap& T, const HolderTuple& ht,
                                       const EstimatorOptions& opts) {
  if (ht.arity() != T.n) throw HolderViolation("tuple arity does not match map");
  const int n = T.n;

  std::vector<std::vector<VecC>> inits;
  // structured inits: identity and all-ones matrices projected into each space
  {
    std::vector<VecC> id_init, ones_init;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const LpSpace& sp = *T.in[static_cast<std::size_t>(i)];
      MatC probe = sp.to_mat(VecC::Zero(sp.dim));
      MatC I = MatC::Identity(probe.rows(), probe.cols());
      MatC ones = MatC::Ones(probe.rows(), probe.cols());
      id_init.push_back(sp.from_mat(I));
      ones_init.push_back(sp.from_mat(ones));
      if (!id_init.back().allFinite() || !ones_init.back().allFinite()) ok = false;
    }
    if (ok) {
      inits.push_back(id_init);
      inits.push_back(ones_init);
    }
  }
  for (const auto& w : opts.warm_starts) inits.push_back(w);
  int randoms = std::max(0, opts.restarts - static_cast<int>(inits.size()));
  for (int r = 0; r < randoms; ++r) {
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(r) + 1);
    std::vector<VecC> in;
    for (int i = 0; i < n; ++i) in.push_back(ginibre(T.in[static_cast<std::size_t>(i)]->dim, rng));
    inits.push_back(std::move(in));
  }

  std::vector<RunResult> results(inits.size());
  parallel_for(inits.size(), [&](std::size_t r) {
    results[r] = run_restart(T, ht, inits[r], opts.max_iters, opts.tol);
  });

  NormEstimate est;
  est.restarts_used = static_cast<int>(inits.size());
  int best = -1;
  bool any_alive = false, any_conv = false;
  for (std::size_t r = 0; r < results.size(); ++r) {
    if (results[r].dead) continue;
    any_alive = true;
    any_conv = any_conv || results[r].converged;
    if (best < 0 || results[r].val > results[static_cast<std::size_t>(best)].val)
      best = static_cast<int>(r);
  }
  if (best < 0 || !(results[static_cast<std::size_t>(best)].val > 0.0)) {
    est.status = NormEstimate::Status::Degenerate;
    est.value = 0.0;
    return est;
  }
  const RunResult& b = results[static_cast<std::size_t>(best)];
  est.value = b.val;
  est.certificate = b.cert;
  est.iterations = b.iters;
  est.status = (any_alive && any_conv) ? NormEstimate::Status::Converged
                                       : NormEstimate::Status::NoConvergence;
  return est;
}

NormEstimate mb_norm_lower_bound(std::shared_ptr<const TensorMap> base,
                                 const std::vector<SpaceFactory>& in_spaces,
                                 const SpaceFactory& out_space, const HolderTuple& ht,
                                 int N, const EstimatorOptions& opts) {
  if (N < 1) throw Error("amplification level must be >= 1");
  if (static_cast<int>(in_spaces.size()) != base->n) throw ArityMismatch();

  NormEstimate prev;
  std::vector<LpSpacePtr> prev_in;
  for (int level = 1; level <= N; ++level) {
    std::vector<LpSpacePtr> in;
    for (const auto& f : in_spaces) in.push_back(f(level));
    LpSpacePtr out = out_space(level);
    MultilinearMap map = (level == 1) ? make_tensor_map(base, in, out)
                                      : make_amplified_map(base, level, in, out);
    EstimatorOptions o = opts;
    o.warm_starts.clear();
    if (level > 1) {
      o.restarts = std::max(1, opts.amplified_restarts);
      // embed the previous level's certificate block-wise
      if (!prev.certificate.empty()) {
        std::vector<VecC> warm;
        for (int i = 0; i < base->n; ++i) {
          VecC big = VecC::Zero(in[static_cast<std::size_t>(i)]->dim);
          const LpSpace& sp_prev = *prev_in[static_cast<std::size_t>(i)];
          const int L = sp_prev.amp_level;
          for (int j = 0; j < L; ++j)
            for (int k = 0; k < L; ++k)
              in[static_cast<std::size_t>(i)]->block_add(
                  big, j, k,
                  block_get_any(sp_prev, prev.certificate[static_cast<std::size_t>(i)], j, k));
          warm.push_back(std::move(big));
        }
        o.warm_starts.push_back(std::move(warm));
      }
    }
    NormEstimate est = multilinear_norm_estimate(map, ht, o);
    prev = std::move(est);
    prev_in = in;
  }
  return prev;
}

double reevaluate(const MultilinearMap& T, const HolderTuple& ht, const NormEstimate& est) {
  if (est.certificate.empty()) return 0.0;
  double denom = 1.0;
  for (int i = 0; i < T.n; ++i)
    denom *= T.in[static_cast<std::size_t>(i)]->norm(est.certificate[static_cast<std::size_t>(i)],
                                                     ht.input(i));
  if (!(denom > 0.0)) return 0.0;
  return T.out->norm(T.eval(est.certificate), ht.output()) / denom;
}

}  // namespace ncml
