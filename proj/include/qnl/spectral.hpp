#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qnl/characters.hpp"
#include "qnl/construction.hpp"
#include "qnl/field.hpp"

namespace qnl {

/// Precomputed state for transforms of F_q-valued functions on F_{q^n}:
/// the p-th roots of unity, the embedding F_q -> F_{q^n}, and the dual map
/// that converts plain digit-wise transform output into indexing by the
/// field element a pairing as y -> Tr(a y).  Holds pointers into the view
/// and its fields, which must outlive the context.
struct SpectralCtx {
  const FieldCtx* big = nullptr;
  const FieldCtx* sub = nullptr;
  const SubfieldView* view = nullptr;
  u64 p = 0, q = 0, n = 0, d = 0;
  std::vector<cplx> roots;   // p-th roots of unity
  std::vector<cplx> croots;  // conjugates
  std::vector<elem> lift;    // F_q index -> F_{q^n} element
  std::vector<u64> dual;     // a -> raw transform slot of the trace pairing
};

inline SpectralCtx make_spectral(const SubfieldView& view) {
  SpectralCtx sc;
  sc.big = view.big;
  sc.sub = view.sub;
  sc.view = &view;
  sc.p = sc.big->p;
  sc.d = sc.big->deg;
  sc.q = sc.sub->order;
  sc.n = sc.d / sc.sub->deg;
  if (sc.p > 255) throw std::invalid_argument("spectral: p does not fit the radix kernel");
  sc.roots = unity_roots(sc.p);
  sc.croots.resize(sc.p);
  for (u64 m = 0; m < sc.p; ++m) sc.croots[m] = std::conj(sc.roots[m]);
  sc.lift.resize(sc.q);
  for (u64 u = 0; u < sc.q; ++u) sc.lift[u] = view.to_big(u);

  // Gram matrix of the trace pairing in the power basis.
  const u64 d = sc.d, p = sc.p, Q = sc.big->order;
  std::vector<std::uint8_t> gram(d * d);
  {
    std::vector<std::uint32_t> tr(2 * d - 1);
    elem xp = 1;
    for (u64 k = 0; k < 2 * d - 1; ++k) {
      tr[k] = sc.big->trace_abs(xp);
      if (k + 1 < 2 * d - 1) xp = sc.big->mul(xp, elem(p));
    }
    for (u64 i = 0; i < d; ++i)
      for (u64 j = 0; j < d; ++j) gram[i * d + j] = std::uint8_t(tr[i + j]);
  }
  sc.dual.resize(Q);
  std::vector<std::uint32_t> digits(d);
  for (u64 a = 0; a < Q; ++a) {
    u64 x = a;
    for (u64 i = 0; i < d; ++i) {
      digits[i] = std::uint32_t(x % p);
      x /= p;
    }
    u64 packed = 0, pw = 1;
    for (u64 i = 0; i < d; ++i) {
      u64 acc = 0;
      for (u64 j = 0; j < d; ++j) acc += u64(gram[i * d + j]) * digits[j];
      packed += (acc % p) * pw;
      pw *= p;
    }
    sc.dual[a] = packed;
  }
  return sc;
}

namespace detail {

/// In-place transform H[u] = sum_y x[y] conj(w_p)^{u . y} over (Z_p)^d,
/// digits little-endian, radix-p butterflies.
inline void additive_dft(std::vector<cplx>& x, u64 p, const std::vector<cplx>& croots) {
  const u64 len = x.size();
  std::array<cplx, 256> tmp;
  for (u64 stride = 1; stride < len; stride *= p) {
    for (u64 base = 0; base < len; base += stride * p) {
      for (u64 off = base; off < base + stride; ++off) {
        for (u64 j = 0; j < p; ++j) {
          cplx acc{0.0, 0.0};
          for (u64 k = 0; k < p; ++k) acc += x[off + k * stride] * croots[j * k % p];
          tmp[j] = acc;
        }
        for (u64 j = 0; j < p; ++j) x[off + j * stride] = tmp[j];
      }
    }
  }
}

inline void check_table(const SpectralCtx& sc, const std::vector<std::uint8_t>& values) {
  if (values.size() != sc.big->order)
    throw std::invalid_argument("spectral: table length must be q^n");
  for (auto v : values)
    if (v >= sc.q) throw std::invalid_argument("spectral: table value out of range");
}

}  // namespace detail

/// ghat(a, lambda) = q^{-n/2} sum_y eta(lambda g(y)) conj(eta(Tr_{q^n/q}(a y)))
/// for every a, with eta the canonical additive character of F_q.
inline std::vector<cplx> fourier_full(const SpectralCtx& sc,
                                      const std::vector<std::uint8_t>& values, u64 lambda) {
  detail::check_table(sc, values);
  if (lambda == 0 || lambda >= sc.q)
    throw std::invalid_argument("fourier: lambda must be a unit of F_q");
  const u64 Q = sc.big->order;
  std::vector<cplx> phase(sc.q);
  for (u64 u = 0; u < sc.q; ++u)
    phase[u] = sc.roots[sc.sub->trace_abs(sc.sub->mul(lambda, u))];
  std::vector<cplx> h(Q);
  for (u64 y = 0; y < Q; ++y) h[y] = phase[values[y]];
  detail::additive_dft(h, sc.p, sc.croots);
  std::vector<cplx> out(Q);
  const double norm = 1.0 / std::sqrt(double(Q));
  for (u64 a = 0; a < Q; ++a) out[a] = h[sc.dual[a]] * norm;
  return out;
}

/// Same transform with the summand zeroed off the masked domain.
inline std::vector<cplx> fourier_restricted(const SpectralCtx& sc,
                                            const std::vector<std::uint8_t>& values,
                                            const std::vector<std::uint8_t>& mask, u64 lambda) {
  detail::check_table(sc, values);
  if (mask.size() != sc.big->order)
    throw std::invalid_argument("fourier: mask length must be q^n");
  if (lambda == 0 || lambda >= sc.q)
    throw std::invalid_argument("fourier: lambda must be a unit of F_q");
  const u64 Q = sc.big->order;
  std::vector<cplx> phase(sc.q);
  for (u64 u = 0; u < sc.q; ++u)
    phase[u] = sc.roots[sc.sub->trace_abs(sc.sub->mul(lambda, u))];
  std::vector<cplx> h(Q, cplx{0.0, 0.0});
  for (u64 y = 0; y < Q; ++y)
    if (mask[y]) h[y] = phase[values[y]];
  detail::additive_dft(h, sc.p, sc.croots);
  std::vector<cplx> out(Q);
  const double norm = 1.0 / std::sqrt(double(Q));
  for (u64 a = 0; a < Q; ++a) out[a] = h[sc.dual[a]] * norm;
  return out;
}

inline double parseval_residual(const SpectralCtx& sc, const std::vector<cplx>& ghat) {
  double s = 0.0;
  for (auto& z : ghat) s += std::norm(z);
  double expect = double(sc.big->order);
  return std::abs(s - expect) / expect;
}

namespace detail {

struct MaximandResult {
  double value = -std::numeric_limits<double>::infinity();
  elem a = 0;
  u64 b = 0;
};

/// max over (a, b) of sum_{lambda != 0} conj(eta(lambda b)) ghat[lambda](lambda a),
/// with ghat indexed by lambda - 1.  The sum pairs conjugate terms, so it is
/// real; drift beyond rounding is an internal error.
inline MaximandResult max_affine_correlation(const SpectralCtx& sc,
                                             const std::vector<std::vector<cplx>>& ghat) {
  const u64 Q = sc.big->order, q = sc.q;
  if (ghat.size() != q - 1) throw std::invalid_argument("correlation: need one transform per unit");
  std::vector<std::vector<cplx>> perm(q - 1);
  for (u64 l = 1; l < q; ++l) {
    perm[l - 1].resize(Q);
    const elem lam = sc.lift[l];
    for (u64 a = 0; a < Q; ++a) perm[l - 1][a] = ghat[l - 1][sc.big->mul(lam, a)];
  }
  std::vector<cplx> w((q - 1) * q);
  for (u64 l = 1; l < q; ++l)
    for (u64 b = 0; b < q; ++b)
      w[(l - 1) * q + b] = sc.croots[sc.sub->trace_abs(sc.sub->mul(l, b))];
  MaximandResult res;
  for (u64 a = 0; a < Q; ++a) {
    for (u64 b = 0; b < q; ++b) {
      cplx acc{0.0, 0.0};
      for (u64 l = 0; l + 1 < q; ++l) acc += w[l * q + b] * perm[l][a];
      if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, std::abs(acc.real())))
        throw std::logic_error("correlation: maximand drifted off the real line");
      if (acc.real() > res.value) {
        res.value = acc.real();
        res.a = a;
        res.b = b;
      }
    }
  }
  return res;
}

}  // namespace detail

/// Hamming distance from the table to y -> Tr_{q^n/q}(a y) + b.
inline u64 affine_distance(const SpectralCtx& sc, const std::vector<std::uint8_t>& values,
                           elem a, u64 b) {
  u64 dist = 0;
  const u64 Q = sc.big->order;
  for (u64 y = 0; y < Q; ++y)
    if (values[y] != sc.sub->add(sc.view->trace_to_sub(sc.big->mul(a, y)), b)) ++dist;
  return dist;
}

struct MuReport {
  double mu = 0.0;         // on the lattice q^{1-n/2} Z, fixed by the witness recount
  double raw = 0.0;        // floating maximand at the witness
  double snap_delta = 0.0;
  elem witness_a = 0;
  u64 witness_b = 0;
  u64 distance = 0;        // Hamming distance to the witness affine function
};

namespace detail {

inline MuReport mu_from_distance(const SpectralCtx& sc, u64 dist, elem a, u64 b, double raw) {
  MuReport rep;
  rep.witness_a = a;
  rep.witness_b = b;
  rep.distance = dist;
  rep.raw = raw;
  const u64 Q = sc.big->order;
  auto lead = std::int64_t(Q / sc.q * (sc.q - 1));
  const double unit = double(sc.q) / std::sqrt(double(Q));
  rep.mu = double(lead - std::int64_t(dist)) * unit;
  rep.snap_delta = std::abs(rep.raw - rep.mu);
  if (rep.snap_delta > 0.5 * unit)
    throw std::logic_error("mu: witness recount disagrees with the maximand");
  return rep;
}

}  // namespace detail

/// mu(g) through the transform identity: the affine correlation maximand
/// equals q^{1-n/2} (q^{n-1}(q-1) - d(g, h_{a,b})), so the witness pins the
/// value to the lattice exactly.
inline MuReport mu_spectral(const SpectralCtx& sc, const std::vector<std::uint8_t>& values) {
  std::vector<std::vector<cplx>> ghat;
  ghat.reserve(sc.q - 1);
  for (u64 l = 1; l < sc.q; ++l) ghat.push_back(fourier_full(sc, values, l));
  auto mx = detail::max_affine_correlation(sc, ghat);
  u64 dist = affine_distance(sc, values, mx.a, mx.b);
  return detail::mu_from_distance(sc, dist, mx.a, mx.b, mx.value);
}

/// mu(g) by scanning every affine function.  Cost q^{2n+1}.
inline MuReport mu_bruteforce(const SpectralCtx& sc, const std::vector<std::uint8_t>& values) {
  detail::check_table(sc, values);
  const u64 Q = sc.big->order, q = sc.q;
  if (double(2 * sc.n + 1) * std::log2(double(q)) > 26.0)
    throw budget_error("affine sweep exceeds the compute budget");
  u64 best_d = ~u64(0);
  elem best_a = 0;
  u64 best_b = 0;
  std::vector<std::uint8_t> tr(Q);
  std::vector<std::uint8_t> shifted(q);
  for (u64 a = 0; a < Q; ++a) {
    for (u64 y = 0; y < Q; ++y)
      tr[y] = std::uint8_t(sc.view->trace_to_sub(sc.big->mul(a, y)));
    for (u64 b = 0; b < q; ++b) {
      for (u64 u = 0; u < q; ++u) shifted[u] = std::uint8_t(sc.sub->add(u, b));
      u64 d = 0;
      for (u64 y = 0; y < Q; ++y)
        if (values[y] != shifted[tr[y]]) ++d;
      if (d < best_d) {
        best_d = d;
        best_a = a;
        best_b = b;
      }
    }
  }
  auto lead = std::int64_t(Q / q * (q - 1));
  const double unit = double(q) / std::sqrt(double(Q));
  double raw = double(lead - std::int64_t(best_d)) * unit;
  return detail::mu_from_distance(sc, best_d, best_a, best_b, raw);
}

// ---------------------------------------------------------------------------
// Exhaustive extremes over all functions

inline std::string exact_mu_string(u64 q, u64 n, u64 best_distance) {
  u64 lead = ipow_checked(q, n - 1) * (q - 1);
  if (best_distance > lead)
    throw std::logic_error("exact mu: distance exceeds the affine lead term");
  u64 num = lead - best_distance;
  u64 den = (n % 2 == 0) ? ipow_checked(q, n / 2 - 1) : ipow_checked(q, (n - 1) / 2);
  u64 g = std::gcd(num == 0 ? den : num, den);
  num /= g;
  den /= g;
  std::string coeff = den == 1 ? std::to_string(num)
                               : std::to_string(num) + "/" + std::to_string(den);
  if (n % 2 == 0 || num == 0) return coeff;
  std::string root = "sqrt(" + std::to_string(q) + ")";
  return coeff == "1" ? root : coeff + "*" + root;
}

struct RhoResult {
  u64 q = 0, n = 0;
  u64 rho = 0;       // max over g of min over affine h of d(g, h)
  double mu = 0.0;   // the matching extreme of mu
  std::string mu_exact;
};

/// Exhausts all q^{q^n} functions.  Only tiny domains are allowed; the
/// budget keeps the enumeration under ~2^26 candidates.
inline RhoResult rho_exhaustive(u64 q, u64 n) {
  if (n < 1) throw std::invalid_argument("rho: n must be >= 1");
  auto fac = factorize(q);
  if (fac.size() != 1) throw std::invalid_argument("rho: q must be a prime power");
  u64 p = fac[0].first, t = fac[0].second;
  u64 Q = ipow_checked(q, n);
  if (double(Q) * std::log2(double(q)) > 26.0)
    throw budget_error("rho: function space exceeds the enumeration budget");

  FieldCtx big = make_field(p, t * n);
  FieldCtx sub = make_field(p, t);
  SubfieldView view = make_subfield_view(big, sub);

  std::vector<std::vector<std::uint8_t>> aff;
  aff.reserve(Q * q);
  std::vector<std::uint8_t> tr(Q);
  for (u64 a = 0; a < Q; ++a) {
    for (u64 y = 0; y < Q; ++y) tr[y] = std::uint8_t(view.trace_to_sub(big.mul(a, y)));
    for (u64 b = 0; b < q; ++b) {
      std::vector<std::uint8_t> h(Q);
      for (u64 y = 0; y < Q; ++y) h[y] = std::uint8_t(sub.add(tr[y], b));
      aff.push_back(std::move(h));
    }
  }

  u64 best = 0;
  std::vector<std::uint8_t> g(Q, 0);
  for (;;) {
    u64 cur = ~u64(0);
    for (const auto& h : aff) {
      u64 dist = 0;
      for (u64 y = 0; y < Q && dist < cur; ++y)
        if (g[y] != h[y]) ++dist;
      cur = std::min(cur, dist);
      if (cur <= best) break;
    }
    best = std::max(best, cur);
    u64 i = 0;
    while (i < Q && ++g[i] == q) g[i++] = 0;
    if (i == Q) break;
  }

  RhoResult out;
  out.q = q;
  out.n = n;
  out.rho = best;
  u64 lead = Q / q * (q - 1);
  out.mu = double(std::int64_t(lead) - std::int64_t(best)) * double(q) / std::sqrt(double(Q));
  out.mu_exact = exact_mu_string(q, n, best);
  return out;
}

// ---------------------------------------------------------------------------
// Construction certificate

struct CertReport {
  double epsilon = 0.0;       // max |G(chi)/q^{n/2} + 1| over chi of order dividing v
  double fT_term_max = 0.0;   // affine correlation maximand restricted to T
  double fT_bound = 0.0;      // 1 + epsilon v q
  double fS_hat_max = 0.0;    // max |fS_hat(a, lambda)|
  double fS_envelope_nat = 0.0;
  double fS_envelope_log2 = 0.0;
  double mu = 0.0;
  double mu_raw = 0.0;
  double mu_decomp_bound = 0.0;  // fT_bound + q * fS_hat_max
  double mu_affine = 0.0;        // q^{n/2}(q - 1)
  elem witness_a = 0;
  u64 witness_b = 0;
  u64 witness_distance = 0;
  bool fT_pass = false;
  bool fS_pass = false;
  bool decomp_pass = false;
  bool beats_affine = false;
  bool chain_pass = false;  // the decomposition bound itself beats the affine value

  bool pass() const {
    return fT_pass && fS_pass && decomp_pass && beats_affine && chain_pass;
  }
};

inline CertReport certify_construction(const SpectralCtx& sc, const ConstructionParams& pr,
                                       const std::vector<std::uint8_t>& values,
                                       const std::vector<std::uint8_t>& s_mask) {
  detail::check_table(sc, values);
  const u64 Q = sc.big->order, q = sc.q, v = pr.v;
  if (s_mask.size() != Q) throw std::invalid_argument("certify: mask length must be q^n");
  if (q != pr.q || Q != ipow_checked(q, pr.n))
    throw std::invalid_argument("certify: parameters do not match the context");

  CertReport rep;
  const double qn2 = std::sqrt(double(Q));
  for (u64 w = pr.r;; w *= pr.r) {
    for (auto& [twist, gsum] : gauss_sums_of_order(*sc.big, w))
      rep.epsilon = std::max(rep.epsilon, std::abs(gsum / qn2 + 1.0));
    if (w == v) break;
  }

  std::vector<std::uint8_t> t_mask(Q);
  for (u64 y = 0; y < Q; ++y) t_mask[y] = s_mask[y] ? 0 : 1;
  std::vector<std::vector<cplx>> ghat_T, ghat_S;
  ghat_T.reserve(q - 1);
  ghat_S.reserve(q - 1);
  for (u64 l = 1; l < q; ++l) {
    ghat_T.push_back(fourier_restricted(sc, values, t_mask, l));
    ghat_S.push_back(fourier_restricted(sc, values, s_mask, l));
  }
  rep.fT_term_max = detail::max_affine_correlation(sc, ghat_T).value;
  for (const auto& gh : ghat_S)
    for (const auto& z : gh) rep.fS_hat_max = std::max(rep.fS_hat_max, std::abs(z));

  auto mu = mu_spectral(sc, values);
  rep.mu = mu.mu;
  rep.mu_raw = mu.raw;
  rep.witness_a = mu.witness_a;
  rep.witness_b = mu.witness_b;
  rep.witness_distance = mu.distance;

  rep.fT_bound = 1.0 + rep.epsilon * double(v) * double(q);
  rep.mu_decomp_bound = rep.fT_bound + double(q) * rep.fS_hat_max;
  rep.mu_affine = qn2 * double(q - 1);
  const double scale = 308.0 * std::pow(double(q), 2.5);
  const double ratio = 2.0 * double(q) * double(q) * double(v);
  rep.fS_envelope_nat = scale * std::sqrt(std::log(ratio) / double(v));
  rep.fS_envelope_log2 = scale * std::sqrt(std::log2(ratio) / double(v));

  rep.fT_pass = rep.fT_term_max <= rep.fT_bound + 1e-9;
  rep.fS_pass = rep.fS_hat_max <= rep.fS_envelope_nat + 1e-9;
  rep.decomp_pass = rep.mu <= rep.mu_decomp_bound + 1e-9;
  rep.beats_affine = rep.mu < rep.mu_affine;
  rep.chain_pass = rep.decomp_pass && rep.mu_decomp_bound < rep.mu_affine;
  return rep;
}

/// Owns the contexts backing a loaded function table.
struct TableEnv {
  FieldCtx big, sub;
  SubfieldView view;
  SpectralCtx sc;

  explicit TableEnv(const FunctionTable& tab, u64 log_cap = u64(1) << 22)
      : big(make_field_with_modulus(tab.p, tab.modulus, log_cap)),
        sub(make_field(tab.p, tab.t)),
        view(make_subfield_view(big, sub)),
        sc(make_spectral(view)) {}
  TableEnv(const TableEnv&) = delete;
  TableEnv& operator=(const TableEnv&) = delete;
};

}  // namespace qnl
