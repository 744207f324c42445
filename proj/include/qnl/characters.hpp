#pragma once

#include <complex>
#include <numeric>
#include <vector>

#include "qnl/field.hpp"

namespace qnl {

using cplx = std::complex<double>;

/// exp(2 pi i k / n) for k < n.
inline std::vector<cplx> unity_roots(u64 n) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  std::vector<cplx> z(n);
  for (u64 k = 0; k < n; ++k) {
    double a = two_pi * double(k) / double(n);
    z[k] = {std::cos(a), std::sin(a)};
  }
  if (n % 2 == 0) z[n / 2] = {-1.0, 0.0};
  z[0] = {1.0, 0.0};
  return z;
}

/// The canonical additive character y -> zeta_p^{Tr(y)}.
struct AdditiveChar {
  const FieldCtx* F = nullptr;
  std::vector<cplx> zeta;  // p-th roots of unity

  cplx operator()(elem y) const { return zeta[F->trace_abs(y)]; }
};

inline AdditiveChar make_additive_char(const FieldCtx& F) {
  return {&F, unity_roots(F.p)};
}

/// Multiplicative character of order w on F^*: chi(g^k) = zeta_w^{twist*k},
/// extended by chi(0) = 0.  Canonical characters keep gcd(twist, w) = 1 so
/// the stated order is exact.
struct MultChar {
  const FieldCtx* F = nullptr;
  u64 order = 1;
  u64 twist = 0;
  std::vector<cplx> zeta;  // w-th roots of unity

  cplx operator()(elem y) const {
    if (y == 0) return {0.0, 0.0};
    return zeta[mulmod_u64(twist, F->dlog(y) % order, order)];
  }
};

inline MultChar make_mult_char(const FieldCtx& F, u64 w, u64 j = 1) {
  if (w < 1 || (F.order - 1) % w != 0)
    throw std::invalid_argument("mult_char: order must divide the group order");
  j %= w;
  if (std::gcd(j, w) != 1) throw std::invalid_argument("mult_char: twist must be coprime to order");
  return {&F, w, j, unity_roots(w)};
}

// ---------------------------------------------------------------------------
// Gauss sums

/// Gauss sums G(chi) = sum_{y != 0} chi(y) psi(y) for every character of
/// exact order w, keyed by twist.  A single pass over the group fills a
/// (dlog mod w) x trace histogram; each character is then a w-term sum over
/// the histogram rows.  w = 1 yields the trivial character's value -1.
inline std::vector<std::pair<u64, cplx>> gauss_sums_of_order(const FieldCtx& F, u64 w) {
  if (w < 1 || (F.order - 1) % w != 0)
    throw std::invalid_argument("gauss_sums: order must divide the group order");
  std::vector<u64> counts(w * F.p, 0);
  if (F.has_tables) {
    for (u64 k = 0; k + 1 < F.order; ++k)
      ++counts[(k % w) * F.p + F.trace_abs(F.antilog_[k])];
  } else {
    elem cur = 1;
    for (u64 k = 0; k + 1 < F.order; ++k) {
      ++counts[(k % w) * F.p + F.trace_abs(cur)];
      cur = F.mul(cur, F.generator);
    }
  }
  auto zp = unity_roots(F.p);
  std::vector<cplx> row(w);
  for (u64 c = 0; c < w; ++c) {
    cplx s{0.0, 0.0};
    for (u64 tr = 0; tr < F.p; ++tr)
      if (counts[c * F.p + tr]) s += double(counts[c * F.p + tr]) * zp[tr];
    row[c] = s;
  }
  auto zw = unity_roots(w);
  std::vector<std::pair<u64, cplx>> out;
  for (u64 j = 0; j < w; ++j) {
    if (std::gcd(j, w) != 1) continue;
    cplx s{0.0, 0.0};
    for (u64 c = 0; c < w; ++c) s += zw[j * c % w] * row[c];
    out.push_back({j, s});
  }
  return out;
}

/// Plain elementwise evaluation, as an independent cross-check of the
/// histogram path.
inline cplx gauss_direct(const FieldCtx& F, const MultChar& chi) {
  auto psi = make_additive_char(F);
  cplx s{0.0, 0.0};
  if (F.has_tables) {
    for (elem y = 1; y < F.order; ++y) s += chi(y) * psi(y);
  } else {
    elem cur = 1;
    for (u64 k = 0; k + 1 < F.order; ++k) {
      s += chi(cur) * psi(cur);
      cur = F.mul(cur, F.generator);
    }
  }
  return s;
}

inline cplx gauss_sum_of(const FieldCtx& F, u64 w, u64 j) {
  for (auto& [tw, g] : gauss_sums_of_order(F, w))
    if (tw == j % w) return g;
  throw std::invalid_argument("gauss_sum_of: twist not coprime to order");
}

// ---------------------------------------------------------------------------
// Norm lift

/// chi' o Norm for a character chi' on the subfield, expressed as a
/// character of the big field with the same order.  Writing N(G) = g^D in
/// the subfield, the lift of twist j is twist j*D mod w.
inline MultChar lift_char(const SubfieldView& v, const MultChar& chi_sub) {
  const FieldCtx& big = *v.big;
  const FieldCtx& sub = *v.sub;
  if (chi_sub.F != &sub) throw std::invalid_argument("lift_char: character not on the subfield");
  u64 w = chi_sub.order;
  elem ng = big.pow(big.generator, (big.order - 1) / (sub.order - 1));
  u64 D = sub.dlog(v.to_sub(ng));
  u64 j = mulmod_u64(chi_sub.twist, D % w, w);
  return make_mult_char(big, w, j);
}

struct DhCheck {
  MultChar lifted;
  cplx sub_sum;    // G(chi') on the subfield
  cplx lift_sum;   // G(lift) measured on the big field
  cplx predicted;  // -(-G(chi'))^s
  double residual = 0.0;
};

/// Measures both sides of the norm-lift identity
///   G(chi' o Norm) = -(-G(chi'))^s,  s = [big : sub].
inline DhCheck dht_check(const SubfieldView& v, const MultChar& chi_sub) {
  DhCheck out;
  out.lifted = lift_char(v, chi_sub);
  out.sub_sum = gauss_sum_of(*v.sub, chi_sub.order, chi_sub.twist);
  out.lift_sum = gauss_sum_of(*v.big, out.lifted.order, out.lifted.twist);
  u64 s = v.big->deg / v.sub->deg;
  out.predicted = -cpow_int(-out.sub_sum, s);
  out.residual = std::abs(out.lift_sum - out.predicted);
  return out;
}

// ---------------------------------------------------------------------------
// Coset indicators

/// Max error of rebuilding coset-class indicators from the order-v character
/// family: for sampled y and every class c,
///   (1/v) sum_j zeta_v^{-jc} zeta_v^{j dlog(y)}  vs  [class_of(y) == c].
inline double indicator_reconstruction(const FieldCtx& F, const CosetMap& cm,
                                       u64 max_samples = 64) {
  u64 v = cm.v;
  auto zv = unity_roots(v);
  u64 group = F.order - 1;
  u64 step = group / std::min(group, max_samples);
  double worst = 0.0;
  for (u64 k = 0; k < group; k += step) {
    elem y = F.has_tables ? elem(F.antilog_[k]) : F.pow(F.generator, k);
    u64 cls = cm.class_of(y);
    u64 dl = F.dlog(y) % v;
    for (u64 c = 0; c < v; ++c) {
      cplx acc{0.0, 0.0};
      for (u64 j = 0; j < v; ++j) acc += zv[j * dl % v] * std::conj(zv[j * c % v]);
      acc /= double(v);
      double want = (cls == c) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(acc - cplx{want, 0.0}));
    }
  }
  return worst;
}

}  // namespace qnl
