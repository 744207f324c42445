#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "qnl/common.hpp"
#include "qnl/numtheory.hpp"

namespace qnl {

// Field elements are canonical indices: the element sum c_i x^i of
// F_{p^d} = F_p[x]/(f) is the integer sum c_i p^i.  Index 0 is zero,
// index 1 is one, and for d > 1 index p is the class of x.
using elem = std::uint64_t;

namespace detail {

// Dense polynomials over Z_p, lowest coefficient first, trailing zeros
// trimmed.  Only used during field construction (irreducibility tests);
// element arithmetic has its own paths below.
using ZpPoly = std::vector<std::uint32_t>;

inline void zp_trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline ZpPoly zp_mulmod(const ZpPoly& a, const ZpPoly& b, const ZpPoly& f, u64 p) {
  if (a.empty() || b.empty()) return {};
  std::vector<u64> acc(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      acc[i + j] = (acc[i + j] + mulmod_u64(a[i], b[j], p)) % p;
  }
  std::size_t deg_f = f.size() - 1;
  for (std::size_t i = acc.size(); i-- > deg_f;) {
    u64 c = acc[i];
    if (!c) continue;
    // acc -= c * x^{i-deg_f} * f; the leading term cancels by construction.
    for (std::size_t j = 0; j < deg_f; ++j) {
      if (!f[j]) continue;
      acc[i - deg_f + j] = (acc[i - deg_f + j] + mulmod_u64(c, p - f[j], p)) % p;
    }
    acc[i] = 0;
  }
  ZpPoly r;
  r.reserve(deg_f);
  for (std::size_t i = 0; i < std::min(acc.size(), deg_f); ++i) r.push_back(std::uint32_t(acc[i]));
  zp_trim(r);
  return r;
}

inline ZpPoly zp_powmod(ZpPoly base, u64 e, const ZpPoly& f, u64 p) {
  ZpPoly r{1};
  while (e) {
    if (e & 1) r = zp_mulmod(r, base, f, p);
    base = zp_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

inline ZpPoly zp_mod(ZpPoly a, const ZpPoly& b, u64 p) {
  zp_trim(a);
  std::size_t db = b.size() - 1;
  u64 lead_inv = powmod_u64(b.back(), p - 2, p);
  while (a.size() > db) {
    u64 c = mulmod_u64(a.back(), lead_inv, p);
    std::size_t shift = a.size() - 1 - db;
    if (c)
      for (std::size_t j = 0; j < b.size(); ++j) {
        u64 sub = mulmod_u64(c, b[j], p);
        a[shift + j] = std::uint32_t((a[shift + j] + p - sub) % p);
      }
    zp_trim(a);
    if (a.empty()) break;
  }
  return a;
}

inline ZpPoly zp_gcd(ZpPoly a, ZpPoly b, u64 p) {
  zp_trim(a);
  zp_trim(b);
  while (!b.empty()) {
    a = zp_mod(std::move(a), b, p);
    std::swap(a, b);
  }
  return a;
}

inline bool zp_irreducible(const ZpPoly& f, u64 p) {
  std::size_t d = f.size() - 1;
  if (d == 1) return true;
  ZpPoly x{0, 1};
  // Rabin: x^{p^d} = x mod f, and gcd(x^{p^{d/L}} - x, f) = 1 for prime L | d.
  ZpPoly xp = zp_powmod(x, ipow_checked(p, d), f, p);
  if (xp != x) return false;
  for (auto [L, e] : factorize(d)) {
    (void)e;
    ZpPoly g = zp_powmod(x, ipow_checked(p, d / L), f, p);
    ZpPoly diff = g;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = std::uint32_t((diff[1] + p - 1) % p);
    zp_trim(diff);
    ZpPoly gc = zp_gcd(std::move(diff), f, p);
    if (gc.size() != 1) return false;
  }
  return true;
}

}  // namespace detail

struct FieldCtx {
  u64 p = 0;
  u64 deg = 0;
  u64 order = 0;  // p^deg
  std::vector<std::uint32_t> modulus;  // c_0..c_deg, monic
  elem generator = 0;
  u64 log_cap = 0;
  bool has_tables = false;
  std::vector<std::uint32_t> antilog_;  // g^k for k < order-1
  std::vector<std::uint32_t> log_;      // inverse map; log_[0] = 0xffffffff
  std::vector<std::uint8_t> trace_basis_;  // absolute trace of x^i
  u64 trace_mask2_ = 0;                    // p == 2: bits i with Tr(x^i) = 1
  u64 mod_mask2_ = 0;                      // p == 2: modulus as bitmask

  bool is_prime_field() const { return deg == 1; }

  void digits_of(elem y, std::uint32_t* out) const {
    for (u64 i = 0; i < deg; ++i) {
      out[i] = std::uint32_t(y % p);
      y /= p;
    }
  }

  elem add(elem x, elem y) const {
    if (p == 2) return x ^ y;
    if (deg == 1) {
      elem s = x + y;
      return s >= p ? s - p : s;
    }
    elem r = 0, mul = 1;
    for (u64 i = 0; i < deg; ++i) {
      r += (x % p + y % p) % p * mul;
      x /= p;
      y /= p;
      mul *= p;
    }
    return r;
  }

  elem neg(elem x) const {
    if (p == 2) return x;
    if (deg == 1) return x ? p - x : 0;
    elem r = 0, mul = 1;
    for (u64 i = 0; i < deg; ++i) {
      r += (p - x % p) % p * mul;
      x /= p;
      mul *= p;
    }
    return r;
  }

  elem sub(elem x, elem y) const { return add(x, neg(y)); }

  elem mul(elem x, elem y) const {
    if (x == 0 || y == 0) return 0;
    if (has_tables) {
      u64 k = u64(log_[x]) + log_[y];
      u64 g = order - 1;
      if (k >= g) k -= g;
      return antilog_[k];
    }
    return mul_direct(x, y);
  }

  elem mul_direct(elem x, elem y) const {
    if (x == 0 || y == 0) return 0;
    if (deg == 1) return mulmod_u64(x, y, p);
    if (p == 2) {
      u64 r = 0, a = x;
      while (y) {
        if (y & 1) r ^= a;
        y >>= 1;
        a <<= 1;
        if (a >> deg & 1) a ^= mod_mask2_;
      }
      return r;
    }
    // Schoolbook product of digit vectors, then reduction by the monic
    // modulus: x^deg = -(c_0 + c_1 x + ... + c_{deg-1} x^{deg-1}).
    // deg >= 2 forces p < 2^32; with per-product reduction for large p the
    // accumulators stay far from overflow.
    const bool big_p = p > (u64(1) << 21);
    std::uint32_t xa[64], ya[64];
    digits_of(x, xa);
    digits_of(y, ya);
    u64 acc[127] = {0};
    for (u64 i = 0; i < deg; ++i) {
      if (!xa[i]) continue;
      for (u64 j = 0; j < deg; ++j) {
        u64 t = big_p ? mulmod_u64(xa[i], ya[j], p) : u64(xa[i]) * ya[j];
        acc[i + j] += t;
      }
    }
    for (u64 i = 2 * deg - 1; i-- > deg;) {
      u64 c = acc[i] % p;
      if (!c) continue;
      for (u64 j = 0; j < deg; ++j) {
        if (!modulus[j]) continue;
        u64 t = big_p ? mulmod_u64(c, p - modulus[j], p) : c * (p - modulus[j]) % p;
        acc[i - deg + j] += t;
      }
    }
    elem r = 0, mulp = 1;
    for (u64 i = 0; i < deg; ++i) {
      r += acc[i] % p * mulp;
      mulp *= p;
    }
    return r;
  }

  elem pow(elem x, u64 e) const {
    elem r = 1;
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  elem inv(elem x) const {
    if (x == 0) throw std::domain_error("field inverse of zero");
    if (has_tables) {
      u64 g = order - 1;
      u64 k = (g - log_[x]) % g;
      return antilog_[k];
    }
    return pow(x, order - 2);
  }

  u64 dlog(elem y) const;

  /// Absolute trace down to the prime field, as an integer in [0, p).
  std::uint32_t trace_abs(elem y) const {
    if (p == 2) return std::uint32_t(std::popcount(y & trace_mask2_) & 1);
    u64 s = 0;
    for (u64 i = 0; i < deg; ++i) {
      s += y % p * trace_basis_[i];
      y /= p;
    }
    return std::uint32_t(s % p);
  }

  /// Trace into the subfield of degree e over the prime field (e | deg).
  /// The result is returned in this field's representation.
  elem trace_to(u64 e, elem y) const {
    if (e == 0 || deg % e != 0) throw std::invalid_argument("trace_to: e must divide deg");
    u64 q = ipow_checked(p, e);
    elem acc = y, cur = y;
    for (u64 i = 1; i < deg / e; ++i) {
      cur = pow(cur, q);
      acc = add(acc, cur);
    }
    return acc;
  }

  /// Norm into the subfield of degree e over the prime field (e | deg).
  elem norm_to(u64 e, elem y) const {
    if (e == 0 || deg % e != 0) throw std::invalid_argument("norm_to: e must divide deg");
    if (y == 0) return 0;
    u64 q = ipow_checked(p, e);
    return pow(y, (order - 1) / (q - 1));
  }
};

inline u64 FieldCtx::dlog(elem y) const {
  if (y == 0) throw std::domain_error("dlog of zero");
  if (has_tables) return log_[y];
  // Baby-step giant-step.
  u64 g = order - 1;
  u64 m = u64(std::ceil(std::sqrt(double(g))));
  std::unordered_map<u64, u64> baby;
  baby.reserve(std::size_t(m) * 2);
  elem cur = 1;
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(cur, j);
    cur = mul(cur, generator);
  }
  elem giant = inv(pow(generator, m));
  elem x = y;
  for (u64 i = 0; i <= m; ++i) {
    auto it = baby.find(x);
    if (it != baby.end()) return (i * m + it->second) % g;
    x = mul(x, giant);
  }
  throw std::logic_error("dlog: not found");
}

inline FieldCtx make_field_with_modulus(u64 p, std::vector<std::uint32_t> modulus,
                                        u64 log_cap = (1ull << 22));

/// Builds F_{p^d}.  The modulus is the monic irreducible of degree d whose
/// non-leading coefficient vector, read as a base-p integer, is smallest
/// (degree 1 uses the polynomial x, so prime-field elements are plain
/// residues).  The generator is the primitive element of smallest index.
/// Log/antilog tables are built iff p^d <= log_cap; larger fields fall back
/// to direct arithmetic and baby-step/giant-step logs.
inline FieldCtx make_field(u64 p, u64 d, u64 log_cap = (1ull << 22)) {
  if (!is_prime_u64(p)) throw std::invalid_argument("make_field: p must be prime");
  if (d < 1) throw std::invalid_argument("make_field: d must be >= 1");
  u64 order = ipow_checked(p, d);
  std::vector<std::uint32_t> mod;
  if (d == 1) {
    mod = {0, 1};
  } else {
    for (u64 j = 1;; ++j) {
      if (j >= order) throw std::logic_error("make_field: no irreducible found");
      if (j % p == 0) continue;  // constant term zero would make x a factor
      detail::ZpPoly f(d + 1, 0);
      u64 jj = j;
      for (u64 i = 0; i < d; ++i) {
        f[i] = std::uint32_t(jj % p);
        jj /= p;
      }
      f[d] = 1;
      if (detail::zp_irreducible(f, p)) {
        mod.assign(f.begin(), f.end());
        break;
      }
    }
  }
  return make_field_with_modulus(p, std::move(mod), log_cap);
}

inline FieldCtx make_field_with_modulus(u64 p, std::vector<std::uint32_t> modulus, u64 log_cap) {
  if (!is_prime_u64(p)) throw std::invalid_argument("field: p must be prime");
  if (modulus.size() < 2 || modulus.back() != 1)
    throw std::invalid_argument("field: modulus must be monic of degree >= 1");
  for (auto c : modulus)
    if (c >= p) throw std::invalid_argument("field: modulus coefficient out of range");
  u64 d = modulus.size() - 1;
  if (d > 1 && !detail::zp_irreducible(detail::ZpPoly(modulus.begin(), modulus.end()), p))
    throw std::invalid_argument("field: modulus is reducible");

  FieldCtx F;
  F.p = p;
  F.deg = d;
  F.order = ipow_checked(p, d);
  F.modulus = std::move(modulus);
  F.log_cap = log_cap;
  if (p == 2) {
    for (u64 i = 0; i <= d; ++i)
      if (F.modulus[i]) F.mod_mask2_ |= u64(1) << i;
  }

  u64 g = F.order - 1;
  if (g == 1) {
    F.generator = 1;
  } else {
    auto fac = factorize(g);
    for (elem cand = 2;; ++cand) {
      if (cand >= F.order) throw std::logic_error("field: no generator found");
      bool ok = true;
      for (auto [q, e] : fac) {
        (void)e;
        if (F.pow(cand, g / q) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        F.generator = cand;
        break;
      }
    }
  }

  if (F.order <= log_cap && F.order <= (u64(1) << 32)) {
    F.antilog_.resize(g);
    F.log_.assign(F.order, 0xffffffffu);
    elem cur = 1;
    for (u64 k = 0; k < g; ++k) {
      F.antilog_[k] = std::uint32_t(cur);
      F.log_[cur] = std::uint32_t(k);
      cur = F.mul_direct(cur, F.generator);
    }
    if (cur != 1) throw std::logic_error("field: generator order mismatch");
    F.has_tables = true;
  }

  // Absolute traces of the power basis 1, x, ..., x^{d-1}.
  F.trace_basis_.resize(d);
  for (u64 i = 0; i < d; ++i) {
    elem xi = (d == 1) ? elem(1) : F.pow(elem(p), i);
    elem acc = xi, cur = xi;
    for (u64 k = 1; k < d; ++k) {
      cur = F.pow(cur, p);
      acc = F.add(acc, cur);
    }
    if (acc >= p) throw std::logic_error("field: basis trace not in prime subfield");
    F.trace_basis_[i] = std::uint8_t(acc);
    if (p == 2 && acc) F.trace_mask2_ |= u64(1) << i;
  }
  return F;
}

// ---------------------------------------------------------------------------
// Subfield view

/// Identifies an independently built F_q with the matching subfield of a
/// bigger field: the modulus of `sub` is rooted inside `big` (smallest root
/// by element index) and elements map through that root.  Both contexts
/// must outlive the view.
struct SubfieldView {
  const FieldCtx* big = nullptr;
  const FieldCtx* sub = nullptr;
  elem root = 0;
  std::vector<elem> embed_;                               // sub index -> big index
  std::vector<std::pair<elem, std::uint32_t>> from_big_;  // sorted by big index

  elem to_big(elem s) const { return embed_[s]; }

  std::uint32_t to_sub(elem b) const {
    auto it = std::lower_bound(from_big_.begin(), from_big_.end(), b,
                               [](const auto& pr, elem v) { return pr.first < v; });
    if (it == from_big_.end() || it->first != b)
      throw std::domain_error("SubfieldView: element not in subfield");
    return it->second;
  }

  /// Trace from the big field onto the subfield, as a subfield index.
  std::uint32_t trace_to_sub(elem y) const { return to_sub(big->trace_to(sub->deg, y)); }
};

inline SubfieldView make_subfield_view(const FieldCtx& big, const FieldCtx& sub) {
  if (big.p != sub.p) throw std::invalid_argument("subfield: characteristic mismatch");
  if (sub.deg == 0 || big.deg % sub.deg != 0)
    throw std::invalid_argument("subfield: degree must divide");
  SubfieldView v;
  v.big = &big;
  v.sub = &sub;
  u64 q = sub.order;

  // The subfield inside big is zero plus the cyclic group of order q-1
  // generated by G^{(Q-1)/(q-1)}.
  std::vector<elem> members{0};
  elem h = big.pow(big.generator, (big.order - 1) / (q - 1));
  elem cur = 1;
  for (u64 i = 0; i + 1 < q; ++i) {
    members.push_back(cur);
    cur = big.mul(cur, h);
  }
  std::sort(members.begin(), members.end());

  elem root = 0;
  bool found = false;
  for (elem c : members) {
    // Evaluate sub's modulus at c; coefficients < p embed as constants.
    elem acc = 0;
    for (std::size_t i = sub.modulus.size(); i-- > 0;)
      acc = big.add(big.mul(acc, c), sub.modulus[i]);
    if (acc == 0) {
      root = c;
      found = true;
      break;
    }
  }
  if (!found) throw std::logic_error("subfield: modulus has no root in big field");
  v.root = root;

  v.embed_.resize(q);
  std::vector<std::uint32_t> dig(sub.deg);
  for (elem s = 0; s < q; ++s) {
    elem ss = s;
    for (u64 i = 0; i < sub.deg; ++i) {
      dig[i] = std::uint32_t(ss % sub.p);
      ss /= sub.p;
    }
    elem acc = 0;
    for (std::size_t i = dig.size(); i-- > 0;) acc = big.add(big.mul(acc, root), dig[i]);
    v.embed_[s] = acc;
  }
  v.from_big_.reserve(q);
  for (elem s = 0; s < q; ++s) v.from_big_.push_back({v.embed_[s], std::uint32_t(s)});
  std::sort(v.from_big_.begin(), v.from_big_.end());
  return v;
}

// ---------------------------------------------------------------------------
// Coset geometry

/// Classes of the index-v subgroup H = {y : dlog(y) mod v = 0} of the
/// multiplicative group, plus the shift the F_q^* action induces on class
/// ids: multiplying by gamma^j maps class c to (c + j*shift) mod v.
struct CosetMap {
  u64 v = 0;
  u64 q = 0;
  u64 shift = 0;       // image of the F_q^* generator in Z_v
  u64 orbit_size = 0;  // size of every F_q^* orbit on class ids
  std::vector<std::uint32_t> cls;  // element -> class id; cls[0] = 0xffffffff

  std::uint32_t class_of(elem y) const {
    if (y == 0) throw std::domain_error("class_of zero");
    return cls[y];
  }
};

inline CosetMap make_coset_map(const FieldCtx& F, u64 q, u64 v) {
  if (v < 1 || (F.order - 1) % v != 0)
    throw std::invalid_argument("coset_map: v must divide the group order");
  if (q < 2 || (F.order - 1) % (q - 1) != 0)
    throw std::invalid_argument("coset_map: q-1 must divide the group order");
  if (!F.has_tables) throw budget_error("coset_map: field too large for dense class table");
  CosetMap cm;
  cm.v = v;
  cm.q = q;
  cm.shift = ((F.order - 1) / (q - 1)) % v;
  cm.orbit_size = v / std::gcd(cm.shift, v);
  cm.cls.assign(F.order, 0xffffffffu);
  for (u64 k = 0; k + 1 < F.order; ++k) cm.cls[F.antilog_[k]] = std::uint32_t(k % v);
  return cm;
}

}  // namespace qnl
