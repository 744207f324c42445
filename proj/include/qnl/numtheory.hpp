#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnl/common.hpp"

namespace qnl {

using u64 = std::uint64_t;
using i64 = std::int64_t;

inline u64 mulmod_u64(u64 a, u64 b, u64 m) {
  return u64((unsigned __int128)a * b % m);
}

inline u64 powmod_u64(u64 a, u64 e, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Trial-division factorization; fine for the magnitudes this library uses
/// (group orders of desk-scale fields, phi arguments, r^e moduli).
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> f;
  for (u64 p = 2; (unsigned __int128)p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    f.push_back({p, e});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

inline u64 euler_phi(u64 n) {
  u64 r = n;
  for (auto [p, e] : factorize(n)) r -= r / p;
  return r;
}

/// Multiplicative order of a modulo m.  Accepts negative a (reduced mod m).
inline u64 ord_mod(i64 a, u64 m) {
  if (m < 2) throw std::invalid_argument("ord_mod: modulus must be >= 2");
  u64 x = u64(((a % i64(m)) + i64(m)) % i64(m));
  if (std::gcd(x, m) != 1) throw std::invalid_argument("ord_mod: argument not coprime to modulus");
  u64 order = euler_phi(m);
  for (auto [p, e] : factorize(order)) {
    for (int i = 0; i < e; ++i) {
      if (powmod_u64(x, order / p, m) == 1)
        order /= p;
      else
        break;
    }
  }
  return order;
}

/// True iff a generates the full unit group mod m (m with cyclic units).
inline bool is_primitive_root(i64 a, u64 m) {
  u64 x = u64(((a % i64(m)) + i64(m)) % i64(m));
  if (std::gcd(x, m) != 1) return false;
  return ord_mod(i64(x), m) == euler_phi(m);
}

inline u64 modinv_u64(u64 a, u64 m) {
  i64 t = 0, newt = 1;
  i64 r = i64(m), newr = i64(a % m);
  while (newr != 0) {
    i64 q = r / newr;
    t = std::exchange(newt, t - q * newt);
    r = std::exchange(newr, r - q * newr);
  }
  if (r != 1) throw std::invalid_argument("modinv: not invertible");
  return u64(t < 0 ? t + i64(m) : t);
}

// ---------------------------------------------------------------------------
// Semiprimitivity

struct SemiprimitiveCert {
  u64 p = 0, r = 0, e = 0;
  u64 v = 0;  // r^e
  bool r_prime = false;
  bool r_gt_3 = false;
  bool r_mod_4_eq_3 = false;
  bool neg_p_primitive_root = false;
  u64 m = 0;  // ord of p mod v when all checks pass; equals phi(v)/2, odd
  bool pass() const { return r_prime && r_gt_3 && r_mod_4_eq_3 && neg_p_primitive_root; }
};

/// Checks the parameter gate used throughout: r prime > 3 with r = 3 mod 4
/// and -p a primitive root mod r^e.  When it passes, ord_{r^e}(p) equals
/// phi(r^e)/2 and is odd; both facts are asserted, not assumed.
inline SemiprimitiveCert semiprimitive_check(u64 p, u64 r, u64 e) {
  if (p < 2 || !is_prime_u64(p)) throw std::invalid_argument("semiprimitive_check: p must be prime");
  if (e < 1) throw std::invalid_argument("semiprimitive_check: e must be >= 1");
  SemiprimitiveCert c;
  c.p = p;
  c.r = r;
  c.e = e;
  c.v = ipow_checked(r, e);
  c.r_prime = is_prime_u64(r);
  c.r_gt_3 = r > 3;
  c.r_mod_4_eq_3 = (r % 4 == 3);
  if (c.r_prime && c.r_gt_3 && r != p) {
    c.neg_p_primitive_root = is_primitive_root(-i64(p % c.v), c.v);
  }
  if (c.pass()) {
    c.m = ord_mod(i64(p), c.v);
    if (c.m != euler_phi(c.v) / 2 || c.m % 2 == 0)
      throw std::logic_error("semiprimitive_check: order invariant violated");
  }
  return c;
}

/// All primes r <= limit passing semiprimitive_check(p, r, e).
inline std::vector<u64> scan_r(u64 p, u64 limit, u64 e = 2) {
  std::vector<u64> out;
  for (u64 r = 3; r <= limit; r += 2) {
    if (!is_prime_u64(r)) continue;
    if (semiprimitive_check(p, r, e).pass()) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Class numbers and Gauss-sum coefficients

/// Class number h(-r) for prime r = 3 mod 4, r > 3, counted over reduced
/// primitive binary quadratic forms (a, b, c) of discriminant -r:
/// b^2 - 4ac = -r, |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
inline u64 class_number(u64 r) {
  if (!is_prime_u64(r) || r % 4 != 3 || r <= 3)
    throw std::invalid_argument("class_number: need a prime r > 3 with r = 3 mod 4");
  u64 h = 0;
  for (u64 b = 1; 3 * b * b <= r; b += 2) {
    u64 m = (b * b + r) / 4;
    for (u64 a = b; a * a <= m; ++a) {
      if (m % a) continue;
      u64 c = m / a;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      h += (b == a || a == c) ? 1 : 2;  // b and -b distinct only off the boundary
    }
  }
  return h;
}

struct GaussCoeffs {
  i64 a = 0;  // sign fixed by the congruence below
  i64 b = 0;  // taken positive
  u64 h = 0;  // class_number(r)
  u64 k = 0;  // phi(r^d)/2, degree of the field the closed form lives on
};

/// Solves a^2 + b^2 r = 4 p^h with a, b nonzero mod p and the sign of a
/// pinned by a * p^{(k-h)/2} = -2 (mod r).  Throws unless exactly one
/// admissible pair exists.
inline GaussCoeffs solve_gauss_coeffs(u64 p, u64 t, u64 r, u64 d) {
  if (t < 1 || d < 1) throw std::invalid_argument("solve_gauss_coeffs: t and d must be >= 1");
  GaussCoeffs g;
  g.h = class_number(r);
  g.k = euler_phi(ipow_checked(r, d)) / 2;
  if ((g.k - g.h) % 2 != 0)
    throw std::logic_error("solve_gauss_coeffs: k - h must be even");
  u64 target = 4 * ipow_checked(p, g.h);
  u64 pk = powmod_u64(p % r, (g.k - g.h) / 2, r);
  std::optional<GaussCoeffs> found;
  for (u64 b = 1; b * b * r <= target; ++b) {
    u64 a2 = target - b * b * r;
    u64 a0 = u64(std::llround(std::sqrt(double(a2))));
    while (a0 * a0 > a2) --a0;
    while ((a0 + 1) * (a0 + 1) <= a2) ++a0;
    if (a0 * a0 != a2) continue;
    if (a0 % p == 0 || b % p == 0) continue;
    for (i64 a : {i64(a0), -i64(a0)}) {
      u64 am = u64(((a % i64(r)) + i64(r)) % i64(r));
      if (mulmod_u64(am, pk, r) != r - 2) continue;
      if (found) throw std::runtime_error("solve_gauss_coeffs: solution not unique");
      GaussCoeffs out = g;
      out.a = a;
      out.b = i64(b);
      found = out;
    }
  }
  if (!found) throw std::runtime_error("solve_gauss_coeffs: no solution");
  return *found;
}

inline std::complex<double> cpow_int(std::complex<double> z, u64 e) {
  std::complex<double> r{1.0, 0.0};
  while (e) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

/// The two closed-form candidates for G(chi)/q^{m/2} for characters of order
/// r^d on the degree-m extension, m = phi(r^e)/2:
///   -( -(a +- b sqrt(-r)) / (2 p^{h/2}) )^{t r^{e-d}}.
/// Both have unit modulus; which sign a given character takes depends on the
/// character, so callers match against either.
inline std::array<std::complex<double>, 2> gauss_closed_form(u64 p, u64 t, u64 r, u64 e, u64 d) {
  if (d < 1 || d > e) throw std::invalid_argument("gauss_closed_form: need 1 <= d <= e");
  GaussCoeffs g = solve_gauss_coeffs(p, t, r, d);
  u64 expo = t * ipow_checked(r, e - d);
  double denom = 2.0 * std::pow(double(p), double(g.h) / 2.0);
  std::array<std::complex<double>, 2> out;
  for (int s = 0; s < 2; ++s) {
    std::complex<double> base{double(g.a) / denom,
                              (s == 0 ? 1.0 : -1.0) * double(g.b) * std::sqrt(double(r)) / denom};
    out[s] = -cpow_int(-base, expo);
    if (std::abs(std::abs(out[s]) - 1.0) > 1e-12)
      throw std::logic_error("gauss_closed_form: candidate drifted off the unit circle");
  }
  return out;
}

struct OddDegreeResult {
  u64 s = 0;              // smallest admissible odd extension degree
  double achieved = 0.0;  // |wrap(s*beta - pi)|
  double beta = 0.0;      // argument of the closed-form value at d = e
};

/// Smallest odd s >= 1 with |wrap(s*beta - pi)| <= eps / r^{e-1}, where beta
/// is the argument of the d = e closed-form candidate.  Either sign choice
/// gives the same result (the wrapped distances agree), so the first is used.
inline OddDegreeResult find_odd_degree(u64 p, u64 t, u64 r, u64 e, double eps,
                                       u64 search_cap = 1000000) {
  if (!(eps > 0.0) || eps >= 3.141592653589793)
    throw std::invalid_argument("find_odd_degree: eps must lie in (0, pi)");
  auto cand = gauss_closed_form(p, t, r, e, e);
  OddDegreeResult res;
  res.beta = std::arg(cand[0]);
  double target = eps / std::pow(double(r), double(e - 1));
  constexpr double pi = 3.14159265358979323846;
  for (u64 s = 1; s <= search_cap; s += 2) {
    double ang = std::abs(wrap_pm_pi(double(s) * res.beta - pi));
    if (ang <= target) {
      res.s = s;
      res.achieved = ang;
      return res;
    }
  }
  throw budget_error("find_odd_degree: no odd degree within search cap");
}

// ---------------------------------------------------------------------------
// Densities

/// Partial Artin product prod_{r prime <= limit} (1 - 1/(r(r-1))).
inline double artin_constant(u64 limit = 1000000) {
  std::vector<bool> comp(limit + 1, false);
  double prod = 1.0;
  for (u64 i = 2; i <= limit; ++i) {
    if (comp[i]) continue;
    for (u64 j = i * i; j <= limit; j += i) comp[j] = true;
    prod *= 1.0 - 1.0 / (double(i) * double(i - 1));
  }
  return prod;
}

/// Density of primes r for which -p is a primitive root mod r.
inline double moree_density(u64 p, double artin = artin_constant()) {
  if (!is_prime_u64(p)) throw std::invalid_argument("moree_density: p must be prime");
  if (p == 2) return artin / 2.0;
  double sign = ((p - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  double denom = double(p) * double(p) - double(p) - 1.0;
  return artin / 2.0 * (1.0 - sign / denom);
}

struct Rat {
  i64 num = 0;
  i64 den = 1;
};

inline Rat rat_make(i64 n, i64 d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) n = -n, d = -d;
  i64 g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) n /= g, d /= g;
  return {n, d};
}

inline Rat rat_combine(Rat a, Rat b, bool subtract_product) {
  // a + b  or  a + b - a*b with exact arithmetic; throws on 64-bit overflow.
  __int128 den = (__int128)a.den * b.den;
  __int128 num = (__int128)a.num * b.den + (__int128)b.num * a.den;
  if (subtract_product) num -= (__int128)a.num * b.num;
  __int128 x = num < 0 ? -num : num, y = den;
  while (y) x = std::exchange(y, x % y);
  if (x > 1) num /= x, den /= x;
  if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
    throw std::overflow_error("rational overflow");
  return rat_make(i64(num), i64(den));
}

inline std::string rat_str(Rat r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

inline double rat_val(Rat r) { return double(r.num) / double(r.den); }

/// Inclusion-exclusion recursion over a list of admissible primes:
///   d_1 = phi(r_1 - 1)/r_1,   d_i = d_{i-1} + x_i - d_{i-1} x_i
/// with x_i = phi(r_i - 1)/r_i.  Exact rationals.
inline std::vector<Rat> density_recursion(const std::vector<u64>& rs) {
  if (rs.empty()) throw std::invalid_argument("density_recursion: empty prime list");
  std::vector<Rat> out;
  Rat d{0, 1};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    u64 r = rs[i];
    if (!is_prime_u64(r)) throw std::invalid_argument("density_recursion: entries must be prime");
    Rat x = rat_make(i64(euler_phi(r - 1)), i64(r));
    d = (i == 0) ? x : rat_combine(d, x, true);
    out.push_back(d);
  }
  return out;
}

}  // namespace qnl
