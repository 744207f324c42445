#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qnl/discrepancy.hpp"
#include "qnl/field.hpp"
#include "qnl/numtheory.hpp"

namespace qnl {

struct ConstructionParams {
  u64 p = 0, t = 0, r = 0, e = 0, s = 0;
  double epsilon_target = 0.0;
  // derived
  u64 q = 0;  // p^t
  u64 v = 0;  // r^e
  u64 m = 0;  // ord_v(p)
  u64 n = 0;  // s * m, always odd
};

inline ConstructionParams make_params(u64 p, u64 t, u64 r, u64 e, u64 s,
                                      double epsilon_target = 0.0) {
  if (t < 1) throw std::invalid_argument("params: t must be >= 1");
  if (s < 1 || s % 2 == 0) throw std::invalid_argument("params: s must be odd");
  auto cert = semiprimitive_check(p, r, e);
  if (!cert.pass())
    throw std::invalid_argument("params: (p, r, e) fails the character-sum parameter gate");
  ConstructionParams pr;
  pr.p = p;
  pr.t = t;
  pr.r = r;
  pr.e = e;
  pr.s = s;
  pr.epsilon_target = epsilon_target;
  pr.q = ipow_checked(p, t);
  if (pr.q > 255) throw std::invalid_argument("params: q exceeds the value-octet range");
  pr.v = cert.v;
  pr.m = cert.m;
  pr.n = s * cert.m;
  if (pr.n % 2 == 0) throw std::logic_error("params: n must be odd");
  if (powmod_u64(pr.q % pr.v, pr.n, pr.v) != 1)
    throw std::logic_error("params: v does not divide q^n - 1");
  return pr;
}

/// All field-level state for one construction run.  SubfieldView holds
/// pointers into the sibling fields, so the context is pinned in place.
struct ConstructionContext {
  ConstructionParams params;
  FieldCtx big;   // F_{q^n}, degree t*n over F_p
  FieldCtx subq;  // F_q
  SubfieldView view;
  CosetMap cm;

  explicit ConstructionContext(const ConstructionParams& pr, u64 log_cap = u64(1) << 22)
      : params(pr),
        big(make_field(pr.p, pr.t * pr.n, log_cap)),
        subq(make_field(pr.p, pr.t)),
        view(make_subfield_view(big, subq)),
        cm(make_coset_map(big, pr.q, pr.v)) {}
  ConstructionContext(const ConstructionContext&) = delete;
  ConstructionContext& operator=(const ConstructionContext&) = delete;
};

// ---------------------------------------------------------------------------
// Coset plan

struct CosetPlan {
  u64 v = 0, q = 0, orbit_size = 0;
  std::vector<u32> t_cosets;  // ascending class ids
  std::vector<u32> s_cosets;  // ascending class ids
  std::vector<std::int32_t> coset_value;  // class id -> value in [0, q), -1 off T
};

/// Chooses the cosets making up T and assigns each selected scalar orbit a
/// value.  The default (seed 0) is deterministic: orbits ordered by their
/// smallest class id, values handed out round-robin so every value of F_q
/// covers the same number of orbits.  A nonzero seed shuffles the orbit
/// order before selection.
inline CosetPlan plan_T(const CosetMap& cm, u64 rng_seed = 0) {
  CosetPlan plan;
  plan.v = cm.v;
  plan.q = cm.q;
  plan.orbit_size = cm.orbit_size;
  u64 per = cm.q * (cm.q - 1);
  u64 t_count = per * (cm.v / per);
  if (t_count == 0)
    throw std::domain_error("plan_T: q(q-1) exceeds v, every coset would land in the leftover set");

  std::vector<std::vector<u32>> orbits;
  std::vector<std::uint8_t> seen(cm.v, 0);
  for (u64 c = 0; c < cm.v; ++c) {
    if (seen[c]) continue;
    std::vector<u32> orb;
    u64 x = c;
    do {
      orb.push_back(u32(x));
      seen[x] = 1;
      x = (x + cm.shift) % cm.v;
    } while (x != c);
    if (orb.size() != cm.orbit_size) throw std::logic_error("plan_T: orbit size mismatch");
    orbits.push_back(std::move(orb));
  }

  u64 pick = t_count / cm.orbit_size;
  std::vector<u32> order(orbits.size());
  for (u64 i = 0; i < order.size(); ++i) order[i] = u32(i);
  if (rng_seed != 0) {
    Rng rng(rng_seed);
    rng.shuffle(order);
  }
  plan.coset_value.assign(cm.v, -1);
  for (u64 i = 0; i < pick; ++i)
    for (u32 c : orbits[order[i]]) plan.coset_value[c] = std::int32_t(i % cm.q);
  for (u64 c = 0; c < cm.v; ++c)
    (plan.coset_value[c] >= 0 ? plan.t_cosets : plan.s_cosets).push_back(u32(c));
  if (plan.t_cosets.size() != t_count) throw std::logic_error("plan_T: selected count mismatch");
  u64 s_count = plan.s_cosets.size();
  if (s_count < 1 || s_count > cm.q * cm.q - cm.q - 1)
    throw std::logic_error("plan_T: leftover coset count out of range");
  return plan;
}

inline u64 eval_f_T(const CosetMap& cm, const CosetPlan& plan, elem y) {
  if (y == 0) throw std::domain_error("eval_f_T: 0 lies outside T");
  std::int32_t val = plan.coset_value[cm.class_of(y)];
  if (val < 0) throw std::domain_error("eval_f_T: element lies outside T");
  return u64(val);
}

/// The leftover set S = {0} plus every element whose coset was not chosen
/// for T, in ascending element order.
inline std::vector<elem> s_elements(const FieldCtx& F, const CosetMap& cm,
                                    const CosetPlan& plan) {
  std::vector<elem> out{0};
  for (elem y = 1; y < F.order; ++y)
    if (plan.coset_value[cm.cls[y]] < 0) out.push_back(y);
  return out;
}

// ---------------------------------------------------------------------------
// Hyperplane-slice family and f_S

/// Index in [0, q) of the relative trace of x down to F_q.
inline u64 slice_coord(const ConstructionContext& ctx, elem x) {
  if (ctx.params.t == 1) return ctx.big.trace_abs(x);
  return ctx.view.trace_to_sub(x);
}

/// Packed set system on ground set S whose sets are the slices
/// Y_{a,z} = {y in S : Tr(ay) = z}, one per (a, z); set id = a*q + z.
/// No deduplication: M = q^{n+1} exactly, matching the certificate's count.
inline SetSystem build_slice_system(const ConstructionContext& ctx,
                                    const std::vector<elem>& s_elems) {
  const u64 Q = ctx.big.order;
  const u64 q = ctx.params.q;
  const u64 N = s_elems.size();
  if (N * Q > (u64(1) << 33)) throw budget_error("slice family exceeds the compute budget");
  SetSystem sys = make_packed_system(N, Q * q);
  parallel_chunks(
      N,
      [&](u64, u64 lo, u64 hi) {
        for (u64 i = lo; i < hi; ++i) {
          elem y = s_elems[i];
          for (u64 a = 0; a < Q; ++a)
            sys.set_bit(i, a * q + slice_coord(ctx, ctx.big.mul(a, y)));
        }
      },
      64);
  sys.finalize_sizes();
  return sys;
}

struct FsBuild {
  std::vector<std::uint8_t> values;  // aligned with the s_elements order
  std::string method;
  u64 retries = 0;
  double partition_envelope = 0.0;
  double partition_imbalance = 0.0;
  double partition_closed_nat = 0.0;
  double partition_closed_log2 = 0.0;
  double spectral_max = 0.0;       // only the random-spectral path fills these
  double spectral_envelope = 0.0;
};

/// f_S by balanced partition of the slice family: K = q blocks, block k is
/// assigned the value with index k.
inline FsBuild build_f_S_partition(const ConstructionContext& ctx,
                                   const std::vector<elem>& s_elems) {
  auto sys = build_slice_system(ctx, s_elems);
  auto kp = k_partition(sys, ctx.params.q, 0);
  FsBuild out;
  out.method = "partition";
  out.partition_envelope = kp.impl_envelope;
  out.partition_imbalance = kp.part.measured_imbalance;
  out.partition_closed_nat = kp.closed_envelope_nat;
  out.partition_closed_log2 = kp.closed_envelope_log2;
  out.values.resize(s_elems.size());
  for (u64 i = 0; i < s_elems.size(); ++i) out.values[i] = std::uint8_t(kp.part.block[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Assembly and serialization

struct FunctionTable {
  u64 p = 0, t = 0, n = 0;
  std::vector<std::uint32_t> modulus;  // modulus of F_{q^n} over F_p, degree t*n
  std::vector<std::uint8_t> values;    // length q^n = p^{t*n}

  u64 q() const { return ipow_checked(p, t); }
};

inline FunctionTable assemble(const ConstructionContext& ctx, const CosetPlan& plan,
                              const std::vector<elem>& s_elems,
                              const std::vector<std::uint8_t>& f_s) {
  if (s_elems.size() != f_s.size()) throw std::invalid_argument("assemble: f_S length mismatch");
  const u64 Q = ctx.big.order;
  FunctionTable tab;
  tab.p = ctx.params.p;
  tab.t = ctx.params.t;
  tab.n = ctx.params.n;
  tab.modulus = ctx.big.modulus;
  tab.values.assign(Q, 0xff);
  for (elem y = 1; y < Q; ++y) {
    std::int32_t val = plan.coset_value[ctx.cm.cls[y]];
    if (val >= 0) tab.values[y] = std::uint8_t(val);
  }
  for (u64 i = 0; i < s_elems.size(); ++i) {
    if (tab.values[s_elems[i]] != 0xff) throw std::logic_error("assemble: S overlaps T");
    if (f_s[i] >= ctx.params.q) throw std::invalid_argument("assemble: f_S value out of range");
    tab.values[s_elems[i]] = f_s[i];
  }
  for (u64 y = 0; y < Q; ++y)
    if (tab.values[y] >= ctx.params.q) throw std::logic_error("assemble: coverage gap");
  return tab;
}

namespace detail {

inline void put_u32le(std::ostream& os, u64 x) {
  unsigned char b[4] = {static_cast<unsigned char>(x & 0xff),
                        static_cast<unsigned char>((x >> 8) & 0xff),
                        static_cast<unsigned char>((x >> 16) & 0xff),
                        static_cast<unsigned char>((x >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline u64 get_u32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("function table: truncated header");
  return u64(b[0]) | u64(b[1]) << 8 | u64(b[2]) << 16 | u64(b[3]) << 24;
}

}  // namespace detail

inline void write_qnlf(const FunctionTable& tab, std::ostream& os) {
  if (tab.p < 2 || tab.p > 255)
    throw std::invalid_argument("function table: p does not fit an octet");
  u64 q = tab.q();
  if (q > 256) throw std::invalid_argument("function table: q exceeds the value-octet range");
  u64 d = tab.t * tab.n;
  if (tab.modulus.size() != d + 1)
    throw std::invalid_argument("function table: modulus degree mismatch");
  if (tab.values.size() != ipow_checked(tab.p, d))
    throw std::invalid_argument("function table: value count mismatch");
  os.write("QNLF", 4);
  detail::put_u32le(os, tab.p);
  detail::put_u32le(os, tab.t);
  detail::put_u32le(os, tab.n);
  detail::put_u32le(os, d);
  for (auto c : tab.modulus) {
    if (c >= tab.p) throw std::invalid_argument("function table: modulus coefficient out of range");
    os.put(char(c));
  }
  for (auto x : tab.values) {
    if (x >= q) throw std::invalid_argument("function table: value out of range");
    os.put(char(x));
  }
  if (!os) throw std::runtime_error("function table: write failed");
}

inline void write_qnlf(const FunctionTable& tab, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("function table: cannot open " + path);
  write_qnlf(tab, os);
}

inline FunctionTable read_qnlf(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "QNLF")
    throw std::runtime_error("function table: bad magic");
  FunctionTable tab;
  tab.p = detail::get_u32le(is);
  tab.t = detail::get_u32le(is);
  tab.n = detail::get_u32le(is);
  u64 d = detail::get_u32le(is);
  if (tab.p < 2 || tab.p > 255 || tab.t < 1 || tab.n < 1 || d != tab.t * tab.n || d > 40)
    throw std::runtime_error("function table: implausible header");
  u64 q = ipow_checked(tab.p, tab.t);
  if (q > 256) throw std::runtime_error("function table: q exceeds the value-octet range");
  u64 count = ipow_checked(tab.p, d);
  if (count > (u64(1) << 28)) throw budget_error("function table: domain too large to load");
  tab.modulus.resize(d + 1);
  for (auto& c : tab.modulus) {
    int ch = is.get();
    if (ch == EOF) throw std::runtime_error("function table: truncated modulus");
    c = std::uint32_t(static_cast<unsigned char>(ch));
    if (c >= tab.p) throw std::runtime_error("function table: modulus coefficient out of range");
  }
  if (tab.modulus.back() != 1) throw std::runtime_error("function table: modulus is not monic");
  tab.values.resize(count);
  for (auto& x : tab.values) {
    int ch = is.get();
    if (ch == EOF) throw std::runtime_error("function table: truncated values");
    x = static_cast<unsigned char>(ch);
    if (x >= q) throw std::runtime_error("function table: value out of range");
  }
  if (is.peek() != EOF) throw std::runtime_error("function table: trailing bytes");
  return tab;
}

inline FunctionTable read_qnlf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("function table: cannot open " + path);
  return read_qnlf(is);
}

}  // namespace qnl
