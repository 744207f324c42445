#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qnl/common.hpp"

namespace qnl {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

/// Ground set [0, n) with m subsets.  Small families keep explicit index
/// lists both ways; big generated families (the hyperplane slices) keep one
/// packed bit row per element, since every algorithm here walks element ->
/// incident sets and never needs to enumerate a set's members.
struct SetSystem {
  u64 n = 0;
  u64 m = 0;
  bool packed = false;
  std::vector<std::vector<u32>> sets;      // explicit: set -> elements
  std::vector<std::vector<u32>> incident;  // explicit: element -> sets
  u64 wpr = 0;                             // packed: words per row
  std::vector<u64> rows;                   // packed: n rows of wpr words
  std::vector<u64> set_size;

  void set_bit(u64 y, u64 s) {
    rows[y * wpr + s / 64] |= u64(1) << (s % 64);
  }

  /// Recomputes set_size from the packed rows.
  void finalize_sizes() {
    set_size.assign(m, 0);
    for (u64 y = 0; y < n; ++y) {
      const u64* row = &rows[y * wpr];
      for (u64 w = 0; w < wpr; ++w) {
        u64 bits = row[w];
        while (bits) {
          ++set_size[w * 64 + std::countr_zero(bits)];
          bits &= bits - 1;
        }
      }
    }
  }

  template <class Fn>
  void each_incident(u64 y, Fn&& fn) const {
    if (!packed) {
      for (u32 s : incident[y]) fn(s);
      return;
    }
    const u64* row = &rows[y * wpr];
    for (u64 w = 0; w < wpr; ++w) {
      u64 bits = row[w];
      while (bits) {
        fn(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
      }
    }
  }

  bool has_full_set() const {
    for (u64 s : set_size)
      if (s == n) return true;
    return false;
  }
};

inline SetSystem make_set_system(u64 n, std::vector<std::vector<u32>> sets) {
  SetSystem sys;
  sys.n = n;
  sys.m = sets.size();
  sys.sets = std::move(sets);
  sys.incident.resize(n);
  sys.set_size.resize(sys.m);
  for (u64 s = 0; s < sys.m; ++s) {
    sys.set_size[s] = sys.sets[s].size();
    for (u32 y : sys.sets[s]) {
      if (y >= n) throw std::invalid_argument("set_system: element index out of range");
      sys.incident[y].push_back(u32(s));
    }
  }
  return sys;
}

inline SetSystem make_packed_system(u64 n, u64 m) {
  SetSystem sys;
  sys.n = n;
  sys.m = m;
  sys.packed = true;
  sys.wpr = (m + 63) / 64;
  if (n * sys.wpr * 8 > (u64(1) << 29))
    throw budget_error("set_system: packed rows exceed the memory budget");
  sys.rows.assign(n * sys.wpr, 0);
  sys.set_size.assign(m, 0);
  return sys;
}

// ---------------------------------------------------------------------------
// Signed coloring

enum class ColoringMethod { derandomized, random_retry };

struct Coloring {
  std::vector<std::int8_t> sign;  // +1 or -1 per ground element
  double delta = 1.0;
  double certified_bound = 0.0;  // delta * measured max |sum over a set|
  double guarantee = 0.0;        // delta * sqrt(2 N ln(2M))
};

namespace detail {

struct RawColoring {
  std::vector<std::int8_t> sign;  // aligned with the elems argument
  u64 max_abs = 0;
  u64 m_eff = 0;   // sets meeting the subset, plus the virtual full set
  double guarantee = 0.0;
};

/// Derandomized coloring of a subset of the ground set against the sets
/// that meet it (plus, optionally, the subset itself as one more set).
/// Greedy conditional expectations on the potential
///   sum_Y cosh(beta S_Y) cosh(beta)^{r_Y},
/// which never increases, so at the end max |S_Y| <= sqrt(2 N ln(2 m_eff)).
inline RawColoring color_subset(const SetSystem& sys, const std::vector<u32>& elems,
                                bool include_full) {
  RawColoring out;
  u64 nc = elems.size();
  out.sign.assign(nc, 1);
  if (nc == 0) return out;

  u64 mv = sys.m + (include_full ? 1 : 0);
  std::vector<u32> remaining(mv, 0);
  for (u32 y : elems) sys.each_incident(y, [&](u64 s) { ++remaining[s]; });
  if (include_full) remaining[sys.m] = u32(nc);
  u64 m_eff = 0;
  for (u64 s = 0; s < mv; ++s)
    if (remaining[s]) ++m_eff;
  out.m_eff = m_eff;
  if (m_eff == 0) return out;

  const double beta = std::sqrt(2.0 * std::log(2.0 * double(m_eff)) / double(nc));
  const double eb = std::exp(beta), inv_eb = 1.0 / eb;
  const double coshb = std::cosh(beta), inv_coshb = 1.0 / coshb;
  out.guarantee = std::sqrt(2.0 * double(nc) * std::log(2.0 * double(m_eff)));

  std::vector<double> A(mv, 1.0), C(mv);
  std::vector<std::int64_t> S(mv, 0);
  for (u64 s = 0; s < mv; ++s) C[s] = remaining[s] ? std::pow(coshb, double(remaining[s])) : 0.0;

  for (u64 i = 0; i < nc; ++i) {
    u32 y = elems[i];
    double diff = 0.0;
    auto probe = [&](u64 s) { diff += (A[s] - 1.0 / A[s]) * C[s]; };
    sys.each_incident(y, probe);
    if (include_full) probe(sys.m);
    std::int8_t sigma = diff > 0.0 ? -1 : 1;
    out.sign[i] = sigma;
    double mul = sigma > 0 ? eb : inv_eb;
    auto apply = [&](u64 s) {
      S[s] += sigma;
      A[s] *= mul;
      C[s] *= inv_coshb;
    };
    sys.each_incident(y, apply);
    if (include_full) apply(sys.m);
  }

  for (u64 s = 0; s < mv; ++s) {
    u64 v = u64(S[s] < 0 ? -S[s] : S[s]);
    if (v > out.max_abs) out.max_abs = v;
  }
  if (double(out.max_abs) > out.guarantee + 1e-9)
    throw std::logic_error("signed_coloring: potential argument violated");
  return out;
}

}  // namespace detail

/// Balanced +-delta coloring of the whole ground set.  The derandomized
/// method is deterministic and certifiably within delta*sqrt(2N ln(2M));
/// random_retry resamples (up to 64 draws) until that same bound holds.
inline Coloring signed_coloring(const SetSystem& sys, double delta = 1.0,
                                ColoringMethod method = ColoringMethod::derandomized,
                                u64 seed = 0) {
  if (sys.n < 1) throw std::invalid_argument("signed_coloring: empty ground set");
  std::vector<u32> elems(sys.n);
  for (u64 i = 0; i < sys.n; ++i) elems[i] = u32(i);

  Coloring out;
  out.delta = delta;
  if (method == ColoringMethod::derandomized) {
    auto raw = detail::color_subset(sys, elems, false);
    out.sign = std::move(raw.sign);
    out.certified_bound = delta * double(raw.max_abs);
    out.guarantee = delta * raw.guarantee;
    return out;
  }

  u64 m_eff = 0;
  for (u64 s = 0; s < sys.m; ++s)
    if (sys.set_size[s]) ++m_eff;
  double raw_guarantee =
      m_eff ? std::sqrt(2.0 * double(sys.n) * std::log(2.0 * double(m_eff))) : 0.0;
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<std::int8_t> sign(sys.n);
    for (auto& s : sign) s = rng.coin() ? 1 : -1;
    std::vector<std::int64_t> sums(sys.m, 0);
    for (u64 y = 0; y < sys.n; ++y)
      sys.each_incident(y, [&](u64 s) { sums[s] += sign[y]; });
    u64 worst = 0;
    for (auto v : sums) worst = std::max(worst, u64(v < 0 ? -v : v));
    if (double(worst) <= raw_guarantee) {
      out.sign = std::move(sign);
      out.certified_bound = delta * double(worst);
      out.guarantee = delta * raw_guarantee;
      return out;
    }
  }
  throw retry_error("signed_coloring: retry cap exceeded");
}

// ---------------------------------------------------------------------------
// Theta-fraction subset via triangle rounding

struct ThetaResult {
  std::vector<std::uint8_t> in_z;  // indicator over the ground set
  double theta = 0.0;
  double measured_dev = 0.0;  // exact max_Y | |Y cap Z| - theta |Y| |, family augmented
  double envelope = 0.0;      // certified bound accumulated through the rounding
  u64 m_hat = 0;              // family size including the augmented full set
  u64 depth = 0;
  double c_impl = 0.0;  // envelope / sqrt(N ln(2 m_hat / N)), log clamped below at ln 2
};

namespace detail {

using triple = std::array<std::int64_t, 3>;

inline cplx bary_to_complex(const triple& t, const cplx v[3], double scale) {
  return (double(t[0]) * v[0] + double(t[1]) * v[1] + double(t[2]) * v[2]) * scale;
}

inline bool triangle_contains_origin(const triple tri[3], const cplx v[3], double scale) {
  cplx a = bary_to_complex(tri[0], v, scale);
  cplx b = bary_to_complex(tri[1], v, scale);
  cplx c = bary_to_complex(tri[2], v, scale);
  auto cross = [](cplx u, cplx w) { return u.real() * w.imag() - u.imag() * w.real(); };
  double s1 = cross(b - a, -a);
  double s2 = cross(c - b, -b);
  double s3 = cross(a - c, -c);
  const double eps = 1e-12;
  bool all_nonneg = s1 >= -eps && s2 >= -eps && s3 >= -eps;
  bool all_nonpos = s1 <= eps && s2 <= eps && s3 <= eps;
  return all_nonneg || all_nonpos;
}

struct ThetaRaw {
  std::vector<std::uint8_t> pick;  // aligned with elems
  double envelope = 0.0;
  u64 m_hat = 0;
  u64 depth = 0;
};

/// Beck rounding for theta in (0, 1/2).  The triangle has vertices
/// e^{i alpha}, 1, e^{-i alpha} with cos alpha = theta/(theta-1), so the
/// origin has barycentric weight exactly theta on the middle vertex.  All
/// points start at a vertex of the level-t triangle containing the origin
/// and walk up the subdivision chain; elements sitting on an edge midpoint
/// are split between its endpoints by a derandomized coloring.  Vertex and
/// midpoint tests run on exact integer barycentrics scaled by 2^t.
inline ThetaRaw beck_round(const SetSystem& sys, const std::vector<u32>& elems, double theta) {
  u64 nc = elems.size();
  ThetaRaw out;
  out.pick.assign(nc, 0);

  u64 full_sets = 0;
  {
    std::vector<u32> cnt(sys.m, 0);
    for (u32 y : elems) sys.each_incident(y, [&](u64 s) { ++cnt[s]; });
    u64 nonempty = 0;
    for (u64 s = 0; s < sys.m; ++s) {
      if (cnt[s]) ++nonempty;
      if (cnt[s] == nc) ++full_sets;
    }
    out.m_hat = nonempty + (full_sets ? 0 : 1);
  }
  if (nc == 0) return out;

  double logterm = std::max(std::log(2.0 * double(out.m_hat) / double(nc)), std::log(2.0));
  double target = std::sqrt(double(nc) * logterm);
  u64 t = 0;
  while (double(nc) / double(u64(1) << t) > target && t < 48) ++t;
  out.depth = t;

  double ca = theta / (theta - 1.0);
  double sa = std::sqrt(1.0 - ca * ca);
  const cplx v[3] = {{ca, sa}, {1.0, 0.0}, {ca, -sa}};
  const double scale = 1.0 / double(u64(1) << t);
  const std::int64_t unit = std::int64_t(1) << t;

  // Chain of nested triangles T_0 contains T_1 contains ... contains T_t,
  // each containing the origin.
  std::vector<std::array<triple, 3>> chain(t + 1);
  chain[0] = {triple{unit, 0, 0}, triple{0, unit, 0}, triple{0, 0, unit}};
  for (u64 k = 0; k < t; ++k) {
    const auto& P = chain[k];
    triple mid[3];  // mid[e] is the midpoint opposite vertex e
    for (int e = 0; e < 3; ++e) {
      int i = (e + 1) % 3, j = (e + 2) % 3;
      for (int c = 0; c < 3; ++c) mid[e][c] = (P[i][c] + P[j][c]) / 2;
    }
    std::array<triple, 3> kids[4] = {
        {P[0], mid[2], mid[1]},
        {mid[2], P[1], mid[0]},
        {mid[1], mid[0], P[2]},
        {mid[0], mid[1], mid[2]},
    };
    bool found = false;
    for (auto& kid : kids) {
      if (triangle_contains_origin(kid.data(), v, scale)) {
        chain[k + 1] = kid;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("beck_round: origin escaped the subdivision");
  }

  // Everything starts at the vertex of T_t nearest the origin.  Ties are
  // broken toward the lowest index with a small tolerance, so a one-ulp
  // wobble in theta (e.g. computing 1 - theta for the complement path)
  // cannot change the start vertex.
  double dist[3];
  double best = 1e300;
  for (int i = 0; i < 3; ++i) {
    dist[i] = std::abs(bary_to_complex(chain[t][i], v, scale));
    best = std::min(best, dist[i]);
  }
  int start = 0;
  while (dist[start] > best * (1.0 + 1e-9) + 1e-300) ++start;
  double h_t = dist[start];
  out.envelope = double(nc) * h_t;

  // pos[e] indexes a vertex of the current chain triangle.
  std::vector<std::uint8_t> pos(nc, std::uint8_t(start));
  std::vector<u32> class_elems;
  std::vector<u32> class_index;
  for (u64 k = t; k >= 1; --k) {
    const auto& cur = chain[k];
    const auto& par = chain[k - 1];
    // Each vertex of T_k is a vertex of T_{k-1} or the midpoint of one of
    // its edges; the tests are exact on the integer barycentrics.
    int map_kind[3];  // >= 0: parent vertex id; -1: midpoint
    int map_i[3], map_j[3];
    for (int vtx = 0; vtx < 3; ++vtx) {
      map_kind[vtx] = -1;
      for (int i = 0; i < 3; ++i)
        if (cur[vtx] == par[i]) {
          map_kind[vtx] = i;
          break;
        }
      if (map_kind[vtx] >= 0) continue;
      bool matched = false;
      for (int i = 0; i < 3 && !matched; ++i)
        for (int j = i + 1; j < 3 && !matched; ++j) {
          triple twice{2 * cur[vtx][0], 2 * cur[vtx][1], 2 * cur[vtx][2]};
          triple sum{par[i][0] + par[j][0], par[i][1] + par[j][1], par[i][2] + par[j][2]};
          if (twice == sum) {
            map_i[vtx] = i;
            map_j[vtx] = j;
            matched = true;
          }
        }
      if (!matched) throw std::logic_error("beck_round: vertex is neither kept nor a midpoint");
    }
    // New positions are computed from old ones in one step so a colored
    // element cannot be re-mapped a second time within the level.
    std::vector<std::uint8_t> next(nc);
    for (int vtx = 0; vtx < 3; ++vtx) {
      if (map_kind[vtx] >= 0) {
        for (u64 i = 0; i < nc; ++i)
          if (pos[i] == vtx) next[i] = std::uint8_t(map_kind[vtx]);
        continue;
      }
      class_elems.clear();
      class_index.clear();
      for (u64 i = 0; i < nc; ++i)
        if (pos[i] == vtx) {
          class_elems.push_back(elems[i]);
          class_index.push_back(u32(i));
        }
      if (class_elems.empty()) continue;
      cplx wi = bary_to_complex(par[map_i[vtx]], v, scale);
      cplx wj = bary_to_complex(par[map_j[vtx]], v, scale);
      double w_c = std::abs(wi - wj) / 2.0;
      auto raw = color_subset(sys, class_elems, full_sets == 0);
      for (u64 i = 0; i < class_elems.size(); ++i)
        next[class_index[i]] = std::uint8_t(raw.sign[i] > 0 ? map_i[vtx] : map_j[vtx]);
      out.envelope +=
          w_c * std::sqrt(2.0 * double(class_elems.size()) * std::log(2.0 * double(out.m_hat)));
    }
    pos.swap(next);
  }

  out.envelope *= 1.0 - theta;
  for (u64 i = 0; i < nc; ++i) out.pick[i] = pos[i] == 1 ? 1 : 0;
  return out;
}

/// Exact max_Y | |Y cap Z| - theta |Y| | over the family restricted to
/// elems, augmented with the full subset.
inline double measure_theta_dev(const SetSystem& sys, const std::vector<u32>& elems,
                                const std::vector<std::uint8_t>& pick, double theta) {
  std::vector<std::int64_t> in_cnt(sys.m, 0), tot_cnt(sys.m, 0);
  std::int64_t in_all = 0;
  for (u64 i = 0; i < elems.size(); ++i) {
    in_all += pick[i];
    sys.each_incident(elems[i], [&](u64 s) {
      ++tot_cnt[s];
      in_cnt[s] += pick[i];
    });
  }
  double worst = std::abs(double(in_all) - theta * double(elems.size()));
  for (u64 s = 0; s < sys.m; ++s) {
    if (!tot_cnt[s]) continue;
    worst = std::max(worst, std::abs(double(in_cnt[s]) - theta * double(tot_cnt[s])));
  }
  return worst;
}

struct ThetaSubsetRaw {
  std::vector<std::uint8_t> pick;
  double measured_dev = 0.0;
  double envelope = 0.0;
  u64 m_hat = 0;
  u64 depth = 0;
};

inline ThetaSubsetRaw theta_on_subset(const SetSystem& sys, const std::vector<u32>& elems,
                                      double theta) {
  ThetaSubsetRaw out;
  u64 nc = elems.size();
  if (theta == 0.0 || theta == 1.0) {
    out.pick.assign(nc, theta == 1.0 ? 1 : 0);
    out.m_hat = sys.m;
    out.measured_dev = 0.0;
    return out;
  }
  bool flip = theta > 0.5;
  double th = flip ? 1.0 - theta : theta;
  if (th == 0.5) {
    u64 full_sets = 0;
    {
      std::vector<u32> cnt(sys.m, 0);
      for (u32 y : elems) sys.each_incident(y, [&](u64 s) { ++cnt[s]; });
      for (u64 s = 0; s < sys.m; ++s)
        if (cnt[s] == nc && nc) ++full_sets;
    }
    auto raw = color_subset(sys, elems, full_sets == 0);
    out.pick.assign(nc, 0);
    for (u64 i = 0; i < nc; ++i) out.pick[i] = raw.sign[i] > 0 ? 1 : 0;
    out.m_hat = raw.m_eff;
    out.envelope = raw.guarantee / 2.0;
    out.depth = 0;
  } else {
    auto raw = beck_round(sys, elems, th);
    out.pick = std::move(raw.pick);
    out.m_hat = raw.m_hat;
    out.envelope = raw.envelope;
    out.depth = raw.depth;
  }
  if (flip)
    for (auto& b : out.pick) b ^= 1;
  out.measured_dev = measure_theta_dev(sys, elems, out.pick, theta);
  return out;
}

}  // namespace detail

/// Subset Z with |Y cap Z| close to theta |Y| across the family (augmented
/// with the full ground set).  theta = 0 and 1 are exact; 1/2 is a single
/// coloring; theta > 1/2 rounds the complement; anything else walks the
/// triangle chain.  The seed is accepted for interface symmetry; every
/// stage is derandomized, so the result does not depend on it.
inline ThetaResult theta_subset(const SetSystem& sys, double theta, u64 /*seed*/ = 0) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("theta_subset: theta must lie in [0, 1]");
  if (sys.n < 1) throw std::invalid_argument("theta_subset: empty ground set");
  std::vector<u32> elems(sys.n);
  for (u64 i = 0; i < sys.n; ++i) elems[i] = u32(i);
  auto raw = detail::theta_on_subset(sys, elems, theta);
  ThetaResult out;
  out.in_z = std::move(raw.pick);
  out.theta = theta;
  out.measured_dev = raw.measured_dev;
  out.envelope = raw.envelope;
  out.m_hat = raw.m_hat;
  out.depth = raw.depth;
  double logterm =
      std::max(std::log(2.0 * double(out.m_hat) / double(sys.n)), std::log(2.0));
  out.c_impl = out.envelope / std::sqrt(double(sys.n) * logterm);
  return out;
}

// ---------------------------------------------------------------------------
// K-way partition

struct Partition {
  u64 k = 0;
  std::vector<u32> block;  // element -> block id in [0, k)
  double measured_imbalance = 0.0;
};

/// Exact max over sets Y and blocks i of | |Y cap Z_i| - |Y|/K |.
inline double measure_imbalance(const SetSystem& sys, const Partition& part) {
  if (part.block.size() != sys.n) throw std::invalid_argument("measure_imbalance: size mismatch");
  std::vector<std::int64_t> cnt(sys.m * part.k, 0);
  for (u64 y = 0; y < sys.n; ++y) {
    u32 b = part.block[y];
    if (b >= part.k) throw std::invalid_argument("measure_imbalance: block id out of range");
    sys.each_incident(y, [&](u64 s) { ++cnt[s * part.k + b]; });
  }
  double worst = 0.0;
  for (u64 s = 0; s < sys.m; ++s) {
    double share = double(sys.set_size[s]) / double(part.k);
    for (u64 i = 0; i < part.k; ++i)
      worst = std::max(worst, std::abs(double(cnt[s * part.k + i]) - share));
  }
  return worst;
}

struct KPartitionResult {
  Partition part;
  double impl_envelope = 0.0;       // worst accumulated bound over any leaf path
  double closed_envelope_nat = 0.0;  // 308 sqrt((N/K) ln(2KM/N))
  double closed_envelope_log2 = 0.0;
  u64 m_hat = 0;  // largest augmented family size any stage saw
};

namespace detail {

inline void k_partition_rec(const SetSystem& sys, const std::vector<u32>& elems, u64 kblocks,
                            u32 first_block, std::vector<u32>& block, double env_so_far,
                            KPartitionResult& res) {
  if (kblocks == 1) {
    for (u32 y : elems) block[y] = first_block;
    res.impl_envelope = std::max(res.impl_envelope, env_so_far);
    return;
  }
  u64 ka = kblocks / 2;
  double theta = double(ka) / double(kblocks);
  auto raw = theta_on_subset(sys, elems, theta);
  res.m_hat = std::max(res.m_hat, raw.m_hat);
  std::vector<u32> ea, eb;
  for (u64 i = 0; i < elems.size(); ++i)
    (raw.pick[i] ? ea : eb).push_back(elems[i]);
  double env = env_so_far + raw.envelope;
  k_partition_rec(sys, ea, ka, first_block, block, env, res);
  k_partition_rec(sys, eb, kblocks - ka, first_block + u32(ka), block, env, res);
}

}  // namespace detail

/// Partition of the ground set into K blocks of near-equal intersection
/// with every family set, by recursive halving: each node splits its
/// elements with theta = floor(k/2)/k (always in [1/3, 1/2]) and hands the
/// two sides floor(k/2) and ceil(k/2) block ids.  Deterministic; the seed
/// is accepted for interface symmetry.
inline KPartitionResult k_partition(const SetSystem& sys, u64 K, u64 seed = 0) {
  if (K < 2) throw std::invalid_argument("k_partition: need K >= 2");
  if (sys.n < K) throw std::invalid_argument("k_partition: need N >= K");
  (void)seed;
  KPartitionResult res;
  res.part.k = K;
  res.part.block.assign(sys.n, 0);
  std::vector<u32> elems(sys.n);
  for (u64 i = 0; i < sys.n; ++i) elems[i] = u32(i);
  detail::k_partition_rec(sys, elems, K, 0, res.part.block, 0.0, res);
  res.part.measured_imbalance = measure_imbalance(sys, res.part);
  if (sys.m > 0) {
    double ratio = 2.0 * double(K) * double(sys.m) / double(sys.n);
    double ln_ratio = std::max(std::log(ratio), std::log(2.0));
    res.closed_envelope_nat = 308.0 * std::sqrt(double(sys.n) / double(K) * ln_ratio);
    res.closed_envelope_log2 =
        308.0 * std::sqrt(double(sys.n) / double(K) * ln_ratio / std::log(2.0));
  }
  return res;
}

/// Exhaustive optimum for tiny instances, used to sanity-check k_partition.
/// Element 0 is pinned to block 0; block relabeling cannot change the
/// imbalance, so no optimum is lost.
inline Partition brute_force_best_partition(const SetSystem& sys, u64 K) {
  if (K < 1 || sys.n < 1) throw std::invalid_argument("brute_force: empty instance");
  if (sys.n > 16) throw budget_error("brute_force: ground set too large");
  double lk = double(sys.n - 1) * std::log2(double(K));
  if (lk > 24.0) throw budget_error("brute_force: K^N too large to enumerate");

  Partition best;
  best.k = K;
  best.measured_imbalance = 1e300;
  std::vector<u32> block(sys.n, 0);
  std::vector<std::int64_t> cnt(sys.m * K, 0);
  sys.each_incident(0, [&](u64 s) { ++cnt[s * K + 0]; });

  auto rec = [&](auto&& self, u64 y) -> void {
    if (y == sys.n) {
      double worst = 0.0;
      for (u64 s = 0; s < sys.m; ++s) {
        double share = double(sys.set_size[s]) / double(K);
        for (u64 i = 0; i < K; ++i)
          worst = std::max(worst, std::abs(double(cnt[s * K + i]) - share));
      }
      if (worst < best.measured_imbalance) {
        best.measured_imbalance = worst;
        best.block = block;
      }
      return;
    }
    for (u32 b = 0; b < K; ++b) {
      block[y] = b;
      sys.each_incident(y, [&](u64 s) { ++cnt[s * K + b]; });
      self(self, y + 1);
      sys.each_incident(y, [&](u64 s) { --cnt[s * K + b]; });
    }
  };
  rec(rec, 1);
  return best;
}

}  // namespace qnl
