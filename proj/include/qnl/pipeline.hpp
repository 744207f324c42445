#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnl/construction.hpp"
#include "qnl/spectral.hpp"

namespace qnl {

using ordered_json = nlohmann::ordered_json;

enum class FsMethod { auto_pick, partition, random_spectral };

inline FsMethod parse_fs_method(const std::string& s) {
  if (s == "auto") return FsMethod::auto_pick;
  if (s == "partition") return FsMethod::partition;
  if (s == "random") return FsMethod::random_spectral;
  throw std::invalid_argument("f_S method must be auto, partition, or random");
}

inline const char* fs_method_name(FsMethod m) {
  switch (m) {
    case FsMethod::auto_pick: return "auto";
    case FsMethod::partition: return "partition";
    default: return "random";
  }
}

inline double fs_spectral_envelope(u64 q, u64 v) {
  return 308.0 * std::pow(double(q), 2.5) *
         std::sqrt(std::log(2.0 * double(q) * double(q) * double(v)) / double(v));
}

/// f_S by balanced random assignment, accepted once the restricted spectrum
/// stays under the envelope.  Each attempt draws from its own stage seed so
/// a certificate can replay the accepted draw directly.
inline FsBuild build_f_S_random(const ConstructionContext& ctx, const std::vector<elem>& s_elems,
                                u64 seed, u64 max_retries = 16) {
  const u64 Q = ctx.big.order;
  const u64 q = ctx.params.q;
  SpectralCtx sc = make_spectral(ctx.view);
  std::vector<std::uint8_t> mask(Q, 0), table(Q, 0);
  for (elem y : s_elems) mask[y] = 1;
  FsBuild out;
  out.method = "random_spectral";
  out.spectral_envelope = fs_spectral_envelope(q, ctx.params.v);
  std::vector<std::uint8_t> vals(s_elems.size());
  for (u64 attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(stage_seed(seed, attempt));
    for (u64 i = 0; i < vals.size(); ++i) vals[i] = std::uint8_t(i % q);
    rng.shuffle(vals);
    for (u64 i = 0; i < s_elems.size(); ++i) table[s_elems[i]] = vals[i];
    double worst = 0.0;
    for (u64 l = 1; l < q; ++l)
      for (const auto& z : fourier_restricted(sc, table, mask, l))
        worst = std::max(worst, std::abs(z));
    if (worst <= out.spectral_envelope) {
      out.values = vals;
      out.retries = attempt;
      out.spectral_max = worst;
      return out;
    }
  }
  throw retry_error("f_S: no balanced draw met the spectral envelope within the retry cap");
}

/// Partition when the packed slice family fits the compute and memory
/// budgets, otherwise the random spectral path.
inline FsMethod pick_fs_method(const ConstructionContext& ctx, u64 n_elems) {
  const u64 Q = ctx.big.order;
  u64 words_per_row = (Q * ctx.params.q + 63) / 64;
  bool fits = n_elems * Q <= (u64(1) << 33) && n_elems * words_per_row * 8 <= (u64(1) << 29);
  return fits ? FsMethod::partition : FsMethod::random_spectral;
}

inline FsBuild build_f_S(const ConstructionContext& ctx, const std::vector<elem>& s_elems,
                         FsMethod method = FsMethod::auto_pick, u64 seed = 0) {
  if (method == FsMethod::auto_pick) method = pick_fs_method(ctx, s_elems.size());
  if (method == FsMethod::partition) return build_f_S_partition(ctx, s_elems);
  return build_f_S_random(ctx, s_elems, seed);
}

// ---------------------------------------------------------------------------
// End-to-end construction

struct ConstructResult {
  ConstructionParams params;
  OddDegreeResult odd;
  std::string fs_method_requested;
  u64 master_seed = 0, plan_seed = 0, fs_seed = 0;
  u64 t_coset_count = 0, s_coset_count = 0, s_size = 0;
  FsBuild fs;
  FunctionTable table;
  CertReport cert;
};

inline ConstructResult construct_certified(u64 p, u64 t, u64 r, u64 e, double epsilon, u64 seed,
                                           FsMethod method = FsMethod::auto_pick) {
  auto gate = semiprimitive_check(p, r, e);
  if (!gate.pass())
    throw std::invalid_argument("construct: (p, r, e) fails the character-sum parameter gate");
  ConstructResult out;
  out.master_seed = seed;
  out.fs_method_requested = fs_method_name(method);
  out.odd = find_odd_degree(p, t, r, e, epsilon);
  out.params = make_params(p, t, r, e, out.odd.s, epsilon);
  ConstructionContext ctx(out.params);
  out.plan_seed = seed == 0 ? 0 : stage_seed(seed, 1);
  out.fs_seed = seed == 0 ? 0 : stage_seed(seed, 2);
  auto plan = plan_T(ctx.cm, out.plan_seed);
  out.t_coset_count = plan.t_cosets.size();
  out.s_coset_count = plan.s_cosets.size();
  auto sel = s_elements(ctx.big, ctx.cm, plan);
  out.s_size = sel.size();
  out.fs = build_f_S(ctx, sel, method, out.fs_seed);
  out.table = assemble(ctx, plan, sel, out.fs.values);
  auto sc = make_spectral(ctx.view);
  std::vector<std::uint8_t> s_mask(ctx.big.order, 0);
  for (elem y : sel) s_mask[y] = 1;
  out.cert = certify_construction(sc, out.params, out.table.values, s_mask);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline ordered_json cert_json(const ConstructResult& res) {
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{{"command", "construct"},
                             {"p", res.params.p},
                             {"t", res.params.t},
                             {"r", res.params.r},
                             {"e", res.params.e},
                             {"epsilon_target", res.params.epsilon_target},
                             {"seed", res.master_seed},
                             {"f_s_method", res.fs_method_requested}};
  j["derived"] = ordered_json{{"q", res.params.q},
                              {"v", res.params.v},
                              {"m", res.params.m},
                              {"s", res.params.s},
                              {"n", res.params.n}};
  j["seeds"] = ordered_json{{"scheme", "splitmix64 stage derivation from the master seed"},
                            {"master", res.master_seed},
                            {"plan", res.plan_seed},
                            {"f_s", res.fs_seed}};
  j["degree_search"] = ordered_json{
      {"s", res.odd.s}, {"achieved_angle", res.odd.achieved}, {"beta", res.odd.beta}};
  j["sets"] = ordered_json{{"t_cosets", res.t_coset_count},
                           {"s_cosets", res.s_coset_count},
                           {"s_size", res.s_size}};
  j["f_s"] = ordered_json{{"method", res.fs.method},
                          {"retries", res.fs.retries},
                          {"partition_envelope", res.fs.partition_envelope},
                          {"partition_imbalance", res.fs.partition_imbalance},
                          {"partition_closed_nat", res.fs.partition_closed_nat},
                          {"partition_closed_log2", res.fs.partition_closed_log2},
                          {"spectral_max", res.fs.spectral_max},
                          {"spectral_envelope", res.fs.spectral_envelope}};
  const CertReport& c = res.cert;
  j["certificate"] = ordered_json{{"epsilon", c.epsilon},
                                  {"fT_term_max", c.fT_term_max},
                                  {"fT_bound", c.fT_bound},
                                  {"fT_pass", c.fT_pass},
                                  {"fS_hat_max", c.fS_hat_max},
                                  {"fS_envelope_nat", c.fS_envelope_nat},
                                  {"fS_envelope_log2", c.fS_envelope_log2},
                                  {"fS_pass", c.fS_pass},
                                  {"mu", c.mu},
                                  {"mu_raw", c.mu_raw},
                                  {"witness_a", c.witness_a},
                                  {"witness_b", c.witness_b},
                                  {"witness_distance", c.witness_distance},
                                  {"mu_decomp_bound", c.mu_decomp_bound},
                                  {"mu_affine", c.mu_affine},
                                  {"decomp_pass", c.decomp_pass},
                                  {"beats_affine", c.beats_affine},
                                  {"chain_pass", c.chain_pass},
                                  {"pass", c.pass()}};
  return j;
}

inline ordered_json measure_json(const FunctionTable& tab, const MuReport& rep,
                                 double parseval_max) {
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{{"command", "measure"},
                             {"p", tab.p},
                             {"t", tab.t},
                             {"n", tab.n},
                             {"q", tab.q()}};
  j["mu"] = rep.mu;
  j["mu_raw"] = rep.raw;
  j["snap_delta"] = rep.snap_delta;
  j["witness_a"] = rep.witness_a;
  j["witness_b"] = rep.witness_b;
  j["witness_distance"] = rep.distance;
  j["parseval_residual_max"] = parseval_max;
  return j;
}

inline ordered_json rho_json(const RhoResult& res) {
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{{"command", "rho"}, {"q", res.q}, {"n", res.n}};
  j["rho"] = res.rho;
  j["mu"] = res.mu_exact;
  j["mu_value"] = res.mu;
  return j;
}

inline ordered_json partition_json(const KPartitionResult& kp, u64 n, u64 m, u64 k, u64 seed) {
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{
      {"command", "partition"}, {"k", k}, {"seed", seed}, {"elements", n}, {"sets", m}};
  j["blocks"] = kp.part.block;
  j["measured_imbalance"] = kp.part.measured_imbalance;
  j["impl_envelope"] = kp.impl_envelope;
  j["closed_envelope_nat"] = kp.closed_envelope_nat;
  j["closed_envelope_log2"] = kp.closed_envelope_log2;
  j["m_hat"] = kp.m_hat;
  return j;
}

inline ordered_json density_json_rlist(const std::vector<u64>& rs) {
  auto ds = density_recursion(rs);
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{{"command", "density"}, {"r_list", rs}};
  std::vector<std::string> exact;
  std::vector<double> vals;
  for (auto& d : ds) {
    exact.push_back(rat_str(d));
    vals.push_back(rat_val(d));
  }
  j["densities"] = exact;
  j["values"] = vals;
  return j;
}

inline ordered_json density_json_p(u64 p, u64 artin_limit) {
  double artin = artin_constant(artin_limit);
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["config"] = ordered_json{{"command", "density"}, {"p", p}, {"artin_limit", artin_limit}};
  j["artin_constant"] = artin;
  j["moree_density"] = moree_density(p, artin);
  return j;
}

inline std::string scan_csv(u64 p, u64 limit, u64 e = 2) {
  if (!is_prime_u64(p)) throw std::invalid_argument("scan: p must be prime");
  if (e < 1) throw std::invalid_argument("scan: e must be >= 1");
  std::ostringstream os;
  os << "p,r,e_verified\n";
  for (u64 r : scan_r(p, limit, e)) os << p << "," << r << "," << e << "\n";
  return os.str();
}

}  // namespace qnl
