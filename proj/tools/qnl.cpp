#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnl/pipeline.hpp"

using namespace qnl;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParam = 3;
constexpr int kExitBudget = 4;
constexpr int kExitRetry = 5;
constexpr int kExitIo = 6;
constexpr int kExitCert = 7;
constexpr int kExitInternal = 9;

int fail(int code, const char* cls, const std::string& msg) {
  ordered_json j;
  j["schema"] = "qnl_cert_v1";
  j["error"] = ordered_json{{"code", code}, {"class", cls}, {"message", msg}};
  std::cout << j.dump(2) << "\n";
  return code;
}

void emit(const std::string& text, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + out_path);
    os << text;
    if (!os) throw std::runtime_error("write failed: " + out_path);
  }
  std::cout << text;
}

std::vector<std::vector<u32>> read_sets_file(const std::string& path, u64& n_out) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open sets file: " + path);
  std::vector<std::vector<u32>> sets;
  u64 n = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<u32> cur;
    u64 y;
    while (ls >> y) {
      if (y > 0xffffffffULL) throw std::runtime_error("sets file: element index too large");
      cur.push_back(u32(y));
      n = std::max(n, y + 1);
    }
    if (!ls.eof()) throw std::runtime_error("sets file: non-numeric token");
    if (!cur.empty()) sets.push_back(std::move(cur));
  }
  if (sets.empty()) throw std::runtime_error("sets file: no sets");
  n_out = n;
  return sets;
}

struct Args {
  u64 p = 2, t = 1, r = 7, e = 1, q = 2, n = 1, k = 2, seed = 0;
  u64 limit = 50, scan_e = 2, artin_limit = 1000000;
  double epsilon = 0.5;
  std::string out, cert, in, sets, method = "auto";
  std::vector<u64> r_list;
};

int run_scan(const Args& a) {
  emit(scan_csv(a.p, a.limit, a.scan_e), a.out);
  return 0;
}

int run_construct(const Args& a) {
  auto res = construct_certified(a.p, a.t, a.r, a.e, a.epsilon, a.seed, parse_fs_method(a.method));
  write_qnlf(res.table, a.out);
  std::string text = cert_json(res).dump(2) + "\n";
  if (!a.cert.empty()) {
    std::ofstream os(a.cert, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + a.cert);
    os << text;
  }
  std::cout << text;
  return res.cert.pass() ? 0 : kExitCert;
}

int run_measure(const Args& a) {
  FunctionTable tab = read_qnlf(a.in);
  TableEnv env(tab);
  double residual = 0.0;
  for (u64 l = 1; l < tab.q(); ++l)
    residual = std::max(residual,
                        parseval_residual(env.sc, fourier_full(env.sc, tab.values, l)));
  MuReport rep = mu_spectral(env.sc, tab.values);
  emit(measure_json(tab, rep, residual).dump(2) + "\n", a.out);
  return 0;
}

int run_rho(const Args& a) {
  emit(rho_json(rho_exhaustive(a.q, a.n)).dump(2) + "\n", a.out);
  return 0;
}

int run_partition(const Args& a) {
  u64 n = 0;
  auto sets = read_sets_file(a.sets, n);
  auto sys = make_set_system(n, std::move(sets));
  auto kp = k_partition(sys, a.k, a.seed);
  emit(partition_json(kp, sys.n, sys.m, a.k, a.seed).dump(2) + "\n", a.out);
  return 0;
}

int run_density(const Args& a, bool have_p) {
  ordered_json j = have_p ? density_json_p(a.p, a.artin_limit) : density_json_rlist(a.r_list);
  emit(j.dump(2) + "\n", a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"character-sum constructions of low-correlation functions"};
  app.require_subcommand(1);
  Args a;

  auto* scan = app.add_subcommand("scan", "list semiprimitive orders r for a prime p");
  scan->add_option("--p", a.p, "prime characteristic")->required();
  scan->add_option("--limit", a.limit, "largest r to test");
  scan->add_option("--e", a.scan_e, "prime-power exponent to verify");
  scan->add_option("--out", a.out, "also write the CSV here");

  auto* con = app.add_subcommand("construct", "build and certify a function table");
  con->add_option("--p", a.p, "prime characteristic")->required();
  con->add_option("--t", a.t, "base field degree, q = p^t");
  con->add_option("--r", a.r, "semiprimitive prime");
  con->add_option("--e", a.e, "order exponent, v = r^e");
  con->add_option("--epsilon", a.epsilon, "target angle for the odd-degree search");
  con->add_option("--seed", a.seed, "master seed (0 = unseeded deterministic order)");
  con->add_option("--method", a.method, "f_S method: auto, partition, or random");
  con->add_option("--out", a.out, "QNLF table output path")->required();
  con->add_option("--cert", a.cert, "also write the certificate JSON here");

  auto* mea = app.add_subcommand("measure", "recompute mu for a stored table");
  mea->add_option("--in", a.in, "QNLF table path")->required();
  mea->add_option("--out", a.out, "also write the report here");

  auto* rho = app.add_subcommand("rho", "exhaustive optimum over all tables on F_{q^n}");
  rho->add_option("--q", a.q, "field size (prime power)")->required();
  rho->add_option("--n", a.n, "extension degree")->required();
  rho->add_option("--out", a.out, "also write the report here");

  auto* par = app.add_subcommand("partition", "k-way low-imbalance partition of a set system");
  par->add_option("--sets", a.sets, "file of sets, one per line, whitespace-separated indices")
      ->required();
  par->add_option("--k", a.k, "number of blocks")->required();
  par->add_option("--seed", a.seed, "seed (accepted for interface symmetry)");
  par->add_option("--out", a.out, "also write the report here");

  auto* den = app.add_subcommand("density", "semiprimitivity densities");
  auto* opt_rl = den->add_option("--r-list", a.r_list, "primes for the exclusion recursion");
  auto* opt_p = den->add_option("--p", a.p, "prime for the heuristic density");
  den->add_option("--artin-limit", a.artin_limit, "prime cutoff for the Artin product");
  den->add_option("--out", a.out, "also write the report here");
  opt_rl->excludes(opt_p);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*scan) return run_scan(a);
    if (*con) return run_construct(a);
    if (*mea) return run_measure(a);
    if (*rho) return run_rho(a);
    if (*par) return run_partition(a);
    if (*den) {
      bool have_p = opt_p->count() > 0;
      if (!have_p && a.r_list.empty())
        return fail(kExitUsage, "usage", "density: need exactly one of --r-list or --p");
      return run_density(a, have_p);
    }
    return fail(kExitUsage, "usage", "no subcommand");
  } catch (const budget_error& e) {
    return fail(kExitBudget, "budget", e.what());
  } catch (const retry_error& e) {
    return fail(kExitRetry, "retry", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitParam, "param_gate", e.what());
  } catch (const std::domain_error& e) {
    return fail(kExitParam, "param_gate", e.what());
  } catch (const std::logic_error& e) {
    return fail(kExitInternal, "internal", e.what());
  } catch (const std::exception& e) {
    return fail(kExitIo, "io", e.what());
  }
}
