#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

#include "qnl/spectral.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("QNL_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string("\"") + bin + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "qnl_cli_scratch";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("scan lists semiprimitive orders", "[cli]") {
  auto r = run_cli("scan --p 2 --limit 50");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("p,r,e_verified\n", 0) == 0);
  REQUIRE(r.out.find("2,7,2\n") != std::string::npos);

  REQUIRE(run_cli("scan --p 23 --limit 50").out.find("23,7,2\n") != std::string::npos);
  REQUIRE(run_cli("scan --p 17 --limit 50").out.find("17,19,2\n") != std::string::npos);

  auto dir = scratch_dir();
  auto csv = (dir / "scan.csv").string();
  auto rf = run_cli("scan --p 2 --limit 50 --out " + csv);
  REQUIRE(rf.code == 0);
  REQUIRE(slurp(csv) == rf.out);
}

TEST_CASE("rho and density report exact values", "[cli]") {
  auto r = run_cli("rho --q 2 --n 3");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["schema"] == "qnl_cert_v1");
  REQUIRE(j["rho"] == 2);
  REQUIRE(j["mu"] == "sqrt(2)");
  REQUIRE(j["mu_value"].get<double>() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));

  auto d = run_cli("density --r-list 7");
  REQUIRE(d.code == 0);
  auto jd = json::parse(d.out);
  REQUIRE(jd["densities"][0] == "2/7");
  REQUIRE(jd["values"][0].get<double>() == Catch::Approx(2.0 / 7.0).epsilon(1e-12));

  auto dp = run_cli("density --p 2 --artin-limit 100000");
  REQUIRE(dp.code == 0);
  auto jp = json::parse(dp.out);
  double artin = jp["artin_constant"].get<double>();
  REQUIRE(artin == Catch::Approx(0.3739558).margin(2e-5));
  REQUIRE(jp["moree_density"].get<double>() == Catch::Approx(artin / 2.0).epsilon(1e-12));
}

TEST_CASE("construct writes a table, a certificate, and is reproducible", "[cli]") {
  auto dir = scratch_dir();
  auto tab1 = (dir / "a.qnlf").string();
  auto tab2 = (dir / "b.qnlf").string();
  std::string flags = "construct --p 2 --t 1 --r 7 --e 1 --epsilon 2.0 --seed 42 --out ";

  auto r1 = run_cli(flags + tab1);
  REQUIRE(r1.code == 7);
  auto j = json::parse(r1.out);
  REQUIRE(j["schema"] == "qnl_cert_v1");
  REQUIRE(j["derived"]["n"] == 3);
  REQUIRE(j["degree_search"]["s"] == 1);
  REQUIRE(j["certificate"]["fT_pass"] == true);
  REQUIRE(j["certificate"]["fS_pass"] == true);
  REQUIRE(j["certificate"]["chain_pass"] == false);
  REQUIRE(j["certificate"]["pass"] == false);
  REQUIRE(j["seeds"]["master"] == 42);
  REQUIRE(j["seeds"]["plan"] != j["seeds"]["f_s"]);

  auto r2 = run_cli(flags + tab2);
  REQUIRE(r2.code == 7);
  REQUIRE(r1.out == r2.out);
  REQUIRE(slurp(tab1) == slurp(tab2));
  REQUIRE(std::filesystem::file_size(tab1) == 32);

  auto cert_path = (dir / "cert.json").string();
  auto r3 = run_cli(flags + tab1 + " --cert " + cert_path);
  REQUIRE(r3.code == 7);
  REQUIRE(slurp(cert_path) == r3.out);

  auto rr = run_cli(flags + tab1 + " --method random");
  REQUIRE(rr.code == 7);
  REQUIRE(json::parse(rr.out)["f_s"]["method"] == "random_spectral");
}

TEST_CASE("measure agrees with the certificate", "[cli]") {
  auto dir = scratch_dir();
  auto tab = (dir / "m.qnlf").string();
  auto rc = run_cli("construct --p 2 --t 1 --r 7 --e 1 --epsilon 2.0 --seed 9 --out " + tab);
  REQUIRE(rc.code == 7);
  auto cert = json::parse(rc.out)["certificate"];

  auto rm = run_cli("measure --in " + tab);
  REQUIRE(rm.code == 0);
  auto j = json::parse(rm.out);
  REQUIRE(j["config"]["n"] == 3);
  REQUIRE(j["mu"].get<double>() == Catch::Approx(cert["mu"].get<double>()).epsilon(1e-12));
  REQUIRE(j["witness_distance"] == cert["witness_distance"]);
  REQUIRE(j["parseval_residual_max"].get<double>() <= 1e-9);
}

TEST_CASE("measure on an affine table reports the affine value", "[cli]") {
  using namespace qnl;
  FieldCtx big = make_field(2, 3);
  FieldCtx sub = make_field(2, 1);
  SubfieldView view = make_subfield_view(big, sub);
  FunctionTable tab;
  tab.p = 2;
  tab.t = 1;
  tab.n = 3;
  tab.modulus = big.modulus;
  tab.values.resize(big.order);
  for (elem y = 0; y < big.order; ++y)
    tab.values[y] = std::uint8_t(sub.add(view.trace_to_sub(big.mul(3, y)), 1));

  auto dir = scratch_dir();
  auto path = (dir / "affine.qnlf").string();
  write_qnlf(tab, path);
  auto r = run_cli("measure --in " + path);
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  double affine = std::sqrt(8.0);
  REQUIRE(j["mu"].get<double>() == Catch::Approx(affine).epsilon(1e-12));
  REQUIRE(j["witness_distance"] == 0);
}

TEST_CASE("failure modes map to distinct exit codes", "[cli]") {
  auto dir = scratch_dir();
  auto tab = (dir / "never.qnlf").string();

  auto budget =
      run_cli("construct --p 2 --t 1 --r 7 --e 1 --epsilon 1e-9 --seed 1 --out " + tab);
  REQUIRE(budget.code == 4);
  auto jb = json::parse(budget.out);
  REQUIRE(jb["error"]["class"] == "budget");
  REQUIRE(jb["error"]["code"] == 4);

  auto gate = run_cli("construct --p 3 --t 1 --r 11 --e 2 --out " + tab);
  REQUIRE(gate.code == 3);
  REQUIRE(json::parse(gate.out)["error"]["class"] == "param_gate");

  auto bad = (dir / "bad.qnlf").string();
  std::ofstream(bad) << "not a table";
  auto io = run_cli("measure --in " + bad);
  REQUIRE(io.code == 6);
  REQUIRE(json::parse(io.out)["error"]["class"] == "io");

  REQUIRE(run_cli("rho --q 6 --n 1").code == 3);
  REQUIRE(run_cli("rho --q 2 --n 55").code == 4);
  REQUIRE(run_cli("scan").code == 2);
  REQUIRE(run_cli("density").code == 2);
  REQUIRE(run_cli("density --r-list 7 --p 2").code == 2);
  REQUIRE(run_cli("nonsense").code == 2);
}

TEST_CASE("partition reports blocks and envelopes", "[cli]") {
  auto dir = scratch_dir();
  auto sets = (dir / "sets.txt").string();
  std::ofstream(sets) << "0 1 2\n1 2 3\n0 3\n2 4 5\n";

  auto r = run_cli("partition --sets " + sets + " --k 2");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["config"]["elements"] == 6);
  REQUIRE(j["config"]["sets"] == 4);
  REQUIRE(j["blocks"].size() == 6);
  for (auto& b : j["blocks"]) REQUIRE(b.get<int>() < 2);
  REQUIRE(j["measured_imbalance"].get<double>() <= j["impl_envelope"].get<double>());
  REQUIRE(j["closed_envelope_nat"].get<double>() <
          j["closed_envelope_log2"].get<double>());

  auto missing = run_cli("partition --sets " + (dir / "nope.txt").string() + " --k 2");
  REQUIRE(missing.code == 6);
}
