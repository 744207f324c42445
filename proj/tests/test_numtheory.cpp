#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qnl/numtheory.hpp"

using namespace qnl;

TEST_CASE("modular primitives", "[numtheory]") {
  REQUIRE(powmod_u64(2, 10, 1000) == 24);
  REQUIRE(powmod_u64(7, 0, 13) == 1);
  REQUIRE(mulmod_u64(0xFFFFFFFFFFFFull, 0xFFFFFFFFFFull, 1000000007) ==
          u64((__uint128_t(0xFFFFFFFFFFFFull) * 0xFFFFFFFFFFull) % 1000000007));
  REQUIRE(modinv_u64(3, 7) == 5);
  REQUIRE(modinv_u64(10, 17) == 12);  // 120 = 7*17 + 1
}

TEST_CASE("primality and factorization", "[numtheory]") {
  REQUIRE(is_prime_u64(2));
  REQUIRE(is_prime_u64(3));
  REQUIRE_FALSE(is_prime_u64(1));
  REQUIRE_FALSE(is_prime_u64(561));     // Carmichael
  REQUIRE_FALSE(is_prime_u64(341));     // 2-pseudoprime
  REQUIRE(is_prime_u64((1ull << 61) - 1));
  REQUIRE_FALSE(is_prime_u64((1ull << 61) + 1));

  auto f = factorize(360);
  REQUIRE(f == std::vector<std::pair<u64, int>>{{2, 3}, {3, 2}, {5, 1}});
  REQUIRE(factorize(1).empty());
  REQUIRE(euler_phi(1) == 1);
  REQUIRE(euler_phi(49) == 42);
  REQUIRE(euler_phi(529) == 506);
}

TEST_CASE("multiplicative order and primitive roots", "[numtheory]") {
  REQUIRE(ord_mod(2, 7) == 3);
  REQUIRE(ord_mod(3, 7) == 6);
  REQUIRE(ord_mod(-2, 7) == 6);
  REQUIRE(ord_mod(-2, 49) == 42);
  REQUIRE(ord_mod(-3, 121) == 10);  // stays short: 3^10 = 59049 = 1 + 488*121
  REQUIRE(is_primitive_root(3, 7));
  REQUIRE(is_primitive_root(-2, 23));
  REQUIRE_FALSE(is_primitive_root(2, 23));
  REQUIRE_FALSE(is_primitive_root(-3, 121));
  REQUIRE(is_primitive_root(-3, 11));
}

TEST_CASE("semiprimitive parameter gate", "[numtheory]") {
  auto c = semiprimitive_check(2, 7, 1);
  REQUIRE(c.pass());
  REQUIRE(c.v == 7);
  REQUIRE(c.m == 3);

  c = semiprimitive_check(2, 7, 2);
  REQUIRE(c.pass());
  REQUIRE(c.v == 49);
  REQUIRE(c.m == 21);

  c = semiprimitive_check(3, 23, 1);
  REQUIRE(c.pass());
  REQUIRE(c.m == 11);

  c = semiprimitive_check(3, 23, 2);
  REQUIRE(c.pass());
  REQUIRE(c.m == 253);

  c = semiprimitive_check(5, 11, 1);
  REQUIRE(c.pass());
  REQUIRE(c.m == 5);

  // -3 generates mod 11 but not mod 121, so the e = 2 gate must close.
  REQUIRE(semiprimitive_check(3, 11, 1).pass());
  REQUIRE_FALSE(semiprimitive_check(3, 11, 2).pass());

  REQUIRE_FALSE(semiprimitive_check(2, 3, 1).pass());   // r too small
  REQUIRE_FALSE(semiprimitive_check(2, 5, 1).pass());   // r = 1 mod 4
  REQUIRE_FALSE(semiprimitive_check(2, 31, 1).pass());  // ord(-2) = 10 < 30
  REQUIRE_FALSE(semiprimitive_check(7, 7, 1).pass());   // r = p
  REQUIRE_THROWS_AS(semiprimitive_check(4, 7, 1), std::invalid_argument);
}

TEST_CASE("smallest admissible r for the first fifteen primes", "[numtheory]") {
  // For each p, scanning up to r must find exactly r itself.
  const std::pair<u64, u64> pairs[] = {
      {2, 7},  {3, 23},  {5, 11},  {7, 31},  {11, 7},
      {13, 23}, {17, 19}, {19, 31}, {23, 7},  {29, 23},
      {31, 11}, {37, 7},  {41, 23}, {43, 19}, {47, 11},
  };
  for (auto [p, r] : pairs) {
    CAPTURE(p, r);
    REQUIRE(scan_r(p, r) == std::vector<u64>{r});
  }
}

TEST_CASE("imaginary quadratic class numbers", "[numtheory]") {
  REQUIRE(class_number(7) == 1);
  REQUIRE(class_number(11) == 1);
  REQUIRE(class_number(19) == 1);
  REQUIRE(class_number(23) == 3);
  REQUIRE(class_number(31) == 3);
  REQUIRE(class_number(43) == 1);
  REQUIRE(class_number(47) == 5);
  REQUIRE(class_number(67) == 1);
  REQUIRE(class_number(71) == 7);
  REQUIRE(class_number(163) == 1);
  REQUIRE_THROWS_AS(class_number(13), std::invalid_argument);
  REQUIRE_THROWS_AS(class_number(9), std::invalid_argument);
  REQUIRE_THROWS_AS(class_number(3), std::invalid_argument);
}

TEST_CASE("coefficients of the closed-form value", "[numtheory]") {
  auto g = solve_gauss_coeffs(2, 1, 7, 1);
  REQUIRE(g.a == -1);
  REQUIRE(g.b == 1);
  REQUIRE(g.h == 1);
  REQUIRE(g.k == 3);
  // a^2 + b^2 r = 4 p^h
  REQUIRE(g.a * g.a + g.b * g.b * 7 == 4 * 2);

  g = solve_gauss_coeffs(2, 1, 7, 2);
  REQUIRE(g.a == -1);
  REQUIRE(g.b == 1);
  REQUIRE(g.k == 21);

  g = solve_gauss_coeffs(3, 1, 23, 1);
  REQUIRE(g.a == -4);
  REQUIRE(g.b == 2);
  REQUIRE(g.h == 3);
  REQUIRE(g.k == 11);
  REQUIRE(g.a * g.a + g.b * g.b * 23 == 4 * 27);
}

TEST_CASE("closed-form candidates sit on the unit circle", "[numtheory]") {
  auto cand = gauss_closed_form(2, 1, 7, 1, 1);
  const double s8 = 2.0 * std::sqrt(2.0);
  REQUIRE(cand[0].real() == Catch::Approx(-1.0 / s8).margin(1e-12));
  REQUIRE(cand[0].imag() == Catch::Approx(std::sqrt(7.0) / s8).margin(1e-12));
  REQUIRE(cand[1] == std::conj(cand[0]));
  REQUIRE(std::abs(cand[0]) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(std::arg(cand[0]) == Catch::Approx(1.9321634507).margin(1e-9));

  for (auto z : gauss_closed_form(3, 1, 23, 1, 1))
    REQUIRE(std::abs(z) == Catch::Approx(1.0).margin(1e-12));
  for (auto z : gauss_closed_form(2, 1, 7, 2, 1))
    REQUIRE(std::abs(z) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("smallest odd extension degree", "[numtheory]") {
  auto res = find_odd_degree(2, 1, 7, 1, 0.5);
  REQUIRE(res.s == 5);
  REQUIRE(res.achieved == Catch::Approx(0.2360393).margin(1e-6));
  REQUIRE(res.beta == Catch::Approx(1.9321635).margin(1e-6));

  res = find_odd_degree(2, 1, 7, 1, 1.3);
  REQUIRE(res.s == 1);
  REQUIRE(res.achieved == Catch::Approx(1.2094292).margin(1e-6));

  // The returned s is minimal: every smaller odd degree misses the window.
  res = find_odd_degree(2, 1, 7, 2, 0.5);
  double target = 0.5 / 7.0;
  constexpr double pi = 3.14159265358979323846;
  REQUIRE(res.s % 2 == 1);
  REQUIRE(res.achieved <= target);
  for (u64 s = 1; s < res.s; s += 2)
    REQUIRE(std::abs(wrap_pm_pi(double(s) * res.beta - pi)) > target);

  REQUIRE_THROWS_AS(find_odd_degree(2, 1, 7, 1, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(find_odd_degree(2, 1, 7, 1, 4.0), std::invalid_argument);
  REQUIRE_THROWS_AS(find_odd_degree(2, 1, 7, 1, 1e-9, 99), budget_error);
}

TEST_CASE("artin constant and residue densities", "[numtheory]") {
  double a = artin_constant();
  REQUIRE(a == Catch::Approx(0.3739558).margin(1e-4));
  REQUIRE(moree_density(2, a) == Catch::Approx(a / 2.0).margin(1e-15));
  REQUIRE(moree_density(3, a) == Catch::Approx(a / 2.0 * (1.0 + 1.0 / 5.0)).margin(1e-12));
  REQUIRE(moree_density(5, a) == Catch::Approx(a / 2.0 * (1.0 - 1.0 / 19.0)).margin(1e-12));
  REQUIRE_THROWS_AS(moree_density(6), std::invalid_argument);
}

TEST_CASE("exact density recursion", "[numtheory]") {
  auto d = density_recursion({7});
  REQUIRE(d.size() == 1);
  REQUIRE(rat_str(d[0]) == "2/7");

  d = density_recursion({7, 23});
  REQUIRE(d[1].num == 96);
  REQUIRE(d[1].den == 161);

  d = density_recursion({7, 23, 47});
  REQUIRE(d[2].num == 5942);
  REQUIRE(d[2].den == 7567);
  // Monotone and strictly below 1.
  REQUIRE(rat_val(d[0]) < rat_val(d[1]));
  REQUIRE(rat_val(d[1]) < rat_val(d[2]));
  REQUIRE(rat_val(d[2]) < 1.0);

  REQUIRE_THROWS_AS(density_recursion({}), std::invalid_argument);
  REQUIRE_THROWS_AS(density_recursion({7, 8}), std::invalid_argument);
}

TEST_CASE("rational helpers", "[numtheory]") {
  Rat r = rat_make(4, -6);
  REQUIRE(r.num == -2);
  REQUIRE(r.den == 3);
  REQUIRE(rat_str(r) == "-2/3");
  REQUIRE(rat_str(rat_make(0, 5)) == "0");
  REQUIRE(rat_str(rat_make(8, 4)) == "2");
  REQUIRE_THROWS_AS(rat_make(1, 0), std::invalid_argument);

  // a + b and a + b - ab
  Rat s = rat_combine(rat_make(1, 2), rat_make(1, 3), false);
  REQUIRE(s.num == 5);
  REQUIRE(s.den == 6);
  s = rat_combine(rat_make(1, 2), rat_make(1, 3), true);
  REQUIRE(s.num == 2);
  REQUIRE(s.den == 3);
}

TEST_CASE("deterministic seeding helpers", "[numtheory]") {
  u64 st = 42;
  u64 a = splitmix64(st);
  u64 b = splitmix64(st);
  REQUIRE(a != b);
  REQUIRE(stage_seed(7, 0) != stage_seed(7, 1));
  REQUIRE(stage_seed(7, 0) == stage_seed(7, 0));
  REQUIRE(stage_seed(7, 0) != stage_seed(8, 0));

  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    u64 v = rng.below(10);
    REQUIRE(v < 10);
    double u = rng.unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  std::vector<int> perm(20);
  for (int i = 0; i < 20; ++i) perm[i] = i;
  Rng r1(5), r2(5);
  auto p1 = perm, p2 = perm;
  r1.shuffle(p1);
  r2.shuffle(p2);
  REQUIRE(p1 == p2);
  std::sort(p1.begin(), p1.end());
  REQUIRE(p1 == perm);

  REQUIRE(ipow_checked(3, 11) == 177147);
  REQUIRE_THROWS_AS(ipow_checked(2, 64), std::overflow_error);
  REQUIRE(wrap_pm_pi(7.0) == Catch::Approx(7.0 - 2 * 3.14159265358979323846).margin(1e-12));
  REQUIRE(wrap_pm_pi(-7.0) == Catch::Approx(2 * 3.14159265358979323846 - 7.0).margin(1e-12));
}
