#include <doctest.h>

#include <cmath>
#include <random>

#include "dampkdv/estimates.hpp"
#include "support.hpp"

using namespace dampkdv;
using kernels::MultiplierForm;

TEST_CASE("cubic_phase examples") {
  CHECK(cubic_phase(1, 2) == 18);
  CHECK(cubic_phase(-1, 1) == 0);
  CHECK(cubic_phase(2, 3) == 90);
  CHECK(to_string(cubic_phase(1000000, -999999)) == "-2999997000000");
}

TEST_CASE("quartic_phase examples") {
  CHECK(quartic_phase(1, 2, 3) == 180);
  CHECK(quartic_phase(1, -1, 5) == 0);
  CHECK(quartic_phase(2, 2, 2) == 192);
}

TEST_CASE("phase identities: exhaustive small range, sampled wide range, overflow guard") {
  for (int a = -60; a <= 60; ++a)
    for (int b = -60; b <= 60; ++b) {
      const long long s = a + b;
      REQUIRE(cubic_phase(a, b) == static_cast<wide_int>(3 * s * a * b));
    }
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> d(-1000000, 1000000);
  for (int i = 0; i < 20000; ++i) {
    const auto a = d(gen), b = d(gen), c = d(gen);
    CHECK_NOTHROW(cubic_phase(a, b));
    CHECK_NOTHROW(quartic_phase(a, b, c));
  }
  CHECK_NOTHROW(quartic_phase(kMaxPhaseWavenumber, -kMaxPhaseWavenumber, kMaxPhaseWavenumber));
  CHECK_THROWS_AS(cubic_phase(kMaxPhaseWavenumber + 1, 1), std::overflow_error);
  CHECK_THROWS_AS(quartic_phase(1, 1, -kMaxPhaseWavenumber - 1), std::overflow_error);
}

TEST_CASE("to_string(wide_int)") {
  CHECK(to_string(wide_int{0}) == "0");
  CHECK(to_string(wide_int{-42}) == "-42");
  const wide_int big = static_cast<wide_int>(1) << 100;
  CHECK(to_string(big) == "1267650600228229401496703205376");
  CHECK(to_string(-big) == "-1267650600228229401496703205376");
}

TEST_CASE("lattice budget validation") {
  CHECK_NOTHROW(LatticeBudget::make(16, 0.9, 0.01));
  CHECK_THROWS_AS(LatticeBudget::make(0, 0.5, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBudget::make(16, -0.5, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBudget::make(16, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBudget::make(16, 0.5, 1.0 / 22.0), std::invalid_argument);
  LatticeBudget raw{8, 0.5, 0.2};
  CHECK_THROWS_AS(multiplier_sup(raw), std::invalid_argument);
}

TEST_CASE("multiplier value at single quadruples") {
  // (1,2,3,-6), s = 0.9, eps = 0.01: 6^0.9 36^0.01 / 60^0.43
  CHECK(kernels::multiplier_value(1, 2, 3, 0.9, 0.01, MultiplierForm::weighted) ==
        doctest::Approx(0.8939106525112276).epsilon(1e-13));
  CHECK(kernels::multiplier_value(1, 2, 3, 0.9, 0.01, MultiplierForm::consequence) ==
        doctest::Approx(std::pow(6.0, 0.9) / std::pow(60.0, 0.39)).epsilon(1e-13));
  // s = 0 is strictly smaller when |k4| > 1
  CHECK(kernels::multiplier_value(1, 2, 3, 0.0, 0.01, MultiplierForm::weighted) <
        kernels::multiplier_value(1, 2, 3, 0.9, 0.01, MultiplierForm::weighted));
  // inadmissible: a vanishing pair sum or k4 = 0
  CHECK(kernels::multiplier_value(1, -1, 3, 0.5, 0.01, MultiplierForm::weighted) == 0.0);
  CHECK(kernels::multiplier_value(1, 2, -3, 0.5, 0.01, MultiplierForm::weighted) == 0.0);
}

// Goldens from an independent exhaustive enumeration (Python, exact rationals for kis).
TEST_CASE("kis_check goldens") {
  for (int K : {8, 16}) {
    const auto e = kis_check(LatticeBudget::make(K, 0.5, 0.01));
    CHECK(e.value == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(e.at == std::array<int, 3>{-3, -1, 2});
  }
  CHECK(kis_check(LatticeBudget::make(8, 0.5, 0.01)).admissible == 3208);
  CHECK(kis_check(LatticeBudget::make(16, 0.5, 0.01)).admissible == 29072);
}

TEST_CASE("kis_check floor is K-independent") {
  const double k16 = kis_check(LatticeBudget::make(16, 0.5, 0.01)).value;
  const double k64 = kis_check(LatticeBudget::make(64, 0.5, 0.01)).value;
  CHECK(k64 >= 0.9 * k16);
  CHECK(k64 > 0.0);
}

TEST_CASE("multiplier_sup goldens") {
  struct G {
    double s, eps, weighted, consequence;
  };
  const G goldens[] = {
      {0.5, 0.01, 0.9782878134604391, 1.0086888745226419},
      {0.9, 0.005, 1.4283911130818259, 1.4504155028927526},
      {0.9, 0.01, 1.5181516133339175, 1.5653293653856273},
  };
  for (const G& g : goldens)
    for (int K : {8, 16}) {
      const auto b = LatticeBudget::make(K, g.s, g.eps);
      const auto w = multiplier_sup(b);
      CHECK(w.value == doctest::Approx(g.weighted).epsilon(1e-13));
      CHECK(w.at == std::array<int, 3>{-1, 2, 2});
      CHECK(multiplier_sup(b, MultiplierForm::consequence).value == doctest::Approx(g.consequence).epsilon(1e-13));
    }
}

TEST_CASE("multiplier_sup bounded across doublings") {
  for (double s : {0.5, 0.9})
    for (double eps : {0.005, 0.01}) {
      const double a = multiplier_sup(LatticeBudget::make(32, s, eps)).value;
      const double b = multiplier_sup(LatticeBudget::make(64, s, eps)).value;
      CHECK(b / a <= 1.05);
    }
}

TEST_CASE("bilinear_ratio closed forms") {
  const GridSpec g = GridSpec::with_modes(8);
  CoefSeq u(g);
  u.set_mode(1, 1.0);
  CHECK(bilinear_ratio(u, u, SobolevIndex{0.5}) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  // general s: ||B||_{H^s} = 2^s sqrt(2)/6, ||u||^2 = 2
  CHECK(bilinear_ratio(u, u, SobolevIndex{0.9}) == doctest::Approx(std::pow(2.0, 0.9) * std::sqrt(2.0) / 12.0));
  CHECK(std::isnan(bilinear_ratio(CoefSeq(g), u, SobolevIndex{0.5})));
  CHECK(std::isnan(bilinear_ratio(u, CoefSeq(g), SobolevIndex{0.5})));
}

TEST_CASE("bilinear_constant: ascent improves on random trials, deterministic, seed-stable") {
  const auto b = LatticeBudget::make(32, 0.9, 0.01);
  const BilinearEstimate a = bilinear_constant(b, 2000, 1);
  CHECK(a.trials + a.skipped == 2000);
  CHECK(a.sup_ratio >= a.best_random);
  const BilinearEstimate again = bilinear_constant(b, 2000, 1);
  CHECK(again.sup_ratio == a.sup_ratio);
  const BilinearEstimate other = bilinear_constant(b, 2000, 2);
  CHECK(std::abs(other.sup_ratio / a.sup_ratio - 1.0) <= 0.10);
  // the two-mode pair is a lower bound for the supremum
  CHECK(a.sup_ratio >= std::pow(2.0, 0.9) * std::sqrt(2.0) / 12.0);
  CHECK_THROWS_AS(bilinear_constant(LatticeBudget::make(8, 1.0, 0.01), 10, 1), std::invalid_argument);
}

TEST_CASE("bilinear_constant stable across K") {
  double prev = 0.0;
  for (int K : {16, 32, 64}) {
    const double c = bilinear_constant(LatticeBudget::make(K, 0.5, 0.01), 1000, 3).sup_ratio;
    if (prev > 0.0) CHECK(c / prev <= 1.05);
    prev = c;
  }
}

TEST_CASE("rho bound scan") {
  const RhoBoundScan r = rho_bound_scan(LatticeBudget::make(64, 0.9, 0.01), 2000, 4);
  CHECK(r.trials == 2000);
  CHECK(r.violations == 0);
  CHECK(r.worst_ratio <= 1.0);
  CHECK(r.worst_ratio > 0.0);
}
