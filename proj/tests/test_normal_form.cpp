#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dampkdv/experiments.hpp"
#include "dampkdv/normal_form.hpp"
#include "support.hpp"

using namespace dampkdv;
using testing::random_hermitian;

namespace {

constexpr cplx I{0.0, 1.0};

CoefSeq ones_on_pm1(GridSpec g) {
  CoefSeq u(g);
  u.set_mode(1, 1.0);
  return u;
}

}  // namespace

TEST_CASE("aux_profile_v: f = cos x gives v_1 = +i/2, i.e. v = -sin x") {
  // (i k)^3 = -i at k = 1, so v_1 = (1/2)/(-i) = i/2.
  const GridSpec g = GridSpec::with_modes(4);
  CoefSeq f(g);
  f.set_mode(1, 0.5);
  const CoefSeq v = aux_profile_v(f);
  CHECK(std::abs(v[1] - cplx(0.0, 0.5)) < 1e-16);
  CHECK(std::abs(v[-1] - cplx(0.0, -0.5)) < 1e-16);
  const auto x = to_physical(v);
  for (int j = 0; j < g.P; ++j) CHECK(x[j] == doctest::Approx(-std::sin(2 * std::numbers::pi * j / g.P)).epsilon(1e-12));
  // d_x^3 v = f
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(std::pow(I * double(k), 3) * v[k] - f[k]) < 1e-15);
}

TEST_CASE("aux_profile_v: zero and norm bounds") {
  const GridSpec g = GridSpec::with_modes(32);
  CHECK(testing::max_abs(aux_profile_v(CoefSeq(g))) == 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CoefSeq f = random_hermitian(g, seed);
    const CoefSeq v = aux_profile_v(f);
    CHECK(l2_norm(v) <= l2_norm(f));
    for (double s : {0.0, 0.5, 0.9}) {
      double hs3 = 0.0;  // ||f||_{H^{s-3}}
      for (int k = 1; k <= 32; ++k) hs3 += 2.0 * std::pow(k, 2 * (s - 3)) * std::norm(f[k]);
      CHECK(sobolev_norm(v, SobolevIndex{s}) == doctest::Approx(std::sqrt(hs3)).epsilon(1e-12));
      CHECK(sobolev_norm(v, SobolevIndex{s}) <= l2_norm(f));
    }
  }
}

TEST_CASE("frame: z variables") {
  const GridSpec g = GridSpec::with_modes(32);
  const CoefSeq f = random_hermitian(g, 1);
  const NormalFormFrame fr(aux_profile_v(f), 0.8);
  const CoefSeq u = random_hermitian(g, 2);
  CHECK(testing::max_diff(fr.to_z(u, 0.0), u - fr.v()) < 1e-15);
  CHECK(testing::max_abs(fr.to_z(fr.v(), 1.7)) == 0.0);
  CHECK(testing::max_diff(fr.from_z(fr.to_z(u, 2.7), 2.7), u) < 1e-12);
  for (int k = 1; k <= 32; ++k) CHECK(std::abs(fr.y(1.5)[k]) == doctest::Approx(std::abs(fr.v()[k]) * std::exp(0.8 * 1.5)));
  // closed-form drift equals a centred difference of y minus gamma y; low modes keep the
  // difference quotient's k^6 d^2 truncation error small
  const NormalFormFrame low(aux_profile_v(random_hermitian(GridSpec::with_modes(6), 1)), 0.8);
  const double t = 0.3, d = 1e-6;
  const CoefSeq fd = (1.0 / (2 * d)) * (low.y(t + d) - low.y(t - d)) - 0.8 * low.y(t);
  CHECK(testing::max_diff(fd, low.y_drift(t)) < 1e-6 * testing::max_abs(low.y_drift(t)));
  CHECK_THROWS_AS(fr.to_z(CoefSeq(GridSpec::with_modes(8)), 0.0), std::invalid_argument);
}

TEST_CASE("op_B examples") {
  const GridSpec g = GridSpec::with_modes(4);
  const CoefSeq u = ones_on_pm1(g);
  const CoefSeq b = op_B(u, u, 0.0);
  CHECK(std::abs(b[2] - 1.0 / 6.0) < 1e-16);
  CHECK(b[0] == cplx{});
  const CoefSeq bt = op_B(u, u, std::numbers::pi / 3);
  CHECK(std::abs(bt[2] - 1.0 / 6.0) < 1e-14);
  const CoefSeq bq = op_B(u, u, 0.1);
  CHECK(std::abs(bq[2] - std::polar(1.0, -0.6) / 6.0) < 1e-15);
}

TEST_CASE("op_B: brute-force oracle, bilinearity, hermitian at t = 0") {
  const GridSpec g = GridSpec::with_modes(12);
  const CoefSeq u = random_hermitian(g, 3), v = random_hermitian(g, 4), w = random_hermitian(g, 5);
  for (double t : {0.0, 0.37, 2.0}) CHECK(testing::max_diff(op_B(u, v, t), testing::bilinear_oracle(u, v, t)) < 1e-13);
  CHECK(testing::hermitian_defect(op_B(u, v, 0.0)) < 1e-14);
  CHECK(testing::max_diff(op_B(2.0 * u + w, v, 0.4), 2.0 * op_B(u, v, 0.4) + op_B(w, v, 0.4)) < 1e-13);
  CHECK(testing::max_diff(op_B(u, v, 0.4), op_B(v, u, 0.4)) < 1e-14);
}

TEST_CASE("op_rho examples") {
  const GridSpec g = GridSpec::with_modes(4);
  CoefSeq u(g);
  u.set_mode(1, 2.0);
  const CoefSeq r = op_rho(u);
  CHECK(std::abs(r[1] - cplx(0.0, -4.0 / 3.0)) < 1e-15);
  CHECK(std::abs(r[-1] - cplx(0.0, 4.0 / 3.0)) < 1e-15);
  CHECK(r[-1] == std::conj(r[1]));
  CHECK(testing::max_abs(op_rho(CoefSeq(g))) == 0.0);
}

TEST_CASE("op_rho: H^s bound by ||u||^3") {
  const GridSpec g = GridSpec::with_modes(64);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CoefSeq u = random_hermitian(g, seed, 0.1 + 0.2 * seed);
    const double n = l2_norm(u);
    CHECK(sobolev_norm(op_rho(u), SobolevIndex{0.5}) <= n * n * n);
    CHECK(testing::hermitian_defect(op_rho(u)) < 1e-14 * n * n * n);
  }
}

TEST_CASE("resonance_classify examples and errors") {
  CHECK(resonance_classify(-2, 2, 2) == Resonance::s1);
  CHECK(resonance_classify(3, -3, 1) == Resonance::s2);
  CHECK(resonance_classify(3, 1, -3) == Resonance::s3);
  CHECK(resonance_classify(1, 2, 3) == Resonance::nonresonant);
  CHECK(resonance_classify(5, 2, -2) == Resonance::outside_domain);
  CHECK(std::string(to_string(Resonance::s2)) == "S2");
  CHECK_THROWS_AS(resonance_classify(0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(resonance_classify(1, 0, 2), std::invalid_argument);
}

TEST_CASE("resonance_classify partitions the domain |k_i| <= 64") {
  constexpr int B = 64;
  long long count[5] = {};
  for (int a = -B; a <= B; ++a)
    for (int b = -B; b <= B; ++b)
      for (int c = -B; c <= B; ++c) {
        if (!a || !b || !c) continue;
        const Resonance r = resonance_classify(a, b, c);
        ++count[static_cast<int>(r)];
        if (b + c == 0) {
          REQUIRE(r == Resonance::outside_domain);
          continue;
        }
        const int hits = (a + b == 0 && a + c == 0) + (a + b == 0 && a + c != 0) + (a + c == 0 && a + b != 0) +
                         ((a + b) * (a + c) != 0);
        REQUIRE(hits == 1);
        REQUIRE((r == Resonance::nonresonant) == ((a + b) * (a + c) * (b + c) != 0));
      }
  // S1 = {(-k, k, k)}: one triple per nonzero k
  CHECK(count[static_cast<int>(Resonance::s1)] == 2 * B);
}

TEST_CASE("op_R examples") {
  const GridSpec g = GridSpec::with_modes(4);
  const CoefSeq u = ones_on_pm1(g);
  const CoefSeq r = op_R(u, 0.0);
  CHECK(std::abs(r[3] - cplx(0.0, 1.0 / 6.0)) < 1e-16);
  CHECK(std::abs(r[-3] - cplx(0.0, -1.0 / 6.0)) < 1e-16);
  CHECK(std::abs(r[1]) < 1e-16);
  CHECK(r[0] == cplx{});
  CHECK(testing::max_abs(op_R(CoefSeq(g), 0.3)) == 0.0);
}

TEST_CASE("op_R: brute-force oracle, cubic scaling, hermitian at t = 0") {
  const GridSpec g = GridSpec::with_modes(10);
  const CoefSeq u = random_hermitian(g, 9);
  for (double t : {0.0, 0.01, 0.5}) CHECK(testing::max_diff(op_R(u, t), testing::trilinear_oracle(u, t)) < 1e-12);
  CHECK(testing::max_diff(op_R(1.7 * u, 0.2), (1.7 * 1.7 * 1.7) * op_R(u, 0.2)) < 1e-11);
  CHECK(testing::hermitian_defect(op_R(u, 0.0)) < 1e-13);
  CHECK_THROWS_AS(op_R(CoefSeq(GridSpec::with_modes(kMaxTrilinearModes + 1))), std::invalid_argument);
}

TEST_CASE("resonant cancellation") {
  for (int K : {4, 16, 64}) {
    const CoefSeq u = random_hermitian(GridSpec::with_modes(K), 30 + K);
    CHECK(resonant_sum_identity_check(u) <= 1e-12);
  }
  const GridSpec g = GridSpec::with_modes(8);
  CoefSeq u(g);
  u.set_mode(1, cplx(0.3, -0.8));
  CHECK(resonant_sum_identity_check(u) == 0.0);
  CHECK(resonant_sum_identity_check(CoefSeq(g)) == 0.0);
}

TEST_CASE("normal form residual vanishes on the trivial trajectory") {
  const GridSpec g = GridSpec::with_modes(8);
  const FlowParams p = FlowParams::damped(1.0, CoefSeq(g), 1e-3);
  const TrajectoryRecord r = evolve(CoefSeq(g), 0.01, p, 1);
  const NormalFormFrame fr = NormalFormFrame::for_flow(p);
  CHECK(nf_residual(r, fr, 0.005, 0.002) == 0.0);
  CHECK(integrated_identity_residual(r, fr, 0, 10) == 0.0);
  CHECK_THROWS_AS(nf_residual(r, fr, 0.0, 0.002), std::invalid_argument);
}

TEST_CASE("normal form residual: gamma = 1, f = cos x, rough data, t = 0.5") {
  NfCase c;  // K = 32, sigma = 1.5, dt = 2.5e-5 with trajectory step dt/4
  const NfStudy s = nf_study(c);
  CHECK(s.residual <= 1e-5);
  CHECK(s.ratio >= 3.0);
  CHECK(s.ratio <= 5.0);
  CHECK(s.integrated_residual <= 1e-5);
  // -1/3 in front of B(Z, d_t y - g y) leaves an O(1) defect
  CHECK(s.one_third_coefficient_residual > 100 * s.residual);
}

TEST_CASE("lattice closure agrees with the Galerkin closure when the cutoff modes vanish") {
  const GridSpec g = GridSpec::with_modes(16);
  CoefSeq z(g);
  for (int k = 1; k <= 5; ++k) z.set_mode(k, std::polar(1.0 / k, 0.3 * k));
  CoefSeq f(g);
  f.set_mode(1, 0.5);
  const NormalFormFrame fr(aux_profile_v(f), 1.0);
  CHECK(testing::max_diff(nf_rhs(z, fr, 0.2, Closure::galerkin), nf_rhs(z, fr, 0.2, Closure::lattice)) < 1e-13);
}

TEST_CASE("duhamel_gap") {
  const GridSpec g = GridSpec::with_modes(16);
  const CoefSeq u0 = random_hermitian(g, 2);
  CHECK(duhamel_gap(u0, u0, 0.0, 0.5, SobolevIndex{0.5}) == 0.0);
  const FlowParams p = FlowParams::damped(0.5, CoefSeq(g), 1e-3);
  const TrajectoryRecord z = evolve(CoefSeq(g), 1.0, p, 100);
  for (double t : z.times) CHECK(duhamel_gap(CoefSeq(g), z, t, 0.5, SobolevIndex{0.9}) == 0.0);
  const TrajectoryRecord r = evolve(u0, 0.5, p, 100);
  const double gap = duhamel_gap(u0, r, 0.5, 0.5, SobolevIndex{0.5});
  CHECK(gap == doctest::Approx(sobolev_norm(r.state_at(0.5) - linear_flow(u0, 0.5, 0.5), SobolevIndex{0.5})));
  CHECK(gap > 0.0);
}
