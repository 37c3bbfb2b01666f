#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dampkdv/flow.hpp"
#include "support.hpp"

using namespace dampkdv;
using testing::random_hermitian;

namespace {

CoefSeq cos_x(GridSpec g, double a = 1.0) {
  CoefSeq u(g);
  u.set_mode(1, a / 2.0);
  return u;
}

FlowParams with_scheme(FlowParams p, Scheme s) {
  p.scheme = s;
  return p;
}

CoefSeq final_state(const CoefSeq& u0, double T, const FlowParams& p) {
  CoefSeq last = u0;
  integrate(u0, T, p, [&](std::size_t, double, const CoefSeq& u) { last = u; });
  return last;
}

// log2 of the error ratio under step halving, against a reference at h/2.
double observed_order(const CoefSeq& u0, double T, const FlowParams& base, double h) {
  auto at = [&](double step) {
    FlowParams p = base;
    p.h = step;
    return final_state(u0, T, p);
  };
  const CoefSeq a = at(h), b = at(h / 2), c = at(h / 4);
  return std::log2(l2_distance(a, b) / l2_distance(b, c));
}

}  // namespace

TEST_CASE("linear_multiplier examples") {
  for (int k : {-7, 0, 3, 100}) CHECK(linear_multiplier(k, 0.0, 0.7) == cplx(1.0, 0.0));
  const cplx m = linear_multiplier(1, std::numbers::pi, 0.0);
  CHECK(std::abs(m - cplx(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(linear_multiplier(1, 1.0, std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-15));
  for (int k = -20; k <= 20; ++k) CHECK(std::abs(linear_multiplier(k, 2.5, 0.3)) == doctest::Approx(std::exp(-0.75)));
}

TEST_CASE("linear_flow examples") {
  const GridSpec g = GridSpec::with_modes(8);
  const CoefSeq u0 = random_hermitian(g, 3);
  CHECK(linear_flow(u0, 0.0, 1.0) == u0);
  CHECK(testing::max_diff(linear_flow(cos_x(g), std::numbers::pi, 0.0), -1.0 * cos_x(g)) < 1e-15);
  CHECK(l2_norm(linear_flow(u0, 3.0, 1.0)) / l2_norm(u0) == doctest::Approx(0.0497871).epsilon(1e-6));
  const CoefSeq w = linear_flow(u0, 1.3, 0.2);
  CHECK(testing::hermitian_defect(w) < 1e-15);
  CHECK(w.is_mean_zero());
}

TEST_CASE("rhs examples") {
  const GridSpec g = GridSpec::with_modes(8);
  const FlowParams zero = FlowParams::damped(1.0, CoefSeq(g), 1e-3);
  CHECK(testing::max_abs(rhs(CoefSeq(g), zero)) == 0.0);

  const CoefSeq d = rhs(cos_x(g), zero);
  CHECK(std::abs(d[2] - cplx(0.0, -0.25)) < 1e-15);
  CHECK(std::abs(d[1] - cplx(-0.5, 0.5)) < 1e-15);
  CHECK(d[0] == cplx{});
}

TEST_CASE("rhs matches the direct formula and is hermitian") {
  const GridSpec g = GridSpec::with_modes(16);
  const CoefSeq u = random_hermitian(g, 11);
  const CoefSeq f = random_hermitian(g, 12, 0.3);
  const FlowParams p = FlowParams::damped(0.7, f, 1e-3);
  const CoefSeq d = rhs(u, p);
  const CoefSeq sq = testing::convolution_oracle(u, u);
  for (int k = -16; k <= 16; ++k) {
    if (k == 0) continue;
    const cplx expect = cplx(-0.7, double(k) * k * k) * u[k] - cplx(0.0, 0.5 * k) * sq[k] + f[k];
    CHECK(std::abs(d[k] - expect) < 1e-11 * (1.0 + std::abs(expect)));
  }
  CHECK(testing::hermitian_defect(d) < 1e-10);
}

TEST_CASE("step: trivial and linear cases are exact") {
  const GridSpec g = GridSpec::with_modes(16);
  for (Scheme s : {Scheme::etdrk4, Scheme::ifrk4}) {
    const FlowParams p = with_scheme(FlowParams::damped(0.5, CoefSeq(g), 1e-2), s);
    CHECK(testing::max_abs(step(CoefSeq(g), 0.0, p)) == 0.0);

    FlowParams lin = p;
    lin.nonlinear = false;
    const CoefSeq u = random_hermitian(g, 5);
    CHECK(step(u, 0.0, lin) == linear_flow(u, 1e-2, 0.5));
  }
}

TEST_CASE("evolve without nonlinearity equals the linear flow plus the exact Duhamel term") {
  const GridSpec g = GridSpec::with_modes(16);
  const CoefSeq u0 = random_hermitian(g, 21);
  const CoefSeq f = random_hermitian(g, 22, 0.5);
  const double gamma = 0.4, T = 1.37;
  for (Scheme s : {Scheme::etdrk4, Scheme::ifrk4}) {
    FlowParams p = with_scheme(FlowParams::damped(gamma, f, 0.01), s);
    p.nonlinear = false;
    const CoefSeq uT = final_state(u0, T, p);
    CoefSeq expect = linear_flow(u0, T, gamma);
    for (int k = -16; k <= 16; ++k) {
      if (k == 0) continue;
      const cplx lam(-gamma, double(k) * k * k);
      expect[k] += (std::exp(lam * T) - 1.0) / lam * f[k];
    }
    // phases k^3 T reach ~5e3 rad, so roundoff in t alone costs ~1e-12
    CHECK(testing::max_diff(uT, expect) < 1e-11);
  }
}

TEST_CASE("step preserves mean zero and hermitian symmetry") {
  const GridSpec g = GridSpec::with_modes(32);
  const CoefSeq u = random_rough_state(g, 1.0, 4, 2.0);
  for (Scheme s : {Scheme::etdrk4, Scheme::ifrk4}) {
    const FlowParams p = with_scheme(FlowParams::damped(1.0, cos_x(g), 1e-3), s);
    CoefSeq v = u;
    for (int n = 0; n < 50; ++n) v = step(v, n * 1e-3, p);
    CHECK(v.is_mean_zero());
    CHECK(testing::hermitian_defect(v) < 1e-13);
  }
}

TEST_CASE("self-convergence order >= 3.8 on smooth data") {
  // u0 = cos x, gamma = 0.5, f = cos x, T = 1
  for (int K : {32, 128}) {
    const GridSpec g = GridSpec::with_modes(K);
    for (Scheme s : {Scheme::etdrk4, Scheme::ifrk4}) {
      const FlowParams p = with_scheme(FlowParams::damped(0.5, cos_x(g), 1e-2), s);
      const double order = observed_order(cos_x(g), 1.0, p, 1e-2);
      CAPTURE(K);
      CAPTURE(static_cast<int>(s));
      CHECK(order >= 3.8);
      CHECK(order <= 4.3);
    }
  }
}

TEST_CASE("both schemes converge to the same solution") {
  // ETDRK4 only reaches its asymptotic regime once h K^3 is O(1); above that it is stable but
  // less accurate than IF-RK4 on rough data
  const GridSpec g = GridSpec::with_modes(32);
  const CoefSeq u0 = random_rough_state(g, 2.0, 8, 1.0);
  const FlowParams a = with_scheme(FlowParams::damped(1.0, cos_x(g), 3.125e-5), Scheme::etdrk4);
  const FlowParams b = with_scheme(FlowParams::damped(1.0, cos_x(g), 3.125e-5), Scheme::ifrk4);
  CHECK(l2_distance(final_state(u0, 0.5, a), final_state(u0, 0.5, b)) < 1e-6);
}

TEST_CASE("spectral convergence under K doubling for smooth data") {
  auto run = [](int K) {
    const GridSpec g = GridSpec::with_modes(K);
    return final_state(cos_x(g), 1.0, FlowParams::damped(0.5, cos_x(g), 1e-3));
  };
  CHECK(l2_distance(run(32), run(64)) < 1e-6);
  CHECK(l2_distance(run(64), run(128)) < 1e-6);
}

TEST_CASE("evolve bookkeeping") {
  const GridSpec g = GridSpec::with_modes(8);
  const double h = 1e-2;
  const FlowParams p = FlowParams::damped(1.0, cos_x(g), h);
  const TrajectoryRecord r = evolve(cos_x(g), 5 * h, p, 1);
  REQUIRE(r.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(r.times[i] == doctest::Approx(i * h).epsilon(1e-14));
  CHECK(r.state_at(3 * h) == r.states[3]);
  CHECK_THROWS_AS(r.index_at(0.5 * h), std::out_of_range);

  // last step shortened; the final state is always recorded
  const TrajectoryRecord q = evolve(cos_x(g), 0.105, p, 4);
  CHECK(q.times.back() == doctest::Approx(0.105));
  CHECK(q.times[1] == doctest::Approx(4 * h));
  CHECK(evolve(cos_x(g), 0.105, p, 4).states.back() == q.states.back());
  CHECK_THROWS_AS(evolve(cos_x(g), 0.0, p, 1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(cos_x(g), 1.0, p, 0), std::invalid_argument);
}

TEST_CASE("unforced decay stays below e^{-t} ||u0||") {
  const GridSpec g = GridSpec::with_modes(64);
  const CoefSeq u0 = random_rough_state(g, 1.5, 3, 1.0);
  const TrajectoryRecord r = evolve(u0, 5.0, FlowParams::damped(1.0, CoefSeq(g), 1e-3), 10);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r.l2_norms[i] <= std::exp(-r.times[i]) + 1e-6);
}

TEST_CASE("ball of radius ||f||/gamma is invariant") {
  const GridSpec g = GridSpec::with_modes(64);
  const CoefSeq f = cos_x(g, 2.0);
  const double gamma = 1.0, radius = l2_norm(f) / gamma;
  const CoefSeq u0 = random_rough_state(g, 1.2, 17, radius);
  const TrajectoryRecord r = evolve(u0, 5.0, FlowParams::damped(gamma, f, 1e-3), 5);
  for (double n : r.l2_norms) CHECK(n <= radius + 1e-6);
}

TEST_CASE("KdV limit conserves l2") {
  const GridSpec g = GridSpec::with_modes(128);
  const FlowParams p = FlowParams::undamped(CoefSeq(g), 1e-3);
  const CoefSeq u0 = cos_x(g);
  const TrajectoryRecord r = evolve(u0, 10.0, p, 1000);
  CHECK(std::abs(r.l2_norms.back() - l2_norm(u0)) <= 1e-8);
  CHECK(testing::max_abs(evolve(CoefSeq(g), 1.0, p, 100).states.back()) == 0.0);
}

TEST_CASE("rough undamped data: ETDRK4 stays bounded where IF-RK4 breaks down") {
  const GridSpec g = GridSpec::with_modes(128);
  const CoefSeq u0 = random_rough_state(g, 1.5, 11, 1.0);
  const FlowParams etd = with_scheme(FlowParams::undamped(CoefSeq(g), 1e-3), Scheme::etdrk4);
  double drift = 0.0;
  integrate(u0, 5.0, etd, [&](std::size_t, double, const CoefSeq& u) { drift = std::max(drift, std::abs(l2_norm(u) - 1.0)); });
  CHECK(drift < 1e-3);

  const FlowParams ifrk = with_scheme(FlowParams::undamped(CoefSeq(g), 1e-3), Scheme::ifrk4);
  CHECK_THROWS_AS(integrate(u0, 5.0, ifrk, {}), SolverFailure);
}

TEST_CASE("step failure reports the failing time") {
  const GridSpec g = GridSpec::with_modes(8);
  const FlowParams p = FlowParams::damped(1.0, cos_x(g), 0.1);
  CoefSeq u = cos_x(g);
  u.set_mode(2, std::numeric_limits<double>::infinity());
  try {
    step(u, 2.0, p);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.time() == doctest::Approx(2.1));
  }
}

TEST_CASE("parameter validation") {
  const GridSpec g = GridSpec::with_modes(8);
  CHECK_THROWS_AS(FlowParams::damped(0.0, CoefSeq(g), 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(FlowParams::damped(1.0, CoefSeq(g), 0.0), std::invalid_argument);
  CoefSeq mean(g);
  mean[0] = 1.0;
  CHECK_THROWS_AS(FlowParams::damped(1.0, mean, 1e-3), std::invalid_argument);
  CoefSeq complex_field(g);
  complex_field[1] = 1.0;
  CHECK_THROWS_AS(FlowParams::damped(1.0, complex_field, 1e-3), std::invalid_argument);
  CHECK(FlowParams::default_step(GridSpec::with_modes(64)) == 1e-3);
  CHECK(FlowParams::default_step(GridSpec::with_modes(1000)) == 5e-4);
  Stepper st(FlowParams::damped(1.0, CoefSeq(g), 1e-3));
  CHECK_THROWS_AS(st.step(CoefSeq(GridSpec::with_modes(9)), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(st.step(CoefSeq(g), 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("energy_envelope examples") {
  CHECK(energy_envelope(0.0, 1.7, 3.0, 0.5) == 1.7);
  CHECK(energy_envelope(1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(energy_envelope(50.0, 4.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  // monotone path between u0_l2 and f_l2/gamma
  double prev = energy_envelope(0.0, 3.0, 1.0, 1.0);
  for (double t = 0.1; t < 10; t += 0.1) {
    const double e = energy_envelope(t, 3.0, 1.0, 1.0);
    CHECK(e <= prev);
    CHECK(e >= 1.0);
    prev = e;
  }
  CHECK_THROWS_AS(energy_envelope(-1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}
