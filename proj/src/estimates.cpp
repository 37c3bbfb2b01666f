#include "dampkdv/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dampkdv/normal_form.hpp"

namespace dampkdv {

namespace {

wide_int checked_mul(wide_int a, wide_int b) {
  wide_int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("phase: 128-bit overflow");
  return r;
}

wide_int checked_cube(wide_int a) { return checked_mul(checked_mul(a, a), a); }

void check_range(std::int64_t k) {
  if (k > kMaxPhaseWavenumber || k < -kMaxPhaseWavenumber)
    throw std::overflow_error("phase: |k| exceeds kMaxPhaseWavenumber");
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Random Hermitian state: random decay in [0, 2], random mode amplitudes and phases,
// occasionally restricted to a random band of low modes.
CoefSeq random_trial_state(GridSpec grid, std::mt19937_64& gen) {
  const double decay = 2.0 * unit(gen);
  const int band = unit(gen) < 0.5 ? grid.K : 1 + static_cast<int>(unit(gen) * std::min(grid.K, 8));
  CoefSeq u(grid);
  for (int k = 1; k <= grid.K; ++k) {
    const double amp = k <= band ? std::pow(static_cast<double>(k), -decay) * unit(gen) : 0.0;
    const double phase = 2.0 * std::numbers::pi * unit(gen);
    u.set_mode(k, std::polar(amp, phase));
  }
  return u;
}

// x_j = (1/6) sum_k w_k y_k conj(other_{k-j}) / (j (k-j)): adjoint of u -> W B(u, other).
CoefSeq adjoint_apply(const CoefSeq& other, const CoefSeq& y, const std::vector<double>& weight) {
  const int K = y.K();
  CoefSeq x(y.grid());
#pragma omp parallel for schedule(static)
  for (int j = -K; j <= K; ++j) {
    if (j == 0) continue;
    cplx acc{};
    for (int k = -K; k <= K; ++k) {
      const int m = k - j;
      if (k == 0 || m == 0 || std::abs(m) > K) continue;
      acc += weight[static_cast<std::size_t>(k + K)] * y[k] * std::conj(other[m]) / static_cast<double>(j * m);
    }
    x[j] = acc / 6.0;
  }
  return x;
}

CoefSeq weighted_B(const CoefSeq& u, const CoefSeq& v, const std::vector<double>& weight) {
  CoefSeq b = op_B(u, v, 0.0);
  for (int k = -b.K(); k <= b.K(); ++k) b[k] *= weight[static_cast<std::size_t>(k + b.K())];
  return b;
}

// Projects onto Hermitian sequences and normalises; falls back to the anti-Hermitian part.
bool hermitian_normalise(CoefSeq& x) {
  CoefSeq sym(x.grid()), anti(x.grid());
  for (int k = -x.K(); k <= x.K(); ++k) {
    sym[k] = 0.5 * (x[k] + std::conj(x[-k]));
    anti[k] = cplx{0.0, 0.5} * (x[k] - std::conj(x[-k]));
  }
  sym[0] = anti[0] = cplx{};
  CoefSeq& pick = l2_norm(sym) >= l2_norm(anti) ? sym : anti;
  const double n = l2_norm(pick);
  if (!(n > 0.0)) return false;
  x = (1.0 / n) * pick;
  return true;
}

}  // namespace

wide_int cubic_phase(std::int64_t k1, std::int64_t k2) {
  check_range(k1);
  check_range(k2);
  const wide_int a = k1, b = k2, s = a + b;
  const wide_int factored = checked_mul(checked_mul(3 * s, a), b);
  const wide_int expanded = checked_cube(s) - checked_cube(a) - checked_cube(b);
  if (factored != expanded) throw std::logic_error("cubic_phase: identity violated");
  return factored;
}

wide_int quartic_phase(std::int64_t k1, std::int64_t k2, std::int64_t k3) {
  check_range(k1);
  check_range(k2);
  check_range(k3);
  const wide_int a = k1, b = k2, c = k3, d = -(a + b + c);
  const wide_int factored = checked_mul(checked_mul(3 * (a + b), a + c), b + c);
  const wide_int expanded = -(checked_cube(a) + checked_cube(b) + checked_cube(c) + checked_cube(d));
  if (factored != expanded) throw std::logic_error("quartic_phase: identity violated");
  return factored;
}

std::string to_string(wide_int v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  std::string out;
  // Negate digit by digit to stay clear of the most negative value.
  while (v != 0) {
    const int digit = static_cast<int>(v % 10);
    out.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
    v /= 10;
  }
  if (neg) out.push_back('-');
  return {out.rbegin(), out.rend()};
}

LatticeBudget LatticeBudget::make(int K, double s, double eps) {
  if (K < 1) throw std::invalid_argument("LatticeBudget: K must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument("LatticeBudget: s must be >= 0");
  if (!(eps > 0.0 && eps < 1.0 / 22.0)) throw std::invalid_argument("LatticeBudget: eps must lie in (0, 1/22)");
  return {K, s, eps};
}

kernels::LatticeExtremum kis_check(const LatticeBudget& budget) { return kernels::parallel::kis_scan(budget.K); }

kernels::LatticeExtremum multiplier_sup(const LatticeBudget& budget, kernels::MultiplierForm form) {
  if (!(budget.eps > 0.0 && budget.eps < 1.0 / 22.0))
    throw std::invalid_argument("multiplier_sup: eps must lie in (0, 1/22)");
  return kernels::parallel::multiplier_scan(budget.K, budget.s, budget.eps, form);
}

double bilinear_ratio(const CoefSeq& u, const CoefSeq& v, SobolevIndex s) {
  const double nu = l2_norm(u), nv = l2_norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return sobolev_norm(op_B(u, v, 0.0), s) / (nu * nv);
}

BilinearEstimate bilinear_constant(const LatticeBudget& budget, int trials, std::uint64_t seed) {
  if (budget.s >= 1.0) throw std::invalid_argument("bilinear_constant: s must be < 1");
  if (trials < 1) throw std::invalid_argument("bilinear_constant: trials must be >= 1");
  const GridSpec grid = GridSpec::with_modes(budget.K);
  const SobolevIndex s{budget.s};

  std::vector<double> ratio(static_cast<std::size_t>(trials), std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < trials; ++i) {
    std::mt19937_64 gen(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i))));
    const CoefSeq u = random_trial_state(grid, gen);
    const CoefSeq v = unit(gen) < 0.25 ? u : random_trial_state(grid, gen);
    ratio[static_cast<std::size_t>(i)] = bilinear_ratio(u, v, s);
  }

  BilinearEstimate est;
  std::vector<int> order;
  for (int i = 0; i < trials; ++i) {
    if (std::isnan(ratio[static_cast<std::size_t>(i)])) {
      ++est.skipped;
      continue;
    }
    ++est.trials;
    order.push_back(i);
  }
  if (order.empty()) return est;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = ratio[static_cast<std::size_t>(a)], rb = ratio[static_cast<std::size_t>(b)];
    return ra != rb ? ra > rb : a < b;
  });
  est.best_random = ratio[static_cast<std::size_t>(order.front())];
  est.sup_ratio = est.best_random;

  std::vector<double> weight(static_cast<std::size_t>(2 * grid.K + 1));
  for (int k = -grid.K; k <= grid.K; ++k)
    weight[static_cast<std::size_t>(k + grid.K)] = k == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(k)), budget.s);

  const std::size_t starts = std::min<std::size_t>(order.size(), 4);
  for (std::size_t r = 0; r < starts; ++r) {
    // regenerate the trial pair
    std::mt19937_64 gen(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(order[r]))));
    CoefSeq u = random_trial_state(grid, gen);
    CoefSeq v = unit(gen) < 0.25 ? u : random_trial_state(grid, gen);
    if (!hermitian_normalise(u) || !hermitian_normalise(v)) continue;
    double current = sobolev_norm(op_B(u, v, 0.0), s);
    for (int sweep = 0; sweep < 60; ++sweep) {
      for (int inner = 0; inner < 4; ++inner) {
        CoefSeq next = adjoint_apply(v, weighted_B(u, v, weight), weight);
        if (!hermitian_normalise(next)) break;
        u = std::move(next);
      }
      for (int inner = 0; inner < 4; ++inner) {
        CoefSeq next = adjoint_apply(u, weighted_B(v, u, weight), weight);
        if (!hermitian_normalise(next)) break;
        v = std::move(next);
      }
      const double updated = sobolev_norm(op_B(u, v, 0.0), s);
      const bool stalled = updated <= current * (1.0 + 1e-12);
      current = std::max(current, updated);
      if (stalled) break;
    }
    est.sup_ratio = std::max(est.sup_ratio, current);
  }
  return est;
}

RhoBoundScan rho_bound_scan(const LatticeBudget& budget, int trials, std::uint64_t seed) {
  const GridSpec grid = GridSpec::with_modes(budget.K);
  const SobolevIndex s{budget.s};
  RhoBoundScan scan;
  std::int64_t violations = 0;
  double worst = 0.0;
#pragma omp parallel for reduction(+ : violations) reduction(max : worst) schedule(static)
  for (int i = 0; i < trials; ++i) {
    std::mt19937_64 gen(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i))));
    const double sigma = 2.0 * unit(gen);
    const double l2 = std::exp(std::log(0.1) + unit(gen) * std::log(100.0));  // log-uniform on [0.1, 10]
    const CoefSeq u = random_rough_state(grid, sigma, gen(), l2);
    const double lhs = sobolev_norm(op_rho(u), s);
    const double rhs = std::pow(l2_norm(u), 3);
    violations += lhs > rhs;
    worst = std::max(worst, lhs / rhs);
  }
  scan.trials = trials;
  scan.violations = violations;
  scan.worst_ratio = worst;
  return scan;
}

}  // namespace dampkdv
