#include "dampkdv/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace dampkdv::kernels {

namespace {

constexpr cplx kI{0.0, 1.0};

using i64 = std::int64_t;

bool non_resonant(i64 k1, i64 k2, i64 k3) { return (k1 + k2) != 0 && (k1 + k3) != 0 && (k2 + k3) != 0; }

bool resonant_in_domain(i64 k1, i64 k2, i64 k3) {
  return (k2 + k3) != 0 && ((k1 + k2) == 0 || (k1 + k3) == 0);
}

void require_same_grid(const CoefSeq& u, const CoefSeq& v) {
  if (u.grid() != v.grid()) throw std::invalid_argument("kernel: mismatched GridSpec");
}

// e^{i j^3 t} u_j, the factor shared by every phased sum below.
std::vector<cplx> rotate_by_cubes(const CoefSeq& u, double t) {
  const int K = u.K();
  std::vector<cplx> out(static_cast<std::size_t>(2 * K + 1));
  for (int j = -K; j <= K; ++j) {
    const double cube = static_cast<double>(static_cast<i64>(j) * j * j);
    out[static_cast<std::size_t>(j + K)] = t == 0.0 ? u[j] : u[j] * std::polar(1.0, cube * t);
  }
  return out;
}

bool better_min(double v, const std::array<int, 3>& at, const LatticeExtremum& best, bool have) {
  return !have || v < best.value || (v == best.value && at < best.at);
}

bool better_max(double v, const std::array<int, 3>& at, const LatticeExtremum& best, bool have) {
  return !have || v > best.value || (v == best.value && at < best.at);
}

// Admissible: nonzero k1..k4 and all three pair sums nonzero.
bool admissible(int k1, int k2, int k3) {
  return k1 != 0 && k2 != 0 && k3 != 0 && (k1 + k2 + k3) != 0 && non_resonant(k1, k2, k3);
}

double kis_value(int k1, int k2, int k3) {
  const double P = std::abs(static_cast<double>(k1 + k2)) * std::abs(static_cast<double>(k1 + k3)) *
                   std::abs(static_cast<double>(k2 + k3));
  const int k4 = -(k1 + k2 + k3);
  const int m = std::max(std::max(std::abs(k1), std::abs(k2)), std::max(std::abs(k3), std::abs(k4)));
  return P / m;
}

template <bool Minimize, class Value>
LatticeExtremum scan_serial(int K, Value value) {
  LatticeExtremum best;
  bool have = false;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) {
        if (!admissible(k1, k2, k3)) continue;
        ++best.admissible;
        const double v = value(k1, k2, k3);
        const std::array<int, 3> at{k1, k2, k3};
        if (Minimize ? better_min(v, at, best, have) : better_max(v, at, best, have)) {
          best.value = v;
          best.at = at;
          have = true;
        }
      }
  return best;
}

template <bool Minimize, class Value>
LatticeExtremum scan_parallel(int K, Value value) {
  LatticeExtremum best;
  bool have = false;
  i64 total = 0;
#pragma omp parallel
  {
    LatticeExtremum local;
    bool local_have = false;
#pragma omp for schedule(dynamic) nowait
    for (int k1 = -K; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2)
        for (int k3 = -K; k3 <= K; ++k3) {
          if (!admissible(k1, k2, k3)) continue;
          ++local.admissible;
          const double v = value(k1, k2, k3);
          const std::array<int, 3> at{k1, k2, k3};
          if (Minimize ? better_min(v, at, local, local_have) : better_max(v, at, local, local_have)) {
            local.value = v;
            local.at = at;
            local_have = true;
          }
        }
#pragma omp critical(dampkdv_lattice_merge)
    {
      total += local.admissible;
      if (local_have &&
          (Minimize ? better_min(local.value, local.at, best, have) : better_max(local.value, local.at, best, have))) {
        best.value = local.value;
        best.at = local.at;
        have = true;
      }
    }
  }
  best.admissible = total;
  return best;
}

void check_identity_bound(int bound) {
  // int64 headroom: |k4|^3 <= 27 bound^3 must stay far below 2^63.
  if (bound < 0 || bound > 100000) throw std::invalid_argument("identity scan: bound must be in [0, 1e5]");
}

}  // namespace

double multiplier_value(int k1, int k2, int k3, double s, double eps, MultiplierForm form) {
  if (!admissible(k1, k2, k3)) return 0.0;
  const double k4 = std::abs(static_cast<double>(k1 + k2 + k3));
  const double P = std::abs(static_cast<double>(k1 + k2)) * std::abs(static_cast<double>(k1 + k3)) *
                   std::abs(static_cast<double>(k2 + k3));
  const double a1 = std::abs(static_cast<double>(k1));
  if (form == MultiplierForm::weighted) {
    const double prod = a1 * std::abs(static_cast<double>(k2)) * std::abs(static_cast<double>(k3)) * k4;
    return std::pow(k4, s) * std::pow(prod, eps) / (a1 * std::pow(P, 0.5 - 7.0 * eps));
  }
  return std::pow(k4, s) / (a1 * std::pow(P, 0.5 - 11.0 * eps));
}

// ---------------------------------------------------------------------------------------------
// serial reference loops

namespace serial {

CoefSeq direct_convolution(const CoefSeq& u, const CoefSeq& v) {
  require_same_grid(u, v);
  const int K = u.K();
  CoefSeq w(u.grid());
  for (int k = -K; k <= K; ++k) {
    cplx acc{};
    for (int n = -K; n <= K; ++n) {
      const int m = k - n;
      if (std::abs(m) > K) continue;
      acc += u[n] * v[m];
    }
    w[k] = acc;
  }
  return w;
}

CoefSeq bilinear_B(const CoefSeq& u, const CoefSeq& v, double t) {
  require_same_grid(u, v);
  const int K = u.K();
  CoefSeq out(u.grid());
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    for (int k1 = -K; k1 <= K; ++k1) {
      const int k2 = k - k1;
      if (k1 == 0 || k2 == 0 || std::abs(k2) > K) continue;
      const double phase = -3.0 * static_cast<double>(static_cast<i64>(k) * k1 * k2) * t;
      acc += std::polar(1.0, phase) * u[k1] * v[k2] / static_cast<double>(static_cast<i64>(k1) * k2);
    }
    out[k] = acc / 6.0;
  }
  return out;
}

CoefSeq trilinear_R(const CoefSeq& u, double t, int pair_cap) {
  const int K = u.K();
  CoefSeq out(u.grid());
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    for (int k1 = -K; k1 <= K; ++k1) {
      if (k1 == 0) continue;
      for (int k2 = -K; k2 <= K; ++k2) {
        const int k3 = k - k1 - k2;
        if (k2 == 0 || k3 == 0 || std::abs(k3) > K || !non_resonant(k1, k2, k3)) continue;
        if (pair_cap >= 0 && std::abs(k2 + k3) > pair_cap) continue;
        const double phase = -3.0 * static_cast<double>(static_cast<i64>(k1 + k2) * (k2 + k3) * (k3 + k1)) * t;
        acc += std::polar(1.0, phase) * u[k1] * u[k2] * u[k3] / static_cast<double>(k1);
      }
    }
    out[k] = kI / 6.0 * acc;
  }
  return out;
}

CoefSeq resonant_sum(const CoefSeq& u, int pair_cap) {
  const int K = u.K();
  CoefSeq out(u.grid());
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    for (int k1 = -K; k1 <= K; ++k1) {
      if (k1 == 0) continue;
      for (int k2 = -K; k2 <= K; ++k2) {
        const int k3 = k - k1 - k2;
        if (k2 == 0 || k3 == 0 || std::abs(k3) > K || !resonant_in_domain(k1, k2, k3)) continue;
        if (pair_cap >= 0 && std::abs(k2 + k3) > pair_cap) continue;
        acc += u[k1] * u[k2] * u[k3] / static_cast<double>(k1);
      }
    }
    out[k] = acc;
  }
  return out;
}

LatticeExtremum kis_scan(int K) { return scan_serial<true>(K, kis_value); }

LatticeExtremum multiplier_scan(int K, double s, double eps, MultiplierForm form) {
  return scan_serial<false>(K, [=](int a, int b, int c) { return multiplier_value(a, b, c, s, eps, form); });
}

IdentityScan cubic_identity_scan(int bound) {
  check_identity_bound(bound);
  IdentityScan r;
  for (i64 k1 = -bound; k1 <= bound; ++k1)
    for (i64 k2 = -bound; k2 <= bound; ++k2) {
      const i64 a = k1 + k2;
      ++r.checked;
      if (a * a * a - k1 * k1 * k1 - k2 * k2 * k2 != 3 * a * k1 * k2) ++r.violations;
    }
  return r;
}

IdentityScan quartic_identity_scan(int bound) {
  check_identity_bound(bound);
  IdentityScan r;
  for (i64 k1 = -bound; k1 <= bound; ++k1)
    for (i64 k2 = -bound; k2 <= bound; ++k2)
      for (i64 k3 = -bound; k3 <= bound; ++k3) {
        const i64 k4 = -(k1 + k2 + k3);
        ++r.checked;
        if (-(k1 * k1 * k1 + k2 * k2 * k2 + k3 * k3 * k3 + k4 * k4 * k4) != 3 * (k1 + k2) * (k1 + k3) * (k2 + k3))
          ++r.violations;
      }
  return r;
}

}  // namespace serial

// ---------------------------------------------------------------------------------------------
// OpenMP loops

namespace parallel {

CoefSeq direct_convolution(const CoefSeq& u, const CoefSeq& v) {
  require_same_grid(u, v);
  const int K = u.K();
  CoefSeq w(u.grid());
#pragma omp parallel for schedule(static)
  for (int k = -K; k <= K; ++k) {
    cplx acc{};
    const int lo = std::max(-K, k - K), hi = std::min(K, k + K);
    for (int n = lo; n <= hi; ++n) acc += u[n] * v[k - n];
    w[k] = acc;
  }
  return w;
}

CoefSeq bilinear_B(const CoefSeq& u, const CoefSeq& v, double t) {
  require_same_grid(u, v);
  const int K = u.K();
  const auto ru = rotate_by_cubes(u, t);
  const auto rv = rotate_by_cubes(v, t);
  // e^{-3ik k1 k2 t} = e^{-ik^3 t} e^{i k1^3 t} e^{i k2^3 t}
  CoefSeq out(u.grid());
#pragma omp parallel for schedule(static)
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    const int lo = std::max(-K, k - K), hi = std::min(K, k + K);
    for (int k1 = lo; k1 <= hi; ++k1) {
      const int k2 = k - k1;
      if (k1 == 0 || k2 == 0) continue;
      acc += ru[static_cast<std::size_t>(k1 + K)] * rv[static_cast<std::size_t>(k2 + K)] /
             static_cast<double>(static_cast<i64>(k1) * k2);
    }
    const double cube = static_cast<double>(static_cast<i64>(k) * k * k);
    out[k] = (t == 0.0 ? acc : acc * std::polar(1.0, -cube * t)) / 6.0;
  }
  return out;
}

CoefSeq trilinear_R(const CoefSeq& u, double t, int pair_cap) {
  const int K = u.K();
  const auto ru = rotate_by_cubes(u, t);
  auto at = [&](int j) { return ru[static_cast<std::size_t>(j + K)]; };
  CoefSeq out(u.grid());
#pragma omp parallel for schedule(dynamic)
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    for (int k1 = -K; k1 <= K; ++k1) {
      if (k1 == 0) continue;
      cplx inner{};
      const int lo = std::max(-K, k - k1 - K), hi = std::min(K, k - k1 + K);
      for (int k2 = lo; k2 <= hi; ++k2) {
        const int k3 = k - k1 - k2;
        if (k2 == 0 || k3 == 0 || !non_resonant(k1, k2, k3)) continue;
        if (pair_cap >= 0 && std::abs(k2 + k3) > pair_cap) continue;
        inner += at(k2) * at(k3);
      }
      acc += at(k1) * inner / static_cast<double>(k1);
    }
    const double cube = static_cast<double>(static_cast<i64>(k) * k * k);
    out[k] = kI / 6.0 * (t == 0.0 ? acc : acc * std::polar(1.0, -cube * t));
  }
  return out;
}

CoefSeq resonant_sum(const CoefSeq& u, int pair_cap) {
  const int K = u.K();
  CoefSeq out(u.grid());
#pragma omp parallel for schedule(dynamic)
  for (int k = -K; k <= K; ++k) {
    if (k == 0) continue;
    cplx acc{};
    for (int k1 = -K; k1 <= K; ++k1) {
      if (k1 == 0) continue;
      // resonance forces k2 = -k1 or k3 = -k1; visit exactly those two lines
      // the two lines meet at k1 = -k; count that triple once
      const int lines = (k1 == -k) ? 1 : 2;
      for (int line = 0; line < lines; ++line) {
        const int k2 = line == 0 ? -k1 : k;
        const int k3 = k - k1 - k2;
        if (k2 == 0 || k3 == 0 || std::abs(k2) > K || std::abs(k3) > K) continue;
        if (!resonant_in_domain(k1, k2, k3)) continue;
        if (pair_cap >= 0 && std::abs(k2 + k3) > pair_cap) continue;
        acc += u[k1] * u[k2] * u[k3] / static_cast<double>(k1);
      }
    }
    out[k] = acc;
  }
  return out;
}

LatticeExtremum kis_scan(int K) { return scan_parallel<true>(K, kis_value); }

LatticeExtremum multiplier_scan(int K, double s, double eps, MultiplierForm form) {
  return scan_parallel<false>(K, [=](int a, int b, int c) { return multiplier_value(a, b, c, s, eps, form); });
}

IdentityScan cubic_identity_scan(int bound) {
  check_identity_bound(bound);
  i64 checked = 0, violations = 0;
#pragma omp parallel for reduction(+ : checked, violations) schedule(static)
  for (i64 k1 = -bound; k1 <= bound; ++k1)
    for (i64 k2 = -bound; k2 <= bound; ++k2) {
      const i64 a = k1 + k2;
      ++checked;
      violations += (a * a * a - k1 * k1 * k1 - k2 * k2 * k2 != 3 * a * k1 * k2);
    }
  return {checked, violations};
}

IdentityScan quartic_identity_scan(int bound) {
  check_identity_bound(bound);
  i64 checked = 0, violations = 0;
#pragma omp parallel for reduction(+ : checked, violations) schedule(static)
  for (i64 k1 = -bound; k1 <= bound; ++k1)
    for (i64 k2 = -bound; k2 <= bound; ++k2) {
      const i64 s12 = k1 + k2;
      const i64 c12 = k1 * k1 * k1 + k2 * k2 * k2;
      i64 bad = 0;
      for (i64 k3 = -bound; k3 <= bound; ++k3) {
        const i64 k4 = -(s12 + k3);
        bad += (-(c12 + k3 * k3 * k3 + k4 * k4 * k4) != 3 * s12 * (k1 + k3) * (k2 + k3));
      }
      checked += 2 * static_cast<i64>(bound) + 1;
      violations += bad;
    }
  return {checked, violations};
}

}  // namespace parallel

}  // namespace dampkdv::kernels
