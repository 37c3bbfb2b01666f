#pragma once

// Test-side oracles: brute-force sums written independently of src/, and a plain random
// Hermitian generator that does not go through random_rough_state.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "dampkdv/spectral.hpp"

namespace testing {

using dampkdv::CoefSeq;
using dampkdv::cplx;
using dampkdv::GridSpec;

inline CoefSeq random_hermitian(GridSpec g, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, scale);
  CoefSeq u(g);
  for (int k = 1; k <= g.K; ++k) u.set_mode(k, {n(gen), n(gen)});
  return u;
}

inline double max_diff(const CoefSeq& a, const CoefSeq& b) {
  double d = 0.0;
  for (int k = -a.K(); k <= a.K(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline double max_abs(const CoefSeq& a) {
  double d = 0.0;
  for (int k = -a.K(); k <= a.K(); ++k) d = std::max(d, std::abs(a[k]));
  return d;
}

inline double hermitian_defect(const CoefSeq& a) {
  double d = 0.0;
  for (int k = 0; k <= a.K(); ++k) d = std::max(d, std::abs(a[k] - std::conj(a[-k])));
  return d;
}

// w_k = sum_{m+n=k} u_n v_m over |m|,|n| <= K.
inline CoefSeq convolution_oracle(const CoefSeq& u, const CoefSeq& v) {
  const int K = u.K();
  CoefSeq w(u.grid());
  for (int n = -K; n <= K; ++n)
    for (int m = -K; m <= K; ++m)
      if (std::abs(n + m) <= K) w[n + m] += u[n] * v[m];
  return w;
}

// (1/6) sum_{k1+k2=k} e^{-3ik k1 k2 t} u_{k1} v_{k2} / (k1 k2)
inline CoefSeq bilinear_oracle(const CoefSeq& u, const CoefSeq& v, double t) {
  const int K = u.K();
  CoefSeq w(u.grid());
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      const int k = k1 + k2;
      if (k1 == 0 || k2 == 0 || k == 0 || std::abs(k) > K) continue;
      const double ph = -3.0 * k * k1 * k2 * t;
      w[k] += std::polar(1.0, ph) * u[k1] * v[k2] / (6.0 * k1 * k2);
    }
  return w;
}

// (i/6) sum over all (k1,k2,k3) with (k1+k2)(k1+k3)(k2+k3) != 0 of phase u u u / k1;
// `cap` >= 0 keeps only |k2+k3| <= cap.
inline CoefSeq trilinear_oracle(const CoefSeq& u, double t, int cap = -1) {
  const int K = u.K();
  CoefSeq w(u.grid());
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2)
      for (int k3 = -K; k3 <= K; ++k3) {
        const int k = k1 + k2 + k3;
        if (!k1 || !k2 || !k3 || !k || std::abs(k) > K) continue;
        const long long p = static_cast<long long>(k1 + k2) * (k1 + k3) * (k2 + k3);
        if (p == 0) continue;
        if (cap >= 0 && std::abs(k2 + k3) > cap) continue;
        w[k] += std::polar(1.0, -3.0 * static_cast<double>(p) * t) * u[k1] * u[k2] * u[k3] * cplx{0.0, 1.0 / 6.0} /
                static_cast<double>(k1);
      }
  return w;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("dampkdv_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
