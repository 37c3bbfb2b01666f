#pragma once

// Desk-scale checks of the frequency-space facts behind the trilinear estimate:
// exact phase identities, the lower bound on the resonance function, the multiplier bound,
// and empirical constants for the bilinear normal-form operator.

#include <cstdint>
#include <string>
#include <vector>

#include "dampkdv/kernels.hpp"
#include "dampkdv/spectral.hpp"

namespace dampkdv {

using wide_int = __int128;

/// Largest |k| accepted by the phase functions; keeps every intermediate inside 128 bits.
inline constexpr std::int64_t kMaxPhaseWavenumber = std::int64_t{1} << 40;

/// 3(k1+k2)k1k2, cross-checked against (k1+k2)^3 - k1^3 - k2^3.
/// Throws std::overflow_error for |k| > kMaxPhaseWavenumber, std::logic_error on mismatch.
wide_int cubic_phase(std::int64_t k1, std::int64_t k2);

/// 3(k1+k2)(k1+k3)(k2+k3), cross-checked against -(k1^3+k2^3+k3^3+k4^3) with k4 = -(k1+k2+k3).
wide_int quartic_phase(std::int64_t k1, std::int64_t k2, std::int64_t k3);

std::string to_string(wide_int v);

struct LatticeBudget {
  int K = 16;
  double s = 0.5;
  double eps = 0.01;

  /// K >= 1, s >= 0, eps in (0, 1/22).
  static LatticeBudget make(int K, double s, double eps);
};

/// min over admissible triples of |k1+k2||k1+k3||k2+k3| / max_i |k_i|.
kernels::LatticeExtremum kis_check(const LatticeBudget& budget);

/// sup over admissible triples of the multiplier; `form` selects the displayed inequality
/// or its strengthened consequence.
kernels::LatticeExtremum multiplier_sup(const LatticeBudget& budget,
                                        kernels::MultiplierForm form = kernels::MultiplierForm::weighted);

struct BilinearEstimate {
  double sup_ratio = 0.0;       // best ||B(u,v)||_{H^s} / (||u|| ||v||)
  double best_random = 0.0;     // before ascent
  std::int64_t trials = 0;      // random trials evaluated (degenerate ones skipped)
  std::int64_t skipped = 0;
};

/// ||B(u,v)||_{H^s} / (||u|| ||v||), NaN when either input vanishes.
double bilinear_ratio(const CoefSeq& u, const CoefSeq& v, SobolevIndex s);

/// Random Hermitian trials followed by alternating block ascent (power iterations in u then v)
/// from the best trials. Deterministic in `seed`.
BilinearEstimate bilinear_constant(const LatticeBudget& budget, int trials, std::uint64_t seed);

struct RhoBoundScan {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double worst_ratio = 0.0;  // max ||rho(u)||_{H^s} / ||u||^3
};

/// Checks ||rho(u)||_{H^s} <= ||u||^3 on random states.
RhoBoundScan rho_bound_scan(const LatticeBudget& budget, int trials, std::uint64_t seed);

}  // namespace dampkdv
