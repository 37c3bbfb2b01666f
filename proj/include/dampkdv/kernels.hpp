#pragma once

// Hot loops of the toolkit in two flavours:
//   serial::   straightforward reference loops, literal phase factors; used as test oracles.
//   parallel:: OpenMP loops partitioned over the output mode (or over k1 for lattice scans),
//              with oscillatory phases factorised through k^3 - sum k_i^3 identities.
// Both flavours compute the same quantities; tests pin them against each other.

#include <array>
#include <cstdint>

#include "dampkdv/spectral.hpp"

namespace dampkdv::kernels {

/// Extremum of a lattice scan with the triple where it was attained.
/// Ties are resolved towards the lexicographically smallest triple, so results do not depend
/// on the thread schedule.
struct LatticeExtremum {
  double value = 0.0;
  std::array<int, 3> at{};
  std::int64_t admissible = 0;  // number of triples visited
};

struct IdentityScan {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
};

enum class MultiplierForm {
  weighted,     // |k4|^s |k1k2k3k4|^eps / (|k1| P^{1/2-7eps})
  consequence,  // |k4|^s / (|k1| P^{1/2-11eps})
};

namespace serial {

CoefSeq direct_convolution(const CoefSeq& u, const CoefSeq& v);
/// (1/6) sum_{k1+k2=k} e^{-3i k k1 k2 t} u_{k1} v_{k2} / (k1 k2), zero mode dropped.
CoefSeq bilinear_B(const CoefSeq& u, const CoefSeq& v, double t);
/// (i/6) sum over non-resonant triples of e^{-3it(k1+k2)(k2+k3)(k3+k1)} u u u / k1.
/// Triples with |k2+k3| > pair_cap are skipped; pair_cap < 0 means no cap.
CoefSeq trilinear_R(const CoefSeq& u, double t, int pair_cap = -1);
/// sum over resonant triples (k2+k3 != 0, |k2+k3| <= pair_cap) of u_{k1} u_{k2} u_{k3} / k1.
CoefSeq resonant_sum(const CoefSeq& u, int pair_cap = -1);

LatticeExtremum kis_scan(int K);
LatticeExtremum multiplier_scan(int K, double s, double eps, MultiplierForm form);
IdentityScan cubic_identity_scan(int bound);
IdentityScan quartic_identity_scan(int bound);

}  // namespace serial

namespace parallel {

CoefSeq direct_convolution(const CoefSeq& u, const CoefSeq& v);
CoefSeq bilinear_B(const CoefSeq& u, const CoefSeq& v, double t);
CoefSeq trilinear_R(const CoefSeq& u, double t, int pair_cap = -1);
CoefSeq resonant_sum(const CoefSeq& u, int pair_cap = -1);

LatticeExtremum kis_scan(int K);
LatticeExtremum multiplier_scan(int K, double s, double eps, MultiplierForm form);
IdentityScan cubic_identity_scan(int bound);
IdentityScan quartic_identity_scan(int bound);

}  // namespace parallel

/// Multiplier value at one admissible triple (k4 = -(k1+k2+k3)); 0 outside the admissible set.
double multiplier_value(int k1, int k2, int k3, double s, double eps, MultiplierForm form);

}  // namespace dampkdv::kernels
