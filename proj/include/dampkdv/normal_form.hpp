#pragma once

// Differentiation-by-parts normal form of the forced, damped KdV flow.
//
// With v = d_x^{-3} f and w = u - v, the rotating-frame variables
//   z_k = w_k e^{(gamma - ik^3) t},   y_k = v_k e^{(gamma - ik^3) t}
// satisfy
//   d/dt [z - e^{-gt} B(Z,Z)] = e^{-2gt} rho(Z) - g y + g e^{-gt} B(Z,Z)
//                               + c e^{-gt} B(Z, d_t y - g y) + e^{-2gt} R(Z),      Z = z + y,
// where the cross coefficient c = -2 (kCrossCoefficient) follows from B's 1/6 normalisation.

#include <cstdint>

#include "dampkdv/flow.hpp"
#include "dampkdv/spectral.hpp"

namespace dampkdv {

/// Coefficient of e^{-gt} B(Z, d_t y - g y) in the differentiated normal form.
inline constexpr double kCrossCoefficient = -2.0;

/// v_k = f_k / (ik)^3, v_0 = 0.
CoefSeq aux_profile_v(const CoefSeq& f);

class NormalFormFrame {
 public:
  NormalFormFrame(CoefSeq v, double gamma);
  /// Frame built from the forcing of a flow.
  static NormalFormFrame for_flow(const FlowParams& params);

  const CoefSeq& v() const noexcept { return v_; }
  double gamma() const noexcept { return gamma_; }

  /// y_k(t) = v_k e^{(gamma - ik^3) t}
  CoefSeq y(double t) const;
  /// d_t y - gamma y = -ik^3 y, in closed form.
  CoefSeq y_drift(double t) const;
  /// z_k = (u_k - v_k) e^{(gamma - ik^3) t}
  CoefSeq to_z(const CoefSeq& u, double t) const;
  CoefSeq from_z(const CoefSeq& z, double t) const;

 private:
  CoefSeq v_;
  double gamma_;
};

/// B(u,v)_k = (1/6) sum_{k1+k2=k} e^{-3ik k1 k2 t} u_{k1} v_{k2} / (k1 k2), B_0 = 0.
/// t = 0 gives the stationary operator.
CoefSeq op_B(const CoefSeq& u, const CoefSeq& v, double t = 0.0);

/// rho_k = -(i/(6k)) |u_k|^2 u_k, rho_0 = 0.
CoefSeq op_rho(const CoefSeq& u);

/// R(u)_k = (i/6) sum_{k1+k2+k3=k, non-resonant} e^{-3it(k1+k2)(k2+k3)(k3+k1)} u u u / k1.
/// O(K^3); refuses K > kMaxTrilinearModes.
CoefSeq op_R(const CoefSeq& u, double t = 0.0);
inline constexpr int kMaxTrilinearModes = 128;

enum class Resonance {
  nonresonant,
  s1,  // k1 + k2 = 0 and k1 + k3 = 0
  s2,  // k1 + k2 = 0 only
  s3,  // k1 + k3 = 0 only
  outside_domain,  // k2 + k3 = 0: not part of the trilinear sum at all
};

const char* to_string(Resonance r);

/// Rejects zero wavenumbers with std::invalid_argument.
Resonance resonance_classify(std::int64_t k1, std::int64_t k2, std::int64_t k3);

/// max_k | sum over resonant triples of u u u / k1  -  (-|u_k|^2 u_k / k) |.
double resonant_sum_identity_check(const CoefSeq& u);

/// How the trilinear terms are closed on a truncated grid.
///   lattice:  rho and R exactly as defined on |k_i| <= K.
///   galerkin: only triples whose intermediate mode k2+k3 is itself retained (|k2+k3| <= K);
///             this is the identity satisfied exactly by the truncated flow. Near the cutoff the
///             resonant S2/S3 sums no longer cancel, so the resonant part is summed explicitly.
/// The two agree as the spectrum near |k| = K vanishes.
enum class Closure { galerkin, lattice };

/// Max-mode discrepancy between the central difference of z - e^{-gt}B(Z,Z) over [t-dt, t+dt]
/// and the right-hand side of the differentiated normal form at t.
/// The trajectory must hold samples at t - dt, t and t + dt.
double nf_residual(const TrajectoryRecord& traj, const NormalFormFrame& frame, double t, double dt,
                   Closure closure = Closure::galerkin, double cross_coefficient = kCrossCoefficient);

/// Right-hand side of the differentiated normal form evaluated at z(t).
CoefSeq nf_rhs(const CoefSeq& z, const NormalFormFrame& frame, double t, Closure closure = Closure::galerkin,
               double cross_coefficient = kCrossCoefficient);

/// Integrated form: max-mode discrepancy of
///   [z - e^{-gt}B(Z,Z)](t1) - [..](t0) - int_{t0}^{t1} nf_rhs dr
/// with the integral taken by composite Simpson over consecutive samples (even interval count).
double integrated_identity_residual(const TrajectoryRecord& traj, const NormalFormFrame& frame,
                                    std::size_t first, std::size_t last, Closure closure = Closure::galerkin);

/// || u(t) - e^{-gamma t} e^{tL} u0 ||_{H^s}
double duhamel_gap(const CoefSeq& u0, const CoefSeq& u_t, double t, double gamma, SobolevIndex s);
double duhamel_gap(const CoefSeq& u0, const TrajectoryRecord& traj, double t, double gamma, SobolevIndex s);

}  // namespace dampkdv
