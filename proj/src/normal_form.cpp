#include "dampkdv/normal_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dampkdv/kernels.hpp"

namespace dampkdv {

namespace {

constexpr cplx kI{0.0, 1.0};

double cube(int k) { return static_cast<double>(k) * k * k; }

// e^{(gamma - ik^3) t}
cplx rotating_factor(int k, double t, double gamma) { return std::exp(gamma * t) * std::polar(1.0, -cube(k) * t); }

// z - e^{-gt} B(Z, Z), Z = z + y(t)
CoefSeq dbp_bracket(const CoefSeq& z, const NormalFormFrame& frame, double t) {
  const CoefSeq Z = z + frame.y(t);
  CoefSeq out = op_B(Z, Z, t);
  out *= -std::exp(-frame.gamma() * t);
  out += z;
  return out;
}

}  // namespace

CoefSeq aux_profile_v(const CoefSeq& f) {
  CoefSeq v(f.grid());
  for (int k = -f.K(); k <= f.K(); ++k) {
    if (k == 0) continue;
    // (ik)^3 = -i k^3
    v[k] = f[k] / (-kI * cube(k));
  }
  return v;
}

NormalFormFrame::NormalFormFrame(CoefSeq v, double gamma) : v_(project_mean_zero(std::move(v))), gamma_(gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw std::invalid_argument("NormalFormFrame: gamma must be >= 0");
}

NormalFormFrame NormalFormFrame::for_flow(const FlowParams& params) {
  return NormalFormFrame(aux_profile_v(params.forcing), params.gamma);
}

CoefSeq NormalFormFrame::y(double t) const {
  CoefSeq out(v_.grid());
  for (int k = -v_.K(); k <= v_.K(); ++k) out[k] = v_[k] * rotating_factor(k, t, gamma_);
  return out;
}

CoefSeq NormalFormFrame::y_drift(double t) const {
  CoefSeq out = y(t);
  for (int k = -out.K(); k <= out.K(); ++k) out[k] *= -kI * cube(k);
  return out;
}

CoefSeq NormalFormFrame::to_z(const CoefSeq& u, double t) const {
  if (u.grid() != v_.grid()) throw std::invalid_argument("NormalFormFrame::to_z: grid mismatch");
  CoefSeq out(u.grid());
  for (int k = -u.K(); k <= u.K(); ++k) out[k] = (u[k] - v_[k]) * rotating_factor(k, t, gamma_);
  return out;
}

CoefSeq NormalFormFrame::from_z(const CoefSeq& z, double t) const {
  if (z.grid() != v_.grid()) throw std::invalid_argument("NormalFormFrame::from_z: grid mismatch");
  CoefSeq out(z.grid());
  for (int k = -z.K(); k <= z.K(); ++k) out[k] = z[k] / rotating_factor(k, t, gamma_) + v_[k];
  return out;
}

CoefSeq op_B(const CoefSeq& u, const CoefSeq& v, double t) { return kernels::parallel::bilinear_B(u, v, t); }

CoefSeq op_rho(const CoefSeq& u) {
  CoefSeq out(u.grid());
  for (int k = -u.K(); k <= u.K(); ++k) {
    if (k == 0) continue;
    out[k] = -kI / (6.0 * k) * std::norm(u[k]) * u[k];
  }
  return out;
}

CoefSeq op_R(const CoefSeq& u, double t) {
  if (u.K() > kMaxTrilinearModes)
    throw std::invalid_argument("op_R: K = " + std::to_string(u.K()) + " exceeds the trilinear cap " +
                                std::to_string(kMaxTrilinearModes));
  return kernels::parallel::trilinear_R(u, t);
}

const char* to_string(Resonance r) {
  switch (r) {
    case Resonance::nonresonant: return "NONRESONANT";
    case Resonance::s1: return "S1";
    case Resonance::s2: return "S2";
    case Resonance::s3: return "S3";
    case Resonance::outside_domain: return "OUTSIDE_DOMAIN";
  }
  return "?";
}

Resonance resonance_classify(std::int64_t k1, std::int64_t k2, std::int64_t k3) {
  if (k1 == 0 || k2 == 0 || k3 == 0) throw std::invalid_argument("resonance_classify: wavenumbers must be nonzero");
  if (k2 + k3 == 0) return Resonance::outside_domain;
  const bool a = (k1 + k2) == 0;
  const bool b = (k1 + k3) == 0;
  if (a && b) return Resonance::s1;
  if (a) return Resonance::s2;
  if (b) return Resonance::s3;
  return Resonance::nonresonant;
}

double resonant_sum_identity_check(const CoefSeq& u) {
  const CoefSeq sum = kernels::parallel::resonant_sum(u);
  double worst = 0.0;
  for (int k = -u.K(); k <= u.K(); ++k) {
    if (k == 0) continue;
    const cplx expected = -std::norm(u[k]) * u[k] / static_cast<double>(k);
    worst = std::max(worst, std::abs(sum[k] - expected));
  }
  return worst;
}

CoefSeq nf_rhs(const CoefSeq& z, const NormalFormFrame& frame, double t, Closure closure, double cross_coefficient) {
  const double g = frame.gamma();
  const double e1 = std::exp(-g * t);
  const double e2 = std::exp(-2.0 * g * t);
  const CoefSeq y = frame.y(t);
  const CoefSeq Z = z + y;

  CoefSeq out(z.grid());
  if (closure == Closure::lattice) {
    out = e2 * (op_rho(Z) + op_R(Z, t));
  } else {
    const int K = z.K();
    if (K > kMaxTrilinearModes) throw std::invalid_argument("nf_rhs: K exceeds the trilinear cap");
    out = e2 * ((kI / 6.0) * kernels::parallel::resonant_sum(Z, K) + kernels::parallel::trilinear_R(Z, t, K));
  }
  out -= g * y;
  out += (g * e1) * op_B(Z, Z, t);
  out += (cross_coefficient * e1) * op_B(Z, frame.y_drift(t), t);
  return out;
}

double nf_residual(const TrajectoryRecord& traj, const NormalFormFrame& frame, double t, double dt,
                   Closure closure, double cross_coefficient) {
  if (!(dt > 0.0)) throw std::invalid_argument("nf_residual: dt must be > 0");
  std::size_t im, i0, ip;
  try {
    im = traj.index_at(t - dt);
    i0 = traj.index_at(t);
    ip = traj.index_at(t + dt);
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("nf_residual: missing sample (") + e.what() + ")");
  }
  const double tm = traj.times[im], tp = traj.times[ip];
  const CoefSeq qm = dbp_bracket(frame.to_z(traj.states[im], tm), frame, tm);
  const CoefSeq qp = dbp_bracket(frame.to_z(traj.states[ip], tp), frame, tp);
  CoefSeq lhs = qp - qm;
  lhs *= 1.0 / (tp - tm);
  const CoefSeq rhs_t = nf_rhs(frame.to_z(traj.states[i0], traj.times[i0]), frame, traj.times[i0], closure, cross_coefficient);
  return max_abs_difference(lhs, rhs_t);
}

double integrated_identity_residual(const TrajectoryRecord& traj, const NormalFormFrame& frame, std::size_t first,
                                    std::size_t last, Closure closure) {
  if (last <= first || last >= traj.size() || (last - first) % 2 != 0)
    throw std::invalid_argument("integrated_identity_residual: need an even number of intervals inside the record");
  const double h = (traj.times[last] - traj.times[first]) / static_cast<double>(last - first);
  for (std::size_t i = first + 1; i <= last; ++i)
    if (std::abs(traj.times[i] - traj.times[i - 1] - h) > 1e-9 * h)
      throw std::invalid_argument("integrated_identity_residual: samples must be uniformly spaced");

  CoefSeq integral(traj.states[first].grid());
  for (std::size_t i = first; i <= last; ++i) {
    const double w = (i == first || i == last) ? 1.0 : ((i - first) % 2 == 1 ? 4.0 : 2.0);
    const double t = traj.times[i];
    integral += (w * h / 3.0) * nf_rhs(frame.to_z(traj.states[i], t), frame, t, closure);
  }
  const double t0 = traj.times[first], t1 = traj.times[last];
  const CoefSeq jump = dbp_bracket(frame.to_z(traj.states[last], t1), frame, t1) -
                       dbp_bracket(frame.to_z(traj.states[first], t0), frame, t0);
  return max_abs_difference(jump, integral);
}

double duhamel_gap(const CoefSeq& u0, const CoefSeq& u_t, double t, double gamma, SobolevIndex s) {
  return sobolev_norm(u_t - linear_flow(u0, t, gamma), s);
}

double duhamel_gap(const CoefSeq& u0, const TrajectoryRecord& traj, double t, double gamma, SobolevIndex s) {
  return duhamel_gap(u0, traj.state_at(t), t, gamma, s);
}

}  // namespace dampkdv
