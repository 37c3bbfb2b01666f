#include "dampkdv/flow.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"

namespace dampkdv {

namespace {

constexpr cplx kI{0.0, 1.0};

double cube(int k) { return static_cast<double>(k) * k * k; }

// ETDRK4 weights for z = Lambda h, divided by h:
//   q  = (e^{z/2} - 1)/z
//   f1 = (-4 - z + e^z (4 - 3z + z^2))/z^3
//   f2 = (2 + z + e^z (z - 2))/z^3
//   f3 = (-4 - 3z - z^2 + e^z (4 - z))/z^3
// Small |z| uses the mean over a circle of radius 1 around z (the expressions are analytic).
struct EtdWeights {
  cplx q, f1, f2, f3;
};

EtdWeights etd_direct(cplx z) {
  const cplx e = std::exp(z), e2 = std::exp(0.5 * z), z3 = z * z * z;
  return {(e2 - 1.0) / z, (-4.0 - z + e * (4.0 - 3.0 * z + z * z)) / z3, (2.0 + z + e * (z - 2.0)) / z3,
          (-4.0 - 3.0 * z - z * z + e * (4.0 - z)) / z3};
}

EtdWeights etd_weights(cplx z) {
  if (std::abs(z) >= 0.5) return etd_direct(z);
  constexpr int M = 32;
  EtdWeights w{};
  for (int j = 0; j < M; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) / M * 2.0;
    const EtdWeights p = etd_direct(z + std::polar(1.0, theta));
    w.q += p.q;
    w.f1 += p.f1;
    w.f2 += p.f2;
    w.f3 += p.f3;
  }
  const double inv = 1.0 / M;
  return {w.q * inv, w.f1 * inv, w.f2 * inv, w.f3 * inv};
}

void validate_forcing(const CoefSeq& f) {
  if (!f.is_finite()) throw std::invalid_argument("FlowParams: forcing has non-finite coefficients");
  if (!f.is_mean_zero()) throw std::invalid_argument("FlowParams: forcing must be mean-zero");
  if (!f.is_hermitian(1e-14)) throw std::invalid_argument("FlowParams: forcing must be real (Hermitian)");
}

void validate_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("FlowParams: h must be > 0");
}

}  // namespace

SolverFailure::SolverFailure(double time, const std::string& what)
    : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time) {}

FlowParams FlowParams::damped(double gamma, CoefSeq forcing, double h) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("FlowParams: gamma must be > 0");
  validate_step(h);
  validate_forcing(forcing);
  return FlowParams(gamma, std::move(forcing), h);
}

FlowParams FlowParams::undamped(CoefSeq forcing, double h) {
  validate_step(h);
  validate_forcing(forcing);
  FlowParams p(0.0, std::move(forcing), h);
  p.undamped_ = true;
  return p;
}

double FlowParams::default_step(const GridSpec& grid) { return std::min(1e-3, 0.5 / grid.K); }

std::size_t TrajectoryRecord::index_at(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol) return i;
  throw std::out_of_range("TrajectoryRecord: no sample at t = " + std::to_string(t));
}

cplx linear_multiplier(int k, double t, double gamma) {
  return std::exp(-gamma * t) * std::polar(1.0, cube(k) * t);
}

CoefSeq linear_flow(const CoefSeq& u0, double t, double gamma) {
  CoefSeq out(u0.grid());
  for (int k = -u0.K(); k <= u0.K(); ++k) out[k] = linear_multiplier(k, t, gamma) * u0[k];
  return out;
}

CoefSeq rhs(const CoefSeq& u, const FlowParams& params) {
  if (u.grid() != params.grid()) throw std::invalid_argument("rhs: state and forcing grids differ");
  CoefSeq out(u.grid());
  const CoefSeq sq = params.nonlinear ? truncated_convolution(u, u) : CoefSeq(u.grid());
  for (int k = -u.K(); k <= u.K(); ++k) {
    if (k == 0) continue;
    out[k] = (kI * cube(k) - params.gamma) * u[k] - kI * (0.5 * k) * sq[k] + params.forcing[k];
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

Stepper::Stepper(FlowParams params)
    : params_(std::move(params)),
      steady_(params_.grid()),
      phys_(static_cast<std::size_t>(params_.grid().P)),
      u_work_(params_.grid()) {
  if (!params_.undamped_ && !(params_.gamma > 0.0))
    throw std::invalid_argument("Stepper: gamma must be > 0 for the damped flow");
  for (int k = -steady_.K(); k <= steady_.K(); ++k)
    if (k != 0) steady_[k] = params_.forcing[k] / (params_.gamma - kI * cube(k));
  nominal_ = make_factors(params_.h);
}

Stepper::Factors Stepper::make_factors(double dt) const {
  const int K = params_.grid().K;
  Factors f;
  f.dt = dt;
  const auto n = static_cast<std::size_t>(2 * K + 1);
  f.half.resize(n);
  f.full.resize(n);
  for (int k = -K; k <= K; ++k) {
    f.half[static_cast<std::size_t>(k + K)] = linear_multiplier(k, 0.5 * dt, params_.gamma);
    f.full[static_cast<std::size_t>(k + K)] = linear_multiplier(k, dt, params_.gamma);
  }
  if (params_.scheme == Scheme::etdrk4) {
    f.q.resize(n);
    f.f1.resize(n);
    f.f2.resize(n);
    f.f3.resize(n);
    for (int k = -K; k <= K; ++k) {
      const auto i = static_cast<std::size_t>(k + K);
      const EtdWeights w = etd_weights(cplx{-params_.gamma, cube(k)} * dt);
      f.q[i] = dt * w.q;
      f.f1[i] = dt * w.f1;
      f.f2[i] = dt * w.f2;
      f.f3[i] = dt * w.f3;
    }
  }
  return f;
}

// out = -(ik/2) ((q + steady)^2)_k
void Stepper::nonlinear_term(const CoefSeq& q, CoefSeq& out) {
  const int K = q.K();
  if (!params_.nonlinear) {
    for (auto& z : out.coefficients()) z = cplx{};
    return;
  }
  auto& tr = detail::thread_transform(q.grid().P);
  auto uw = u_work_.coefficients();
  auto qc = q.coefficients();
  auto sc = steady_.coefficients();
  for (std::size_t i = 0; i < uw.size(); ++i) uw[i] = qc[i] + sc[i];
  tr.synthesize(u_work_, phys_);
  for (auto& x : phys_) x *= x;
  tr.analyze(phys_, out);
  out[0] = cplx{};
  for (int k = 1; k <= K; ++k) out.set_mode(k, -kI * (0.5 * k) * out[k]);
}

// Cox-Matthews ETDRK4 on q = u - steady.
void Stepper::etd_step(const CoefSeq& q, const Factors& fac, CoefSeq& out) {
  const GridSpec g = q.grid();
  const std::size_t n = static_cast<std::size_t>(2 * g.K + 1);
  CoefSeq nu(g), na(g), nb(g), nc(g), a(g), b(g), c(g);
  auto Q = q.coefficients();
  const auto& E = fac.full;
  const auto& E2 = fac.half;
  const auto& W = fac.q;

  nonlinear_term(q, nu);
  auto Nu = nu.coefficients();
  auto A = a.coefficients();
  for (std::size_t i = 0; i < n; ++i) A[i] = E2[i] * Q[i] + W[i] * Nu[i];
  nonlinear_term(a, na);
  auto Na = na.coefficients();
  auto B = b.coefficients();
  for (std::size_t i = 0; i < n; ++i) B[i] = E2[i] * Q[i] + W[i] * Na[i];
  nonlinear_term(b, nb);
  auto Nb = nb.coefficients();
  auto C = c.coefficients();
  for (std::size_t i = 0; i < n; ++i) C[i] = E2[i] * A[i] + W[i] * (2.0 * Nb[i] - Nu[i]);
  nonlinear_term(c, nc);
  auto Nc = nc.coefficients();

  auto O = out.coefficients();
  for (std::size_t i = 0; i < n; ++i)
    O[i] = E[i] * Q[i] + fac.f1[i] * Nu[i] + 2.0 * fac.f2[i] * (Na[i] + Nb[i]) + fac.f3[i] * Nc[i];
}

// Lawson / integrating-factor RK4 on q = u - steady.
void Stepper::if_step(const CoefSeq& q, const Factors& fac, CoefSeq& out) {
  const GridSpec g = q.grid();
  const std::size_t n = static_cast<std::size_t>(2 * g.K + 1);
  const double dt = fac.dt;
  CoefSeq a(g), b(g), c(g), d(g), stage(g);
  auto Q = q.coefficients();
  auto S = stage.coefficients();
  const auto& E = fac.half;
  const auto& E2 = fac.full;

  nonlinear_term(q, a);
  auto A = a.coefficients();
  for (std::size_t i = 0; i < n; ++i) S[i] = E[i] * (Q[i] + 0.5 * dt * A[i]);
  nonlinear_term(stage, b);
  auto B = b.coefficients();
  for (std::size_t i = 0; i < n; ++i) S[i] = E[i] * Q[i] + 0.5 * dt * B[i];
  nonlinear_term(stage, c);
  auto C = c.coefficients();
  for (std::size_t i = 0; i < n; ++i) S[i] = E2[i] * Q[i] + dt * E[i] * C[i];
  nonlinear_term(stage, d);
  auto D = d.coefficients();

  auto O = out.coefficients();
  for (std::size_t i = 0; i < n; ++i) O[i] = E2[i] * Q[i] + dt / 6.0 * (E2[i] * A[i] + 2.0 * E[i] * (B[i] + C[i]) + D[i]);
}

CoefSeq Stepper::step(const CoefSeq& u, double t, double dt) {
  if (u.grid() != params_.grid()) throw std::invalid_argument("Stepper::step: grid mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("Stepper::step: dt must be > 0");
  const Factors local = dt == nominal_.dt ? Factors{} : make_factors(dt);
  const Factors& fac = dt == nominal_.dt ? nominal_ : local;

  const CoefSeq q = u - steady_;
  CoefSeq out(u.grid());
  if (params_.scheme == Scheme::etdrk4)
    etd_step(q, fac, out);
  else
    if_step(q, fac, out);
  out += steady_;
  out[0] = cplx{};
  if (!out.is_finite()) throw SolverFailure(t + dt, "non-finite coefficients (blow-up or step too large)");
  return out;
}

CoefSeq step(const CoefSeq& u, double t, const FlowParams& params) { return Stepper(params).step(u, t); }

std::size_t integrate(const CoefSeq& u0, double T, const FlowParams& params, const StateObserver& observe) {
  if (!(T > 0.0)) throw std::invalid_argument("integrate: T must be > 0");
  Stepper stepper(params);
  const double h = params.h;
  // Treat T/h within 1e-9 of an integer as an exact number of steps.
  const double ratio = T / h;
  auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  const double remainder = T - static_cast<double>(full) * h;
  const bool partial = remainder > 1e-9 * h;

  CoefSeq u = project_mean_zero(u0);
  if (observe) observe(0, 0.0, u);
  for (std::size_t n = 1; n <= full; ++n) {
    const double t0 = static_cast<double>(n - 1) * h;
    u = stepper.step(u, t0);
    if (observe) observe(n, static_cast<double>(n) * h, u);
  }
  if (partial) {
    u = stepper.step(u, static_cast<double>(full) * h, remainder);
    if (observe) observe(full + 1, T, u);
    return full + 1;
  }
  return full;
}

TrajectoryRecord evolve(const CoefSeq& u0, double T, const FlowParams& params, int sample_every) {
  if (sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");
  TrajectoryRecord rec;
  const double ratio = T / params.h;
  const auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  const bool partial = T - static_cast<double>(full) * params.h > 1e-9 * params.h;
  const std::size_t last = full + (partial ? 1 : 0);
  integrate(u0, T, params, [&](std::size_t n, double t, const CoefSeq& u) {
    if (n % static_cast<std::size_t>(sample_every) != 0 && n != last) return;
    rec.times.push_back(t);
    rec.states.push_back(u);
    rec.l2_norms.push_back(l2_norm(u));
  });
  return rec;
}

double energy_envelope(double t, double u0_l2, double f_l2, double gamma) {
  if (!(t >= 0.0)) throw std::invalid_argument("energy_envelope: t must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("energy_envelope: gamma must be > 0");
  const double decay = std::exp(-gamma * t);
  return decay * u0_l2 + f_l2 / gamma * (1.0 - decay);
}

}  // namespace dampkdv
