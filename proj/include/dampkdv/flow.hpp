#pragma once

// Time evolution of u_t + u_xxx + gamma u + u u_x = f in Fourier space.
//
// The linear part (ik^3 - gamma) and the constant forcing are integrated exactly by working with
// q = u - u_s, u_s = f/(gamma - ik^3); the quadratic term is advanced with ETDRK4.

#include <functional>
#include <stdexcept>
#include <vector>

#include "dampkdv/spectral.hpp"

namespace dampkdv {

/// Raised when a step produces non-finite coefficients.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(double time, const std::string& what);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Fourth-order exponential integrators; both treat the linear part and the constant forcing exactly.
///   etdrk4: exponential time differencing (Cox-Matthews), phi-functions by contour averaging.
///   ifrk4:  integrating-factor RK4 (Lawson). Unstable once |k|^3 h is large and the data are rough.
enum class Scheme { etdrk4, ifrk4 };

struct FlowParams {
  double gamma = 1.0;
  CoefSeq forcing;
  double h = 1e-3;
  /// Test hook: drop the u u_x term.
  bool nonlinear = true;
  Scheme scheme = Scheme::etdrk4;

  const GridSpec& grid() const noexcept { return forcing.grid(); }

  /// gamma > 0, h > 0, forcing real and mean-zero.
  static FlowParams damped(double gamma, CoefSeq forcing, double h);
  /// gamma = 0 variant; only the KdV conservation check uses this.
  static FlowParams undamped(CoefSeq forcing, double h);
  /// min(1e-3, 0.5/K)
  static double default_step(const GridSpec& grid);

 private:
  FlowParams(double g, CoefSeq f, double step) : gamma(g), forcing(std::move(f)), h(step) {}
  friend class Stepper;
  bool undamped_ = false;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<CoefSeq> states;
  std::vector<double> l2_norms;

  std::size_t size() const noexcept { return times.size(); }
  /// Index of the sample at time t (within 1e-9 relative); throws std::out_of_range if absent.
  std::size_t index_at(double t) const;
  const CoefSeq& state_at(double t) const { return states[index_at(t)]; }
};

/// e^{(i k^3 - gamma) t}
cplx linear_multiplier(int k, double t, double gamma);
CoefSeq linear_flow(const CoefSeq& u0, double t, double gamma);

/// du_k/dt = i k^3 u_k - gamma u_k - (ik/2) (u*u)_k + f_k, zero mode forced to 0.
CoefSeq rhs(const CoefSeq& u, const FlowParams& params);

/// Reusable stepper: caches the exponential factors for the nominal step h.
class Stepper {
 public:
  explicit Stepper(FlowParams params);

  const FlowParams& params() const noexcept { return params_; }

  /// Advances u by dt (dt = h uses cached factors). `t` is only used for failure diagnostics.
  CoefSeq step(const CoefSeq& u, double t, double dt);
  CoefSeq step(const CoefSeq& u, double t) { return step(u, t, params_.h); }

 private:
  struct Factors {
    double dt = 0.0;
    std::vector<cplx> half, full;  // e^{Lambda dt/2}, e^{Lambda dt}
    std::vector<cplx> q, f1, f2, f3;  // ETDRK4 weights
  };
  Factors make_factors(double dt) const;
  void nonlinear_term(const CoefSeq& q, CoefSeq& out);
  void etd_step(const CoefSeq& q, const Factors& fac, CoefSeq& out);
  void if_step(const CoefSeq& q, const Factors& fac, CoefSeq& out);

  FlowParams params_;
  CoefSeq steady_;  // f/(gamma - ik^3): fixed point of the linear forced problem
  Factors nominal_;
  std::vector<double> phys_;
  CoefSeq u_work_;
};

/// One step of size params.h.
CoefSeq step(const CoefSeq& u, double t, const FlowParams& params);

using StateObserver = std::function<void(std::size_t step_index, double t, const CoefSeq& u)>;

/// Steps from 0 to T (last step shortened) and calls `observe` at t = 0 and after each step.
/// Returns the number of steps taken.
std::size_t integrate(const CoefSeq& u0, double T, const FlowParams& params, const StateObserver& observe);

/// Records every `sample_every`-th state, plus the final one.
TrajectoryRecord evolve(const CoefSeq& u0, double T, const FlowParams& params, int sample_every = 1);

/// e^{-gamma t} ||u0|| + (||f||/gamma)(1 - e^{-gamma t})
double energy_envelope(double t, double u0_l2, double f_l2, double gamma);

}  // namespace dampkdv
