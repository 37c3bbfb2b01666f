#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dampkdv::detail {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealTransform::RealTransform(int P) : P_(P) {
  if (P < 2) throw std::invalid_argument("RealTransform: P must be >= 2");
  const std::size_t half = static_cast<std::size_t>(P / 2 + 1);
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(static_cast<std::size_t>(P));
  spec_ = reinterpret_cast<cplx*>(fftw_alloc_complex(half));
  if (!real_ || !spec_) throw std::bad_alloc();
  auto* spec = reinterpret_cast<fftw_complex*>(spec_);
  forward_ = fftw_plan_dft_r2c_1d(P, real_, spec, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_c2r_1d(P, spec, real_, FFTW_ESTIMATE);
  if (!forward_ || !backward_) throw std::runtime_error("RealTransform: FFTW planning failed");
}

RealTransform::~RealTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealTransform::synthesize(const CoefSeq& u, std::span<double> samples) {
  const int K = u.K();
  if (u.grid().P != P_ || samples.size() != static_cast<std::size_t>(P_))
    throw std::invalid_argument("RealTransform::synthesize: size mismatch");
  const int half = P_ / 2 + 1;
  for (int k = 0; k < half; ++k) spec_[k] = k <= K ? u[k] : cplx{};
  fftw_execute(static_cast<fftw_plan>(backward_));
  std::copy_n(real_, P_, samples.begin());
}

void RealTransform::analyze(std::span<const double> samples, CoefSeq& u) {
  const int K = u.K();
  if (u.grid().P != P_ || samples.size() != static_cast<std::size_t>(P_))
    throw std::invalid_argument("RealTransform::analyze: size mismatch");
  std::copy(samples.begin(), samples.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const double scale = 1.0 / P_;
  u[0] = cplx{spec_[0].real() * scale, 0.0};
  for (int k = 1; k <= K; ++k) u.set_mode(k, spec_[k] * scale);
}

RealTransform& thread_transform(int P) {
  thread_local std::map<int, std::unique_ptr<RealTransform>> cache;
  auto& slot = cache[P];
  if (!slot) slot = std::make_unique<RealTransform>(P);
  return *slot;
}

}  // namespace dampkdv::detail
