#pragma once

// Thin RAII wrapper over FFTW real transforms of length P.
// Each instance owns its plans and buffers; instances are not shared between threads.

#include <memory>
#include <span>

#include "dampkdv/spectral.hpp"

namespace dampkdv::detail {

class RealTransform {
 public:
  explicit RealTransform(int P);
  ~RealTransform();
  RealTransform(const RealTransform&) = delete;
  RealTransform& operator=(const RealTransform&) = delete;

  int size() const noexcept { return P_; }

  /// samples[j] = sum_{|k|<=K} u_k e^{2 pi i k j / P}
  void synthesize(const CoefSeq& u, std::span<double> samples);
  /// u_k = (1/P) sum_j samples[j] e^{-2 pi i k j / P} for |k| <= K, Hermitian by construction.
  void analyze(std::span<const double> samples, CoefSeq& u);

 private:
  int P_;
  double* real_ = nullptr;
  cplx* spec_ = nullptr;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Per-thread cached transform for length P.
RealTransform& thread_transform(int P);

}  // namespace dampkdv::detail
