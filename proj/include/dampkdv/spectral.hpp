#pragma once

// Truncated Fourier representation of real, mean-zero fields on the 2*pi torus.
//
// Convention: u(x) = sum_k u_k e^{ikx},  u_k = (1/2pi) int u(x) e^{-ikx} dx.
// Coefficients are stored for the full symmetric range -K..K.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace dampkdv {

using cplx = std::complex<double>;

/// Spectral truncation: modes |k| <= K, and P >= 3K+1 physical samples so that
/// quadratic products computed on the grid are exact truncations.
struct GridSpec {
  int K = 1;
  int P = 4;

  /// Picks the smallest 5-smooth P with P >= 3K+1.
  static GridSpec with_modes(int K);
  static GridSpec with_modes(int K, int P);

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class SobolevIndex {
 public:
  explicit SobolevIndex(double s);
  double value() const noexcept { return s_; }

 private:
  double s_;
};

class CoefSeq {
 public:
  explicit CoefSeq(GridSpec grid);

  /// Hermitian completion of u_1..u_K; u_0 = 0.
  static CoefSeq from_positive_modes(GridSpec grid, std::span<const cplx> positive);

  const GridSpec& grid() const noexcept { return grid_; }
  int K() const noexcept { return grid_.K; }

  cplx operator[](int k) const { return c_[static_cast<std::size_t>(k + grid_.K)]; }
  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k + grid_.K)]; }

  /// Sets u_k and u_{-k} = conj(u_k) together.
  void set_mode(int k, cplx value);

  std::span<const cplx> coefficients() const noexcept { return c_; }
  std::span<cplx> coefficients() noexcept { return c_; }

  bool is_mean_zero() const noexcept { return c_[static_cast<std::size_t>(grid_.K)] == cplx{}; }
  bool is_hermitian(double tol = 0.0) const;
  bool is_finite() const;

  CoefSeq& operator+=(const CoefSeq& other);
  CoefSeq& operator-=(const CoefSeq& other);
  CoefSeq& operator*=(double a);
  CoefSeq& operator*=(cplx a);

  friend CoefSeq operator+(CoefSeq a, const CoefSeq& b) { return a += b; }
  friend CoefSeq operator-(CoefSeq a, const CoefSeq& b) { return a -= b; }
  friend CoefSeq operator*(double a, CoefSeq b) { return b *= a; }
  friend CoefSeq operator*(cplx a, CoefSeq b) { return b *= a; }

  friend bool operator==(const CoefSeq&, const CoefSeq&) = default;

 private:
  GridSpec grid_;
  std::vector<cplx> c_;
};

/// (sum_{k != 0} |k|^{2s} |u_k|^2)^{1/2}; the homogeneous weight is exact for mean-zero data.
double sobolev_norm(const CoefSeq& u, SobolevIndex s);
double l2_norm(const CoefSeq& u);

/// Max-modulus difference over all modes; sequences may live on different grids
/// (modes missing on one side count as zero).
double max_abs_difference(const CoefSeq& a, const CoefSeq& b);
/// l2 norm of a - b, same convention as max_abs_difference.
double l2_distance(const CoefSeq& a, const CoefSeq& b);

/// w_k = sum_{m+n=k, |m|,|n|<=K} u_n v_m for |k| <= K, via zero-padded transforms of size P.
/// w_0 carries the mean of the product; use project_mean_zero to drop it.
CoefSeq truncated_convolution(const CoefSeq& u, const CoefSeq& v);

CoefSeq project_mean_zero(CoefSeq u);

/// Restriction (or zero extension) to another grid.
CoefSeq resample(const CoefSeq& u, GridSpec target);

/// |u_k| proportional to k^{-sigma} with uniform random phases, rescaled to ||u|| = target_l2.
/// Phases are drawn sequentially for k = 1..K from a mt19937_64 stream, so grids sharing a
/// seed agree on their common modes up to the final rescaling.
CoefSeq random_rough_state(GridSpec grid, double sigma, std::uint64_t seed, double target_l2);

/// Samples u(2*pi*j/P), j = 0..P-1. Input must be Hermitian to 1e-12 (relative).
std::vector<double> to_physical(const CoefSeq& u);
/// Fourier coefficients |k| <= K of real samples on the uniform P-grid. u_0 keeps the sample mean.
CoefSeq from_physical(std::span<const double> samples, GridSpec grid);
/// As above for complex samples; rejects imaginary parts beyond tol (relative to the max modulus).
CoefSeq from_physical(std::span<const cplx> samples, GridSpec grid, double tol = 1e-12);

}  // namespace dampkdv
