#include "dampkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace dampkdv {

namespace {

bool is_five_smooth(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

void require_same_grid(const CoefSeq& a, const CoefSeq& b, const char* what) {
  if (a.grid() != b.grid())
    throw std::invalid_argument(std::string(what) + ": mismatched GridSpec");
}

double max_modulus(std::span<const cplx> c) {
  double m = 0.0;
  for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

GridSpec GridSpec::with_modes(int K) {
  if (K < 1) throw std::invalid_argument("GridSpec: K must be >= 1");
  int P = 3 * K + 1;
  while (!is_five_smooth(P)) ++P;
  return {K, P};
}

GridSpec GridSpec::with_modes(int K, int P) {
  if (K < 1) throw std::invalid_argument("GridSpec: K must be >= 1");
  if (P < 3 * K + 1)
    throw std::invalid_argument("GridSpec: P = " + std::to_string(P) + " < 3K+1 = " +
                                std::to_string(3 * K + 1));
  return {K, P};
}

SobolevIndex::SobolevIndex(double s) : s_(s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::invalid_argument("SobolevIndex: s must be finite and >= 0");
}

CoefSeq::CoefSeq(GridSpec grid) : grid_(grid), c_(static_cast<std::size_t>(2 * grid.K + 1)) {
  if (grid.K < 1 || grid.P < 3 * grid.K + 1) throw std::invalid_argument("CoefSeq: invalid GridSpec");
}

CoefSeq CoefSeq::from_positive_modes(GridSpec grid, std::span<const cplx> positive) {
  if (positive.size() != static_cast<std::size_t>(grid.K))
    throw std::invalid_argument("CoefSeq::from_positive_modes: expected K coefficients");
  CoefSeq u(grid);
  for (int k = 1; k <= grid.K; ++k) u.set_mode(k, positive[static_cast<std::size_t>(k - 1)]);
  return u;
}

void CoefSeq::set_mode(int k, cplx value) {
  if (k == 0) {
    (*this)[0] = value;
    return;
  }
  (*this)[k] = value;
  (*this)[-k] = std::conj(value);
}

bool CoefSeq::is_hermitian(double tol) const {
  for (int k = 0; k <= grid_.K; ++k)
    if (std::abs((*this)[k] - std::conj((*this)[-k])) > tol) return false;
  return true;
}

bool CoefSeq::is_finite() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CoefSeq& CoefSeq::operator+=(const CoefSeq& other) {
  require_same_grid(*this, other, "CoefSeq::operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

CoefSeq& CoefSeq::operator-=(const CoefSeq& other) {
  require_same_grid(*this, other, "CoefSeq::operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

CoefSeq& CoefSeq::operator*=(double a) {
  for (auto& z : c_) z *= a;
  return *this;
}

CoefSeq& CoefSeq::operator*=(cplx a) {
  for (auto& z : c_) z *= a;
  return *this;
}

double sobolev_norm(const CoefSeq& u, SobolevIndex s) {
  const double two_s = 2.0 * s.value();
  double acc = 0.0;
  for (int k = 1; k <= u.K(); ++k) {
    const double w = two_s == 0.0 ? 1.0 : std::pow(static_cast<double>(k), two_s);
    acc += w * (std::norm(u[k]) + std::norm(u[-k]));
  }
  return std::sqrt(acc);
}

double l2_norm(const CoefSeq& u) { return sobolev_norm(u, SobolevIndex{0.0}); }

double max_abs_difference(const CoefSeq& a, const CoefSeq& b) {
  const int K = std::max(a.K(), b.K());
  double m = 0.0;
  for (int k = -K; k <= K; ++k) {
    const cplx x = std::abs(k) <= a.K() ? a[k] : cplx{};
    const cplx y = std::abs(k) <= b.K() ? b[k] : cplx{};
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

double l2_distance(const CoefSeq& a, const CoefSeq& b) {
  const int K = std::max(a.K(), b.K());
  double acc = 0.0;
  for (int k = -K; k <= K; ++k) {
    const cplx x = std::abs(k) <= a.K() ? a[k] : cplx{};
    const cplx y = std::abs(k) <= b.K() ? b[k] : cplx{};
    acc += std::norm(x - y);
  }
  return std::sqrt(acc);
}

CoefSeq truncated_convolution(const CoefSeq& u, const CoefSeq& v) {
  require_same_grid(u, v, "truncated_convolution");
  const int P = u.grid().P;
  auto& tr = detail::thread_transform(P);
  std::vector<double> a(static_cast<std::size_t>(P)), b(static_cast<std::size_t>(P));
  tr.synthesize(u, a);
  tr.synthesize(v, b);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
  CoefSeq w(u.grid());
  tr.analyze(a, w);
  return w;
}

CoefSeq project_mean_zero(CoefSeq u) {
  u[0] = cplx{};
  return u;
}

CoefSeq resample(const CoefSeq& u, GridSpec target) {
  CoefSeq out(target);
  const int K = std::min(u.K(), target.K);
  for (int k = -K; k <= K; ++k) out[k] = u[k];
  return out;
}

CoefSeq random_rough_state(GridSpec grid, double sigma, std::uint64_t seed, double target_l2) {
  if (!(target_l2 > 0.0) || !std::isfinite(target_l2))
    throw std::invalid_argument("random_rough_state: target_l2 must be > 0");
  if (!std::isfinite(sigma)) throw std::invalid_argument("random_rough_state: sigma must be finite");
  std::mt19937_64 gen(seed);
  CoefSeq u(grid);
  for (int k = 1; k <= grid.K; ++k) {
    // 53-bit uniform in [0,1) from the raw stream; avoids implementation-defined distributions.
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double phase = 2.0 * std::numbers::pi * unit;
    u.set_mode(k, std::polar(std::pow(static_cast<double>(k), -sigma), phase));
  }
  u *= target_l2 / l2_norm(u);
  return u;
}

std::vector<double> to_physical(const CoefSeq& u) {
  const double scale = std::max(1.0, max_modulus(u.coefficients()));
  if (!u.is_hermitian(1e-12 * scale))
    throw std::invalid_argument("to_physical: coefficients are not Hermitian (field not real)");
  std::vector<double> out(static_cast<std::size_t>(u.grid().P));
  detail::thread_transform(u.grid().P).synthesize(u, out);
  return out;
}

CoefSeq from_physical(std::span<const double> samples, GridSpec grid) {
  if (samples.size() != static_cast<std::size_t>(grid.P))
    throw std::invalid_argument("from_physical: expected P samples");
  CoefSeq u(grid);
  detail::thread_transform(grid.P).analyze(samples, u);
  return u;
}

CoefSeq from_physical(std::span<const cplx> samples, GridSpec grid, double tol) {
  const double scale = std::max(1.0, max_modulus(samples));
  std::vector<double> re(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (std::abs(samples[j].imag()) > tol * scale)
      throw std::invalid_argument("from_physical: sample " + std::to_string(j) +
                                  " has imaginary part beyond tolerance");
    re[j] = samples[j].real();
  }
  return from_physical(re, grid);
}

}  // namespace dampkdv
