#include "nndpd/fft.hpp"

#include <cmath>
#include <numbers>

#include "nndpd/errors.hpp"

namespace nndpd {

Fft::Fft(std::size_t n) : n_(n), scale_(1.0 / std::sqrt(static_cast<double>(n))) {
  if (!is_power_of_two(n)) {
    throw InputShapeError("FFT size must be a power of two, got " + std::to_string(n));
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
}

void Fft::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) {
    throw InputShapeError("FFT input length " + std::to_string(data.size()) + " != plan size " +
                          std::to_string(n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        auto w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const auto t = w * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
  for (auto& x : data) x *= scale_;
}

}  // namespace nndpd
