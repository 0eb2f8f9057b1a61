#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nndpd {

/// In-place iterative radix-2 FFT with unitary scaling (1/sqrt(n) in both
/// directions). The twiddle table and bit-reversal permutation are built once
/// per size.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<std::complex<double>> data) const { transform(data, false); }
  void inverse(std::span<std::complex<double>> data) const { transform(data, true); }

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2*pi*i*k/n), k < n/2
  std::vector<std::size_t> bitrev_;
  double scale_;
};

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace nndpd
