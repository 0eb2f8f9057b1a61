#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nndpd {

using Complex = std::complex<double>;

/// Complex baseband samples in volts across a 1-ohm reference, so the
/// instantaneous power of a sample is |x|^2 watts.
using ComplexSignal = std::vector<Complex>;

/// Square Gray-mapped QAM with unit average symbol energy.
struct QamConfig {
  unsigned order = 16;  // 4, 16 or 64

  unsigned bits_per_symbol() const;
  unsigned levels_per_axis() const;
  void validate() const;
};

/// OFDM framing. Data occupies n_active bins centered on DC (DC itself and
/// the outer guard bins stay empty). Transforms are unitary.
struct OfdmConfig {
  std::size_t n_fft = 1024;
  std::size_t n_active = 600;
  std::size_t cp_len = 128;

  std::size_t symbol_length() const noexcept { return n_fft + cp_len; }
  void validate() const;

  /// FFT bin index for each active subcarrier, lowest frequency first.
  std::vector<std::size_t> active_bins() const;
};

/// Maps bits (one bit per byte, values 0/1) to constellation points.
/// Each symbol takes log2(M) bits; the first half select I, the rest Q.
std::vector<Complex> qam_map(std::span<const std::uint8_t> bits, const QamConfig& cfg);

/// Nearest-point hard decisions. An exact tie between two levels on one axis
/// resolves to the level with the smaller bit label, which gives the smaller
/// constellation index overall.
std::vector<std::uint8_t> qam_hard_demap(std::span<const Complex> symbols, const QamConfig& cfg);

/// Modulates one or more OFDM symbols. freq_symbols.size() must be a positive
/// multiple of n_active; each block of n_active values becomes one time-domain
/// symbol of n_fft + cp_len samples.
ComplexSignal ofdm_modulate(std::span<const Complex> freq_symbols, const OfdmConfig& cfg);

/// Inverse of ofdm_modulate for an ideal channel.
std::vector<Complex> ofdm_demodulate(std::span<const Complex> signal, const OfdmConfig& cfg);

/// Mean of |x|^2 in watts.
double average_power(std::span<const Complex> signal);

/// Scales the signal by one positive real factor so that its average power is
/// p1db_in / 10^(ibo_db/10).
ComplexSignal scale_to_ibo(std::span<const Complex> signal, double p1db_in, double ibo_db);

/// The factor scale_to_ibo applies.
double ibo_scale_factor(std::span<const Complex> signal, double p1db_in, double ibo_db);

/// Bits -> QAM -> OFDM for `n_symbols` OFDM symbols drawn from `seed`.
struct OfdmFrame {
  std::vector<Complex> freq_symbols;
  ComplexSignal time_signal;
};
OfdmFrame random_ofdm_frame(std::size_t n_symbols, const QamConfig& qam, const OfdmConfig& ofdm,
                            std::uint64_t seed);

}  // namespace nndpd
