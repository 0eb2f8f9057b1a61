#include "nndpd/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nndpd/errors.hpp"
#include "nndpd/fft.hpp"
#include "nndpd/random.hpp"

namespace nndpd {
namespace {

constexpr unsigned gray(unsigned n) { return n ^ (n >> 1); }

constexpr unsigned gray_inverse(unsigned g) {
  unsigned n = g;
  for (unsigned shift = 1; shift < 32; shift <<= 1) n ^= n >> shift;
  return n;
}

// Levels on one axis are indexed in ascending order; the top level carries
// label 0 so that a leading 0 bit means a positive coordinate.
unsigned label_of_level(unsigned level, unsigned m) { return gray(m - 1 - level); }
unsigned level_of_label(unsigned label, unsigned m) { return m - 1 - gray_inverse(label); }

double axis_norm(unsigned order) { return std::sqrt(2.0 * (order - 1) / 3.0); }

unsigned decide_axis(double x, unsigned m, double norm) {
  const double t = (x * norm + (m - 1)) / 2.0;
  if (!(t > 0.0)) return 0;
  if (t >= m - 1) return m - 1;
  const double lo = std::floor(t);
  const auto i = static_cast<unsigned>(lo);
  const double frac = t - lo;
  if (frac < 0.5) return i;
  if (frac > 0.5) return i + 1;
  return label_of_level(i, m) < label_of_level(i + 1, m) ? i : i + 1;
}

}  // namespace

unsigned QamConfig::bits_per_symbol() const {
  validate();
  return order == 4 ? 2 : order == 16 ? 4 : 6;
}

unsigned QamConfig::levels_per_axis() const {
  validate();
  return order == 4 ? 2 : order == 16 ? 4 : 8;
}

void QamConfig::validate() const {
  if (order != 4 && order != 16 && order != 64) {
    throw ConfigError("QAM order must be 4, 16 or 64, got " + std::to_string(order));
  }
}

void OfdmConfig::validate() const {
  if (n_fft < 2 || !is_power_of_two(n_fft)) {
    throw ConfigError("n_fft must be a power of two >= 2, got " + std::to_string(n_fft));
  }
  if (n_active == 0 || n_active > n_fft - 1) {
    throw ConfigError("n_active must be in [1, n_fft - 1], got " + std::to_string(n_active));
  }
  if (cp_len >= n_fft) {
    throw ConfigError("cp_len must be < n_fft, got " + std::to_string(cp_len));
  }
}

std::vector<std::size_t> OfdmConfig::active_bins() const {
  validate();
  const std::size_t below_dc = n_active / 2;
  const std::size_t above_dc = n_active - below_dc;
  std::vector<std::size_t> bins;
  bins.reserve(n_active);
  for (std::size_t k = below_dc; k >= 1; --k) bins.push_back(n_fft - k);
  for (std::size_t k = 1; k <= above_dc; ++k) bins.push_back(k);
  return bins;
}

std::vector<Complex> qam_map(std::span<const std::uint8_t> bits, const QamConfig& cfg) {
  const unsigned bps = cfg.bits_per_symbol();
  const unsigned per_axis = bps / 2;
  const unsigned m = cfg.levels_per_axis();
  if (bits.size() % bps != 0) {
    throw InputShapeError("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                          std::to_string(bps));
  }
  const double norm = axis_norm(cfg.order);
  auto axis_value = [&](std::span<const std::uint8_t> axis_bits) {
    unsigned label = 0;
    for (auto b : axis_bits) label = (label << 1) | (b & 1U);
    const unsigned level = level_of_label(label, m);
    return (2.0 * level - (m - 1)) / norm;
  };
  std::vector<Complex> out;
  out.reserve(bits.size() / bps);
  for (std::size_t k = 0; k < bits.size(); k += bps) {
    const auto group = bits.subspan(k, bps);
    out.emplace_back(axis_value(group.first(per_axis)), axis_value(group.last(per_axis)));
  }
  return out;
}

std::vector<std::uint8_t> qam_hard_demap(std::span<const Complex> symbols, const QamConfig& cfg) {
  const unsigned bps = cfg.bits_per_symbol();
  const unsigned per_axis = bps / 2;
  const unsigned m = cfg.levels_per_axis();
  const double norm = axis_norm(cfg.order);
  std::vector<std::uint8_t> bits;
  bits.reserve(symbols.size() * bps);
  auto emit = [&](double x) {
    const unsigned label = label_of_level(decide_axis(x, m, norm), m);
    for (unsigned b = per_axis; b-- > 0;) bits.push_back(static_cast<std::uint8_t>((label >> b) & 1U));
  };
  for (const auto& s : symbols) {
    emit(s.real());
    emit(s.imag());
  }
  return bits;
}

ComplexSignal ofdm_modulate(std::span<const Complex> freq_symbols, const OfdmConfig& cfg) {
  cfg.validate();
  if (freq_symbols.empty() || freq_symbols.size() % cfg.n_active != 0) {
    throw InputShapeError("OFDM modulator expects a positive multiple of " +
                          std::to_string(cfg.n_active) + " symbols, got " +
                          std::to_string(freq_symbols.size()));
  }
  const auto bins = cfg.active_bins();
  const Fft fft(cfg.n_fft);
  const std::size_t n_sym = freq_symbols.size() / cfg.n_active;
  ComplexSignal out(n_sym * cfg.symbol_length());
  std::vector<Complex> body(cfg.n_fft);
  for (std::size_t s = 0; s < n_sym; ++s) {
    std::fill(body.begin(), body.end(), Complex{});
    for (std::size_t k = 0; k < cfg.n_active; ++k) body[bins[k]] = freq_symbols[s * cfg.n_active + k];
    fft.inverse(body);
    auto dst = out.begin() + static_cast<std::ptrdiff_t>(s * cfg.symbol_length());
    dst = std::copy(body.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), body.end(), dst);
    std::copy(body.begin(), body.end(), dst);
  }
  return out;
}

std::vector<Complex> ofdm_demodulate(std::span<const Complex> signal, const OfdmConfig& cfg) {
  cfg.validate();
  const std::size_t len = cfg.symbol_length();
  if (signal.empty() || signal.size() % len != 0) {
    throw InputShapeError("OFDM demodulator expects a positive multiple of " + std::to_string(len) +
                          " samples, got " + std::to_string(signal.size()));
  }
  const auto bins = cfg.active_bins();
  const Fft fft(cfg.n_fft);
  const std::size_t n_sym = signal.size() / len;
  std::vector<Complex> out;
  out.reserve(n_sym * cfg.n_active);
  std::vector<Complex> body(cfg.n_fft);
  for (std::size_t s = 0; s < n_sym; ++s) {
    const auto src = signal.subspan(s * len + cfg.cp_len, cfg.n_fft);
    std::copy(src.begin(), src.end(), body.begin());
    fft.forward(body);
    for (auto b : bins) out.push_back(body[b]);
  }
  return out;
}

double average_power(std::span<const Complex> signal) {
  if (signal.empty()) throw InputShapeError("average_power of an empty signal");
  double acc = 0.0;
  for (const auto& x : signal) acc += std::norm(x);
  return acc / static_cast<double>(signal.size());
}

double ibo_scale_factor(std::span<const Complex> signal, double p1db_in, double ibo_db) {
  if (!(p1db_in > 0.0) || !std::isfinite(p1db_in)) {
    throw DomainError("P1dB input power must be positive and finite");
  }
  if (!std::isfinite(ibo_db)) throw DomainError("IBO must be finite");
  const double p_avg = average_power(signal);
  if (!(p_avg > 0.0)) throw DegenerateInputError("cannot scale a zero-power signal to an IBO");
  const double target = p1db_in / std::pow(10.0, ibo_db / 10.0);
  return std::sqrt(target / p_avg);
}

ComplexSignal scale_to_ibo(std::span<const Complex> signal, double p1db_in, double ibo_db) {
  const double factor = ibo_scale_factor(signal, p1db_in, ibo_db);
  ComplexSignal out(signal.begin(), signal.end());
  for (auto& x : out) x *= factor;
  return out;
}

OfdmFrame random_ofdm_frame(std::size_t n_symbols, const QamConfig& qam, const OfdmConfig& ofdm,
                            std::uint64_t seed) {
  if (n_symbols == 0) throw InputShapeError("frame needs at least one OFDM symbol");
  Rng rng(seed);
  std::vector<std::uint8_t> bits(n_symbols * ofdm.n_active * qam.bits_per_symbol());
  rng.fill_bits(bits);
  OfdmFrame frame;
  frame.freq_symbols = qam_map(bits, qam);
  frame.time_signal = ofdm_modulate(frame.freq_symbols, ofdm);
  return frame;
}

}  // namespace nndpd
