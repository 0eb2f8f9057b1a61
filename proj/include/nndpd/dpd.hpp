#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nndpd/signal.hpp"

namespace nndpd {

/// Trainable scalars of one gated ReLU sub-network, stored contiguously as
///   [gate_sharpness, gate_center, w_out[0..n), w_hid[0..n), b_hid[0..n)]
/// so optimizers can work on values() directly. Tag supplies field names.
template <class Tag>
class GatedReluParams {
 public:
  GatedReluParams() = default;
  explicit GatedReluParams(std::size_t n_neurons) : n_(n_neurons), values_(2 + 3 * n_neurons, 0.0) {}

  std::size_t neurons() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& gate_sharpness() noexcept { return values_[0]; }
  double gate_sharpness() const noexcept { return values_[0]; }
  double& gate_center() noexcept { return values_[1]; }
  double gate_center() const noexcept { return values_[1]; }

  std::span<double> w_out() noexcept { return {values_.data() + 2, n_}; }
  std::span<const double> w_out() const noexcept { return {values_.data() + 2, n_}; }
  std::span<double> w_hid() noexcept { return {values_.data() + 2 + n_, n_}; }
  std::span<const double> w_hid() const noexcept { return {values_.data() + 2 + n_, n_}; }
  std::span<double> b_hid() noexcept { return {values_.data() + 2 + 2 * n_, n_}; }
  std::span<const double> b_hid() const noexcept { return {values_.data() + 2 + 2 * n_, n_}; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Human-readable name of values()[index], e.g. "alpha" or "w_hid[3]".
  std::string name(std::size_t index) const {
    if (index == 0) return Tag::kSharpness;
    if (index == 1) return Tag::kCenter;
    const std::size_t k = index - 2;
    static constexpr const char* kVectors[] = {"w_out", "w_hid", "b_hid"};
    return std::string(kVectors[k / n_]) + "[" + std::to_string(k % n_) + "]";
  }

  friend bool operator==(const GatedReluParams&, const GatedReluParams&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct AmAmTag {
  static constexpr const char* kSharpness = "alpha";
  static constexpr const char* kCenter = "omega_rho";
};
struct AmPmTag {
  static constexpr const char* kSharpness = "beta";
  static constexpr const char* kCenter = "omega_phi";
};

/// Amplitude inverse: g0(u) + g1(u) with
///   gamma0(u) = sigmoid(alpha * (u - omega_rho))
///   g0(u)     = gamma0(u) + (1 - gamma0(u)) * u
///   g1(u)     = sum_j w_out[j] * relu(w_hid[j] * u + b_hid[j])
using AmAmDpdParams = GatedReluParams<AmAmTag>;

/// Phase negation: gamma1(u) * g2(u) with
///   gamma1(u) = sigmoid(beta * (u - omega_phi))
///   g2(u)     = sum_j w_out[j] * relu(w_hid[j] * u + b_hid[j])
using AmPmDpdParams = GatedReluParams<AmPmTag>;

inline constexpr std::size_t kDefaultAmAmNeurons = 8;
inline constexpr std::size_t kDefaultAmPmNeurons = 4;

/// Numerically stable logistic function.
double sigmoid(double x) noexcept;

/// Predicted PA input amplitude for a (normalized) amplitude u >= 0.
double amam_forward(double u, const AmAmDpdParams& params);

/// Phase correction in degrees for PA input amplitude u >= 0 (normalized).
double ampm_forward(double u, const AmPmDpdParams& params);

/// Both sub-networks plus the amplitude unit they were trained in. Network
/// inputs and AM/AM outputs are amplitudes divided by amplitude_scale (volts
/// per normalized unit); phase outputs are degrees.
struct DpdModel {
  AmAmDpdParams amam;
  AmPmDpdParams ampm;
  double amplitude_scale = 1.0;

  /// Predistorted amplitude in volts for an input amplitude in volts.
  double amplitude(double volts) const;
  /// Phase correction in degrees for a PA input amplitude in volts.
  double phase_correction(double volts) const;

  friend bool operator==(const DpdModel&, const DpdModel&) = default;
};

/// Per sample: a' = amplitude(|x|), output = a' * exp(i*(arg x + phase_correction(a'))).
/// A zero sample maps to amplitude(0) on the real axis.
ComplexSignal predistort(std::span<const Complex> signal, const DpdModel& model);

/// Unit-scale convenience overload.
ComplexSignal predistort(std::span<const Complex> signal, const AmAmDpdParams& amam,
                         const AmPmDpdParams& ampm);

/// Seeded initialization. Each hidden unit gets a slope uniform in [0.5, 1.5]
/// (fan-in 1) and a kink -b/w uniform in [0, peak]; output weights are uniform
/// in [-0.1, 0.1], gate sharpness is 10 and gate centers sit at 0.8 times the
/// peak input amplitude of each network.
std::pair<AmAmDpdParams, AmPmDpdParams> initialize_params(std::uint64_t seed, std::size_t n_rho,
                                                          std::size_t n_phi,
                                                          double amam_peak = 1.0,
                                                          double ampm_peak = 1.0);

/// Parameters for which predistort is exactly the identity map.
DpdModel identity_model(std::size_t n_rho = kDefaultAmAmNeurons,
                        std::size_t n_phi = kDefaultAmPmNeurons);

// Model file. JSON text with a format tag and version; doubles are written in
// shortest round-trip form so load(save(m)) == m bit for bit.
inline constexpr int kModelFormatVersion = 1;

struct ModelFileInfo {
  std::string tool_version;
  std::string config_digest;
};

std::string model_to_text(const DpdModel& model, const ModelFileInfo& info = {});
DpdModel model_from_text(const std::string& text, const std::string& origin = "<memory>");
void save_model(const std::string& path, const DpdModel& model, const ModelFileInfo& info = {});
DpdModel load_model(const std::string& path);

}  // namespace nndpd
