#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nndpd/dpd.hpp"
#include "nndpd/pa.hpp"
#include "nndpd/signal.hpp"

namespace nndpd {

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t epochs = 50;
  double learning_rate = 1e-3;
  /// OFDM symbols in the training frame. Every time-domain sample (cyclic
  /// prefix included) becomes one training pair.
  std::size_t n_train_symbols = 2000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  double train_ibo_db = 0.0;
  std::size_t n_rho = kDefaultAmAmNeurons;
  std::size_t n_phi = kDefaultAmPmNeurons;

  void validate() const;
};

struct SamplePair {
  double input;
  double target;

  friend bool operator==(const SamplePair&, const SamplePair&) = default;
};

/// Indirect-learning training pairs, in volts and degrees:
///   amam: (|y| / G, |x|)          post-inverse of the amplitude curve
///   ampm: (|x|, -arg(conj(x) * y)) negated phase shift, degrees
/// amplitude_scale is the unit the networks work in (v_sat / G); train_dpd
/// divides amplitudes by it.
struct IlaDataset {
  std::vector<SamplePair> amam;
  std::vector<SamplePair> ampm;
  double amplitude_scale = 1.0;

  void validate() const;
};

IlaDataset generate_ila_dataset(const RappParams& pa, const QamConfig& qam, const OfdmConfig& ofdm,
                                const TrainConfig& cfg);

double mse_loss(std::span<const double> pred, std::span<const double> target);

/// Analytic gradient of the batch MSE of amam_forward w.r.t. every parameter.
/// Writes into `grad` (resized to match) and returns the batch loss. The ReLU
/// derivative at exactly 0 is taken as 0.
double amam_gradients(std::span<const SamplePair> batch, const AmAmDpdParams& params,
                      AmAmDpdParams& grad);
double ampm_gradients(std::span<const SamplePair> batch, const AmPmDpdParams& params,
                      AmPmDpdParams& grad);

AmAmDpdParams amam_gradients(std::span<const SamplePair> batch, const AmAmDpdParams& params);
AmPmDpdParams ampm_gradients(std::span<const SamplePair> batch, const AmPmDpdParams& params);

double amam_batch_loss(std::span<const SamplePair> batch, const AmAmDpdParams& params);
double ampm_batch_loss(std::span<const SamplePair> batch, const AmPmDpdParams& params);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  std::vector<double> m;
  std::vector<double> v;
};

/// One bias-corrected Adam update at step t >= 1, in place. Throws
/// NumericalError naming the parameter if any gradient is not finite; nothing
/// is modified in that case.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::uint64_t t, const AdamConfig& cfg,
               const std::function<std::string(std::size_t)>& name = {});

template <class Tag>
void adam_step(GatedReluParams<Tag>& params, const GatedReluParams<Tag>& grads, AdamState& state,
               std::uint64_t t, const AdamConfig& cfg) {
  adam_step(params.values(), grads.values(), state, t, cfg,
            [&params](std::size_t i) { return params.name(i); });
}

struct EpochLoss {
  std::size_t epoch;  // 1-based
  double amam;
  double ampm;
};

struct TrainResult {
  DpdModel model;
  std::vector<EpochLoss> history;
};

/// Trains both networks independently with shuffled mini-batches (one seeded
/// Fisher-Yates shuffle per network per epoch). Throws TrainingFailure if a
/// loss or gradient stops being finite.
TrainResult train_dpd(const IlaDataset& dataset, const TrainConfig& cfg,
                      const std::function<void(const EpochLoss&)>& on_epoch = {});

/// Loss history CSV: "epoch,amam_loss,ampm_loss" rows after an optional
/// leading '#' comment line.
std::string loss_history_csv(std::span<const EpochLoss> history, const std::string& comment = {});

}  // namespace nndpd
