#include "nndpd/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "nndpd/errors.hpp"
#include "nndpd/random.hpp"

namespace nndpd {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (n_train_symbols < 1) throw ConfigError("n_train_symbols must be >= 1");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must be in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must be in (0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (!std::isfinite(train_ibo_db)) throw ConfigError("train_ibo_db must be finite");
  if (n_rho < 1 || n_phi < 1) throw ConfigError("each network needs at least one neuron");
}

void IlaDataset::validate() const {
  if (amam.empty() || ampm.empty()) throw InputShapeError("ILA dataset is empty");
  if (amam.size() != ampm.size()) throw InputShapeError("ILA pair streams differ in length");
  if (!(amplitude_scale > 0.0) || !std::isfinite(amplitude_scale)) {
    throw DomainError("ILA dataset amplitude_scale must be positive");
  }
}

IlaDataset generate_ila_dataset(const RappParams& pa, const QamConfig& qam, const OfdmConfig& ofdm,
                                const TrainConfig& cfg) {
  pa.validate();
  cfg.validate();
  const auto frame =
      random_ofdm_frame(cfg.n_train_symbols, qam, ofdm, mix_seed(cfg.seed, streams::kDatasetBits));
  const auto x = scale_to_ibo(frame.time_signal, p1db_input(pa), cfg.train_ibo_db);
  const auto y = apply_pa(x, pa);

  IlaDataset ds;
  ds.amplitude_scale = pa.knee_amplitude();
  ds.amam.reserve(x.size());
  ds.ampm.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double in_amp = std::abs(x[k]);
    ds.amam.push_back({std::abs(y[k]) / pa.g, in_amp});
    ds.ampm.push_back({in_amp, -radians_to_degrees(std::arg(std::conj(x[k]) * y[k]))});
  }
  return ds;
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw InputShapeError("mse_loss: " + std::to_string(pred.size()) + " predictions vs " +
                          std::to_string(target.size()) + " targets");
  }
  if (pred.empty()) throw InputShapeError("mse_loss of empty sequences");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double amam_gradients(std::span<const SamplePair> batch, const AmAmDpdParams& params,
                      AmAmDpdParams& grad) {
  const std::size_t n = params.neurons();
  if (grad.neurons() != n) grad = AmAmDpdParams(n);
  std::fill(grad.values().begin(), grad.values().end(), 0.0);
  if (batch.empty()) return 0.0;

  const double alpha = params.gate_sharpness();
  const double center = params.gate_center();
  const auto w_out = params.w_out();
  const auto w_hid = params.w_hid();
  const auto b_hid = params.b_hid();
  auto g_w_out = grad.w_out();
  auto g_w_hid = grad.w_hid();
  auto g_b_hid = grad.b_hid();
  const double scale = 2.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  for (const auto& [u, target] : batch) {
    const double gate = sigmoid(alpha * (u - center));
    double out = gate + (1.0 - gate) * u;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = w_hid[j] * u + b_hid[j];
      if (z > 0.0) out += w_out[j] * z;
    }
    const double r = out - target;
    loss += r * r;
    const double c = scale * r;
    // d out / d gate = 1 - u; d gate / d s = gate * (1 - gate); s = alpha * (u - center)
    const double ds = c * (1.0 - u) * gate * (1.0 - gate);
    grad.gate_sharpness() += ds * (u - center);
    grad.gate_center() -= ds * alpha;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = w_hid[j] * u + b_hid[j];
      if (z > 0.0) {
        g_w_out[j] += c * z;
        g_w_hid[j] += c * w_out[j] * u;
        g_b_hid[j] += c * w_out[j];
      }
    }
  }
  return loss / static_cast<double>(batch.size());
}

double ampm_gradients(std::span<const SamplePair> batch, const AmPmDpdParams& params,
                      AmPmDpdParams& grad) {
  const std::size_t n = params.neurons();
  if (grad.neurons() != n) grad = AmPmDpdParams(n);
  std::fill(grad.values().begin(), grad.values().end(), 0.0);
  if (batch.empty()) return 0.0;

  const double beta = params.gate_sharpness();
  const double center = params.gate_center();
  const auto w_out = params.w_out();
  const auto w_hid = params.w_hid();
  const auto b_hid = params.b_hid();
  auto g_w_out = grad.w_out();
  auto g_w_hid = grad.w_hid();
  auto g_b_hid = grad.b_hid();
  const double scale = 2.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  for (const auto& [u, target] : batch) {
    const double gate = sigmoid(beta * (u - center));
    double hidden = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = w_hid[j] * u + b_hid[j];
      if (z > 0.0) hidden += w_out[j] * z;
    }
    const double r = gate * hidden - target;
    loss += r * r;
    const double c = scale * r;
    const double ds = c * hidden * gate * (1.0 - gate);
    grad.gate_sharpness() += ds * (u - center);
    grad.gate_center() -= ds * beta;
    const double cg = c * gate;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = w_hid[j] * u + b_hid[j];
      if (z > 0.0) {
        g_w_out[j] += cg * z;
        g_w_hid[j] += cg * w_out[j] * u;
        g_b_hid[j] += cg * w_out[j];
      }
    }
  }
  return loss / static_cast<double>(batch.size());
}

AmAmDpdParams amam_gradients(std::span<const SamplePair> batch, const AmAmDpdParams& params) {
  AmAmDpdParams grad(params.neurons());
  amam_gradients(batch, params, grad);
  return grad;
}

AmPmDpdParams ampm_gradients(std::span<const SamplePair> batch, const AmPmDpdParams& params) {
  AmPmDpdParams grad(params.neurons());
  ampm_gradients(batch, params, grad);
  return grad;
}

double amam_batch_loss(std::span<const SamplePair> batch, const AmAmDpdParams& params) {
  double acc = 0.0;
  for (const auto& [u, target] : batch) {
    const double d = amam_forward(u, params) - target;
    acc += d * d;
  }
  return acc / static_cast<double>(batch.size());
}

double ampm_batch_loss(std::span<const SamplePair> batch, const AmPmDpdParams& params) {
  double acc = 0.0;
  for (const auto& [u, target] : batch) {
    const double d = ampm_forward(u, params) - target;
    acc += d * d;
  }
  return acc / static_cast<double>(batch.size());
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               std::uint64_t t, const AdamConfig& cfg,
               const std::function<std::string(std::size_t)>& name) {
  if (t < 1) throw DomainError("Adam step index must be >= 1");
  if (grads.size() != params.size()) throw InputShapeError("Adam: gradient/parameter size mismatch");
  if (state.m.empty() && state.v.empty()) state = AdamState(params.size());
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InputShapeError("Adam: state size does not match parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      const std::string label = name ? name(i) : "#" + std::to_string(i);
      throw NumericalError("non-finite gradient for parameter '" + label + "'");
    }
  }
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

namespace {

// Mini-batch Adam loop for one network. The two networks each own one of
// these, with separate shuffle streams, so they never influence each other.
template <class Params, class Gradients>
class NetworkFitter {
 public:
  NetworkFitter(std::span<const SamplePair> pairs, Params& params, const TrainConfig& cfg,
                std::uint64_t shuffle_seed, Gradients gradients, const char* label)
      : pairs_(pairs),
        params_(params),
        batch_size_(cfg.batch_size),
        adam_{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps},
        state_(params.size()),
        grad_(params.neurons()),
        rng_(shuffle_seed),
        order_(pairs.size()),
        gradients_(std::move(gradients)),
        label_(label) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    batch_.reserve(batch_size_);
  }

  /// Runs one epoch and returns its sample-weighted mean training loss.
  double run_epoch(std::size_t epoch) {
    rng_.shuffle(std::span<std::size_t>(order_));
    double weighted = 0.0;
    for (std::size_t start = 0; start < order_.size(); start += batch_size_) {
      const std::size_t stop = std::min(order_.size(), start + batch_size_);
      batch_.clear();
      for (std::size_t i = start; i < stop; ++i) batch_.push_back(pairs_[order_[i]]);
      const double loss = gradients_(std::span<const SamplePair>(batch_), params_, grad_);
      if (!std::isfinite(loss)) fail(epoch, "loss is not finite");
      weighted += loss * static_cast<double>(batch_.size());
      try {
        adam_step(params_, grad_, state_, ++step_, adam_);
      } catch (const NumericalError& e) {
        fail(epoch, e.what());
      }
    }
    return weighted / static_cast<double>(pairs_.size());
  }

 private:
  [[noreturn]] void fail(std::size_t epoch, const std::string& what) const {
    throw TrainingFailure(epoch, std::string(label_) + ": " + what);
  }

  std::span<const SamplePair> pairs_;
  Params& params_;
  std::size_t batch_size_;
  AdamConfig adam_;
  AdamState state_;
  Params grad_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::vector<SamplePair> batch_;
  Gradients gradients_;
  const char* label_;
  std::uint64_t step_ = 0;
};

double peak_input(std::span<const SamplePair> pairs) {
  double peak = 0.0;
  for (const auto& p : pairs) peak = std::max(peak, p.input);
  return peak;
}

}  // namespace

TrainResult train_dpd(const IlaDataset& dataset, const TrainConfig& cfg,
                      const std::function<void(const EpochLoss&)>& on_epoch) {
  cfg.validate();
  dataset.validate();
  const double scale = dataset.amplitude_scale;

  std::vector<SamplePair> amam_pairs(dataset.amam.size());
  std::transform(dataset.amam.begin(), dataset.amam.end(), amam_pairs.begin(),
                 [scale](const SamplePair& p) { return SamplePair{p.input / scale, p.target / scale}; });
  std::vector<SamplePair> ampm_pairs(dataset.ampm.size());
  std::transform(dataset.ampm.begin(), dataset.ampm.end(), ampm_pairs.begin(),
                 [scale](const SamplePair& p) { return SamplePair{p.input / scale, p.target}; });

  auto [amam, ampm] =
      initialize_params(cfg.seed, cfg.n_rho, cfg.n_phi, peak_input(amam_pairs), peak_input(ampm_pairs));

  auto amam_grad = [](std::span<const SamplePair> b, const AmAmDpdParams& p, AmAmDpdParams& g) {
    return amam_gradients(b, p, g);
  };
  auto ampm_grad = [](std::span<const SamplePair> b, const AmPmDpdParams& p, AmPmDpdParams& g) {
    return ampm_gradients(b, p, g);
  };
  NetworkFitter amam_fit(amam_pairs, amam, cfg, mix_seed(cfg.seed, streams::kShuffleAmAm),
                         amam_grad, "AM/AM");
  NetworkFitter ampm_fit(ampm_pairs, ampm, cfg, mix_seed(cfg.seed, streams::kShuffleAmPm),
                         ampm_grad, "AM/PM");

  TrainResult result;
  result.history.reserve(cfg.epochs);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const EpochLoss loss{epoch, amam_fit.run_epoch(epoch), ampm_fit.run_epoch(epoch)};
    result.history.push_back(loss);
    if (on_epoch) on_epoch(loss);
  }
  result.model = DpdModel{std::move(amam), std::move(ampm), scale};
  return result;
}

std::string loss_history_csv(std::span<const EpochLoss> history, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "epoch,amam_loss,ampm_loss\n";
  for (const auto& h : history) out += fmt::format("{},{:.9g},{:.9g}\n", h.epoch, h.amam, h.ampm);
  return out;
}

}  // namespace nndpd
