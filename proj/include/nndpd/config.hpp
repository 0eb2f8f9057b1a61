#pragma once

#include <cstdint>
#include <string>

#include "nndpd/metrics.hpp"
#include "nndpd/pa.hpp"
#include "nndpd/signal.hpp"
#include "nndpd/train.hpp"

namespace nndpd {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a run needs. The master seed is copied into train.seed and
/// sweep.seed; the train and sweep streams are separated by mix_seed.
struct RunConfig {
  RappParams pa;
  QamConfig qam;
  OfdmConfig ofdm;
  TrainConfig train;
  SweepConfig sweep;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  /// Sets the master seed everywhere it is used.
  void set_seed(std::uint64_t s);
  void validate() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Defaults: reference PA values, 16-QAM, 1024-point OFDM with 600 active bins
/// and a 128-sample prefix, batch 128, 50 epochs, lr 1e-3, 8 + 4 neurons,
/// 2000 training symbols at the lowest sweep IBO, sweep 0..12 dB.
RunConfig default_run_config();

/// Parses JSON. Missing keys keep their defaults; unknown keys are errors.
/// `train.train_ibo_db` defaults to the first sweep grid point. Errors are
/// ConfigError with the origin and either line/column or the field path.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<memory>");
RunConfig load_run_config(const std::string& path);

/// Canonical JSON with every field spelled out.
std::string run_config_to_text(const RunConfig& cfg);

/// SHA-256 of the canonical text.
std::string config_digest(const RunConfig& cfg);

/// Standalone PA parameter file: a JSON object with keys g, p, v_sat, a, b, q.
RappParams parse_rapp_params(const std::string& text, const std::string& origin = "<memory>");
RappParams load_rapp_params(const std::string& path);
std::string rapp_params_to_text(const RappParams& params);

}  // namespace nndpd
