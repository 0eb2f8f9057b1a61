#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "nndpd/config.hpp"

namespace nndpd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Prints P1dB,in in watts and dBm and the compression residual at that amplitude.
void cmd_p1db(const RunConfig& cfg, std::ostream& out);

struct TrainArtifacts {
  std::string model_path;
  std::string loss_csv_path;
};

/// Generates the ILA dataset, trains, and writes model.json and
/// loss_history.csv into `out_dir`.
TrainArtifacts cmd_train(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

/// Runs the sweep and writes sweep.csv into `out_dir`. A model is loaded only
/// when the dpd chain is requested.
std::string cmd_sweep(const RunConfig& cfg, const std::optional<std::string>& model_path,
                      const std::string& out_dir, std::ostream& out);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nndpd::cli
