#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"

#include "nndpd/digest.hpp"
#include "nndpd/errors.hpp"
#include "nndpd/metrics.hpp"
#include "nndpd/pa.hpp"
#include "nndpd/train.hpp"

namespace nndpd::cli {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw Error("failed writing: " + path.string());
}

std::string header_comment(const RunConfig& cfg) {
  return fmt::format("nndpd {} config_digest={} seed={}", kToolVersion, config_digest(cfg), cfg.seed);
}

}  // namespace

void cmd_p1db(const RunConfig& cfg, std::ostream& out) {
  const double p1db = p1db_input(cfg.pa);
  const double amp = std::sqrt(p1db);
  fmt::print(out, "P1dB,in   = {:.9e} W ({:.6f} dBm)\n", p1db, 10.0 * std::log10(p1db) + 30.0);
  fmt::print(out, "amplitude = {:.9e} V\n", amp);
  fmt::print(out, "residual  = {:.3e}\n", std::abs(compression_residual(amp, cfg.pa)));
}

TrainArtifacts cmd_train(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const auto dataset = generate_ila_dataset(cfg.pa, cfg.qam, cfg.ofdm, cfg.train);
  fmt::print(log, "training on {} sample pairs ({} OFDM symbols at IBO {} dB)\n",
             dataset.amam.size(), cfg.train.n_train_symbols, cfg.train.train_ibo_db);
  const auto result = train_dpd(dataset, cfg.train, [&log](const EpochLoss& e) {
    fmt::print(log, "epoch {:3d}  amam {:.6e}  ampm {:.6e}\n", e.epoch, e.amam, e.ampm);
    log.flush();
  });

  fs::create_directories(out_dir);
  TrainArtifacts artifacts{(fs::path(out_dir) / "model.json").string(),
                           (fs::path(out_dir) / "loss_history.csv").string()};
  save_model(artifacts.model_path, result.model, {kToolVersion, config_digest(cfg)});
  write_file(artifacts.loss_csv_path, loss_history_csv(result.history, header_comment(cfg)));
  fmt::print(log, "wrote {}\nwrote {}\n", artifacts.model_path, artifacts.loss_csv_path);
  return artifacts;
}

std::string cmd_sweep(const RunConfig& cfg, const std::optional<std::string>& model_path,
                      const std::string& out_dir, std::ostream& out) {
  std::optional<DpdModel> model;
  if (cfg.sweep.wants(ChainKind::Dpd)) {
    model = load_model(model_path.value_or((fs::path(out_dir) / "model.json").string()));
  }
  const ChainContext ctx{cfg.pa, cfg.qam, cfg.ofdm, model ? &*model : nullptr};
  const auto result = sweep(cfg.sweep, ctx);

  std::string comment = header_comment(cfg);
  if (!result.model_digest.empty()) comment += " model_digest=" + result.model_digest;
  fs::create_directories(out_dir);
  const auto csv_path = (fs::path(out_dir) / "sweep.csv").string();
  write_file(csv_path, sweep_csv(result, comment));

  auto cell = [](const std::optional<EvmValue>& v) {
    if (!v) return std::string("-");
    return v->below_floor ? std::string("floor") : fmt::format("{:.2f}", v->db);
  };
  fmt::print(out, "{:>8} {:>10} {:>10} {:>10}\n", "IBO[dB]", "no_dpd", "dpd", "limit");
  for (const auto& row : result.rows) {
    fmt::print(out, "{:>8g} {:>10} {:>10} {:>10}\n", row.ibo_db, cell(row.no_dpd), cell(row.dpd),
               cell(row.limit));
  }
  if (const auto gap = max_dpd_gain_db(result)) {
    fmt::print(out, "max EVM gap (no_dpd - dpd): {:.2f} dB\n", *gap);
  }
  fmt::print(out, "wrote {}\n", csv_path);
  return csv_path;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-network digital predistortion simulator"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> model_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pa_path;
  app.add_option("--config", config_path, "Run configuration (JSON)");

  auto* p1db = app.add_subcommand("p1db", "Input power at the 1 dB compression point");
  auto* train = app.add_subcommand("train", "Train the DPD networks");
  auto* sweep_cmd = app.add_subcommand("sweep", "EVM versus IBO sweep");
  for (auto* sub : {p1db, train, sweep_cmd}) {
    sub->add_option("--config", config_path, "Run configuration (JSON)");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--pa", pa_path, "PA parameter file (overrides the config's pa section)");
  }
  for (auto* sub : {train, sweep_cmd}) sub->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--model", model_path, "Trained model (default <out>/model.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? default_run_config() : load_run_config(config_path);
    if (seed) cfg.set_seed(*seed);
    if (pa_path) cfg.pa = load_rapp_params(*pa_path);
    const std::string dir = out_dir.value_or(cfg.output_dir);
    if (p1db->parsed()) {
      cmd_p1db(cfg, out);
    } else if (train->parsed()) {
      cmd_train(cfg, dir, out);
    } else {
      cmd_sweep(cfg, model_path, dir, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitUsage;
  } catch (const LoadError& e) {
    fmt::print(err, "load error: {}\n", e.what());
    return kExitUsage;
  } catch (const TrainingFailure& e) {
    fmt::print(err, "training failed at epoch {}: {}\n", e.epoch(), e.what());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return kExitNumerical;
  } catch (const SweepError& e) {
    fmt::print(err, "sweep failed: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
}

}  // namespace nndpd::cli
