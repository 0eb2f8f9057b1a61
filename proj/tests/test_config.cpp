#include <gtest/gtest.h>

#include <string>

#include "json.hpp"
#include "nndpd/config.hpp"
#include "nndpd/errors.hpp"

using namespace nndpd;
using nlohmann::json;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(RunConfig, Defaults) {
  const auto cfg = default_run_config();
  EXPECT_EQ(cfg.pa, RappParams{});
  EXPECT_EQ(cfg.pa.g, 16.0);
  EXPECT_EQ(cfg.pa.a, -345.0);
  EXPECT_EQ(cfg.qam.order, 16U);
  EXPECT_EQ(cfg.ofdm.n_fft, 1024U);
  EXPECT_EQ(cfg.ofdm.n_active, 600U);
  EXPECT_EQ(cfg.ofdm.cp_len, 128U);
  EXPECT_EQ(cfg.train.batch_size, 128U);
  EXPECT_EQ(cfg.train.epochs, 50U);
  EXPECT_EQ(cfg.train.learning_rate, 1e-3);
  EXPECT_EQ(cfg.train.n_train_symbols, 2000U);
  EXPECT_EQ(cfg.train.train_ibo_db, 0.0);
  EXPECT_EQ(cfg.train.n_rho, 8U);
  EXPECT_EQ(cfg.train.n_phi, 4U);
  EXPECT_EQ(cfg.sweep.ibo_grid.size(), 13U);
  EXPECT_EQ(cfg.sweep.n_eval_symbols, 200U);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(RunConfig, TextRoundTrip) {
  auto cfg = default_run_config();
  cfg.pa.v_sat = 2.5;
  cfg.train.epochs = 7;
  cfg.sweep.ibo_grid = {2.0, 4.5, 9.0};
  cfg.sweep.chains = {ChainKind::Limit};
  cfg.set_seed(77);
  const auto back = parse_run_config(run_config_to_text(cfg));
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(run_config_to_text(back), run_config_to_text(cfg));
  EXPECT_EQ(config_digest(back), config_digest(cfg));
  EXPECT_NE(config_digest(cfg), config_digest(default_run_config()));
}

TEST(RunConfig, EmptyObjectIsDefaults) {
  EXPECT_EQ(parse_run_config("{}"), default_run_config());
}

TEST(RunConfig, SeedPropagates) {
  const auto cfg = parse_run_config(R"({"seed": 9})");
  EXPECT_EQ(cfg.seed, 9U);
  EXPECT_EQ(cfg.train.seed, 9U);
  EXPECT_EQ(cfg.sweep.seed, 9U);
}

TEST(RunConfig, TrainIboDefaultsToFirstGridPoint) {
  const auto cfg = parse_run_config(R"({"sweep": {"ibo_grid": [3, 6, 9]}})");
  EXPECT_EQ(cfg.train.train_ibo_db, 3.0);
  const auto explicit_ibo =
      parse_run_config(R"({"sweep": {"ibo_grid": [3, 6]}, "train": {"train_ibo_db": 1.5}})");
  EXPECT_EQ(explicit_ibo.train.train_ibo_db, 1.5);
}

TEST(RunConfig, UnknownKeysAreRejectedWithPath) {
  EXPECT_NE(error_of(R"({"bogus": 1})").find("bogus"), std::string::npos);
  const auto nested = error_of(R"({"train": {"epochz": 3}})");
  EXPECT_NE(nested.find("train.epochz"), std::string::npos) << nested;
  EXPECT_NE(nested.find("cfg.json"), std::string::npos);
}

TEST(RunConfig, InvalidValuesAreRejected) {
  EXPECT_NE(error_of(R"({"train": {"epochs": 0}})").find("epochs"), std::string::npos);
  EXPECT_FALSE(error_of(R"({"train": {"epochs": -3}})").empty());
  EXPECT_FALSE(error_of(R"({"pa": {"g": 0}})").empty());
  EXPECT_FALSE(error_of(R"({"signal": {"n_fft": 1000}})").empty());
  EXPECT_FALSE(error_of(R"({"signal": {"qam_order": 8}})").empty());
  EXPECT_FALSE(error_of(R"({"sweep": {"chains": ["dpd", "magic"]}})").empty());
  EXPECT_FALSE(error_of(R"({"sweep": {"ibo_grid": [4, 2]}})").empty());
  EXPECT_FALSE(error_of(R"({"output_dir": 5})").empty());
}

TEST(RunConfig, SyntaxErrorsCarryPosition) {
  const auto msg = error_of("{\n  \"seed\": ,\n}");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(RunConfig, ShippedDefaultFileMatchesDefaults) {
  const std::string dir = NNDPD_SOURCE_DIR;
  EXPECT_EQ(load_run_config(dir + "/configs/default.json"), default_run_config());
  EXPECT_EQ(load_rapp_params(dir + "/configs/rapp_default.json"), RappParams{});
  EXPECT_THROW(load_run_config(dir + "/configs/does_not_exist.json"), ConfigError);
}

TEST(RappFile, ParseAndRoundTrip) {
  RappParams pa;
  pa.p = 2.0;
  pa.q = 3.0;
  EXPECT_EQ(parse_rapp_params(rapp_params_to_text(pa)), pa);
  const auto partial = parse_rapp_params(R"({"v_sat": 3.8})");
  EXPECT_EQ(partial.v_sat, 3.8);
  EXPECT_EQ(partial.g, 16.0);
  EXPECT_THROW(parse_rapp_params(R"({"vsat": 3.8})"), ConfigError);
  EXPECT_THROW(parse_rapp_params(R"({"p": -1})"), ConfigError);
}
