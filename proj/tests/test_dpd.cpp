#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "json.hpp"
#include "nndpd/dpd.hpp"
#include "nndpd/errors.hpp"
#include "nndpd/random.hpp"

using namespace nndpd;
using nlohmann::json;

namespace {

template <class P>
P random_params(std::size_t n, std::uint64_t seed) {
  P p(n);
  Rng rng(seed);
  for (auto& v : p.values()) v = rng.uniform(-2.0, 2.0);
  p.gate_sharpness() = rng.uniform(1.0, 20.0);
  return p;
}

double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double ref_relu_sum(double u, std::span<const double> wo, std::span<const double> wh,
                    std::span<const double> bh) {
  double s = 0.0;
  for (std::size_t j = 0; j < wo.size(); ++j) s += wo[j] * std::max(0.0, wh[j] * u + bh[j]);
  return s;
}

double ref_amam(double u, const AmAmDpdParams& p) {
  const double g = ref_sigmoid(p.gate_sharpness() * (u - p.gate_center()));
  return g + (1.0 - g) * u + ref_relu_sum(u, p.w_out(), p.w_hid(), p.b_hid());
}

double ref_ampm(double u, const AmPmDpdParams& p) {
  return ref_sigmoid(p.gate_sharpness() * (u - p.gate_center())) *
         ref_relu_sum(u, p.w_out(), p.w_hid(), p.b_hid());
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nndpd_test_" + name);
}

}  // namespace

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(-1e6), 0.0);
  EXPECT_EQ(sigmoid(1e6), 1.0);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(sigmoid(3.0) + sigmoid(-3.0), 1.0);
}

TEST(AmAmForward, GateOffIsIdentity) {
  AmAmDpdParams p(8);
  p.gate_sharpness() = 10.0;
  p.gate_center() = 1e6;
  EXPECT_EQ(amam_forward(0.3, p), 0.3);
  EXPECT_EQ(amam_forward(0.0, p), 0.0);
}

TEST(AmAmForward, GateMidpoint) {
  AmAmDpdParams p(8);
  p.gate_sharpness() = 7.0;
  p.gate_center() = 0.4;
  EXPECT_DOUBLE_EQ(amam_forward(0.4, p), 0.5 + 0.5 * 0.4);
}

TEST(AmAmForward, MatchesDirectFormula) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = random_params<AmAmDpdParams>(8, s);
    for (const double u : {0.0, 0.1, 0.3, 0.77, 1.5}) {
      EXPECT_NEAR(amam_forward(u, p), ref_amam(u, p), 1e-14);
    }
  }
}

TEST(AmAmForward, RejectsInvalidAmplitude) {
  const AmAmDpdParams p(8);
  EXPECT_THROW(amam_forward(-0.1, p), DomainError);
  EXPECT_THROW(amam_forward(INFINITY, p), DomainError);
  EXPECT_THROW(amam_forward(std::nan(""), p), DomainError);
}

TEST(AmPmForward, Examples) {
  AmPmDpdParams zero(4);
  zero.gate_sharpness() = 5.0;
  zero.gate_center() = 0.2;
  EXPECT_EQ(ampm_forward(0.5, zero), 0.0);

  AmPmDpdParams one(1);
  one.gate_sharpness() = 3.0;
  one.gate_center() = 0.5;
  one.w_out()[0] = 2.0;
  one.w_hid()[0] = 1.0;
  one.b_hid()[0] = 0.1;
  EXPECT_DOUBLE_EQ(ampm_forward(0.5, one), 0.5 * 2.0 * 0.6);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = random_params<AmPmDpdParams>(4, 100 + s);
    EXPECT_NEAR(ampm_forward(0.5, p), ref_ampm(0.5, p), 1e-14);
  }
  EXPECT_THROW(ampm_forward(-1e-3, zero), DomainError);
}

TEST(Networks, HiddenUnitPermutationInvariance) {
  const auto p = random_params<AmAmDpdParams>(8, 3);
  std::vector<std::size_t> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 3, perm.end());
  AmAmDpdParams q(8);
  q.gate_sharpness() = p.gate_sharpness();
  q.gate_center() = p.gate_center();
  for (std::size_t j = 0; j < 8; ++j) {
    q.w_out()[j] = p.w_out()[perm[j]];
    q.w_hid()[j] = p.w_hid()[perm[j]];
    q.b_hid()[j] = p.b_hid()[perm[j]];
  }
  for (const double u : {0.0, 0.2, 0.9, 1.4}) EXPECT_NEAR(amam_forward(u, p), amam_forward(u, q), 1e-14);
}

TEST(Networks, AmPmIsLinearInOutputWeights) {
  const auto p = random_params<AmPmDpdParams>(4, 8);
  auto q = p;
  for (auto& w : q.w_out()) w *= -3.5;
  for (const double u : {0.05, 0.3, 0.8}) EXPECT_NEAR(ampm_forward(u, q), -3.5 * ampm_forward(u, p), 1e-13);
}

TEST(ParamNames, IndexToName) {
  const AmAmDpdParams a(8);
  EXPECT_EQ(a.name(0), "alpha");
  EXPECT_EQ(a.name(1), "omega_rho");
  EXPECT_EQ(a.name(2), "w_out[0]");
  EXPECT_EQ(a.name(13), "w_hid[3]");
  EXPECT_EQ(a.name(25), "b_hid[7]");
  const AmPmDpdParams b(4);
  EXPECT_EQ(b.name(0), "beta");
  EXPECT_EQ(b.name(1), "omega_phi");
  EXPECT_EQ(b.size(), 14U);
}

TEST(Predistort, IdentityModel) {
  const auto model = identity_model();
  Rng rng(2);
  std::vector<Complex> x(500);
  for (auto& s : x) s = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
  const auto y = predistort(x, model);
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(y[k] - x[k]), 1e-15);
}

TEST(Predistort, ZeroPhaseNetworkKeepsPhase) {
  DpdModel model = identity_model();
  model.amam = random_params<AmAmDpdParams>(8, 4);
  std::vector<Complex> x = {{0.1, 0.05}, {-0.2, 0.01}, {0.0, -0.3}};
  const auto y = predistort(x, model);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::max(0.0, amam_forward(std::abs(x[k]), model.amam));
    EXPECT_NEAR(std::abs(y[k]), a, 1e-14);
    if (a > 0.0) EXPECT_NEAR(std::arg(y[k]), std::arg(x[k]), 1e-13);
  }
}

TEST(Predistort, ZeroSampleAndScale) {
  DpdModel model = identity_model();
  model.amam.gate_center() = 0.0;
  model.amam.gate_sharpness() = 1e3;  // gamma0(0) = 0.5
  const std::vector<Complex> zero = {{0.0, 0.0}};
  const auto y = predistort(zero, model);
  EXPECT_DOUBLE_EQ(y[0].real(), 0.5);
  EXPECT_EQ(y[0].imag(), 0.0);

  // Scaled model: amplitudes pass through the normalized network.
  DpdModel scaled = identity_model();
  scaled.amplitude_scale = 0.1;
  scaled.ampm.gate_center() = 0.0;
  scaled.ampm.gate_sharpness() = 1e6;
  scaled.ampm.w_out()[0] = 1.0;
  scaled.ampm.w_hid()[0] = 10.0;  // 10 degrees per normalized unit
  const std::vector<Complex> x = {{0.05, 0.0}};
  const auto z = predistort(x, scaled);
  EXPECT_NEAR(std::abs(z[0]), 0.05, 1e-15);
  EXPECT_NEAR(std::arg(z[0]), 5.0 * std::numbers::pi / 180.0, 1e-12);
}

TEST(Initialize, DeterministicAndFinite) {
  const auto a = initialize_params(42, 8, 4, 1.0, 0.5);
  const auto b = initialize_params(42, 8, 4, 1.0, 0.5);
  const auto c = initialize_params(43, 8, 4, 1.0, 0.5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.first, c.first);
  EXPECT_EQ(a.first.neurons(), 8U);
  EXPECT_EQ(a.second.neurons(), 4U);
  for (int i = 0; i <= 200; ++i) {
    const double u = 2.0 * i / 200.0;
    EXPECT_TRUE(std::isfinite(amam_forward(u, a.first)));
    EXPECT_TRUE(std::isfinite(ampm_forward(u, a.second)));
  }
  for (const double w : a.first.w_out()) EXPECT_LE(std::abs(w), 0.1);
  // Kinks land inside the amplitude range.
  for (std::size_t j = 0; j < 8; ++j) {
    const double kink = -a.first.b_hid()[j] / a.first.w_hid()[j];
    EXPECT_GE(kink, 0.0);
    EXPECT_LE(kink, 1.0);
  }
}

TEST(ModelFile, RoundTripIsBitExact) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    DpdModel m{random_params<AmAmDpdParams>(8, s), random_params<AmPmDpdParams>(4, s + 1000),
               0.1 + 0.01 * static_cast<double>(s)};
    m.amam.values()[5] = 1.0 / 3.0;
    m.ampm.values()[2] = 1e-300;
    const auto back = model_from_text(model_to_text(m));
    EXPECT_EQ(back, m);
    for (std::size_t i = 0; i < m.amam.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back.amam.values()[i]),
                std::bit_cast<std::uint64_t>(m.amam.values()[i]));
    }
  }
}

TEST(ModelFile, SaveLoad) {
  const auto path = temp_file("model.json");
  DpdModel m{random_params<AmAmDpdParams>(8, 1), random_params<AmPmDpdParams>(4, 2), 0.11875};
  save_model(path.string(), m, {"0.1.0", "abc"});
  EXPECT_EQ(load_model(path.string()), m);
  const auto j = json::parse(model_to_text(m, {"0.1.0", "abc"}));
  EXPECT_EQ(j["tool_version"], "0.1.0");
  EXPECT_EQ(j["config_digest"], "abc");
  EXPECT_EQ(j["amam"]["n_neurons"], 8);
  std::filesystem::remove(path);
}

TEST(ModelFile, ErrorsNameTheField) {
  const DpdModel m{random_params<AmAmDpdParams>(8, 1), random_params<AmPmDpdParams>(4, 2), 0.1};
  const auto good = json::parse(model_to_text(m));

  auto expect_field = [](const json& doc, const std::string& field) {
    try {
      model_from_text(doc.dump(), "m.json");
      ADD_FAILURE() << "no error for " << field;
    } catch (const LoadError& e) {
      EXPECT_EQ(e.field(), field);
      EXPECT_EQ(e.path(), "m.json");
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos);
    }
  };

  auto j = good;
  j["amam"].erase("omega_rho");
  expect_field(j, "amam.omega_rho");

  j = good;
  j["ampm"]["w_hid"].erase(0);
  expect_field(j, "ampm.w_hid");

  j = good;
  j["ampm"]["b_hid"][2] = "x";
  expect_field(j, "ampm.b_hid[2]");

  j = good;
  j["version"] = 99;
  expect_field(j, "version");

  j = good;
  j["format"] = "other";
  expect_field(j, "format");

  j = good;
  j.erase("amplitude_scale");
  expect_field(j, "amplitude_scale");

  EXPECT_THROW(model_from_text("{not json"), LoadError);
  try {
    load_model("/nonexistent/dir/model.json");
    ADD_FAILURE();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/dir/model.json");
  }
}
