#include "nndpd/dpd.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nndpd/errors.hpp"
#include "nndpd/pa.hpp"
#include "nndpd/random.hpp"

namespace nndpd {
namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "nndpd-model";

void check_input(double u, const char* fn) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw DomainError(std::string(fn) + ": input must be finite and >= 0, got " + std::to_string(u));
  }
}

template <class Params>
double relu_sum(double u, const Params& params) {
  const auto w_out = params.w_out();
  const auto w_hid = params.w_hid();
  const auto b_hid = params.b_hid();
  double acc = 0.0;
  for (std::size_t j = 0; j < params.neurons(); ++j) {
    const double z = w_hid[j] * u + b_hid[j];
    if (z > 0.0) acc += w_out[j] * z;
  }
  return acc;
}

template <class Params>
json params_to_json(const Params& params, const char* sharpness, const char* center) {
  auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
  json j;
  j["n_neurons"] = params.neurons();
  j[sharpness] = params.gate_sharpness();
  j[center] = params.gate_center();
  j["w_out"] = vec(params.w_out());
  j["w_hid"] = vec(params.w_hid());
  j["b_hid"] = vec(params.b_hid());
  return j;
}

class ModelReader {
 public:
  explicit ModelReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw LoadError(origin_, field, what);
  }

  const json& member(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) fail(path, "missing");
    return obj.at(key);
  }

  double number(const json& obj, const std::string& key, const std::string& path) const {
    const auto& v = member(obj, key, path);
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "not finite");
    return d;
  }

  template <class Params>
  Params params(const json& root, const std::string& section, const char* sharpness,
                const char* center) const {
    const auto& obj = member(root, section, section);
    const auto& n_json = member(obj, "n_neurons", section + ".n_neurons");
    if (!n_json.is_number_unsigned() || n_json.get<std::size_t>() == 0) {
      fail(section + ".n_neurons", "expected a positive integer");
    }
    Params p(n_json.get<std::size_t>());
    p.gate_sharpness() = number(obj, sharpness, section + "." + sharpness);
    p.gate_center() = number(obj, center, section + "." + center);
    auto read_vec = [&](const char* key, std::span<double> dst) {
      const std::string path = section + "." + key;
      const auto& arr = member(obj, key, path);
      if (!arr.is_array() || arr.size() != dst.size()) {
        fail(path, "expected an array of " + std::to_string(dst.size()) + " numbers");
      }
      for (std::size_t i = 0; i < dst.size(); ++i) {
        const std::string item = path + "[" + std::to_string(i) + "]";
        if (!arr[i].is_number()) fail(item, "expected a number");
        dst[i] = arr[i].get<double>();
        if (!std::isfinite(dst[i])) fail(item, "not finite");
      }
    };
    read_vec("w_out", p.w_out());
    read_vec("w_hid", p.w_hid());
    read_vec("b_hid", p.b_hid());
    return p;
  }

 private:
  std::string origin_;
};

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double amam_forward(double u, const AmAmDpdParams& params) {
  check_input(u, "amam_forward");
  const double gate = sigmoid(params.gate_sharpness() * (u - params.gate_center()));
  return gate + (1.0 - gate) * u + relu_sum(u, params);
}

double ampm_forward(double u, const AmPmDpdParams& params) {
  check_input(u, "ampm_forward");
  const double gate = sigmoid(params.gate_sharpness() * (u - params.gate_center()));
  return gate * relu_sum(u, params);
}

double DpdModel::amplitude(double volts) const {
  // A drive amplitude cannot be negative; an untrained network may say so.
  return std::max(0.0, amam_forward(volts / amplitude_scale, amam) * amplitude_scale);
}

double DpdModel::phase_correction(double volts) const {
  return ampm_forward(volts / amplitude_scale, ampm);
}

ComplexSignal predistort(std::span<const Complex> signal, const DpdModel& model) {
  ComplexSignal out(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    const double r = std::abs(signal[k]);
    const double drive = model.amplitude(r);
    if (r == 0.0) {
      out[k] = drive;
      continue;
    }
    const double phase = std::arg(signal[k]) + degrees_to_radians(model.phase_correction(drive));
    out[k] = std::polar(drive, phase);
  }
  return out;
}

ComplexSignal predistort(std::span<const Complex> signal, const AmAmDpdParams& amam,
                         const AmPmDpdParams& ampm) {
  return predistort(signal, DpdModel{amam, ampm, 1.0});
}

std::pair<AmAmDpdParams, AmPmDpdParams> initialize_params(std::uint64_t seed, std::size_t n_rho,
                                                          std::size_t n_phi, double amam_peak,
                                                          double ampm_peak) {
  if (n_rho == 0 || n_phi == 0) throw ConfigError("each network needs at least one neuron");
  Rng rng(mix_seed(seed, streams::kInitParams));
  constexpr double kFanIn = 1.0;
  const double hidden_scale = 1.0 / std::sqrt(kFanIn);
  // Kinks are placed inside [0, peak] with rising slopes so that no unit
  // starts out dead over the input range.
  auto init = [&](auto& p, double peak) {
    p.gate_sharpness() = 10.0;
    p.gate_center() = 0.8 * peak;
    for (auto& w : p.w_out()) w = rng.uniform(-0.1, 0.1);
    for (std::size_t j = 0; j < p.neurons(); ++j) {
      const double slope = hidden_scale * rng.uniform(0.5, 1.5);
      const double kink = rng.uniform(0.0, peak);
      p.w_hid()[j] = slope;
      p.b_hid()[j] = -slope * kink;
    }
  };
  AmAmDpdParams amam(n_rho);
  AmPmDpdParams ampm(n_phi);
  init(amam, amam_peak);
  init(ampm, ampm_peak);
  return {std::move(amam), std::move(ampm)};
}

DpdModel identity_model(std::size_t n_rho, std::size_t n_phi) {
  DpdModel m{AmAmDpdParams(n_rho), AmPmDpdParams(n_phi), 1.0};
  // sigmoid(u - 1e6) underflows to exactly 0 for any realistic amplitude.
  m.amam.gate_sharpness() = 1.0;
  m.amam.gate_center() = 1e6;
  m.ampm.gate_sharpness() = 1.0;
  m.ampm.gate_center() = 1e6;
  return m;
}

std::string model_to_text(const DpdModel& model, const ModelFileInfo& info) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelFormatVersion;
  j["tool_version"] = info.tool_version;
  j["config_digest"] = info.config_digest;
  j["amplitude_scale"] = model.amplitude_scale;
  j["amam"] = params_to_json(model.amam, AmAmTag::kSharpness, AmAmTag::kCenter);
  j["ampm"] = params_to_json(model.ampm, AmPmTag::kSharpness, AmPmTag::kCenter);
  return j.dump(2) + "\n";
}

DpdModel model_from_text(const std::string& text, const std::string& origin) {
  ModelReader reader(origin);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    reader.fail("<document>", e.what());
  }
  const auto& format = reader.member(root, "format", "format");
  if (!format.is_string() || format.get<std::string>() != kModelFormat) {
    reader.fail("format", std::string("expected \"") + kModelFormat + "\"");
  }
  const auto& version = reader.member(root, "version", "version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    reader.fail("version", "unsupported model format version");
  }
  DpdModel model;
  model.amplitude_scale = reader.number(root, "amplitude_scale", "amplitude_scale");
  if (!(model.amplitude_scale > 0.0)) reader.fail("amplitude_scale", "must be positive");
  model.amam = reader.params<AmAmDpdParams>(root, "amam", AmAmTag::kSharpness, AmAmTag::kCenter);
  model.ampm = reader.params<AmPmDpdParams>(root, "ampm", AmPmTag::kSharpness, AmPmTag::kCenter);
  return model;
}

void save_model(const std::string& path, const DpdModel& model, const ModelFileInfo& info) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out << model_to_text(model, info);
  if (!out) throw Error("failed writing model file: " + path);
}

DpdModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, "<file>", "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_text(ss.str(), path);
}

}  // namespace nndpd
