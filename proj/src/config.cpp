#include "nndpd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nndpd/digest.hpp"

namespace nndpd {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads typed fields out of one JSON object, tracking the field path so
// errors point at the offending key.
class Section {
 public:
  Section(const json& obj, std::string path, const std::string& origin)
      : obj_(obj), path_(std::move(path)), origin_(origin) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ConfigError(origin_ + ": " + field + ": " + what);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed.count(key)) fail(field(key), "unknown key");
    }
  }

  const json* find(const std::string& key) const {
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void read_uint(const std::string& key, Int& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(field(key), "expected a non-negative integer");
      out = static_cast<Int>(v->get<std::uint64_t>());
    }
  }

  void read(const std::string& key, std::string& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  Section child(const std::string& key) const { return Section(obj_.at(key), field(key), origin_); }

 private:
  const json& obj_;
  std::string path_;
  const std::string& origin_;
};

void read_pa(const Section& s, RappParams& pa) {
  s.allow_only({"g", "p", "v_sat", "a", "b", "q"});
  s.read("g", pa.g);
  s.read("p", pa.p);
  s.read("v_sat", pa.v_sat);
  s.read("a", pa.a);
  s.read("b", pa.b);
  s.read("q", pa.q);
}

ordered_json pa_json(const RappParams& pa) {
  return ordered_json{{"g", pa.g}, {"p", pa.p}, {"v_sat", pa.v_sat},
                      {"a", pa.a}, {"b", pa.b}, {"q", pa.q}};
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // The message carries "line L, column C".
    throw ConfigError(origin + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Converts library validation failures into errors that name the section.
template <class Fn>
void validated(const std::string& origin, const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + section + ": " + e.what());
  }
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  train.seed = s;
  sweep.seed = s;
}

void RunConfig::validate() const {
  pa.validate();
  qam.validate();
  ofdm.validate();
  train.validate();
  sweep.validate();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return run_config_to_text(a) == run_config_to_text(b);
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.train.train_ibo_db = cfg.sweep.ibo_grid.front();
  cfg.set_seed(cfg.seed);
  return cfg;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  const json root = parse_json(text, origin);
  RunConfig cfg = default_run_config();
  const Section top(root, "", origin);
  top.allow_only({"pa", "signal", "train", "sweep", "output_dir", "seed"});
  top.read("output_dir", cfg.output_dir);
  std::uint64_t seed = cfg.seed;
  top.read_uint("seed", seed);

  if (top.find("pa")) read_pa(top.child("pa"), cfg.pa);

  if (top.find("signal")) {
    const auto s = top.child("signal");
    s.allow_only({"qam_order", "n_fft", "n_active", "cp_len"});
    s.read_uint("qam_order", cfg.qam.order);
    s.read_uint("n_fft", cfg.ofdm.n_fft);
    s.read_uint("n_active", cfg.ofdm.n_active);
    s.read_uint("cp_len", cfg.ofdm.cp_len);
  }

  bool explicit_train_ibo = false;
  if (top.find("train")) {
    const auto s = top.child("train");
    s.allow_only({"batch_size", "epochs", "learning_rate", "n_train_symbols", "adam_beta1",
                  "adam_beta2", "adam_eps", "train_ibo_db", "n_rho", "n_phi"});
    s.read_uint("batch_size", cfg.train.batch_size);
    s.read_uint("epochs", cfg.train.epochs);
    s.read("learning_rate", cfg.train.learning_rate);
    s.read_uint("n_train_symbols", cfg.train.n_train_symbols);
    s.read("adam_beta1", cfg.train.adam_beta1);
    s.read("adam_beta2", cfg.train.adam_beta2);
    s.read("adam_eps", cfg.train.adam_eps);
    explicit_train_ibo = s.find("train_ibo_db") != nullptr;
    s.read("train_ibo_db", cfg.train.train_ibo_db);
    s.read_uint("n_rho", cfg.train.n_rho);
    s.read_uint("n_phi", cfg.train.n_phi);
  }

  if (top.find("sweep")) {
    const auto s = top.child("sweep");
    s.allow_only({"ibo_grid", "n_eval_symbols", "chains", "threads"});
    if (const auto* grid = s.find("ibo_grid")) {
      if (!grid->is_array()) s.fail(s.field("ibo_grid"), "expected an array of numbers");
      cfg.sweep.ibo_grid.clear();
      for (const auto& v : *grid) {
        if (!v.is_number()) s.fail(s.field("ibo_grid"), "expected an array of numbers");
        cfg.sweep.ibo_grid.push_back(v.get<double>());
      }
    }
    s.read_uint("n_eval_symbols", cfg.sweep.n_eval_symbols);
    s.read_uint("threads", cfg.sweep.threads);
    if (const auto* chains = s.find("chains")) {
      if (!chains->is_array()) s.fail(s.field("chains"), "expected an array of chain names");
      cfg.sweep.chains.clear();
      for (const auto& v : *chains) {
        if (!v.is_string()) s.fail(s.field("chains"), "expected an array of chain names");
        validated(origin, "sweep.chains", [&] { cfg.sweep.chains.push_back(parse_chain(v.get<std::string>())); });
      }
    }
  }

  if (!explicit_train_ibo && !cfg.sweep.ibo_grid.empty()) {
    cfg.train.train_ibo_db = cfg.sweep.ibo_grid.front();
  }
  cfg.set_seed(seed);

  validated(origin, "pa", [&] { cfg.pa.validate(); });
  validated(origin, "signal", [&] {
    cfg.qam.validate();
    cfg.ofdm.validate();
  });
  validated(origin, "train", [&] { cfg.train.validate(); });
  validated(origin, "sweep", [&] { cfg.sweep.validate(); });
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path), path); }

std::string run_config_to_text(const RunConfig& cfg) {
  ordered_json root;
  root["seed"] = cfg.seed;
  root["output_dir"] = cfg.output_dir;
  root["pa"] = pa_json(cfg.pa);
  root["signal"] = ordered_json{{"qam_order", cfg.qam.order},
                                {"n_fft", cfg.ofdm.n_fft},
                                {"n_active", cfg.ofdm.n_active},
                                {"cp_len", cfg.ofdm.cp_len}};
  root["train"] = ordered_json{{"batch_size", cfg.train.batch_size},
                               {"epochs", cfg.train.epochs},
                               {"learning_rate", cfg.train.learning_rate},
                               {"n_train_symbols", cfg.train.n_train_symbols},
                               {"adam_beta1", cfg.train.adam_beta1},
                               {"adam_beta2", cfg.train.adam_beta2},
                               {"adam_eps", cfg.train.adam_eps},
                               {"train_ibo_db", cfg.train.train_ibo_db},
                               {"n_rho", cfg.train.n_rho},
                               {"n_phi", cfg.train.n_phi}};
  ordered_json chains = ordered_json::array();
  for (auto c : cfg.sweep.chains) chains.push_back(chain_name(c));
  root["sweep"] = ordered_json{{"ibo_grid", cfg.sweep.ibo_grid},
                               {"n_eval_symbols", cfg.sweep.n_eval_symbols},
                               {"chains", chains},
                               {"threads", cfg.sweep.threads}};
  return root.dump(2) + "\n";
}

std::string config_digest(const RunConfig& cfg) { return sha256_hex(run_config_to_text(cfg)); }

RappParams parse_rapp_params(const std::string& text, const std::string& origin) {
  const json root = parse_json(text, origin);
  RappParams pa;
  read_pa(Section(root, "", origin), pa);
  validated(origin, "pa", [&] { pa.validate(); });
  return pa;
}

RappParams load_rapp_params(const std::string& path) { return parse_rapp_params(read_file(path), path); }

std::string rapp_params_to_text(const RappParams& params) { return pa_json(params).dump(2) + "\n"; }

}  // namespace nndpd
