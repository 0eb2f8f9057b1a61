#include "nndpd/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "nndpd/digest.hpp"
#include "nndpd/random.hpp"

namespace nndpd {

EvmValue evm_db(std::span<const Complex> reference, std::span<const Complex> received, double gain) {
  if (reference.size() != received.size()) {
    throw InputShapeError("evm_db: " + std::to_string(reference.size()) + " reference vs " +
                          std::to_string(received.size()) + " received symbols");
  }
  if (reference.empty()) throw InputShapeError("evm_db of empty sequences");
  if (!(gain != 0.0) || !std::isfinite(gain)) throw DomainError("evm_db: gain must be finite and nonzero");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    err += std::norm(received[k] / gain - reference[k]);
    ref += std::norm(reference[k]);
  }
  if (!(ref > 0.0)) throw DegenerateInputError("evm_db: reference has zero power");
  const double ratio = err / ref;
  if (ratio < kEvmFloorRatio) return {kEvmFloorDb, true};
  return {10.0 * std::log10(ratio), false};
}

const char* chain_name(ChainKind kind) {
  switch (kind) {
    case ChainKind::NoDpd:
      return "no_dpd";
    case ChainKind::Dpd:
      return "dpd";
    case ChainKind::Limit:
      return "limit";
  }
  return "?";
}

ChainKind parse_chain(const std::string& name) {
  for (auto kind : {ChainKind::NoDpd, ChainKind::Dpd, ChainKind::Limit}) {
    if (name == chain_name(kind)) return kind;
  }
  throw ConfigError("unknown chain '" + name + "' (expected no_dpd, dpd or limit)");
}

bool SweepConfig::wants(ChainKind kind) const {
  return std::find(chains.begin(), chains.end(), kind) != chains.end();
}

void SweepConfig::validate() const {
  if (ibo_grid.empty()) throw ConfigError("sweep ibo_grid is empty");
  for (std::size_t i = 0; i < ibo_grid.size(); ++i) {
    if (!std::isfinite(ibo_grid[i])) throw ConfigError("sweep ibo_grid has a non-finite value");
    if (i > 0 && !(ibo_grid[i] > ibo_grid[i - 1])) {
      throw ConfigError("sweep ibo_grid must be strictly increasing");
    }
  }
  if (n_eval_symbols < 1) throw ConfigError("sweep n_eval_symbols must be >= 1");
  if (chains.empty()) throw ConfigError("sweep needs at least one chain");
}

EvmValue run_chain(ChainKind kind, double ibo_db, const ChainContext& ctx, std::size_t n_symbols,
                   std::uint64_t seed) {
  if (kind == ChainKind::Dpd && ctx.model == nullptr) {
    throw ConfigError("the dpd chain needs a trained model");
  }
  const auto frame = random_ofdm_frame(n_symbols, ctx.qam, ctx.ofdm, seed);
  const double factor = ibo_scale_factor(frame.time_signal, p1db_input(ctx.pa), ibo_db);
  ComplexSignal drive = frame.time_signal;
  for (auto& x : drive) x *= factor;
  if (kind == ChainKind::Dpd) drive = predistort(drive, *ctx.model);
  const auto out =
      kind == ChainKind::Limit ? apply_ideal_limiter(drive, ctx.pa) : apply_pa(drive, ctx.pa);
  const auto received = ofdm_demodulate(out, ctx.ofdm);
  // The reference is what an ideal linear PA would deliver, divided by G.
  std::vector<Complex> reference = frame.freq_symbols;
  for (auto& s : reference) s *= factor;
  return evm_db(reference, received, ctx.pa.g);
}

std::uint64_t sweep_point_seed(std::uint64_t master_seed, std::size_t index) {
  return mix_seed(mix_seed(master_seed, streams::kSweepPoint), index);
}

SweepError::SweepError(double ibo_db, const std::string& what)
    : Error(fmt::format("sweep point IBO {} dB: {}", ibo_db, what)), ibo_db_(ibo_db) {}

SweepResult sweep(const SweepConfig& cfg, const ChainContext& ctx) {
  cfg.validate();
  if (cfg.wants(ChainKind::Dpd) && ctx.model == nullptr) {
    throw ConfigError("the dpd chain was requested without a model");
  }

  SweepResult result;
  result.seed = cfg.seed;
  if (ctx.model != nullptr) result.model_digest = sha256_hex(model_to_text(*ctx.model));
  result.rows.resize(cfg.ibo_grid.size());
  std::vector<std::exception_ptr> errors(cfg.ibo_grid.size());

  auto evaluate = [&](std::size_t i) {
    auto& row = result.rows[i];
    row.ibo_db = cfg.ibo_grid[i];
    const auto seed = sweep_point_seed(cfg.seed, i);
    try {
      for (auto kind : cfg.chains) {
        const auto evm = run_chain(kind, row.ibo_db, ctx, cfg.n_eval_symbols, seed);
        (kind == ChainKind::NoDpd ? row.no_dpd : kind == ChainKind::Dpd ? row.dpd : row.limit) = evm;
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.ibo_grid.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < cfg.ibo_grid.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.ibo_grid.size(); i = next++) evaluate(i);
      });
    }
  }

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SweepError(cfg.ibo_grid[i], e.what());
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "ibo_db,evm_db_no_dpd,evm_db_dpd,evm_db_limit,floor_flags\n";
  auto cell = [](const std::optional<EvmValue>& v) {
    return v ? fmt::format("{:.6g}", v->db) : std::string();
  };
  for (const auto& row : result.rows) {
    std::string flags;
    auto flag = [&](const std::optional<EvmValue>& v, ChainKind kind) {
      if (v && v->below_floor) flags += (flags.empty() ? "" : "+") + std::string(chain_name(kind));
    };
    flag(row.no_dpd, ChainKind::NoDpd);
    flag(row.dpd, ChainKind::Dpd);
    flag(row.limit, ChainKind::Limit);
    out += fmt::format("{:.6g},{},{},{},{}\n", row.ibo_db, cell(row.no_dpd), cell(row.dpd),
                       cell(row.limit), flags.empty() ? "none" : flags);
  }
  return out;
}

std::optional<double> max_dpd_gain_db(const SweepResult& result) {
  std::optional<double> best;
  for (const auto& row : result.rows) {
    if (!row.no_dpd || !row.dpd) continue;
    const double gap = row.no_dpd->db - row.dpd->db;
    if (!best || gap > *best) best = gap;
  }
  return best;
}

}  // namespace nndpd
