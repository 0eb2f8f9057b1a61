#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nndpd/dpd.hpp"
#include "nndpd/errors.hpp"
#include "nndpd/pa.hpp"
#include "nndpd/signal.hpp"

namespace nndpd {

/// Error ratios below this are reported as "below floor" with kEvmFloorDb.
inline constexpr double kEvmFloorRatio = 1e-15;
inline constexpr double kEvmFloorDb = -150.0;

struct EvmValue {
  double db = kEvmFloorDb;
  bool below_floor = true;

  friend bool operator==(const EvmValue&, const EvmValue&) = default;
};

/// 10*log10(sum |received/gain - reference|^2 / sum |reference|^2). No
/// complex-gain fitting: residual rotation counts as error.
EvmValue evm_db(std::span<const Complex> reference, std::span<const Complex> received, double gain);

enum class ChainKind { NoDpd, Dpd, Limit };

const char* chain_name(ChainKind kind);
ChainKind parse_chain(const std::string& name);

struct SweepConfig {
  std::vector<double> ibo_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::size_t n_eval_symbols = 200;
  std::uint64_t seed = 1;
  std::vector<ChainKind> chains = {ChainKind::NoDpd, ChainKind::Dpd, ChainKind::Limit};
  /// Worker threads for grid points; results do not depend on this.
  unsigned threads = 1;

  bool wants(ChainKind kind) const;
  void validate() const;
};

struct ChainContext {
  RappParams pa;
  QamConfig qam;
  OfdmConfig ofdm;
  const DpdModel* model = nullptr;  // required for ChainKind::Dpd only
};

/// bits -> QAM -> OFDM -> IBO scaling -> [predistort] -> PA or limiter ->
/// OFDM demod -> EVM against the transmitted symbols. The transmitted frame
/// depends only on (seed, n_symbols, qam, ofdm), so chains sharing a seed see
/// the same waveform.
EvmValue run_chain(ChainKind kind, double ibo_db, const ChainContext& ctx, std::size_t n_symbols,
                   std::uint64_t seed);

/// Seed of the frame evaluated at grid index `index`.
std::uint64_t sweep_point_seed(std::uint64_t master_seed, std::size_t index);

struct SweepRow {
  double ibo_db = 0.0;
  std::optional<EvmValue> no_dpd;
  std::optional<EvmValue> dpd;
  std::optional<EvmValue> limit;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::string model_digest;  // SHA-256 of the model text, empty without a model
};

class SweepError : public Error {
 public:
  SweepError(double ibo_db, const std::string& what);
  double ibo_db() const noexcept { return ibo_db_; }

 private:
  double ibo_db_;
};

SweepResult sweep(const SweepConfig& cfg, const ChainContext& ctx);

/// Header `ibo_db,evm_db_no_dpd,evm_db_dpd,evm_db_limit,floor_flags`, values
/// to 6 significant digits. Chains that were not run leave their column
/// empty. floor_flags lists below-floor chains joined by '+', or "none".
std::string sweep_csv(const SweepResult& result, const std::string& comment = {});

/// Largest (no_dpd - dpd) EVM gap over rows holding both chains.
std::optional<double> max_dpd_gain_db(const SweepResult& result);

}  // namespace nndpd
