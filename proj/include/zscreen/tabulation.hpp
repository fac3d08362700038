#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "zscreen/rng.hpp"
#include "zscreen/stats.hpp"

namespace zscreen {

// Null law of a statistic: iid N(0, 1) data of the statistic's shape. The
// statistics are free of the location/scale nuisance parameters, so one
// tabulation per (kind, n, d, design) serves every individual.
struct NullModel {
  StatKind kind = StatKind::T1;
  std::size_t n = 0;
  std::size_t d = 1;
  std::optional<DesignMatrix> design;  // T4 kinds only

  static NullModel t0(std::size_t n) { return {StatKind::T0, n, 1, std::nullopt}; }
  static NullModel t1(std::size_t n) { return {StatKind::T1, n, 1, std::nullopt}; }
  static NullModel t2(std::size_t n) { return {StatKind::T2, n, 1, std::nullopt}; }
  static NullModel t3(std::size_t n, std::size_t d) { return {StatKind::T3, n, d, std::nullopt}; }
  static NullModel t4(DesignMatrix design);

  // Throws IneligibleError when the parameters violate the statistic's rules.
  void validate() const;
};

// Statistic value used for flagging: |t| for T0, the max statistic otherwise.
double screening_value(const StatResult& r);

// Evaluates the statistic for one data set of the model's shape.
double evaluate_null(const NullModel& model, std::span<const double> data);

// One null draw. Degenerate draws (probability zero) are redrawn from the
// same stream and counted in `redraws` when given.
double simulate_null(const NullModel& model, Rng& rng, std::size_t* redraws = nullptr);

// reps draws; replicate k uses Rng(substream_seed(seed, k)).
std::vector<double> simulate_draws(const NullModel& model, std::size_t reps, std::uint64_t seed,
                                   unsigned threads = 1);

// Canonical serialization (dims, entries at 12 significant digits,
// row-major) hashed with 64-bit FNV-1a.
std::uint64_t design_hash(const DesignMatrix& m);

struct QuantileKey {
  StatKind kind = StatKind::T1;
  std::size_t n = 0;
  std::size_t d = 1;
  std::uint64_t design_hash = 0;
  double alpha = 0.05;

  auto tie() const { return std::tie(kind, n, d, design_hash, alpha); }
  friend bool operator<(const QuantileKey& a, const QuantileKey& b) { return a.tie() < b.tie(); }
  friend bool operator==(const QuantileKey& a, const QuantileKey& b) { return a.tie() == b.tie(); }
};

QuantileKey make_key(const NullModel& model, double alpha);

struct QuantileTable {
  QuantileKey key;
  double quantile = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

// Flat text file of quantile records behind an in-memory map. Lookups match
// the key exactly and also require identical reps and seed.
class TableStore {
 public:
  static constexpr const char* kVersionLine = "# zscreen-tables v1";

  TableStore() = default;  // memory only
  explicit TableStore(std::filesystem::path path);

  std::optional<QuantileTable> find(const QuantileKey& key, std::size_t reps, std::uint64_t seed) const;
  // Inserts and, when file-backed, rewrites the file via temp-then-rename.
  void put(const QuantileTable& table);
  std::size_t size() const noexcept { return tables_.size(); }
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

  std::string serialize() const;

 private:
  using Slot = std::tuple<QuantileKey, std::size_t, std::uint64_t>;
  std::optional<std::filesystem::path> path_;
  std::map<Slot, QuantileTable> tables_;
};

struct TabulationParams {
  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline constexpr std::size_t kMinReps = 10000;

// Order statistic of rank ceil((1 - alpha) * reps) of the draws.
double quantile_of(std::vector<double> draws, double alpha);

// Serves from `store` when an identical request exists, else simulates and
// records the result there.
QuantileTable tabulate(const NullModel& model, double alpha, const TabulationParams& params,
                       TableStore* store = nullptr);

// Several levels from a single draw set.
std::vector<QuantileTable> tabulate_levels(const NullModel& model, const std::vector<double>& alphas,
                                           const TabulationParams& params, TableStore* store = nullptr);

// (1 + #{draws >= observed}) / (reps + 1).
double mc_p_value(double observed, std::span<const double> draws);
double mc_p_value(double observed, const NullModel& model, const TabulationParams& params);

// Independent master seed for a purpose tag (e.g. fresh calibration data
// that must not reuse the tabulation streams).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ 0x5851f42d4c957f2dULL;
  const std::uint64_t mixed = splitmix64(s);
  return substream_seed(mixed, tag);
}

// Designs used by calibration runs: model B with the first n_summer rows in
// summer, model C with n sorted random sampling days within span_days.
DesignMatrix season_design(std::size_t n, std::size_t n_summer);
DesignMatrix random_date_design(std::size_t n, std::uint64_t seed, int span_days = 1826);

// Null model of a kind for synthetic runs: T4B uses season_design(n, n_summer),
// T4C random_date_design(n, derive_seed(seed, 2)).
NullModel make_null_model(StatKind kind, std::size_t n, std::size_t d, std::size_t n_summer, std::uint64_t seed);

struct CalibrationResult {
  double alpha = 0.05;
  std::size_t reps = 0;
  std::size_t trials = 0;
  double critical = 0.0;
  std::size_t rejections = 0;
  double rate = 0.0;
};

// Tabulates the alpha-quantile (T0: exact Student quantile, no simulation),
// then flags `trials` fresh null data sets drawn from derive_seed(seed, 1).
CalibrationResult calibrate(const NullModel& model, double alpha, const TabulationParams& params,
                            std::size_t trials, TableStore* store = nullptr);

}  // namespace zscreen
