#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zscreen/domain.hpp"
#include "zscreen/linalg.hpp"
#include "zscreen/stats.hpp"
#include "zscreen/tabulation.hpp"
#include "zscreen/transforms.hpp"

namespace zscreen {

struct Eligibility {
  bool ok = false;
  std::string reason;  // empty when ok

  explicit operator bool() const noexcept { return ok; }
};

// Sample-size and design rules per statistic: T0/T1/T4A n >= 3, T2 n >= 4,
// T3 n >= d + 2, T4B at least two observations per season, T4C n >= 4 with
// calendar dates and a full-rank design after deleting any one observation.
Eligibility eligible(StatKind kind, const Sequence& seq);
Eligibility eligible_multivariate(std::size_t n, std::size_t d);

// Time-aligned observations of several biomarkers for one individual.
struct VectorSequence {
  std::string individual_id;
  std::vector<std::string> biomarkers;
  Matrix values;  // n x d
  std::vector<TimePoint> times;

  std::size_t size() const noexcept { return values.rows(); }
};

// Keeps only time points (identical date, or identical year + season) where
// every biomarker was measured; the first measurement wins on duplicates.
std::vector<VectorSequence> assemble_tuples(const Cohort& cohort, const std::vector<std::string>& biomarkers);

const std::vector<std::vector<std::string>>& preset_tuples();
const std::vector<std::pair<std::string, std::string>>& preset_pairs();

struct ScreenConfig {
  StatKind kind = StatKind::T2;
  std::vector<std::string> biomarkers;               // one, or d >= 2 for T3
  std::vector<Transformation> transformations;       // parallel to biomarkers
  double alpha = 0.05;
  TabulationParams tabulation;
};

struct ScreeningResult {
  std::string individual_id;
  std::vector<std::string> biomarkers;
  StatKind kind = StatKind::T2;
  std::size_t n = 0;
  bool eligible = false;
  std::string eligibility_note;
  std::optional<StatResult> stat;
  std::optional<double> critical_value;
  std::optional<double> p_value;  // exact, T0 only
  bool flagged = false;
  std::string error;  // domain/degeneracy failure for this sequence
};

struct ScreenSummary {
  std::size_t total = 0;
  std::size_t eligible = 0;
  std::size_t flagged = 0;
  std::size_t errors = 0;
  double proportion = 0.0;  // flagged / eligible, 0 when nothing is eligible
  std::string note;
  std::vector<ConstantSequenceReport> constants;  // one per biomarker
};

struct ScreenOutcome {
  std::vector<ScreeningResult> results;
  ScreenSummary summary;
};

// Per-sequence failures become notes on the result; the run never aborts
// because of one sequence.
ScreenOutcome screen(const Cohort& cohort, const ScreenConfig& config, TableStore* store = nullptr);

enum class Grouping { all, status, discipline };

std::optional<Grouping> parse_grouping(std::string_view token);
std::string_view grouping_token(Grouping g);
std::string group_of(const Individual& ind, Grouping g);

struct GroupCell {
  std::string group;
  std::string biomarker;  // '&'-joined for tuples
  StatKind kind = StatKind::T2;
  std::size_t flagged = 0;
  std::size_t eligible = 0;

  double percentage() const noexcept;
  std::string cell() const;
};

// "<flagged>/<eligible> (<percent with 2 decimals>)"; "0/0" for empty groups.
std::string format_cell(std::size_t flagged, std::size_t eligible);

std::vector<GroupCell> group_report(const std::vector<ScreeningResult>& results, const Cohort& cohort,
                                    Grouping grouping);

struct CorrelationHistogram {
  std::string first;
  std::string second;
  std::size_t min_n = 10;
  std::vector<std::size_t> counts;  // bins over [-1, 1], last bin closed
  std::vector<std::pair<std::string, double>> r_values;
  std::size_t skipped_degenerate = 0;
  std::string note;

  double bin_lower(std::size_t bin) const;
  double bin_upper(std::size_t bin) const;
};

std::vector<CorrelationHistogram> correlation_report(const Cohort& cohort,
                                                     const std::vector<std::pair<std::string, std::string>>& pairs,
                                                     std::size_t min_n = 10, std::size_t bins = 20);

}  // namespace zscreen
