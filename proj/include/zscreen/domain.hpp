#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace zscreen {

enum class Status { amateur, professional, mixed, unknown };

enum class Season { winter, summer };

std::string_view to_string(Status s);
std::string_view to_string(Season s);

struct Individual {
  std::string id;
  Status status = Status::unknown;
  std::set<std::string> disciplines;
};

// Soccer-style collection label: no exact date, only the campaign.
struct SeasonCode {
  int year = 0;
  Season season = Season::winter;

  friend bool operator==(const SeasonCode&, const SeasonCode&) = default;
};

using Date = std::chrono::year_month_day;

// A sampling time: either an exact calendar date or a (year, season) pair.
class TimePoint {
 public:
  TimePoint() = default;
  TimePoint(Date d) : value_(d) {}
  TimePoint(SeasonCode c) : value_(c) {}

  bool has_date() const noexcept { return std::holds_alternative<Date>(value_); }
  const Date& date() const { return std::get<Date>(value_); }
  const SeasonCode& season_code() const { return std::get<SeasonCode>(value_); }

  Season season() const;
  // Days since 1970-01-01; season codes map to Feb 1 (winter) / Aug 1 (summer).
  long ordering_key() const;
  std::string to_string() const;

  friend bool operator==(const TimePoint&, const TimePoint&) = default;

 private:
  std::variant<Date, SeasonCode> value_{Date{}};
};

struct Observation {
  std::string individual_id;
  std::string biomarker;
  double value = 0.0;
  TimePoint time;
  // Position in the input file (0-based row among accepted rows).
  std::size_t collection_index = 0;
};

struct Sequence {
  std::string individual_id;
  std::string biomarker;
  std::vector<double> values;
  std::vector<TimePoint> times;

  std::size_t size() const noexcept { return values.size(); }
  bool all_dated() const;
};

struct RejectedRow {
  std::size_t line_number = 0;
  std::string reason;
};

class Cohort {
 public:
  Cohort() = default;
  // Throws InputError when an observation refers to an unknown individual.
  Cohort(std::map<std::string, Individual> individuals, std::vector<Observation> observations);

  const std::map<std::string, Individual>& individuals() const noexcept { return individuals_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  const Individual& individual(const std::string& id) const;
  std::set<std::string> biomarkers() const;

 private:
  std::map<std::string, Individual> individuals_;
  std::vector<Observation> observations_;
};

struct ParsedCohort {
  Cohort cohort;
  std::vector<RejectedRow> rejects;
};

// Parses comma-separated text with a header row. Throws InputError when a
// mandatory column is missing; malformed rows land in `rejects`.
ParsedCohort parse_cohort(std::string_view text);
ParsedCohort read_cohort_file(const std::string& path);

std::string format_rejects(const std::vector<RejectedRow>& rejects);

std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

// One sequence per individual having the biomarker, ordered by time with
// input order breaking ties.
std::vector<Sequence> build_sequences(const Cohort& cohort, const std::string& biomarker);

// Summer is the closed month-day interval [03-20, 09-22].
Season classify_season(const Date& d);

struct ConstantSequenceReport {
  std::vector<std::string> flagged_ids;
  std::size_t eligible = 0;
  double proportion = 0.0;  // 0 when nothing is eligible
};

ConstantSequenceReport detect_constant_sequences(const std::vector<Sequence>& sequences,
                                                 std::size_t min_n = 3);

}  // namespace zscreen
