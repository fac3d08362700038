#include "zscreen/screening.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "zscreen/error.hpp"

namespace zscreen {

namespace {

Eligibility pass() { return {true, {}}; }
Eligibility fail(std::string reason) { return {false, std::move(reason)}; }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

Eligibility eligible(StatKind kind, const Sequence& seq) {
  const std::size_t n = seq.size();
  switch (kind) {
    case StatKind::T0:
    case StatKind::T1:
    case StatKind::T4A:
      return n >= 3 ? pass() : fail("needs n >= 3");
    case StatKind::T2:
      return n >= 4 ? pass() : fail("needs n >= 4");
    case StatKind::T3:
      return fail("t3 applies to tuples of biomarkers");
    case StatKind::T4B: {
      const auto summer = static_cast<std::size_t>(
          std::count_if(seq.times.begin(), seq.times.end(), [](const TimePoint& t) { return t.season() == Season::summer; }));
      const std::size_t winter = n - summer;
      if (summer < 2 || winter < 2) return fail("needs at least 2 summer and 2 winter observations");
      return pass();
    }
    case StatKind::T4C: {
      if (n < 4) return fail("needs n >= 4");
      if (!seq.all_dated()) return fail("needs calendar dates");
      try {
        NullModel::t4(build_design(Model::C, seq.times)).validate();
      } catch (const IneligibleError&) {
        return fail("date design is rank deficient after deleting one observation");
      }
      return pass();
    }
    case StatKind::T4:
      return fail("custom designs are not screened from cohorts");
  }
  return fail("unknown statistic");
}

Eligibility eligible_multivariate(std::size_t n, std::size_t d) {
  if (d < 2) return fail("needs at least 2 biomarkers");
  return n >= d + 2 ? pass() : fail("needs n >= d + 2");
}

const std::vector<std::vector<std::string>>& preset_tuples() {
  static const std::vector<std::vector<std::string>> tuples{
      {"ferritin", "serum_iron"},
      {"erythrocytes", "hemoglobin", "hematocrit"},
  };
  return tuples;
}

const std::vector<std::pair<std::string, std::string>>& preset_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs{
      {"ferritin", "serum_iron"},
      {"erythrocytes", "hemoglobin"},
      {"erythrocytes", "hematocrit"},
      {"hemoglobin", "hematocrit"},
  };
  return pairs;
}

std::vector<VectorSequence> assemble_tuples(const Cohort& cohort, const std::vector<std::string>& biomarkers) {
  const std::size_t d = biomarkers.size();
  if (d < 2) throw std::invalid_argument("assemble_tuples: needs at least 2 biomarkers; use the univariate path");
  std::map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < d; ++j) column.emplace(biomarkers[j], j);
  if (column.size() != d) throw std::invalid_argument("assemble_tuples: duplicate biomarker");

  struct Slot {
    TimePoint time;
    std::size_t first_index = 0;
    std::vector<std::optional<double>> values;
  };
  using TimeKey = std::pair<bool, long>;
  std::map<std::string, std::map<TimeKey, Slot>> grid;
  for (const auto& obs : cohort.observations()) {
    auto it = column.find(obs.biomarker);
    if (it == column.end()) continue;
    auto& slots = grid[obs.individual_id];
    const TimeKey key{obs.time.has_date(), obs.time.ordering_key()};
    auto [pos, inserted] = slots.try_emplace(key);
    if (inserted) {
      pos->second.time = obs.time;
      pos->second.first_index = obs.collection_index;
      pos->second.values.resize(d);
    }
    auto& cell = pos->second.values[it->second];
    if (!cell) cell = obs.value;
  }

  std::vector<VectorSequence> out;
  for (auto& [id, slots] : grid) {
    std::vector<const Slot*> complete;
    for (const auto& [key, slot] : slots) {
      if (std::all_of(slot.values.begin(), slot.values.end(), [](const auto& v) { return v.has_value(); }))
        complete.push_back(&slot);
    }
    if (complete.empty()) continue;
    std::stable_sort(complete.begin(), complete.end(), [](const Slot* a, const Slot* b) {
      if (a->time.ordering_key() != b->time.ordering_key()) return a->time.ordering_key() < b->time.ordering_key();
      return a->first_index < b->first_index;
    });
    VectorSequence vs{id, biomarkers, Matrix(complete.size(), d), {}};
    for (std::size_t i = 0; i < complete.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) vs.values(i, j) = *complete[i]->values[j];
      vs.times.push_back(complete[i]->time);
    }
    out.push_back(std::move(vs));
  }
  return out;
}

namespace {

class CriticalValues {
 public:
  CriticalValues(const ScreenConfig& config, TableStore* store) : config_(config), store_(store ? store : &local_) {}

  double get(const NullModel& model) {
    if (model.kind == StatKind::T0)
      return student_quantile(1.0 - config_.alpha / 2.0, static_cast<double>(model.n - 2));
    return tabulate(model, config_.alpha, config_.tabulation, store_).quantile;
  }

 private:
  const ScreenConfig& config_;
  TableStore local_;
  TableStore* store_;
};

StatResult compute(StatKind kind, const Sequence& seq) {
  switch (kind) {
    case StatKind::T0: return t0_last(seq.values);
    case StatKind::T1: return t1_max_outlier(seq.values);
    case StatKind::T2: return t2_subsequence(seq.values);
    case StatKind::T4A: return t4_linear_model(seq.values, build_design(Model::A, seq.times));
    case StatKind::T4B: return t4_linear_model(seq.values, build_design(Model::B, seq.times));
    case StatKind::T4C: return t4_linear_model(seq.values, build_design(Model::C, seq.times));
    default: throw std::invalid_argument("compute: unsupported univariate statistic");
  }
}

NullModel null_for(StatKind kind, const Sequence& seq) {
  switch (kind) {
    case StatKind::T0: return NullModel::t0(seq.size());
    case StatKind::T1: return NullModel::t1(seq.size());
    case StatKind::T2: return NullModel::t2(seq.size());
    case StatKind::T4A: return NullModel::t4(build_design(Model::A, seq.times));
    case StatKind::T4B: return NullModel::t4(build_design(Model::B, seq.times));
    case StatKind::T4C: return NullModel::t4(build_design(Model::C, seq.times));
    default: throw std::invalid_argument("null_for: unsupported univariate statistic");
  }
}

void finish(ScreeningResult& r, const StatResult& stat, double critical) {
  r.stat = stat;
  r.critical_value = critical;
  r.flagged = screening_value(stat) > critical;
  if (stat.kind == StatKind::T0) r.p_value = t0_p_value(stat);
}

}  // namespace

ScreenOutcome screen(const Cohort& cohort, const ScreenConfig& config, TableStore* store) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (config.biomarkers.empty()) throw std::invalid_argument("screen: no biomarker given");
  if (config.transformations.size() != config.biomarkers.size())
    throw std::invalid_argument("screen: one transformation per biomarker is required");
  const bool multivariate = config.kind == StatKind::T3;
  if (multivariate && config.biomarkers.size() < 2) throw std::invalid_argument("t3 needs at least 2 biomarkers");
  if (!multivariate && config.biomarkers.size() != 1)
    throw std::invalid_argument(std::string(kind_token(config.kind)) + " screens a single biomarker");

  CriticalValues critical(config, store);
  ScreenOutcome outcome;

  if (multivariate) {
    const std::size_t d = config.biomarkers.size();
    for (const auto& vs : assemble_tuples(cohort, config.biomarkers)) {
      ScreeningResult r;
      r.individual_id = vs.individual_id;
      r.biomarkers = config.biomarkers;
      r.kind = StatKind::T3;
      r.n = vs.size();
      const auto elig = eligible_multivariate(vs.size(), d);
      r.eligible = elig.ok;
      r.eligibility_note = elig.reason;
      if (elig.ok) {
        try {
          Matrix pts = vs.values;
          for (std::size_t i = 0; i < pts.rows(); ++i) {
            for (std::size_t j = 0; j < d; ++j) {
              const auto& t = config.transformations[j];
              if (!t.in_domain(pts(i, j))) throw DomainError(t.name(), pts(i, j), i + 1);
              pts(i, j) = t.apply(pts(i, j));
            }
          }
          const auto stat = t3_multivariate(pts);
          finish(r, stat, critical.get(NullModel::t3(vs.size(), d)));
        } catch (const StatisticalError& e) {
          r.error = e.what();
        }
      }
      outcome.results.push_back(std::move(r));
    }
  } else {
    const auto& biomarker = config.biomarkers.front();
    const auto& t = config.transformations.front();
    const auto sequences = build_sequences(cohort, biomarker);
    if (config.kind == StatKind::T4C && !sequences.empty() &&
        std::none_of(sequences.begin(), sequences.end(), [](const Sequence& s) { return s.all_dated(); }))
      throw IneligibleError("model C needs calendar dates; '" + biomarker + "' is season-coded only");
    for (const auto& seq : sequences) {
      ScreeningResult r;
      r.individual_id = seq.individual_id;
      r.biomarkers = {biomarker};
      r.kind = config.kind;
      r.n = seq.size();
      const auto elig = eligible(config.kind, seq);
      r.eligible = elig.ok;
      r.eligibility_note = elig.reason;
      if (elig.ok) {
        try {
          const auto transformed = apply_sequence(t, seq);
          const auto stat = compute(config.kind, transformed);
          finish(r, stat, critical.get(null_for(config.kind, transformed)));
        } catch (const StatisticalError& e) {
          r.error = e.what();
        }
      }
      outcome.results.push_back(std::move(r));
    }
    outcome.summary.constants.push_back(detect_constant_sequences(sequences, 3));
  }

  auto& s = outcome.summary;
  s.total = outcome.results.size();
  for (const auto& r : outcome.results) {
    if (!r.eligible) continue;
    ++s.eligible;
    if (r.flagged) ++s.flagged;
    if (!r.error.empty()) ++s.errors;
  }
  if (s.eligible > 0) {
    s.proportion = static_cast<double>(s.flagged) / static_cast<double>(s.eligible);
  } else {
    s.note = "no eligible sequences";
  }
  if (multivariate) {
    for (const auto& b : config.biomarkers) s.constants.push_back(detect_constant_sequences(build_sequences(cohort, b), 3));
  }
  return outcome;
}

std::optional<Grouping> parse_grouping(std::string_view token) {
  if (token == "all") return Grouping::all;
  if (token == "status") return Grouping::status;
  if (token == "discipline") return Grouping::discipline;
  return std::nullopt;
}

std::string_view grouping_token(Grouping g) {
  switch (g) {
    case Grouping::all: return "all";
    case Grouping::status: return "status";
    case Grouping::discipline: return "discipline";
  }
  return "all";
}

std::string group_of(const Individual& ind, Grouping g) {
  switch (g) {
    case Grouping::all: return "all";
    case Grouping::status:
      return ind.status == Status::mixed ? "multiple" : std::string(to_string(ind.status));
    case Grouping::discipline:
      if (ind.disciplines.empty()) return "unknown";
      if (ind.disciplines.size() > 1) return "multiple";
      return *ind.disciplines.begin();
  }
  return "all";
}

double GroupCell::percentage() const noexcept {
  return eligible == 0 ? 0.0 : 100.0 * static_cast<double>(flagged) / static_cast<double>(eligible);
}

std::string format_cell(std::size_t flagged, std::size_t eligible) {
  if (eligible == 0) return std::to_string(flagged) + "/0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu/%zu (%.2f)", flagged, eligible,
                100.0 * static_cast<double>(flagged) / static_cast<double>(eligible));
  return buf;
}

std::string GroupCell::cell() const { return format_cell(flagged, eligible); }

std::vector<GroupCell> group_report(const std::vector<ScreeningResult>& results, const Cohort& cohort,
                                    Grouping grouping) {
  using Key = std::tuple<std::string, std::string, StatKind>;
  std::map<Key, GroupCell> cells;
  // Every group present in the cohort gets a row, even without eligible sequences.
  std::vector<std::pair<std::string, StatKind>> series;
  for (const auto& r : results) {
    const std::pair<std::string, StatKind> s{join(r.biomarkers, "&"), r.kind};
    if (std::find(series.begin(), series.end(), s) == series.end()) series.push_back(s);
  }
  for (const auto& [id, ind] : cohort.individuals()) {
    for (const auto& [biomarker, kind] : series) {
      const Key key{group_of(ind, grouping), biomarker, kind};
      cells.try_emplace(key, GroupCell{std::get<0>(key), biomarker, kind, 0, 0});
    }
  }
  for (const auto& r : results) {
    if (!r.eligible) continue;
    const auto biomarker = join(r.biomarkers, "&");
    const Key key{group_of(cohort.individual(r.individual_id), grouping), biomarker, r.kind};
    auto [it, inserted] = cells.try_emplace(key, GroupCell{std::get<0>(key), biomarker, r.kind, 0, 0});
    ++it->second.eligible;
    if (r.flagged) ++it->second.flagged;
  }
  std::vector<GroupCell> out;
  out.reserve(cells.size());
  for (auto& [key, cell] : cells) out.push_back(std::move(cell));
  return out;
}

double CorrelationHistogram::bin_lower(std::size_t bin) const {
  return -1.0 + 2.0 * static_cast<double>(bin) / static_cast<double>(counts.size());
}

double CorrelationHistogram::bin_upper(std::size_t bin) const {
  return -1.0 + 2.0 * static_cast<double>(bin + 1) / static_cast<double>(counts.size());
}

std::vector<CorrelationHistogram> correlation_report(const Cohort& cohort,
                                                     const std::vector<std::pair<std::string, std::string>>& pairs,
                                                     std::size_t min_n, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("correlation_report: bins must be positive");
  if (min_n < 2) throw std::invalid_argument("correlation_report: min_n must be at least 2");
  std::vector<CorrelationHistogram> out;
  for (const auto& [a, b] : pairs) {
    CorrelationHistogram h;
    h.first = a;
    h.second = b;
    h.min_n = min_n;
    h.counts.assign(bins, 0);
    for (const auto& vs : assemble_tuples(cohort, {a, b})) {
      if (vs.size() < min_n) continue;
      std::vector<double> x(vs.size()), y(vs.size());
      for (std::size_t i = 0; i < vs.size(); ++i) {
        x[i] = vs.values(i, 0);
        y[i] = vs.values(i, 1);
      }
      double r;
      try {
        r = pearson_r(x, y);
      } catch (const DegenerateError&) {
        ++h.skipped_degenerate;
        continue;
      }
      h.r_values.emplace_back(vs.individual_id, r);
      auto bin = static_cast<std::size_t>(std::floor((r + 1.0) / 2.0 * static_cast<double>(bins)));
      h.counts[std::min(bin, bins - 1)] += 1;
    }
    if (h.r_values.empty()) h.note = "no individual with at least " + std::to_string(min_n) + " paired observations";
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace zscreen
