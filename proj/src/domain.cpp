#include "zscreen/domain.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "zscreen/error.hpp"

namespace zscreen {

using namespace std::chrono;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::amateur: return "amateur";
    case Status::professional: return "professional";
    case Status::mixed: return "mixed";
    case Status::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(Season s) { return s == Season::summer ? "summer" : "winter"; }

Season TimePoint::season() const {
  if (has_date()) return classify_season(date());
  return season_code().season;
}

long TimePoint::ordering_key() const {
  if (has_date()) return sys_days{date()}.time_since_epoch().count();
  const auto& c = season_code();
  const Date anchor{year{c.year}, month{c.season == Season::summer ? 8u : 2u}, day{1}};
  return sys_days{anchor}.time_since_epoch().count();
}

std::string TimePoint::to_string() const {
  if (has_date()) return format_date(date());
  const auto& c = season_code();
  return std::to_string(c.year) + "-" + std::string(zscreen::to_string(c.season));
}

bool Sequence::all_dated() const {
  return std::all_of(times.begin(), times.end(), [](const TimePoint& t) { return t.has_date(); });
}

Cohort::Cohort(std::map<std::string, Individual> individuals, std::vector<Observation> observations)
    : individuals_(std::move(individuals)), observations_(std::move(observations)) {
  for (const auto& obs : observations_) {
    if (!individuals_.contains(obs.individual_id))
      throw InputError("observation refers to unknown individual '" + obs.individual_id + "'");
  }
}

const Individual& Cohort::individual(const std::string& id) const {
  auto it = individuals_.find(id);
  if (it == individuals_.end()) throw InputError("unknown individual '" + id + "'");
  return it->second;
}

std::set<std::string> Cohort::biomarkers() const {
  std::set<std::string> out;
  for (const auto& obs : observations_) out.insert(obs.biomarker);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::string(trim(field)));
  return fields;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<Status> parse_status(std::string_view s) {
  const auto l = lower(s);
  if (l.empty() || l == "unknown") return Status::unknown;
  if (l == "amateur") return Status::amateur;
  if (l == "professional") return Status::professional;
  if (l == "mixed" || l == "multiple") return Status::mixed;
  return std::nullopt;
}

Status merge_status(Status a, Status b) {
  if (a == Status::unknown) return b;
  if (b == Status::unknown || a == b) return a;
  return Status::mixed;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_int(text.substr(0, 4));
  const auto m = parse_int(text.substr(5, 2));
  const auto d = parse_int(text.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  const Date date{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

ParsedCohort parse_cohort(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = end + 1;
    }
  }
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw InputError("missing header row");

  std::unordered_map<std::string, std::size_t> column;
  const auto header = split_record(lines[header_line]);
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(lower(header[i]), i);

  for (const char* name : {"individual_id", "biomarker", "value"}) {
    if (!column.contains(name)) throw InputError(std::string("missing mandatory column '") + name + "'");
  }
  const bool has_date_col = column.contains("date");
  const bool has_season_cols = column.contains("season") && column.contains("year");
  if (!has_date_col && !has_season_cols)
    throw InputError("missing time columns: need 'date' or both 'season' and 'year'");

  auto col = [&](const std::vector<std::string>& f, const char* name) -> std::string_view {
    auto it = column.find(name);
    if (it == column.end() || it->second >= f.size()) return {};
    return f[it->second];
  };

  ParsedCohort out;
  std::map<std::string, Individual> individuals;
  std::vector<Observation> observations;

  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    const std::size_t line_number = li + 1;
    if (trim(lines[li]).empty()) continue;
    const auto f = split_record(lines[li]);
    auto reject = [&](std::string reason) { out.rejects.push_back({line_number, std::move(reason)}); };

    if (f.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
      continue;
    }
    const std::string id(col(f, "individual_id"));
    const std::string biomarker(col(f, "biomarker"));
    if (id.empty()) { reject("empty individual_id"); continue; }
    if (biomarker.empty()) { reject("empty biomarker"); continue; }
    const auto value = parse_real(col(f, "value"));
    if (!value) { reject("unparseable value '" + std::string(col(f, "value")) + "'"); continue; }

    const auto date_text = col(f, "date");
    const auto season_text = col(f, "season");
    const auto year_text = col(f, "year");
    TimePoint time;
    if (!date_text.empty() && (!season_text.empty() || !year_text.empty())) {
      reject("ambiguous time: both date and season/year populated");
      continue;
    }
    if (!date_text.empty()) {
      const auto d = parse_date(date_text);
      if (!d) { reject("unparseable date '" + std::string(date_text) + "'"); continue; }
      time = TimePoint(*d);
    } else if (!season_text.empty() && !year_text.empty()) {
      const auto s = lower(season_text);
      const auto y = parse_int(year_text);
      if (s != "summer" && s != "winter") { reject("unknown season '" + std::string(season_text) + "'"); continue; }
      if (!y) { reject("unparseable year '" + std::string(year_text) + "'"); continue; }
      time = TimePoint(SeasonCode{*y, s == "summer" ? Season::summer : Season::winter});
    } else {
      reject("missing time: neither date nor season/year populated");
      continue;
    }

    const auto status = parse_status(col(f, "status"));
    if (!status) { reject("unknown status '" + std::string(col(f, "status")) + "'"); continue; }

    auto& ind = individuals[id];
    ind.id = id;
    ind.status = merge_status(ind.status, *status);
    std::string_view disciplines = col(f, "discipline");
    while (!disciplines.empty()) {
      const auto sep = disciplines.find(';');
      const auto part = trim(disciplines.substr(0, sep));
      if (!part.empty()) ind.disciplines.emplace(part);
      if (sep == std::string_view::npos) break;
      disciplines.remove_prefix(sep + 1);
    }

    observations.push_back(Observation{id, biomarker, *value, time, observations.size()});
  }
  out.cohort = Cohort(std::move(individuals), std::move(observations));
  return out;
}

ParsedCohort read_cohort_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cohort(ss.str());
}

std::string format_rejects(const std::vector<RejectedRow>& rejects) {
  std::string out = "line_number,reason\n";
  for (const auto& r : rejects) {
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out += std::to_string(r.line_number) + "," + reason + "\n";
  }
  return out;
}

std::vector<Sequence> build_sequences(const Cohort& cohort, const std::string& biomarker) {
  std::map<std::string, std::vector<const Observation*>> by_individual;
  for (const auto& obs : cohort.observations()) {
    if (obs.biomarker == biomarker) by_individual[obs.individual_id].push_back(&obs);
  }
  std::vector<Sequence> out;
  out.reserve(by_individual.size());
  for (auto& [id, obs] : by_individual) {
    std::stable_sort(obs.begin(), obs.end(), [](const Observation* a, const Observation* b) {
      return a->time.ordering_key() < b->time.ordering_key();
    });
    Sequence seq{id, biomarker, {}, {}};
    for (const auto* o : obs) {
      seq.values.push_back(o->value);
      seq.times.push_back(o->time);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

Season classify_season(const Date& d) {
  const auto md = static_cast<unsigned>(d.month()) * 100 + static_cast<unsigned>(d.day());
  return (md >= 320 && md <= 922) ? Season::summer : Season::winter;
}

ConstantSequenceReport detect_constant_sequences(const std::vector<Sequence>& sequences,
                                                 std::size_t min_n) {
  if (min_n < 2) throw std::invalid_argument("detect_constant_sequences: min_n must be at least 2");
  ConstantSequenceReport report;
  for (const auto& seq : sequences) {
    if (seq.size() < min_n) continue;
    ++report.eligible;
    const bool constant = std::all_of(seq.values.begin(), seq.values.end(),
                                      [&](double v) { return v == seq.values.front(); });
    if (constant) report.flagged_ids.push_back(seq.individual_id);
  }
  std::sort(report.flagged_ids.begin(), report.flagged_ids.end());
  if (report.eligible > 0)
    report.proportion = static_cast<double>(report.flagged_ids.size()) / static_cast<double>(report.eligible);
  return report;
}

}  // namespace zscreen
