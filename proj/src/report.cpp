#include "zscreen/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "zscreen/error.hpp"

namespace zscreen {

using nlohmann::json;

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

json to_json(const StatResult& r) {
  json j{{"kind", kind_token(r.kind)}, {"value", number_or_inf(r.value)}};
  if (r.kind == StatKind::T2) {
    j["location"] = {r.first, r.last};
  } else {
    j["location"] = r.first;
  }
  if (r.kind == StatKind::T0) j["df"] = r.df;
  j["dims"] = {r.rows, r.cols};
  if (!r.note.empty()) j["notes"] = r.note;
  return j;
}

json to_json(const ScreeningResult& r) {
  json j{{"individual_id", r.individual_id},
         {"biomarkers", r.biomarkers},
         {"kind", kind_token(r.kind)},
         {"n", r.n},
         {"eligible", r.eligible},
         {"flagged", r.flagged}};
  if (!r.eligibility_note.empty()) j["eligibility_note"] = r.eligibility_note;
  if (r.stat) j["statistic"] = to_json(*r.stat);
  if (r.critical_value) j["critical_value"] = number_or_inf(*r.critical_value);
  if (r.p_value) j["p_value"] = *r.p_value;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json to_json(const ScreenSummary& s) {
  json constants = json::array();
  for (const auto& c : s.constants) {
    constants.push_back({{"eligible", c.eligible}, {"flagged", c.flagged_ids.size()},
                         {"proportion", c.proportion}, {"individual_ids", c.flagged_ids}});
  }
  json j{{"total_sequences", s.total}, {"eligible", s.eligible}, {"flagged", s.flagged},
         {"errors", s.errors},         {"proportion", s.proportion},
         {"cell", format_cell(s.flagged, s.eligible)}, {"constant_sequences", constants}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

json provenance(const json& config) {
  json j{{"tool", kToolName}, {"version", kToolVersion}, {"config", config}};
  if (config.contains("seed")) j["seed"] = config["seed"];
  return j;
}

std::string provenance_comment(const json& config) {
  std::string out = std::string("# ") + kToolName + " " + kToolVersion + "\n";
  out += "# config: " + config.dump() + "\n";
  if (config.contains("seed")) out += "# seed: " + config["seed"].dump() + "\n";
  return out;
}

std::string format_normality_table(const NormalityReport& report) {
  std::string out = "transformation,num_sequences_tested,num_skipped_degenerate,KS_D,global_p,selected\n";
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    const auto& s = report.scores[i];
    out += s.transformation.name() + "," + std::to_string(s.tested) + "," + std::to_string(s.skipped_degenerate) +
           "," + format_real(s.ks_d) + "," + format_real(s.global_p) + "," + (i == report.selected ? "1" : "0") +
           "\n";
  }
  return out;
}

Transformation read_selected_transformation(const std::string& table_text) {
  std::istringstream in(table_text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("#") || line.starts_with("transformation,")) continue;
    // The name may contain no commas, so the selected flag is the last field.
    if (line.ends_with(",1")) return Transformation::parse(line.substr(0, line.find(',')));
  }
  throw InputError("selection table has no selected transformation");
}

std::string format_group_table(const std::vector<GroupCell>& cells) {
  std::string out = "group,biomarker,kind,flagged,eligible,percentage,cell\n";
  for (const auto& c : cells) {
    char pct[32] = "";
    if (c.eligible > 0) std::snprintf(pct, sizeof pct, "%.2f", c.percentage());
    out += c.group + "," + c.biomarker + "," + std::string(kind_token(c.kind)) + "," + std::to_string(c.flagged) +
           "," + std::to_string(c.eligible) + "," + pct + "," + c.cell() + "\n";
  }
  return out;
}

std::string format_histograms(const std::vector<CorrelationHistogram>& histograms) {
  std::string out;
  for (const auto& h : histograms) {
    if (!h.note.empty()) out += "# " + h.first + "&" + h.second + ": " + h.note + "\n";
  }
  out += "pair,bin,lower,upper,count\n";
  for (const auto& h : histograms) {
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out += h.first + "&" + h.second + "," + std::to_string(b) + "," + format_real(h.bin_lower(b)) + "," +
             format_real(h.bin_upper(b)) + "," + std::to_string(h.counts[b]) + "\n";
    }
  }
  return out;
}

}  // namespace zscreen
