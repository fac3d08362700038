#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "zscreen/normality.hpp"
#include "zscreen/screening.hpp"
#include "zscreen/stats.hpp"

namespace zscreen {

inline constexpr const char* kToolName = "zscreen";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Values that may be infinite serialize as the string "inf".
nlohmann::json number_or_inf(double v);

nlohmann::json to_json(const StatResult& r);
nlohmann::json to_json(const ScreeningResult& r);
nlohmann::json to_json(const ScreenSummary& s);

// Provenance block embedded in every output: tool, version, config, seed.
nlohmann::json provenance(const nlohmann::json& config);
// Same block as '# ' comment lines for delimited outputs.
std::string provenance_comment(const nlohmann::json& config);

// Table with one row per scored transformation:
// transformation,num_sequences_tested,num_skipped_degenerate,KS_D,global_p,selected
std::string format_normality_table(const NormalityReport& report);

// Reads back the selected transformation of a normality table.
Transformation read_selected_transformation(const std::string& table_text);

// group,biomarker,kind,flagged,eligible,percentage,cell
std::string format_group_table(const std::vector<GroupCell>& cells);

// pair,bin,lower,upper,count
std::string format_histograms(const std::vector<CorrelationHistogram>& histograms);

std::string format_real(double v);

}  // namespace zscreen
