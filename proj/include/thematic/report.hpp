#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "thematic/orchestrator.hpp"

namespace thematic {

enum class ReportFormat { json, markdown, csv_matrices };
ReportFormat report_format_from_string(std::string_view name);

enum class MatrixKind { kappa, cosine };

/// json: canonical serialization with sorted keys. markdown: metrics header
/// followed by each consensus theme with its consistency and quotes.
/// csv_matrices: the cosine grid, a blank line, then the kappa grid.
std::string generate_report(const AnalysisReport& report, ReportFormat format);

// One (n+1) x (n+1) grid with seed headers; diagonal is 1.000.
std::string matrix_csv(const AnalysisReport& report, MatrixKind kind);

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& doc);
AnalysisReport parse_report(std::string_view text);

nlohmann::json consensus_to_json(const std::vector<ConsensusTheme>& consensus);
std::vector<ConsensusTheme> consensus_from_json(const nlohmann::json& doc);

}  // namespace thematic
