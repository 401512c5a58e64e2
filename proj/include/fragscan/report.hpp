#pragma once

#include <json.hpp>

#include <string>

#include "fragscan/graindist.hpp"
#include "fragscan/pipeline.hpp"
#include "fragscan/segeval.hpp"

namespace fragscan {

/// JSON views of the report types; floating-point values are rounded to
/// 6 significant digits so serialized output is reproducible.
nlohmann::json to_json(const SizeDistribution& dist);
nlohmann::json to_json(const CharacteristicDiameters& cd);
nlohmann::json to_json(const CountSummary& cs);
nlohmann::json to_json(const SectionReport& report);
nlohmann::json to_json(const SegregationReport& report);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const SectionsResult& result);

void write_json(const std::string& path, const nlohmann::json& j);

/// Per-class metric table in the ablation-style column order:
/// mIoU mPA | Body IoU P R F1 | Boundary IoU P R F1.
std::string metrics_table(const MetricsReport& report);

/// Histogram + cumulative passing curve on a log-x axis; volume-mode charts
/// get d10/d50/d90 markers.
void write_psd_chart(const std::string& path, const SizeDistribution& dist,
                     const std::string& title);

/// Mean characteristic diameters per section with 95% CI whiskers.
void write_section_ci_chart(const std::string& path, const std::vector<SectionReport>& sections);

/// Relative characteristic diameters against section index with OLS lines.
void write_ratio_fit_chart(const std::string& path, const SegregationReport& seg);

}  // namespace fragscan
