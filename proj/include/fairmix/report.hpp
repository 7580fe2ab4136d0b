#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairmix/config.hpp"
#include "fairmix/dataset.hpp"
#include "fairmix/experiment.hpp"

namespace fairmix {

using Json = nlohmann::ordered_json;

// One arm of a comparison: display name plus its report.
using NamedReport = std::pair<std::string, const EvaluationReport*>;

Json report_to_json(const EvaluationReport& report);
Json config_to_json(const PipelineConfig& config);
Json dataset_summary(const Dataset& dataset);

// Full documents written by the `audit` and `compare` commands.
Json audit_document(const PipelineConfig& config, const Dataset& dataset, const EvaluationReport& report);
Json compare_document(const PipelineConfig& config, const Dataset& dataset,
                      const std::vector<NamedReport>& arms);

// Markdown table: rows Overall Acc, Overall F1, Overall UAR, then EA and DI per
// attribute; one value column per arm.
std::string markdown_table(const std::vector<NamedReport>& arms);

// Pooled predictions; with several arms an `arm` column comes first.
std::string predictions_csv(const std::vector<NamedReport>& arms);

std::string format_metric(const MetricValue& v);

}  // namespace fairmix
