#pragma once

#include <string>

#include <json.hpp>

#include "blockdp/experiment.hpp"

namespace blockdp {

// JSON config schema, shared by the CLI and tests. Throws ConfigError on
// unknown tags or out-of-domain values; structural JSON errors surface as
// nlohmann exceptions and are mapped to exit code 2 by the CLI.
PopulationSpec parse_population_spec(const nlohmann::json& j);
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

// Config echo: parse(echo(config)) reproduces the config.
nlohmann::ordered_json population_spec_json(const PopulationSpec& spec);
nlohmann::ordered_json experiment_config_json(const ExperimentConfig& config);

nlohmann::ordered_json bound_report_json(const BoundReport& report);
nlohmann::ordered_json experiment_summary_json(const ExperimentConfig& config,
                                               const ExperimentOutput& output);

// CSV emitters. Doubles are rendered with %.17g so rewrites are
// byte-identical and round-trip exactly.
std::string results_csv(const std::vector<TrialResult>& results);
std::string transcript_csv(int trial_id, const TrialRecord& record);
std::string rejections_csv(int trial_id, const std::vector<RejectionRecord>& rejections);
std::string dataset_csv(const Dataset& dataset);

}  // namespace blockdp
