#pragma once

#include <string>
#include <vector>

#include "agrl/trainer.hpp"

namespace agrl {

// One JSON object per record, deterministic fields only (steps-per-second is
// wall-clock and goes to the timing sidecar instead, keeping metrics files
// byte-identical across same-seed runs).
void write_metrics_jsonl(const std::string& path, const std::vector<MetricsRecord>& records);

// step,sps rows.
void write_timing_csv(const std::string& path, const std::vector<MetricsRecord>& records);

// Final per-goal success table plus the mean, for spreadsheets.
void write_summary_csv(const std::string& path, const GoalSet& goals,
                       const rollout::EvalReport& final_eval);

}  // namespace agrl
