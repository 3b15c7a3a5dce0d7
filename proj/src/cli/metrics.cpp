#include "agrl/metrics.hpp"

#include <fstream>

#include <json.hpp>

#include "agrl/errors.hpp"

namespace agrl {

using nlohmann::json;

void write_metrics_jsonl(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write metrics " + path);
  for (const MetricsRecord& r : records) {
    json j{{"step", r.step},
           {"mean_success", r.mean_success},
           {"per_goal_success", r.per_goal_success},
           {"losses", r.losses}};
    f << j.dump() << "\n";
  }
  if (!f) throw IoError("failed writing metrics " + path);
}

void write_timing_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write timing " + path);
  f << "step,sps\n";
  for (const MetricsRecord& r : records) {
    f << r.step << "," << static_cast<int64_t>(r.sps) << "\n";
  }
}

void write_summary_csv(const std::string& path, const GoalSet& goals,
                       const rollout::EvalReport& final_eval) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write summary " + path);
  f << "goal,category,success\n";
  for (int g = 0; g < goals.size(); ++g) {
    f << goals.spec(g).name << "," << goals.spec(g).category << ","
      << final_eval.per_goal_success[static_cast<size_t>(g)] << "\n";
  }
  f << "MEAN,," << final_eval.mean_success << "\n";
}

}  // namespace agrl
