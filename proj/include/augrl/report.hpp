#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "augrl/trainer.hpp"

namespace augrl {

// Malformed lines are reported as "<path>:<line>: <what>".
std::vector<EpochRecord> read_metrics_file(const std::filesystem::path& path);

struct RunSummary {
  std::string path;
  std::string mode = "unknown";  // from the sibling manifest when present
  int m = 0;
  int epochs = 0;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;
  double mean_entropy = 0.0;
};

// Reads the metrics file and, when a manifest.json sits next to it, the run's
// mode and M; otherwise M falls back to the per-epoch policy count.
RunSummary summarize_run(const std::filesystem::path& metrics_path);

struct GroupRow {
  std::string mode;
  int m = 0;
  int n_runs = 0;
  double mean_final = 0.0;
  double std_final = 0.0;  // sample std; meaningless (0) when n_runs = 1
};

// One row per (mode, M), ordered by first appearance.
std::vector<GroupRow> group_runs(const std::vector<RunSummary>& runs);

std::string report_text(const std::vector<RunSummary>& runs,
                        const std::vector<GroupRow>& groups);
std::string runs_csv(const std::vector<RunSummary>& runs);
std::string groups_csv(const std::vector<GroupRow>& groups);

std::string grid_csv(const GridSearchResult& res);
std::string grid_text(const GridSearchResult& res);
std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_text(const std::vector<AblationRow>& rows);

}  // namespace augrl
