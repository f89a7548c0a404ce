#include "augrl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "augrl/config.hpp"

namespace augrl {

std::vector<EpochRecord> read_metrics_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::vector<EpochRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(parse_metrics_line(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path.string() + ":" +
                                  std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

RunSummary summarize_run(const std::filesystem::path& metrics_path) {
  const auto records = read_metrics_file(metrics_path);
  if (records.empty())
    throw std::invalid_argument(metrics_path.string() + ": no epoch records");

  RunSummary s;
  s.path = metrics_path.string();
  s.epochs = static_cast<int>(records.size());
  s.final_accuracy = records.back().test_accuracy;
  for (const auto& r : records) {
    s.best_accuracy = std::max(s.best_accuracy, r.test_accuracy);
    s.mean_entropy += r.controller_entropy;
  }
  s.mean_entropy /= static_cast<double>(records.size());
  s.m = static_cast<int>(records.front().policies.size());

  const auto manifest_path = metrics_path.parent_path() / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    const RunManifest man = read_manifest(manifest_path);
    if (man.config.has("mode")) s.mode = man.config.get("mode");
    if (man.config.has("m")) s.m = man.config.get_int("m");
  }
  return s;
}

std::vector<GroupRow> group_runs(const std::vector<RunSummary>& runs) {
  std::vector<GroupRow> groups;
  std::vector<std::vector<double>> accs;
  for (const auto& r : runs) {
    std::size_t gi = 0;
    for (; gi < groups.size(); ++gi)
      if (groups[gi].mode == r.mode && groups[gi].m == r.m) break;
    if (gi == groups.size()) {
      groups.push_back({r.mode, r.m, 0, 0.0, 0.0});
      accs.emplace_back();
    }
    accs[gi].push_back(r.final_accuracy);
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& a = accs[gi];
    groups[gi].n_runs = static_cast<int>(a.size());
    groups[gi].mean_final =
        std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    if (a.size() > 1) {
      double ss = 0.0;
      for (double v : a) ss += (v - groups[gi].mean_final) *
                               (v - groups[gi].mean_final);
      groups[gi].std_final =
          std::sqrt(ss / (static_cast<double>(a.size()) - 1.0));
    }
  }
  return groups;
}

namespace {

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

std::string report_text(const std::vector<RunSummary>& runs,
                        const std::vector<GroupRow>& groups) {
  std::ostringstream out;
  out << "per-run summary\n";
  out << "  mode     M  epochs  final_acc  best_acc  mean_entropy  file\n";
  for (const auto& r : runs) {
    char line[256];
    std::snprintf(line, sizeof(line), "  %-7s %2d  %6d  %9.4f  %8.4f  %12.4f  ",
                  r.mode.c_str(), r.m, r.epochs, r.final_accuracy,
                  r.best_accuracy, r.mean_entropy);
    out << line << r.path << "\n";
  }
  out << "\ngrouped by (mode, M), final test accuracy\n";
  out << "  mode     M  runs  mean";
  out << "      std\n";
  for (const auto& g : groups) {
    char line[128];
    std::snprintf(line, sizeof(line), "  %-7s %2d  %4d  %.4f", g.mode.c_str(),
                  g.m, g.n_runs, g.mean_final);
    out << line;
    if (g.n_runs > 1)
      out << "  " << fmt(g.std_final);
    out << "\n";
  }
  return out.str();
}

std::string runs_csv(const std::vector<RunSummary>& runs) {
  std::string out = "file,mode,m,epochs,final_accuracy,best_accuracy,"
                    "mean_entropy\n";
  for (const auto& r : runs)
    out += r.path + "," + r.mode + "," + std::to_string(r.m) + "," +
           std::to_string(r.epochs) + "," + fmt(r.final_accuracy, 6) + "," +
           fmt(r.best_accuracy, 6) + "," + fmt(r.mean_entropy, 6) + "\n";
  return out;
}

std::string groups_csv(const std::vector<GroupRow>& groups) {
  std::string out = "mode,m,n_runs,mean_final_accuracy,std_final_accuracy\n";
  for (const auto& g : groups) {
    out += g.mode + "," + std::to_string(g.m) + "," +
           std::to_string(g.n_runs) + "," + fmt(g.mean_final, 6) + ",";
    if (g.n_runs > 1) out += fmt(g.std_final, 6);
    out += "\n";
  }
  return out;
}

std::string grid_csv(const GridSearchResult& res) {
  std::string out = "stage,mask_count,mask_size,warp,test_accuracy,winner\n";
  for (const auto& c : res.cells)
    out += std::to_string(c.stage) + "," + std::to_string(c.mask_count) +
           "," + std::to_string(c.mask_size) + "," + std::to_string(c.warp) +
           "," + fmt(c.test_accuracy, 6) + "," + (c.winner ? "1" : "0") +
           "\n";
  return out;
}

std::string grid_text(const GridSearchResult& res) {
  // Rank within each stage, best first; ties keep sweep order.
  auto ranked = [&](int stage) {
    std::vector<const GridCell*> v;
    for (const auto& c : res.cells)
      if (c.stage == stage) v.push_back(&c);
    std::stable_sort(v.begin(), v.end(),
                     [](const GridCell* a, const GridCell* b) {
                       return a->test_accuracy > b->test_accuracy;
                     });
    return v;
  };
  std::ostringstream out;
  for (int stage : {1, 2}) {
    const auto v = ranked(stage);
    if (v.empty()) continue;
    out << "stage " << stage
        << (stage == 1 ? "  (m_T=m_F=m, T=F=s, warp off)" : "  (warp sweep)")
        << "\n";
    for (const auto* c : v) {
      char line[128];
      if (stage == 1)
        std::snprintf(line, sizeof(line), "  m=%d s=%-2d  acc=%.4f%s",
                      c->mask_count, c->mask_size, c->test_accuracy,
                      c->winner ? "  <- winner" : "");
      else
        std::snprintf(line, sizeof(line), "  W=%-2d      acc=%.4f%s", c->warp,
                      c->test_accuracy, c->winner ? "  <- winner" : "");
      out << line << "\n";
    }
  }
  return out.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "m,mode,n_reps,mean_final_accuracy,std_final_accuracy\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + "," + mode_name(r.mode) + "," +
           std::to_string(r.final_accs.size()) + "," + fmt(r.mean, 6) + ",";
    if (r.final_accs.size() > 1) out += fmt(r.stddev, 6);
    out += "\n";
  }
  return out;
}

std::string ablation_text(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "  M  policy  final test accuracy (mean +- std over reps)\n";
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "  %d  %-6s  %.4f", r.m,
                  r.mode == TrainMode::Random ? "Rd." : "RL",
                  r.mean);
    out << line;
    if (r.final_accs.size() > 1) out << " +- " << fmt(r.stddev);
    out << "\n";
  }
  return out.str();
}

}  // namespace augrl
