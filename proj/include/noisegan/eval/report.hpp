#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisegan/core/error.hpp"

namespace noisegan::eval {

enum class Protocol { best_checkpoint, checkpoint_average };

inline std::string to_string(Protocol p) { return p == Protocol::best_checkpoint ? "best_checkpoint" : "checkpoint_average"; }

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "best" || s == "best_checkpoint") return Protocol::best_checkpoint;
  if (s == "average" || s == "checkpoint_average") return Protocol::checkpoint_average;
  throw ConfigError("unknown protocol '" + s + "' (best, average)");
}

struct ReportRow {
  std::string dataset;
  std::string model;
  double mean_lsd = 0.0;
  double mean_mssl = 0.0;
  std::string mode;  // parallel, non_parallel or baseline
  std::optional<int> epoch;
  bool min_lsd = false;
  bool min_mssl = false;
};

struct EvalReport {
  Protocol protocol = Protocol::best_checkpoint;
  std::vector<ReportRow> rows;
};

// Relative reduction against the baseline, in percent.
inline double improvement_percent(double baseline, double model) {
  if (baseline == 0.0) throw DataError("baseline metric is zero");
  return (baseline - model) / baseline * 100.0;
}

// Marks the per-dataset minimum of each metric column.
inline void flag_minima(EvalReport& report) {
  std::map<std::string, std::pair<double, double>> best;
  for (const auto& r : report.rows) {
    auto [it, fresh] = best.try_emplace(r.dataset, r.mean_lsd, r.mean_mssl);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.mean_lsd);
      it->second.second = std::min(it->second.second, r.mean_mssl);
    }
  }
  for (auto& r : report.rows) {
    r.min_lsd = r.mean_lsd == best[r.dataset].first;
    r.min_mssl = r.mean_mssl == best[r.dataset].second;
  }
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset,model,mean_lsd,mean_mssl,mode,protocol,epoch,min_lsd,min_mssl\n";
  for (const auto& r : report.rows) {
    out << r.dataset << ',' << r.model << ',' << fixed(r.mean_lsd, 6) << ',' << fixed(r.mean_mssl, 6) << ',' << r.mode
        << ',' << to_string(report.protocol) << ',' << (r.epoch ? std::to_string(*r.epoch) : "") << ','
        << (r.min_lsd ? 1 : 0) << ',' << (r.min_mssl ? 1 : 0) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(report.protocol);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["dataset"] = r.dataset;
    row["model"] = r.model;
    row["mean_lsd"] = r.mean_lsd;
    row["mean_mssl"] = r.mean_mssl;
    row["mode"] = r.mode;
    row["epoch"] = r.epoch ? nlohmann::ordered_json(*r.epoch) : nlohmann::ordered_json(nullptr);
    row["min_lsd"] = r.min_lsd;
    row["min_mssl"] = r.min_mssl;
    j["rows"].push_back(row);
  }
  return j;
}

// Plain-text table grouped by dataset; '*' marks the per-dataset minimum and
// model rows carry their improvement over the dataset's baseline row.
inline std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "Dataset" << std::setw(18) << "Model" << std::setw(12) << "Mean LSD"
      << std::setw(12) << "Mean MSSL" << std::setw(14) << "Mode" << "vs baseline (LSD/MSSL)\n";
  std::vector<std::string> order;
  for (const auto& r : report.rows) {
    if (std::find(order.begin(), order.end(), r.dataset) == order.end()) order.push_back(r.dataset);
  }
  for (const auto& d : order) {
    const ReportRow* base = nullptr;
    for (const auto& r : report.rows) {
      if (r.dataset == d && r.mode == "baseline") base = &r;
    }
    for (const auto& r : report.rows) {
      if (r.dataset != d) continue;
      out << std::setw(16) << r.dataset << std::setw(18) << r.model << std::setw(12)
          << (fixed(r.mean_lsd, 2) + (r.min_lsd ? "*" : "")) << std::setw(12)
          << (fixed(r.mean_mssl, 2) + (r.min_mssl ? "*" : "")) << std::setw(14) << r.mode;
      if (base && &r != base && base->mean_lsd != 0.0 && base->mean_mssl != 0.0) {
        out << fixed(improvement_percent(base->mean_lsd, r.mean_lsd), 1) << "% / "
            << fixed(improvement_percent(base->mean_mssl, r.mean_mssl), 1) << "%";
      }
      out << '\n';
    }
  }
  return out.str();
}

inline void write_report(const std::filesystem::path& dir, EvalReport report) {
  if (report.rows.empty()) throw DataError("report has no rows");
  flag_minima(report);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.csv") << to_csv(report);
  std::ofstream(dir / "report.json") << to_json(report).dump(2) << "\n";
  std::ofstream(dir / "report.txt") << render_table(report);
}

}  // namespace noisegan::eval
