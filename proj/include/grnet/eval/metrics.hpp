#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace grnet::eval {

// All rates are percentages in [0, 100].
struct EvalRecord {
  std::size_t instance_id = 0;
  double observability = 0.0;
  std::size_t group_id = 0;  // instances sharing a goal set share a group
  std::size_t goal_set_size = 0;
  std::size_t selected_index = 0;
  std::size_t hidden_index = 0;
  bool correct = false;
  double latency = 0.0;  // seconds
  double recognizability = 0.0;  // R_Z of the hidden goal, 0 for singleton sets
  int bucket = 0;  // difficulty class, 0 for singleton sets

  bool operator==(const EvalRecord&) const = default;
};

// 100 * correct / total. Throws kEmptyInput.
double accuracy(const std::vector<EvalRecord>& records);

struct MacroScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t groups = 0;
};

// Within each group the goal indices are classes. Per-class precision,
// recall and F1 (0 when undefined) are macro-averaged over the classes that
// are predicted or true at least once, then averaged over groups.
MacroScores group_metrics(const std::vector<EvalRecord>& records);

struct MetricsRow {
  double observability = 0.0;
  std::size_t count = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double chance = 0.0;  // mean of 100 / |goal set|
  double latency_mean_ms = 0.0;
  double latency_std_ms = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;  // ascending observability

  const MetricsRow* find(double observability) const;
};

MetricsRow summarize(const std::vector<EvalRecord>& records, double observability = 0.0);
// One row per observability level. Throws kEmptyInput.
MetricsTable metrics_table(const std::vector<EvalRecord>& records);

void write_csv(std::ostream& out, const MetricsTable& table);
std::string to_json_line(const EvalRecord& record);

}  // namespace grnet::eval
