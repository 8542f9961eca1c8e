#include "grnet/eval/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "grnet/error.hpp"
#include "json.hpp"

namespace grnet::eval {

namespace {

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

}  // namespace

double accuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  std::size_t correct = 0;
  for (const auto& r : records) correct += r.correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(records.size());
}

MacroScores group_metrics(const std::vector<EvalRecord>& records) {
  std::map<std::size_t, std::map<std::size_t, ClassCounts>> groups;
  for (const auto& r : records) {
    auto& classes = groups[r.group_id];
    if (r.selected_index == r.hidden_index) {
      ++classes[r.hidden_index].tp;
    } else {
      ++classes[r.selected_index].fp;
      ++classes[r.hidden_index].fn;
    }
  }
  MacroScores out;
  for (const auto& [id, classes] : groups) {
    double p = 0, rc = 0, f = 0;
    for (const auto& [cls, c] : classes) {
      const double cp = ratio(c.tp, c.tp + c.fp);
      const double cr = ratio(c.tp, c.tp + c.fn);
      p += cp;
      rc += cr;
      f += cp + cr > 0 ? 2 * cp * cr / (cp + cr) : 0.0;
    }
    const auto k = static_cast<double>(classes.size());
    out.precision += p / k;
    out.recall += rc / k;
    out.f1 += f / k;
  }
  out.groups = groups.size();
  if (out.groups > 0) {
    const auto g = static_cast<double>(out.groups);
    out.precision = 100.0 * out.precision / g;
    out.recall = 100.0 * out.recall / g;
    out.f1 = 100.0 * out.f1 / g;
  }
  return out;
}

MetricsRow summarize(const std::vector<EvalRecord>& records, double observability) {
  MetricsRow row;
  row.observability = observability;
  row.count = records.size();
  row.accuracy = accuracy(records);
  const auto macro = group_metrics(records);
  row.precision = macro.precision;
  row.recall = macro.recall;
  row.f1 = macro.f1;
  double chance = 0, mean = 0;
  for (const auto& r : records) {
    chance += 100.0 / static_cast<double>(std::max<std::size_t>(r.goal_set_size, 1));
    mean += r.latency;
  }
  const auto n = static_cast<double>(records.size());
  row.chance = chance / n;
  mean /= n;
  double var = 0;
  for (const auto& r : records) var += (r.latency - mean) * (r.latency - mean);
  row.latency_mean_ms = 1000.0 * mean;
  row.latency_std_ms = 1000.0 * std::sqrt(var / n);
  return row;
}

const MetricsRow* MetricsTable::find(double observability) const {
  for (const auto& r : rows)
    if (std::abs(r.observability - observability) < 1e-9) return &r;
  return nullptr;
}

MetricsTable metrics_table(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  std::map<double, std::vector<EvalRecord>> by_obs;
  for (const auto& r : records) by_obs[r.observability].push_back(r);
  MetricsTable table;
  for (const auto& [obs, list] : by_obs) table.rows.push_back(summarize(list, obs));
  return table;
}

void write_csv(std::ostream& out, const MetricsTable& table) {
  out << "observability,count,accuracy,precision,recall,f1,chance,latency_mean_ms,latency_std_ms\n";
  out << std::setprecision(10);
  for (const auto& r : table.rows)
    out << r.observability << ',' << r.count << ',' << r.accuracy << ',' << r.precision << ',' << r.recall << ','
        << r.f1 << ',' << r.chance << ',' << r.latency_mean_ms << ',' << r.latency_std_ms << '\n';
}

std::string to_json_line(const EvalRecord& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance_id;
  j["observability"] = r.observability;
  j["group"] = r.group_id;
  j["goal_set_size"] = r.goal_set_size;
  j["selected"] = r.selected_index;
  j["hidden"] = r.hidden_index;
  j["correct"] = r.correct;
  j["latency"] = r.latency;
  j["recognizability"] = r.recognizability;
  j["bucket"] = r.bucket;
  return j.dump();
}

}  // namespace grnet::eval
