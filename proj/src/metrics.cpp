#include "afe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "afe/error.hpp"

namespace afe {
namespace {

void require_pair(std::span<const double> a, std::span<const double> b, std::size_t min_n, const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < min_n) {
    throw ShapeError(std::string(what) + ": need at least " + std::to_string(min_n) + " values");
  }
}

bool constant(std::span<const double> v) {
  for (double x : v) {
    if (x != v[0]) return false;
  }
  return true;
}

struct Moments {
  double mean_a = 0.0, mean_b = 0.0;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
};

Moments moments(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  Moments m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.mean_a += a[i];
    m.mean_b += b[i];
  }
  // A constant input gets its exact value as mean, so its deviations vanish.
  m.mean_a = constant(a) ? a[0] : m.mean_a / n;
  m.mean_b = constant(b) ? b[0] : m.mean_b / n;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - m.mean_a, db = b[i] - m.mean_b;
    m.var_a += da * da;
    m.var_b += db * db;
    m.cov += da * db;
  }
  m.var_a /= n;
  m.var_b /= n;
  m.cov /= n;
  return m;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> gold) {
  require_pair(pred, gold, 1, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += (pred[i] - gold[i]) * (pred[i] - gold[i]);
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

double pearson_cc(std::span<const double> pred, std::span<const double> gold) {
  require_pair(pred, gold, 2, "pearson_cc");
  if (constant(pred) || constant(gold)) throw UndefinedMetricError("undefined correlation: constant input");
  const Moments m = moments(pred, gold);
  const double r = m.cov / std::sqrt(m.var_a * m.var_b);
  return std::clamp(r, -1.0, 1.0);
}

double ccc(std::span<const double> pred, std::span<const double> gold) {
  require_pair(pred, gold, 2, "ccc");
  const Moments m = moments(pred, gold);
  const double shift = m.mean_a - m.mean_b;
  const double denom = m.var_a + m.var_b + shift * shift;
  if (constant(pred) && constant(gold) && pred[0] == gold[0]) {
    throw UndefinedMetricError("undefined CCC: both inputs constant with equal means");
  }
  return std::clamp(2.0 * m.cov / denom, -1.0, 1.0);
}

namespace {

MetricRow score(const std::string& id, std::span<const double> pred, std::span<const double> gold,
                MetricPolicy policy) {
  MetricRow row{id, pred.size(), rmse(pred, gold), 0.0, 0.0};
  auto guarded = [&](auto&& fn, const char* name) {
    try {
      return fn(pred, gold);
    } catch (const UndefinedMetricError& e) {
      if (policy == MetricPolicy::strict) throw;
      std::cerr << "warning: " << name << " of " << id << ": " << e.what() << ", reporting 0\n";
      return 0.0;
    }
  };
  row.cc = guarded([](auto p, auto g) { return pearson_cc(p, g); }, "cc");
  row.ccc = guarded([](auto p, auto g) { return ccc(p, g); }, "ccc");
  return row;
}

}  // namespace

EvalReport evaluate(std::span<const SequencePrediction> sequences, MetricPolicy policy) {
  if (sequences.empty()) throw InputError("evaluate: no sequences");
  EvalReport report;
  std::vector<double> all_pred, all_gold;
  for (const auto& s : sequences) {
    if (s.pred.size() != s.gold.size()) {
      throw ShapeError("evaluate: sequence " + s.sequence_id + " has " + std::to_string(s.pred.size()) +
                       " predictions for " + std::to_string(s.gold.size()) + " gold values");
    }
    if (!s.gold_mask.empty() && s.gold_mask.size() != s.gold.size()) {
      throw ShapeError("evaluate: sequence " + s.sequence_id + " mask length differs");
    }
    report.sequences.push_back(score(s.sequence_id, s.pred, s.gold, policy));
    all_pred.insert(all_pred.end(), s.pred.begin(), s.pred.end());
    all_gold.insert(all_gold.end(), s.gold.begin(), s.gold.end());
  }
  report.pooled = score(kPooledId, all_pred, all_gold, policy);
  return report;
}

EvalReport evaluate_timeline(std::span<const double> pred, std::span<const double> gold,
                             std::span<const std::uint8_t> gold_mask, MetricPolicy policy) {
  SequencePrediction s{"timeline", {pred.begin(), pred.end()}, {gold.begin(), gold.end()},
                       {gold_mask.begin(), gold_mask.end()}};
  return evaluate(std::span<const SequencePrediction>(&s, 1), policy);
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "sequence_id,n,rmse,cc,ccc\n";
  auto row = [&os](const MetricRow& r) {
    os << r.sequence_id << ',' << r.n << ',' << r.rmse << ',' << r.cc << ',' << r.ccc << '\n';
  };
  for (const auto& r : report.sequences) row(r);
  row(report.pooled);
  return os.str();
}

nlohmann::json report_json(const EvalReport& report) {
  auto row = [](const MetricRow& r) {
    return nlohmann::json{{"sequence_id", r.sequence_id}, {"n", r.n}, {"rmse", r.rmse}, {"cc", r.cc}, {"ccc", r.ccc}};
  };
  nlohmann::json j;
  j["sequences"] = nlohmann::json::array();
  for (const auto& r : report.sequences) j["sequences"].push_back(row(r));
  j["pooled"] = row(report.pooled);
  return j;
}

}  // namespace afe
