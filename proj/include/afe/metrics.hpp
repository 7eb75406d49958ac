#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace afe {

/// sqrt(mean((pred - gold)^2))
double rmse(std::span<const double> pred, std::span<const double> gold);
/// Pearson correlation with population moments. Throws UndefinedMetricError
/// if either input is constant.
double pearson_cc(std::span<const double> pred, std::span<const double> gold);
/// Lin's concordance correlation coefficient,
///   2 cov / (var_p + var_g + (mean_p - mean_g)^2),
/// with population moments. Undefined only when both inputs are constant
/// with equal means.
double ccc(std::span<const double> pred, std::span<const double> gold);

struct MetricRow {
  std::string sequence_id;
  std::size_t n = 0;
  double rmse = 0.0;
  double cc = 0.0;
  double ccc = 0.0;
};

struct EvalReport {
  std::vector<MetricRow> sequences;
  MetricRow pooled;  ///< metrics over the concatenation of all sequences
};

struct SequencePrediction {
  std::string sequence_id;
  std::vector<double> pred;
  std::vector<double> gold;
  std::vector<std::uint8_t> gold_mask;  ///< gap-filled gold entries; scored like any other frame
};

/// Strict raises UndefinedMetricError; lenient reports undefined CC/CCC as 0
/// and prints a warning, which keeps training logs and sweeps populated.
enum class MetricPolicy { strict, lenient };

EvalReport evaluate(std::span<const SequencePrediction> sequences, MetricPolicy policy = MetricPolicy::strict);
EvalReport evaluate_timeline(std::span<const double> pred, std::span<const double> gold,
                             std::span<const std::uint8_t> gold_mask, MetricPolicy policy = MetricPolicy::strict);

inline constexpr const char* kPooledId = "__pooled__";

/// `sequence_id,n,rmse,cc,ccc` with one row per sequence and a pooled row.
std::string report_csv(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);

/// Best development-set scores reported for the 3-layer windowed model on the
/// original corpus. Displayed for reference next to local results; not a target.
struct ReferenceScores {
  double rmse;
  double cc;
  double ccc;
};
inline constexpr ReferenceScores kReferenceBestDev{0.107, 0.554, 0.507};

}  // namespace afe
