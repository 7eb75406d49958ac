#include <gtest/gtest.h>

#include <cmath>

#include "afe/error.hpp"
#include "afe/metrics.hpp"
#include "support.hpp"

using namespace afe;

namespace {

// Independent two-pass references in extended precision.
struct Oracle {
  long double mx = 0, my = 0, vx = 0, vy = 0, cov = 0, sq = 0;
  Oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const long double n = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double dx = x[i] - mx, dy = y[i] - my;
      vx += dx * dx;
      vy += dy * dy;
      cov += dx * dy;
      sq += (static_cast<long double>(x[i]) - y[i]) * (static_cast<long double>(x[i]) - y[i]);
    }
    vx /= n;
    vy /= n;
    cov /= n;
    sq /= n;
  }
  double rmse() const { return static_cast<double>(std::sqrt(sq)); }
  double cc() const { return static_cast<double>(cov / std::sqrt(vx * vy)); }
  double ccc() const { return static_cast<double>(2 * cov / (vx + vy + (mx - my) * (mx - my))); }
};

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1, double hi = 1) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST(Metrics, HandExamples) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(rmse(x, x), 0.0);
  EXPECT_NEAR(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(pearson_cc(x, std::vector<double>{3, 5, 7}), 1.0, 1e-15);
  EXPECT_NEAR(pearson_cc(x, std::vector<double>{-1, -2, -3}), -1.0, 1e-15);
  EXPECT_NEAR(ccc(x, x), 1.0, 1e-15);
  EXPECT_EQ(ccc(std::vector<double>{2, 2, 2}, x), 0.0);
  EXPECT_NEAR(ccc(x, std::vector<double>{3, 2, 1}), -1.0, 1e-15);
}

TEST(Metrics, UndefinedCasesAndBadInput) {
  const std::vector<double> c{1, 1, 1}, x{1, 2, 3};
  EXPECT_THROW(pearson_cc(c, x), UndefinedMetricError);
  EXPECT_THROW(ccc(c, c), UndefinedMetricError);
  EXPECT_NO_THROW(ccc(c, std::vector<double>{2, 2, 2}));
  EXPECT_THROW(rmse(x, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), Error);
  EXPECT_THROW(pearson_cc(std::vector<double>{1}, std::vector<double>{2}), Error);
}

TEST(Metrics, MatchTwoPassOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 200;
    const auto x = random_vec(n, rng, -1, 1);
    auto y = random_vec(n, rng, -0.5, 1.5);
    if (trial % 3 == 0) {
      for (std::size_t i = 0; i < n; ++i) y[i] = 0.7 * x[i] + 0.2 + 0.1 * y[i];
    }
    const Oracle o(x, y);
    EXPECT_NEAR(rmse(x, y), o.rmse(), 1e-12);
    EXPECT_NEAR(pearson_cc(x, y), o.cc(), 1e-12);
    EXPECT_NEAR(ccc(x, y), o.ccc(), 1e-12);
  }
}

TEST(Metrics, CccDiscriminatesAffineMaps) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_vec(50, rng);
    double a = rng.uniform(0.2, 3.0);
    if (std::fabs(a - 1.0) < 1e-3) a += 0.1;
    double b = rng.uniform(-1.0, 1.0);
    if (std::fabs(b) < 1e-3) b = 0.5;
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    EXPECT_NEAR(pearson_cc(x, y), 1.0, 1e-12);
    EXPECT_LT(ccc(x, y), 1.0);
  }
}

TEST(Metrics, SymmetryBoundsAndTranslation) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_vec(30, rng), y = random_vec(30, rng);
    EXPECT_EQ(rmse(x, y), rmse(y, x));
    EXPECT_NEAR(pearson_cc(x, y), pearson_cc(y, x), 1e-15);
    EXPECT_NEAR(ccc(x, y), ccc(y, x), 1e-15);
    EXPECT_LE(std::fabs(ccc(x, y)), 1.0);
    EXPECT_LE(std::fabs(pearson_cc(x, y)), 1.0);
    auto xs = x, ys = y;
    for (std::size_t i = 0; i < 30; ++i) {
      xs[i] += 3.5;
      ys[i] += 3.5;
    }
    EXPECT_NEAR(ccc(xs, ys), ccc(x, y), 1e-12);
  }
}

TEST(Metrics, MeanShiftLowersOnlyCcc) {
  Rng rng(4);
  const auto gold = random_vec(100, rng);
  auto pred = gold;
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = 0.8 * gold[i] + 0.1 * rng.normal();
  auto shifted = pred;
  for (double& v : shifted) v += 0.2;
  EXPECT_NEAR(pearson_cc(shifted, gold), pearson_cc(pred, gold), 1e-12);
  EXPECT_LT(ccc(shifted, gold), ccc(pred, gold));
}

TEST(Evaluate, PerSequenceAndPooled) {
  const std::vector<SequencePrediction> seqs{{"a", {0.1, 0.5, -0.2}, {0.1, 0.5, -0.2}, {0, 1, 0}},
                                             {"b", {0.3, 0.0}, {0.3, 0.0}, {0, 0}}};
  const EvalReport r = evaluate(seqs);
  ASSERT_EQ(r.sequences.size(), 2u);
  EXPECT_EQ(r.sequences[0].n, 3u);
  EXPECT_EQ(r.pooled.n, 5u);
  EXPECT_EQ(r.pooled.sequence_id, kPooledId);
  EXPECT_EQ(r.pooled.rmse, 0.0);
  EXPECT_NEAR(r.pooled.cc, 1.0, 1e-15);
  EXPECT_NEAR(r.pooled.ccc, 1.0, 1e-15);
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sequence_id,n,rmse,cc,ccc");
  EXPECT_NE(csv.find("__pooled__,5,"), std::string::npos);
  EXPECT_EQ(report_json(r)["pooled"]["n"], 5);
}

TEST(Evaluate, PolicyOnUndefinedMetrics) {
  const std::vector<double> pred{0.2, 0.2, 0.2}, gold{0.1, 0.4, 0.3};
  const std::vector<std::uint8_t> mask(3, 0);
  EXPECT_THROW(evaluate_timeline(pred, gold, mask, MetricPolicy::strict), UndefinedMetricError);
  const EvalReport r = evaluate_timeline(pred, gold, mask, MetricPolicy::lenient);
  EXPECT_EQ(r.pooled.cc, 0.0);
  EXPECT_EQ(r.pooled.ccc, 0.0);
  EXPECT_GT(r.pooled.rmse, 0.0);
}

TEST(Evaluate, ReferenceScoresAreDocumentation) {
  EXPECT_EQ(kReferenceBestDev.rmse, 0.107);
  EXPECT_EQ(kReferenceBestDev.cc, 0.554);
  EXPECT_EQ(kReferenceBestDev.ccc, 0.507);
}
