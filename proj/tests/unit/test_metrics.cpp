#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common/error.hpp"
#include "metrics/metrics.hpp"
#include "oracles/oracles.hpp"

using namespace agiqa;
using Vec = std::vector<double>;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

bool is_constant(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

TEST(MetricExamples, Spearman) {
  const Vec t{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(metrics::srcc(t, t), 1.0);
  EXPECT_DOUBLE_EQ(metrics::srcc(Vec{5, 4, 3, 2, 1}, t), -1.0);
  EXPECT_NEAR(metrics::srcc(Vec{1, 2, 3, 5, 4}, t), 0.9, 1e-12);
}

TEST(MetricExamples, Pearson) {
  const Vec p{0.5, 1.5, -2, 7, 3};
  Vec affine, neg;
  for (double x : p) {
    affine.push_back(2 * x + 1);
    neg.push_back(-x);
  }
  EXPECT_NEAR(metrics::plcc(p, affine), 1.0, 1e-15);
  EXPECT_NEAR(metrics::plcc(p, neg), -1.0, 1e-15);
}

TEST(MetricExamples, Kendall) {
  EXPECT_DOUBLE_EQ(metrics::krcc(Vec{1, 2, 3, 4}, Vec{10, 20, 30, 40}), 1.0);
  EXPECT_NEAR(metrics::krcc(Vec{1, 2, 3}, Vec{1, 3, 2}), 1.0 / 3.0, 1e-15);
}

TEST(MetricExamples, Rmse) {
  EXPECT_EQ(metrics::rmse(Vec{1, 2}, Vec{1, 2}), 0.0);
  EXPECT_NEAR(metrics::rmse(Vec{0, 0}, Vec{3, 4}), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(metrics::rmse(Vec{4}, Vec{1}), 3.0);
}

TEST(MetricOracles, RandomVectorsWithAndWithoutTies) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> len(2, 50);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = len(gen);
    const int ties = trial % 2 == 0 ? 0 : 2 + trial % 5;
    const Vec p = oracle::random_vector(gen, n, ties);
    const Vec t = oracle::random_vector(gen, n, ties / 2 + (ties ? 2 : 0));
    EXPECT_NEAR(metrics::rmse(p, t), oracle::rmse(p, t), 1e-12);
    if (is_constant(p) || is_constant(t)) {
      EXPECT_EQ(code_of([&] { metrics::srcc(p, t); }), ErrorCode::kUndefinedCorrelation);
      continue;
    }
    EXPECT_NEAR(metrics::srcc(p, t), oracle::spearman(p, t), 1e-12);
    EXPECT_NEAR(metrics::plcc(p, t), oracle::pearson(p, t), 1e-12);
    EXPECT_NEAR(metrics::krcc(p, t), oracle::kendall_tau_b(p, t), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(MetricOracles, AverageRanks) {
  EXPECT_EQ(metrics::average_ranks(Vec{10, 20, 20, 5}), (Vec{2, 3.5, 3.5, 1}));
  std::mt19937_64 gen(3);
  const Vec v = oracle::random_vector(gen, 40, 6);
  EXPECT_EQ(metrics::average_ranks(v), oracle::ranks(v));
}

TEST(MetricOracles, KendallMatchesPairCountAtLargerN) {
  std::mt19937_64 gen(5);
  const Vec p = oracle::random_vector(gen, 1500, 40);
  const Vec t = oracle::random_vector(gen, 1500, 25);
  EXPECT_NEAR(metrics::krcc(p, t), oracle::kendall_tau_b(p, t), 1e-12);
}

TEST(MetricInvariants, MonotoneTransforms) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec p = oracle::random_vector(gen, 30);
    const Vec t = oracle::random_vector(gen, 30);
    Vec up, down, aff;
    for (double x : p) {
      up.push_back(std::exp(x) + x * x * x);
      down.push_back(-std::atan(x));
      aff.push_back(3.5 * x - 2.0);
    }
    EXPECT_NEAR(metrics::srcc(up, t), metrics::srcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::krcc(up, t), metrics::krcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::srcc(down, t), -metrics::srcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::krcc(down, t), -metrics::krcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::plcc(aff, t), metrics::plcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::srcc(t, p), metrics::srcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::krcc(t, p), metrics::krcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::plcc(t, p), metrics::plcc(p, t), 1e-12);
    EXPECT_NEAR(metrics::rmse(t, p), metrics::rmse(p, t), 1e-12);
    EXPECT_NEAR(metrics::srcc(p, t), oracle::pearson(metrics::average_ranks(p), metrics::average_ranks(t)),
                1e-12);
  }
}

TEST(MetricInvariants, RangesStayInBounds) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec p = oracle::random_vector(gen, 10, 4);
    const Vec t = oracle::random_vector(gen, 10, 4);
    if (is_constant(p) || is_constant(t)) continue;
    const auto r = metrics::evaluate(p, t);
    for (double c : {r.srcc, r.plcc, r.krcc}) {
      EXPECT_GE(c, -1.0);
      EXPECT_LE(c, 1.0);
    }
    EXPECT_GE(r.rmse, 0.0);
    EXPECT_EQ(r.n, 10u);
  }
}

TEST(MetricErrors, ConstantInputIsUndefinedNotZero) {
  const Vec c{2, 2, 2}, v{1, 2, 3};
  EXPECT_EQ(code_of([&] { metrics::srcc(c, v); }), ErrorCode::kUndefinedCorrelation);
  EXPECT_EQ(code_of([&] { metrics::plcc(v, c); }), ErrorCode::kUndefinedCorrelation);
  EXPECT_EQ(code_of([&] { metrics::krcc(c, v); }), ErrorCode::kUndefinedCorrelation);
  EXPECT_EQ(code_of([&] { metrics::rmse(c, v); }), static_cast<ErrorCode>(0));
}

TEST(MetricErrors, ShapeSizeAndFiniteness) {
  EXPECT_EQ(code_of([] { metrics::srcc(Vec{1, 2}, Vec{1, 2, 3}); }), ErrorCode::kShape);
  EXPECT_EQ(code_of([] { metrics::plcc(Vec{1}, Vec{1}); }), ErrorCode::kTooSmall);
  EXPECT_EQ(code_of([] { metrics::rmse(Vec{}, Vec{}); }), ErrorCode::kTooSmall);
  EXPECT_EQ(code_of([] { metrics::plcc(Vec{1, NAN}, Vec{1, 2}); }), ErrorCode::kNumeric);
}

TEST(MetricFormatting, RecordAndTable) {
  metrics::EvalReport r{0.5, 0.25, -0.125, 1.5, 7};
  EXPECT_EQ(metrics::format_record(r), "srcc=0.500000 plcc=0.250000 krcc=-0.125000 rmse=1.500000 n=7");
  const auto table = metrics::format_table(r);
  EXPECT_NE(table.find("SRCC↑"), std::string::npos);
  EXPECT_NE(table.find("PLCC↑"), std::string::npos);
  EXPECT_NE(table.find("KRCC↑"), std::string::npos);
  EXPECT_NE(table.find("RMSE↓"), std::string::npos);
  EXPECT_DOUBLE_EQ(r.selection_score(), 0.75);
}
