#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace agiqa::metrics {

/// SRCC / PLCC / KRCC / RMSE bundle for one (model, split) pair.
struct EvalReport {
  double srcc = 0.0;
  double plcc = 0.0;
  double krcc = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;

  /// Model-selection criterion.
  double selection_score() const noexcept { return srcc + plcc; }
};

// All correlations raise ErrorCode::kUndefinedCorrelation on constant input
// instead of returning 0.

/// Spearman: Pearson correlation of average ranks.
double srcc(std::span<const double> pred, std::span<const double> truth);
/// Pearson r, no logistic remapping.
double plcc(std::span<const double> pred, std::span<const double> truth);
/// Kendall tau-b, O(n log n).
double krcc(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);

/// 1-based average ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

EvalReport evaluate(std::span<const double> pred, std::span<const double> truth);

/// `srcc=... plcc=... krcc=... rmse=... n=...` with fixed field order.
std::string format_record(const EvalReport& report);
/// Two-line table with the SRCC↑ PLCC↑ KRCC↑ RMSE↓ header.
std::string format_table(const EvalReport& report);
std::string table_header();
std::string table_row(const EvalReport& report);

}  // namespace agiqa::metrics
