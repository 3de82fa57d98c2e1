#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>

#include "common/error.hpp"

namespace agiqa::metrics {

namespace {

void check_pairs(std::span<const double> pred, std::span<const double> truth,
                 std::size_t min_n, const char* what) {
  if (pred.size() != truth.size()) {
    fail(ErrorCode::kShape, std::string(what) + ": prediction has " +
                                std::to_string(pred.size()) + " entries, truth has " +
                                std::to_string(truth.size()));
  }
  if (pred.size() < min_n) {
    fail(ErrorCode::kTooSmall, std::string(what) + " needs at least " + std::to_string(min_n) +
                                   " pairs, got " + std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(truth[i])) {
      fail(ErrorCode::kNumeric, std::string(what) + ": non-finite value at index " +
                                    std::to_string(i));
    }
  }
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

double pearson(std::span<const double> x, std::span<const double> y, const char* what) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorCode::kUndefinedCorrelation,
         std::string(what) + " is undefined: " + (sxx == 0.0 ? "predictions" : "targets") +
             " are constant");
  }
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

// Counts inversions (strictly decreasing pairs) of `v` while merge-sorting it.
std::uint64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

// Sum over runs of equal adjacent values of t(t-1)/2.
template <typename Eq>
std::uint64_t tied_pairs(std::size_t n, Eq equal_to_prev) {
  std::uint64_t total = 0;
  std::uint64_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal_to_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank mean((i+1)..(j+1))
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double srcc(std::span<const double> pred, std::span<const double> truth) {
  check_pairs(pred, truth, 2, "SRCC");
  const auto rp = average_ranks(pred);
  const auto rt = average_ranks(truth);
  return pearson(rp, rt, "SRCC");
}

double plcc(std::span<const double> pred, std::span<const double> truth) {
  check_pairs(pred, truth, 2, "PLCC");
  return pearson(pred, truth, "PLCC");
}

double krcc(std::span<const double> pred, std::span<const double> truth) {
  check_pairs(pred, truth, 2, "KRCC");
  const std::size_t n = pred.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pred[a] != pred[b]) return pred[a] < pred[b];
    return truth[a] < truth[b];
  });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t ties_pred =
      tied_pairs(n, [&](std::size_t i) { return pred[order[i]] == pred[order[i - 1]]; });
  const std::uint64_t ties_joint = tied_pairs(n, [&](std::size_t i) {
    return pred[order[i]] == pred[order[i - 1]] && truth[order[i]] == truth[order[i - 1]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = truth[order[i]];
  const std::uint64_t discordant = count_inversions(ys);  // ys is now sorted
  const std::uint64_t ties_truth = tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  const double denom_pred = static_cast<double>(total - ties_pred);
  const double denom_truth = static_cast<double>(total - ties_truth);
  if (denom_pred == 0.0 || denom_truth == 0.0) {
    fail(ErrorCode::kUndefinedCorrelation,
         std::string("KRCC is undefined: every pair is tied in ") +
             (denom_pred == 0.0 ? "predictions" : "targets"));
  }
  // concordant - discordant, with pairs tied on either axis counted as neither
  const double numer = static_cast<double>(total) - static_cast<double>(ties_pred) -
                       static_cast<double>(ties_truth) + static_cast<double>(ties_joint) -
                       2.0 * static_cast<double>(discordant);
  return clamp_unit(numer / std::sqrt(denom_pred * denom_truth));
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  check_pairs(pred, truth, 1, "RMSE");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

EvalReport evaluate(std::span<const double> pred, std::span<const double> truth) {
  EvalReport r;
  r.srcc = srcc(pred, truth);
  r.plcc = plcc(pred, truth);
  r.krcc = krcc(pred, truth);
  r.rmse = rmse(pred, truth);
  r.n = pred.size();
  return r;
}

std::string format_record(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "srcc=%.6f plcc=%.6f krcc=%.6f rmse=%.6f n=%zu", r.srcc, r.plcc,
                r.krcc, r.rmse, r.n);
  return buf;
}

std::string table_header() { return "  SRCC↑    PLCC↑    KRCC↑    RMSE↓      n"; }

std::string table_row(const EvalReport& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%7.4f  %7.4f  %7.4f  %7.4f  %5zu", r.srcc, r.plcc, r.krcc,
                r.rmse, r.n);
  return buf;
}

std::string format_table(const EvalReport& r) { return table_header() + "\n" + table_row(r) + "\n"; }

}  // namespace agiqa::metrics
