#include "pipeline/split.hpp"

#include <utility>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace agiqa::pipeline {

const char* to_string(SplitPart part) noexcept {
  switch (part) {
    case SplitPart::kTrain: return "train";
    case SplitPart::kVal: return "val";
    case SplitPart::kTest: return "test";
  }
  return "?";
}

SplitPart parse_split_part(std::string_view text) {
  if (text == "train") return SplitPart::kTrain;
  if (text == "val") return SplitPart::kVal;
  if (text == "test") return SplitPart::kTest;
  fail(ErrorCode::kConfig, "split part must be train, val or test; got '" + std::string(text) + "'");
}

const std::vector<std::string>& SplitAssignment::part(SplitPart p) const {
  switch (p) {
    case SplitPart::kTrain: return train;
    case SplitPart::kVal: return val;
    case SplitPart::kTest: return test;
  }
  return test;
}

SplitSizes split_sizes(std::size_t n) {
  // Integer floors of 0.7 n and 0.1 n, exact for every n.
  const std::size_t train = n * 7 / 10;
  const std::size_t val = n / 10;
  return {train, val, n - train - val};
}

SplitAssignment split(const DatasetManifest& manifest, std::uint64_t seed) {
  const std::size_t n = manifest.records.size();
  if (n < 10) {
    fail(ErrorCode::kTooSmall, "manifest '" + manifest.name + "' has " + std::to_string(n) +
                                   " records; the 70/10/20 split needs at least 10");
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& r : manifest.records) ids.push_back(r.image_id);

  nn::Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(ids[i], ids[j]);
  }

  const auto sizes = split_sizes(n);
  SplitAssignment s;
  s.seed = seed;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(sizes.train));
  s.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(sizes.train),
               ids.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val));
  s.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val), ids.end());
  return s;
}

}  // namespace agiqa::pipeline
