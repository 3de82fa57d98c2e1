#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pipeline/manifest.hpp"

namespace agiqa::pipeline {

enum class SplitPart { kTrain, kVal, kTest };

const char* to_string(SplitPart part) noexcept;
SplitPart parse_split_part(std::string_view text);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  const std::vector<std::string>& part(SplitPart p) const;
};

/// Seeded 70/10/20 partition.
///
/// Ids are taken in manifest order and shuffled by Fisher-Yates driven by
/// std::mt19937_64(seed): for i = n-1 down to 1, swap(i, next() % (i + 1)).
/// The first floor(0.7 n) ids form train, the next floor(0.1 n) val, and the
/// remainder test.
SplitAssignment split(const DatasetManifest& manifest, std::uint64_t seed);

/// (train, val, test) sizes for n records.
struct SplitSizes {
  std::size_t train, val, test;
};
SplitSizes split_sizes(std::size_t n);

}  // namespace agiqa::pipeline
