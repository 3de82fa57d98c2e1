#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semantic/feature_cache.hpp"

namespace agiqa::semantic {

struct LabeledId {
  std::string image_id;
  double mos = 0.0;
};

/// Fixed unit-norm probe direction for a tag and width. It depends only on
/// (tag, dim), so datasets drawn with different seeds share it.
std::vector<double> probe_direction(Tag tag, std::size_t dim);

/// Desk-scale stand-in for extracted features:
///   vec = mos_signal * mos * direction(tag) + (1 - mos_signal) * noise
/// with noise ~ N(0, I) drawn from a generator keyed by (seed, image_id, tag).
std::vector<CacheEntry> synth_features(std::span<const LabeledId> images, std::span<const Tag> tags,
                                       std::size_t dim, std::uint64_t seed, double mos_signal);

}  // namespace agiqa::semantic
