#include "semantic/synth.hpp"

#include <cmath>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace agiqa::semantic {

std::vector<double> probe_direction(Tag tag, std::size_t dim) {
  nn::Rng rng(nn::derive_seed(dim, std::string("probe/") + tag_char(tag)));
  std::vector<double> dir(dim);
  double norm2 = 0.0;
  for (double& v : dir) {
    v = rng.normal();
    norm2 += v * v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : dir) v *= inv;
  return dir;
}

std::vector<CacheEntry> synth_features(std::span<const LabeledId> images, std::span<const Tag> tags,
                                       std::size_t dim, std::uint64_t seed, double mos_signal) {
  if (dim < 2) fail(ErrorCode::kConfig, "synthetic feature dim must be >= 2, got " + std::to_string(dim));
  if (!(mos_signal >= 0.0 && mos_signal <= 1.0)) {
    fail(ErrorCode::kConfig, "mos_signal must lie in [0, 1], got " + std::to_string(mos_signal));
  }
  std::vector<CacheEntry> out;
  out.reserve(images.size() * tags.size());
  std::vector<std::vector<double>> dirs;
  for (Tag tag : tags) dirs.push_back(probe_direction(tag, dim));
  for (const auto& img : images) {
    for (std::size_t t = 0; t < tags.size(); ++t) {
      const Tag tag = tags[t];
      const auto& dir = dirs[t];
      nn::Rng rng(nn::derive_seed(seed, img.image_id + '/' + tag_char(tag)));
      CacheEntry e{img.image_id, tag, std::vector<float>(dim)};
      for (std::size_t j = 0; j < dim; ++j) {
        const double noise = rng.normal();
        e.vec[j] = static_cast<float>(mos_signal * img.mos * dir[j] + (1.0 - mos_signal) * noise);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace agiqa::semantic
