#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "numerics/graph.hpp"
#include "numerics/tensor.hpp"

namespace agiqa::backbone {

/// Per-patch quality scores S and weights W.
struct PatchScores {
  nn::Tensor1 scores;
  nn::Tensor1 weights;
};

/// Per-patch score times per-patch weight, one entry per patch.
using QualityFeature = nn::Tensor1;

/// Pre-decoded image, values in [0, 1], layout [height][width][channels].
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }
};

struct BackboneConfig {
  std::size_t image_height = 56;
  std::size_t image_width = 56;
  std::size_t channels = 1;
  std::size_t patch_size = 8;
  std::size_t hidden = 16;
  std::size_t depth = 2;

  std::size_t patch_count() const { return (image_height / patch_size) * (image_width / patch_size); }
  std::size_t patch_pixels() const { return patch_size * patch_size * channels; }
  void validate() const;
};

/// Small stand-in for a patch-scoring quality network.
///
/// Patches are embedded by one affine map plus relu, then mixed by `depth`
/// residual softmax-attention blocks (X += softmax(Q K^T / sqrt(h)) V). Two
/// heads read the same mixed representation: a linear score head and a
/// sigmoid weight head, so every weight lies in (0, 1).
class ToyBackbone {
 public:
  struct Outputs {
    nn::Var scores;   // 1 x p
    nn::Var weights;  // 1 x p
  };

  explicit ToyBackbone(const BackboneConfig& config);

  const BackboneConfig& config() const noexcept { return config_; }
  std::size_t patch_count() const { return config_.patch_count(); }

  void init(nn::Rng& rng);
  void zero_heads();

  Outputs forward(nn::Graph& g, const Image& image) const;
  /// Per-patch quality node (1 x p) for end-to-end training.
  nn::Var quality_feature(nn::Graph& g, const Image& image) const;
  /// Eval-mode (S, W).
  PatchScores forward(const Image& image) const;

  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;

 private:
  struct MixBlock {
    nn::AffineLayer query;
    nn::AffineLayer key;
    nn::AffineLayer value;
  };

  /// p x patch_pixels matrix, patches in row-major grid order.
  std::vector<double> patchify(const Image& image) const;

  BackboneConfig config_;
  nn::AffineLayer embed_;
  std::vector<MixBlock> blocks_;
  nn::AffineLayer score_head_;
  nn::AffineLayer weight_head_;
};

/// sum(S * W) / sum(W).
double rating(const PatchScores& ps);
QualityFeature quality_feature(const PatchScores& ps);

/// Reads the tag-q vector for `image_id` from a feature cache file.
QualityFeature load_cached_quality(const std::filesystem::path& path, const std::string& image_id);

/// Deterministic synthetic image whose brightness rises and noise falls with mos.
Image synth_image(std::uint64_t seed, double mos, const BackboneConfig& config);
/// Raw little-endian f32 planar dump, [height][width][channels].
Image load_raw_image(const std::filesystem::path& path, const BackboneConfig& config);

}  // namespace agiqa::backbone
