#include "backbone/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "semantic/feature_cache.hpp"

namespace agiqa::backbone {

void BackboneConfig::validate() const {
  if (image_height == 0 || image_width == 0 || channels == 0 || patch_size == 0 || hidden == 0) {
    fail(ErrorCode::kConfig, "backbone dimensions must all be positive");
  }
  if (image_height % patch_size != 0 || image_width % patch_size != 0) {
    fail(ErrorCode::kShape, "image " + std::to_string(image_height) + "x" +
                                std::to_string(image_width) + " is not divisible by patch size " +
                                std::to_string(patch_size) +
                                "; pad or crop to a multiple of the patch size");
  }
}

ToyBackbone::ToyBackbone(const BackboneConfig& config) : config_(config) {
  config_.validate();
  const std::size_t h = config_.hidden;
  embed_ = nn::AffineLayer("backbone.embed", config_.patch_pixels(), h);
  for (std::size_t i = 0; i < config_.depth; ++i) {
    const std::string prefix = "backbone.mix" + std::to_string(i);
    blocks_.push_back({nn::AffineLayer(prefix + ".query", h, h), nn::AffineLayer(prefix + ".key", h, h),
                       nn::AffineLayer(prefix + ".value", h, h)});
  }
  score_head_ = nn::AffineLayer("backbone.score_head", h, 1);
  weight_head_ = nn::AffineLayer("backbone.weight_head", h, 1);
}

void ToyBackbone::init(nn::Rng& rng) {
  embed_.init_uniform(rng);
  for (auto& b : blocks_) {
    b.query.init_uniform(rng);
    b.key.init_uniform(rng);
    b.value.init_uniform(rng);
  }
  score_head_.init_uniform(rng);
  weight_head_.init_uniform(rng);
}

void ToyBackbone::zero_heads() {
  score_head_.init_zero();
  weight_head_.init_zero();
}

std::vector<double> ToyBackbone::patchify(const Image& image) const {
  if (image.height != config_.image_height || image.width != config_.image_width ||
      image.channels != config_.channels) {
    fail(ErrorCode::kShape, "backbone expects " + std::to_string(config_.image_height) + "x" +
                                std::to_string(config_.image_width) + "x" +
                                std::to_string(config_.channels) + " images, got " +
                                std::to_string(image.height) + "x" + std::to_string(image.width) +
                                "x" + std::to_string(image.channels));
  }
  const std::size_t ps = config_.patch_size;
  const std::size_t grid_w = image.width / ps;
  const std::size_t pp = config_.patch_pixels();
  std::vector<double> out(patch_count() * pp);
  for (std::size_t p = 0; p < patch_count(); ++p) {
    const std::size_t py = (p / grid_w) * ps;
    const std::size_t px = (p % grid_w) * ps;
    double* dst = out.data() + p * pp;
    for (std::size_t dy = 0; dy < ps; ++dy)
      for (std::size_t dx = 0; dx < ps; ++dx)
        for (std::size_t c = 0; c < image.channels; ++c) *dst++ = image.at(py + dy, px + dx, c);
  }
  return out;
}

ToyBackbone::Outputs ToyBackbone::forward(nn::Graph& g, const Image& image) const {
  const std::size_t p = patch_count();
  nn::Var x = g.input(patchify(image), p, config_.patch_pixels());
  x = nn::relu(g, nn::affine(g, embed_, x));
  const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
  for (const auto& b : blocks_) {
    const nn::Var q = nn::affine(g, b.query, x);
    const nn::Var k = nn::affine(g, b.key, x);
    const nn::Var v = nn::affine(g, b.value, x);
    const nn::Var attn = nn::softmax_rows(g, nn::scale(g, nn::matmul_nt(g, q, k), inv_sqrt_h));
    x = nn::add(g, x, nn::matmul(g, attn, v));
  }
  const nn::Var scores = nn::reshape(g, nn::affine(g, score_head_, x), 1, p);
  const nn::Var weights = nn::sigmoid(g, nn::reshape(g, nn::affine(g, weight_head_, x), 1, p));
  return {scores, weights};
}

nn::Var ToyBackbone::quality_feature(nn::Graph& g, const Image& image) const {
  const auto out = forward(g, image);
  return nn::mul(g, out.scores, out.weights);
}

PatchScores ToyBackbone::forward(const Image& image) const {
  nn::Graph g(false);
  const auto out = forward(g, image);
  return {g.value(out.scores), g.value(out.weights)};
}

std::vector<nn::Parameter*> ToyBackbone::parameters() {
  std::vector<nn::Parameter*> out{&embed_.weight(), &embed_.bias()};
  for (auto& b : blocks_) {
    for (auto* layer : {&b.query, &b.key, &b.value}) {
      out.push_back(&layer->weight());
      out.push_back(&layer->bias());
    }
  }
  for (auto* layer : {&score_head_, &weight_head_}) {
    out.push_back(&layer->weight());
    out.push_back(&layer->bias());
  }
  return out;
}

std::vector<const nn::Parameter*> ToyBackbone::parameters() const {
  auto mut = const_cast<ToyBackbone*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

double rating(const PatchScores& ps) {
  if (ps.scores.size() != ps.weights.size()) {
    fail(ErrorCode::kShape, "rating: " + std::to_string(ps.scores.size()) + " scores but " +
                                std::to_string(ps.weights.size()) + " weights");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ps.scores.size(); ++i) {
    num += ps.scores[i] * ps.weights[i];
    den += ps.weights[i];
  }
  if (!(den > 0.0)) {
    fail(ErrorCode::kDegenerateWeights, "rating: patch weights sum to " + std::to_string(den) +
                                            "; a positive total weight is required");
  }
  return num / den;
}

QualityFeature quality_feature(const PatchScores& ps) {
  if (ps.scores.size() != ps.weights.size()) {
    fail(ErrorCode::kShape, "quality_feature: " + std::to_string(ps.scores.size()) +
                                " scores but " + std::to_string(ps.weights.size()) + " weights");
  }
  QualityFeature f(ps.scores.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = ps.scores[i] * ps.weights[i];
  return f;
}

QualityFeature load_cached_quality(const std::filesystem::path& path, const std::string& image_id) {
  return semantic::FeatureCache::load(path).get(image_id, semantic::Tag::kQuality);
}

Image synth_image(std::uint64_t seed, double mos, const BackboneConfig& config) {
  config.validate();
  // q in [0, 1] for mos in [1, 5]
  const double q = std::clamp((mos - 1.0) / 4.0, 0.0, 1.0);
  nn::Rng rng(seed);
  Image img{config.image_height, config.image_width, config.channels, {}};
  img.pixels.resize(img.height * img.width * img.channels);
  const double phase = rng.uniform(0.0, 6.283185307179586);
  const double brightness = 0.3 + 0.4 * q;
  const double noise = 0.05 + 0.25 * (1.0 - q);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double pattern = 0.1 * std::sin(0.3 * static_cast<double>(x + 2 * y) + phase);
        const double v = brightness + pattern + noise * rng.normal();
        img.pixels[(y * img.width + x) * img.channels + c] = std::clamp(v, 0.0, 1.0);
      }
  return img;
}

Image load_raw_image(const std::filesystem::path& path, const BackboneConfig& config) {
  const auto bytes = io::read_file(path);
  const std::size_t n = config.image_height * config.image_width * config.channels;
  if (bytes.size() != n * sizeof(float)) {
    fail(ErrorCode::kShape, "raw image '" + path.string() + "' has " + std::to_string(bytes.size()) +
                                " bytes, expected " + std::to_string(n * sizeof(float)) + " for " +
                                std::to_string(config.image_height) + "x" +
                                std::to_string(config.image_width) + "x" +
                                std::to_string(config.channels) + " f32");
  }
  Image img{config.image_height, config.image_width, config.channels, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    float v;
    std::memcpy(&v, bytes.data() + i * sizeof(float), sizeof(float));
    img.pixels[i] = v;
  }
  return img;
}

}  // namespace agiqa::backbone
