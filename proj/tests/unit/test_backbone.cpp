#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "backbone/backbone.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "oracles/oracles.hpp"
#include "semantic/feature_cache.hpp"

using namespace agiqa;
using backbone::BackboneConfig;
using backbone::Image;
using backbone::PatchScores;
using backbone::ToyBackbone;

namespace {

BackboneConfig small_config(std::size_t depth = 2) {
  BackboneConfig c;
  c.image_height = 16;
  c.image_width = 16;
  c.channels = 1;
  c.patch_size = 8;
  c.hidden = 8;
  c.depth = depth;
  return c;
}

Image random_image(const BackboneConfig& c, std::uint64_t seed) {
  nn::Rng rng(seed);
  Image img{c.image_height, c.image_width, c.channels, {}};
  img.pixels.resize(c.image_height * c.image_width * c.channels);
  for (double& v : img.pixels) v = rng.uniform();
  return img;
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "agiqa_unit_backbone";
  std::filesystem::create_directories(dir);
  return dir / name;
}

PatchScores random_scores(nn::Rng& rng, std::size_t p) {
  PatchScores ps;
  for (std::size_t i = 0; i < p; ++i) {
    ps.scores.push_back(rng.uniform(-3, 3));
    ps.weights.push_back(rng.uniform(0.01, 1));
  }
  return ps;
}

}  // namespace

TEST(Backbone, PatchCountFromShape) {
  ToyBackbone bb(small_config());
  nn::Rng rng(1);
  bb.init(rng);
  const auto out = bb.forward(random_image(small_config(), 2));
  EXPECT_EQ(out.scores.size(), 4u);
  EXPECT_EQ(out.weights.size(), 4u);
  EXPECT_EQ(BackboneConfig{}.patch_count(), 49u);
}

TEST(Backbone, ZeroImageZeroHeadsGivesEqualScoresAndHalfWeights) {
  ToyBackbone bb(small_config());
  nn::Rng rng(1);
  bb.init(rng);
  bb.zero_heads();
  Image img{16, 16, 1, std::vector<double>(256, 0.0)};
  const auto out = bb.forward(img);
  for (double s : out.scores) EXPECT_EQ(s, out.scores[0]);
  for (double w : out.weights) EXPECT_EQ(w, 0.5);
}

TEST(Backbone, WeightsStrictlyInsideUnitInterval) {
  ToyBackbone bb(small_config());
  nn::Rng rng(3);
  bb.init(rng);
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (double w : bb.forward(random_image(small_config(), s)).weights) {
      EXPECT_GT(w, 0.0);
      EXPECT_LT(w, 1.0);
    }
  }
}

TEST(Backbone, WithoutMixingPatchRowSwapPermutesOutputs) {
  const auto cfg = small_config(0);
  ToyBackbone bb(cfg);
  nn::Rng rng(4);
  bb.init(rng);
  const Image img = random_image(cfg, 5);
  Image swapped = img;
  // Exchange the top and bottom rows of patches.
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 16; ++x)
      std::swap(swapped.pixels[y * 16 + x], swapped.pixels[(y + 8) * 16 + x]);
  const auto a = bb.forward(img);
  const auto b = bb.forward(swapped);
  const std::size_t perm[4] = {2, 3, 0, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b.scores[i], a.scores[perm[i]]);
    EXPECT_EQ(b.weights[i], a.weights[perm[i]]);
  }
}

TEST(Backbone, EvalForwardIsDeterministic) {
  ToyBackbone bb(small_config());
  nn::Rng rng(6);
  bb.init(rng);
  const Image img = random_image(small_config(), 7);
  const auto a = bb.forward(img);
  const auto b = bb.forward(img);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.weights, b.weights);
}

TEST(Backbone, NonDivisibleImageSuggestsPadOrCrop) {
  auto cfg = small_config();
  cfg.image_width = 20;
  try {
    ToyBackbone bb(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
    EXPECT_NE(std::string(e.what()).find("pad or crop"), std::string::npos);
  }
}

TEST(Backbone, WrongImageShapeRejected) {
  ToyBackbone bb(small_config());
  Image img{8, 8, 1, std::vector<double>(64, 0.0)};
  EXPECT_THROW(bb.forward(img), Error);
}

TEST(Backbone, QualityFeatureGradientsMatchFiniteDifferences) {
  const auto cfg = small_config();
  ToyBackbone bb(cfg);
  nn::Rng rng(8);
  bb.init(rng);
  const Image img = random_image(cfg, 9);
  const std::vector<double> target{0.3, -0.1, 0.2, 0.5};
  auto loss_of = [&](nn::Graph& g) { return nn::mse_loss(g, bb.quality_feature(g, img), target); };
  nn::Graph g;
  const auto loss = loss_of(g);
  for (auto* p : bb.parameters()) p->zero_grad();
  g.backward(loss);
  const auto check = oracle::finite_difference(bb.parameters(), [&] {
    nn::Graph e(false);
    return e.scalar(loss_of(e));
  });
  EXPECT_LT(check.max_rel_error, 1e-3);
}

TEST(Backbone, RatingGradientsMatchFiniteDifferences) {
  const auto cfg = small_config();
  ToyBackbone bb(cfg);
  nn::Rng rng(10);
  bb.init(rng);
  const Image img = random_image(cfg, 11);

  // d rating = sum_i (W_i / sum W) dS_i + ((S_i - rating) / sum W) dW_i, so a
  // graph with those fixed coefficients has the rating's gradient.
  const auto ps = bb.forward(img);
  const double r = backbone::rating(ps);
  double wsum = 0.0;
  for (double w : ps.weights) wsum += w;
  std::vector<double> cs, cw;
  for (std::size_t i = 0; i < ps.scores.size(); ++i) {
    cs.push_back(ps.weights[i] / wsum);
    cw.push_back((ps.scores[i] - r) / wsum);
  }
  nn::Graph g;
  const auto out = bb.forward(g, img);
  const auto lin = nn::add(g, nn::matmul_nt(g, out.scores, g.input(cs)),
                           nn::matmul_nt(g, out.weights, g.input(cw)));
  for (auto* p : bb.parameters()) p->zero_grad();
  g.backward(lin);
  const auto check = oracle::finite_difference(bb.parameters(), [&] { return backbone::rating(bb.forward(img)); });
  EXPECT_LT(check.max_rel_error, 1e-3);
}

TEST(Rating, Examples) {
  EXPECT_EQ(backbone::rating({{2, 4}, {1, 1}}), 3.0);
  EXPECT_EQ(backbone::rating({{1, 2, 3}, {0, 0, 1}}), 3.0);
}

TEST(Rating, ZeroWeightsAreDegenerate) {
  try {
    backbone::rating({{1, 2}, {0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateWeights);
  }
}

TEST(Rating, RandomMatchesLoopOracleAndStaysInRange) {
  nn::Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto ps = random_scores(rng, 1 + rng.below(60));
    const double r = backbone::rating(ps);
    EXPECT_NEAR(r, oracle::weighted_rating(ps.scores, ps.weights), 1e-12);
    EXPECT_GE(r, *std::min_element(ps.scores.begin(), ps.scores.end()) - 1e-12);
    EXPECT_LE(r, *std::max_element(ps.scores.begin(), ps.scores.end()) + 1e-12);
  }
}

TEST(Rating, WeightScaleInvariance) {
  nn::Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    auto ps = random_scores(rng, 10);
    const double r = backbone::rating(ps);
    for (double c : {0.5, 2.0, 10.0}) {
      PatchScores scaled = ps;
      for (double& w : scaled.weights) w *= c;
      EXPECT_NEAR(backbone::rating(scaled), r, 1e-12);
    }
  }
}

TEST(Rating, EqualWeightsGiveMean) {
  nn::Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    auto ps = random_scores(rng, 17);
    std::fill(ps.weights.begin(), ps.weights.end(), rng.uniform(0.1, 2));
    EXPECT_NEAR(backbone::rating(ps), oracle::mean(ps.scores), 1e-12);
  }
}

TEST(QualityFeature, Examples) {
  EXPECT_EQ(backbone::quality_feature({{1, 2}, {1, 0}}), (std::vector<double>{1, 0}));
  const std::vector<double> s{0.3, -2, 5};
  EXPECT_EQ(backbone::quality_feature({s, {1, 1, 1}}), s);
  EXPECT_THROW(backbone::quality_feature({{1, 2}, {1}}), Error);
}

TEST(QualityFeature, MatchesElementwiseOracleExactly) {
  nn::Rng rng(15);
  for (int t = 0; t < 100; ++t) {
    const auto ps = random_scores(rng, 49);
    EXPECT_EQ(backbone::quality_feature(ps), oracle::elementwise_product(ps.scores, ps.weights));
  }
}

TEST(QualityFeature, BilinearInWeights) {
  nn::Rng rng(16);
  const auto a = random_scores(rng, 20);
  const auto b = random_scores(rng, 20);
  PatchScores sum{a.scores, {}};
  for (std::size_t i = 0; i < 20; ++i) sum.weights.push_back(a.weights[i] + b.weights[i]);
  const auto f_sum = backbone::quality_feature(sum);
  const auto f_a = backbone::quality_feature(a);
  const auto f_b = backbone::quality_feature({a.scores, b.weights});
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(f_sum[i], f_a[i] + f_b[i], 1e-12);
}

TEST(CachedQuality, RoundTripsBitExact) {
  const auto path = temp_path("q_small.mafc");
  semantic::cache_write(path, std::vector<semantic::CacheEntry>{{"img", semantic::Tag::kQuality, {0.5f, 0.25f}}});
  EXPECT_EQ(backbone::load_cached_quality(path, "img"), (std::vector<double>{0.5, 0.25}));
  try {
    backbone::load_cached_quality(path, "imh");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find("'img'"), std::string::npos);
  }
}

TEST(CachedQuality, ThousandRandomVectorsRoundTrip) {
  nn::Rng rng(17);
  std::vector<semantic::CacheEntry> entries;
  for (int i = 0; i < 1000; ++i) {
    semantic::CacheEntry e{"q" + std::to_string(i), semantic::Tag::kQuality, std::vector<float>(49)};
    for (float& v : e.vec) v = static_cast<float>(rng.normal());
    entries.push_back(std::move(e));
  }
  const auto path = temp_path("q_fuzz.mafc");
  semantic::cache_write(path, entries);
  const auto cache = semantic::FeatureCache::load(path);
  for (const auto& e : entries) {
    const auto got = cache.get(e.image_id, semantic::Tag::kQuality);
    ASSERT_EQ(got.size(), e.vec.size());
    for (std::size_t j = 0; j < got.size(); ++j) ASSERT_EQ(static_cast<float>(got[j]), e.vec[j]);
  }
}

TEST(SynthImage, DeterministicAndInRange) {
  const BackboneConfig cfg;
  const auto a = backbone::synth_image(42, 3.0, cfg);
  const auto b = backbone::synth_image(42, 3.0, cfg);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.pixels.size(), 56u * 56u);
  for (double v : a.pixels) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  // Higher MOS renders brighter on average.
  EXPECT_GT(oracle::mean(backbone::synth_image(42, 5.0, cfg).pixels),
            oracle::mean(backbone::synth_image(42, 1.0, cfg).pixels));
}

TEST(RawImage, LoadsLittleEndianFloatDump) {
  const auto cfg = small_config();
  std::vector<float> raw(256);
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<float>(i) / 256.0f;
  const auto path = temp_path("img.f32");
  io::write_file_atomic(path, {reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size() * 4});
  const auto img = backbone::load_raw_image(path, cfg);
  EXPECT_EQ(img.pixels[17], static_cast<double>(raw[17]));
  auto wrong = cfg;
  wrong.image_height = 8;
  EXPECT_THROW(backbone::load_raw_image(path, wrong), Error);
}
