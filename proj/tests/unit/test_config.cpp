#include <gtest/gtest.h>

#include <filesystem>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "pipeline/config.hpp"

using namespace agiqa;
using pipeline::Config;

namespace {

std::string config_error(const std::string& text) {
  try {
    Config c;
    c.parse(text, "run.ini");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "parse accepted: " << text;
  return {};
}

}  // namespace

TEST(ConfigParse, SectionsCommentsAndDefaults) {
  Config c;
  c.parse("# comment\n[train]\nseed = 9\n; other comment\nepochs=3\n\n[model]\nmask = q+a\n", "run.ini");
  EXPECT_EQ(c.get_u64("train.seed"), 9u);
  EXPECT_EQ(c.get_u64("train.epochs"), 3u);
  EXPECT_EQ(c.get("model.mask"), "q+a");
  EXPECT_EQ(c.get_u64("train.batch_size"), 16u);
  EXPECT_EQ(c.get_double("train.lr"), 1e-4);
  EXPECT_EQ(c.get_u64("model.d"), 784u);
  EXPECT_TRUE(c.get_bool("model.moe"));
}

TEST(ConfigParse, ErrorsCiteSourceAndLine) {
  EXPECT_NE(config_error("[train]\nseed = 1\nepochs = many\n").find("run.ini:3"), std::string::npos);
  EXPECT_NE(config_error("[nowhere]\n").find("run.ini:1"), std::string::npos);
  EXPECT_NE(config_error("[train]\n\nbogus = 1\n").find("run.ini:3"), std::string::npos);
  EXPECT_NE(config_error("seed = 1\n").find("before any [section]"), std::string::npos);
  EXPECT_NE(config_error("[train\n").find("unterminated"), std::string::npos);
  EXPECT_NE(config_error("[model]\nmask = qz\n").find("run.ini:2"), std::string::npos);
  EXPECT_NE(config_error("[train]\njust words\n").find("key = value"), std::string::npos);
}

TEST(ConfigParse, MissingSeedIsAnErrorNotAClockSeed) {
  Config c;
  c.parse("[train]\nepochs = 2\n", "run.ini");
  try {
    (void)c.get_u64("train.seed");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("clock"), std::string::npos);
  }
}

TEST(ConfigResolve, BareKeysAndAmbiguity) {
  EXPECT_EQ(Config::resolve("epochs"), "train.epochs");
  EXPECT_EQ(Config::resolve("mask"), "model.mask");
  EXPECT_EQ(Config::resolve("model.d"), "model.d");
  const std::string_view train_first[] = {"train"};
  const std::string_view synth_first[] = {"synth"};
  EXPECT_EQ(Config::resolve("seed", train_first), "train.seed");
  EXPECT_EQ(Config::resolve("seed", synth_first), "synth.seed");
  try {
    Config::resolve("seed");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ambiguous"), std::string::npos);
  }
  EXPECT_THROW(Config::resolve("nonsense"), Error);
  EXPECT_THROW(Config::resolve("train.nonsense"), Error);
}

TEST(ConfigOverrides, LaterValuesWinAndAreChecked) {
  Config c;
  c.parse("[train]\nseed = 1\nepochs = 30\n", "run.ini");
  const std::string_view pref[] = {"train"};
  c.set("epochs", "4", pref);
  c.set("seed", "77", pref);
  EXPECT_EQ(c.get_u64("train.epochs"), 4u);
  EXPECT_EQ(c.get_u64("train.seed"), 77u);
  EXPECT_THROW(c.set("epochs", "-1", pref), Error);
  EXPECT_THROW(c.set("moe", "perhaps", pref), Error);
}

TEST(ConfigPaths, RelativeValuesResolveAgainstTheFile) {
  const auto dir = std::filesystem::temp_directory_path() / "agiqa_unit_config";
  std::filesystem::create_directories(dir);
  io::write_text_atomic(dir / "run.ini", "[data]\nmanifest = sets/m.csv\nsemantic_cache = /abs/s.mafc\n");
  Config c;
  c.load_file(dir / "run.ini");
  EXPECT_EQ(c.get_path("data.manifest"), (dir / "sets/m.csv").lexically_normal());
  EXPECT_EQ(c.get_path("data.semantic_cache"), "/abs/s.mafc");
  EXPECT_EQ(c.get_path("data.quality_cache"), "");
  const auto paths = pipeline::data_paths(c, "data");
  EXPECT_EQ(paths.manifest, (dir / "sets/m.csv").lexically_normal());

  Config missing;
  EXPECT_THROW(missing.load_file(dir / "absent.ini"), Error);
}

TEST(ConfigEcho, ReparsesToTheSameValues) {
  Config c;
  c.parse("[train]\nseed = 5\nlr = 0.003\n[model]\nd = 32\nmoe = false\n", "run.ini");
  const auto text = c.echo();
  EXPECT_NE(text.find("[train]"), std::string::npos);
  EXPECT_NE(text.find("lr = 0.003"), std::string::npos);
  Config again;
  again.parse(text, "echo.ini");
  EXPECT_EQ(again.echo(), text);
  EXPECT_EQ(again.get_u64("model.d"), 32u);
  EXPECT_FALSE(again.get_bool("model.moe"));
}

TEST(ConfigTrain, BuildsTrainingConfig) {
  Config c;
  c.parse("[train]\nseed = 5\nepochs = 2\nbatch_size = 4\n[model]\nd = 8\nmask = ab\nsource = toy-backbone\n",
          "run.ini");
  const auto t = pipeline::train_config(c);
  EXPECT_EQ(t.seed, 5u);
  EXPECT_EQ(t.epochs, 2u);
  EXPECT_EQ(t.batch_size, 4u);
  EXPECT_EQ(t.model.fusion.d, 8u);
  EXPECT_EQ(t.model.fusion.mask.to_string(), "ab");
  EXPECT_EQ(t.model.source, afm::FeatureSource::kToyBackbone);
  EXPECT_EQ(t.model.fusion.quality_dim, 49u);
  EXPECT_EQ(t.to_echo().at("train.seed"), "5");

  Config zero;
  zero.parse("[train]\nseed = 1\nepochs = 0\n", "run.ini");
  try {
    pipeline::train_config(zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("epochs"), std::string::npos);
  }
}
