#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "metrics/metrics.hpp"
#include "oracles/oracles.hpp"
#include "pipeline/ablation.hpp"
#include "pipeline/dataset.hpp"
#include "pipeline/manifest.hpp"
#include "pipeline/split.hpp"
#include "pipeline/synth_data.hpp"
#include "pipeline/trainer.hpp"
#include "semantic/feature_cache.hpp"

using namespace agiqa;
using namespace agiqa::pipeline;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "agiqa_unit_pipeline" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SynthSpec small_spec(std::uint64_t seed, std::size_t dim = 16) {
  SynthSpec s;
  s.n = 150;
  s.dim = dim;
  s.quality_dim = 8;
  s.seed = seed;
  s.mos_signal = 0.9;
  return s;
}

Dataset synth_dataset(const std::string& name, const SynthSpec& spec) {
  const auto files = write_synth_dataset(spec, scratch(name));
  return Dataset::open({files.manifest, files.semantic_cache, files.quality_cache});
}

TrainConfig small_train(std::size_t epochs = 6) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 16;
  c.adam.lr = 1e-3;
  c.seed = 17;
  c.model.fusion.d = 12;
  c.model.fusion.dropout = 0.1;
  return c;
}

DatasetManifest numbered_manifest(std::size_t n) {
  DatasetManifest m;
  m.name = "m";
  for (std::size_t i = 0; i < n; ++i) m.records.push_back({"img" + std::to_string(i), "x", 1.0 + i});
  return m;
}

}  // namespace

TEST(Manifest, ParsesRecords) {
  const auto m = parse_manifest("image_id,source,mos\na,imgs/a.raw,3.5\n\nb, synth:4 ,1\n", "set");
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[0].image_id, "a");
  EXPECT_EQ(m.records[0].source, "imgs/a.raw");
  EXPECT_EQ(m.records[0].mos, 3.5);
  EXPECT_EQ(m.records[1].source, "synth:4");
  EXPECT_EQ(m.find("b").mos, 1.0);
  EXPECT_EQ(code_of([&] { m.find("c"); }), ErrorCode::kNotFound);
}

TEST(Manifest, ErrorsCiteTheLine) {
  const std::string head = "image_id,source,mos\n";
  EXPECT_NE(message_of([] { parse_manifest("id,src,mos\n", "set"); }).find("line 1"), std::string::npos);
  const auto bad_mos = message_of([&] { parse_manifest(head + "a,x,1\nb,x,high\n", "set"); });
  EXPECT_NE(bad_mos.find("line 3"), std::string::npos);
  EXPECT_NE(bad_mos.find("high"), std::string::npos);
  EXPECT_NE(message_of([&] { parse_manifest(head + "a,x\n", "set"); }).find("line 2"), std::string::npos);
  EXPECT_NE(message_of([&] { parse_manifest(head + "a,x,1\na,y,2\n", "set"); }).find("duplicate"),
            std::string::npos);
  EXPECT_EQ(code_of([&] { parse_manifest(head + ",x,1\n", "set"); }), ErrorCode::kManifest);
}

TEST(Manifest, FormatRoundTrip) {
  const auto m = numbered_manifest(5);
  const auto back = parse_manifest(format_manifest(m), "m");
  ASSERT_EQ(back.records.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.records[i].image_id, m.records[i].image_id);
    EXPECT_EQ(back.records[i].mos, m.records[i].mos);
  }
}

TEST(Split, SizesFollowSeventyTenTwenty) {
  const auto ten = split_sizes(10);
  EXPECT_EQ(std::tie(ten.train, ten.val, ten.test), std::make_tuple(7u, 1u, 2u));
  const auto big = split_sizes(2982);
  EXPECT_EQ(std::tie(big.train, big.val, big.test), std::make_tuple(2087u, 298u, 597u));
  for (std::size_t n = 10; n < 400; ++n) {
    const auto s = split_sizes(n);
    EXPECT_EQ(s.train + s.val + s.test, n);
    EXPECT_GE(s.val, 1u);
  }
  EXPECT_EQ(code_of([] { split(numbered_manifest(9), 1); }), ErrorCode::kTooSmall);
}

TEST(Split, DisjointCoverAndSeeded) {
  const auto m = numbered_manifest(2982);
  const auto a = split(m, 5);
  const auto b = split(m, 5);
  const auto c = split(m, 6);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, c.train);
  EXPECT_EQ(a.train.size(), 2087u);
  EXPECT_EQ(a.val.size(), 298u);
  EXPECT_EQ(a.test.size(), 597u);
  std::set<std::string> all(a.train.begin(), a.train.end());
  all.insert(a.val.begin(), a.val.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 2982u);
  EXPECT_EQ(a.seed, 5u);
  EXPECT_EQ(&a.part(SplitPart::kVal), &a.val);
  EXPECT_EQ(parse_split_part("test"), SplitPart::kTest);
  EXPECT_EQ(code_of([] { parse_split_part("holdout"); }), ErrorCode::kConfig);
}

TEST(SynthData, ManifestIsSeededAndInRange) {
  auto spec = small_spec(3);
  const auto a = synth_manifest(spec);
  EXPECT_EQ(a.records.size(), 150u);
  EXPECT_EQ(a.records[0].image_id, "synth_0000");
  EXPECT_EQ(a.records[0].source.rfind("synth:", 0), 0u);
  for (const auto& r : a.records) {
    EXPECT_GE(r.mos, spec.mos_min);
    EXPECT_LE(r.mos, spec.mos_max);
    EXPECT_NEAR(r.mos * 100.0, std::round(r.mos * 100.0), 1e-9);
  }
  const auto b = synth_manifest(spec);
  EXPECT_EQ(format_manifest(a), format_manifest(b));
  spec.seed = 4;
  EXPECT_NE(format_manifest(a), format_manifest(synth_manifest(spec)));
  spec.n = 9;
  EXPECT_NE(code_of([&] { spec.validate(); }), static_cast<ErrorCode>(0));
}

TEST(SynthData, FilesCarryEveryTag) {
  const auto files = write_synth_dataset(small_spec(3), scratch("files"));
  EXPECT_EQ(files.manifest.filename(), "synth.csv");
  const auto sem = semantic::FeatureCache::load(files.semantic_cache);
  const auto qual = semantic::FeatureCache::load(files.quality_cache);
  EXPECT_EQ(sem.hidden_size(), 16u);
  EXPECT_EQ(qual.hidden_size(), 8u);
  EXPECT_EQ(sem.size(), 300u);
  EXPECT_EQ(qual.size(), 150u);
  EXPECT_TRUE(fs::exists(files.train_config));
}

TEST(Training, DeterministicForIdenticalSeed) {
  const auto ds = synth_dataset("det", small_spec(1));
  const auto a = train(small_train(3), ds);
  const auto b = train(small_train(3), ds);
  EXPECT_EQ(a.checkpoint, b.checkpoint);
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t i = 0; i < a.epochs.size(); ++i) EXPECT_EQ(a.epochs[i].train_loss, b.epochs[i].train_loss);
  EXPECT_EQ(a.log_text(), b.log_text());
  auto other = small_train(3);
  other.seed = 18;
  EXPECT_NE(train(other, ds).checkpoint, a.checkpoint);
}

TEST(Training, LearnsSeparableTaskAndSelectsBestEpoch) {
  const auto ds = synth_dataset("learn", small_spec(2));
  const auto run = train(small_train(8), ds);
  ASSERT_EQ(run.epochs.size(), 8u);
  EXPECT_LT(run.epochs.back().train_loss, run.epochs.front().train_loss);
  ASSERT_TRUE(run.selected_val.has_value());
  EXPECT_GE(run.selected_val->srcc, 0.9);
  for (const auto& e : run.epochs) {
    if (e.val) EXPECT_GE(run.selected_val->selection_score(), e.val->selection_score());
  }
  EXPECT_EQ(run.train_size + run.val_size + run.test_size, 150u);

  const auto on_train = evaluate(run.checkpoint, ds, SplitPart::kTrain);
  const auto on_val = evaluate(run.checkpoint, ds, SplitPart::kVal);
  EXPECT_GE(on_train.srcc, on_val.srcc - 0.05);
  EXPECT_EQ(on_val.srcc, run.selected_val->srcc);
  EXPECT_EQ(on_train.n, run.train_size);
}

TEST(Training, RejectsInvalidConfig) {
  const auto ds = synth_dataset("invalid", small_spec(1));
  auto c = small_train();
  c.epochs = 0;
  EXPECT_EQ(code_of([&] { train(c, ds); }), ErrorCode::kConfig);
  c = small_train();
  c.batch_size = 0;
  EXPECT_EQ(code_of([&] { train(c, ds); }), ErrorCode::kConfig);
  c = small_train();
  c.adam.lr = 0.0;
  EXPECT_EQ(code_of([&] { train(c, ds); }), ErrorCode::kConfig);
}

TEST(Training, MissingFeatureFailsBeforeTraining) {
  const auto dir = scratch("partial");
  const auto files = write_synth_dataset(small_spec(1), dir);
  auto entries = semantic::cache_read(files.semantic_cache);
  entries.erase(std::find_if(entries.begin(), entries.end(), [](const semantic::CacheEntry& e) {
    return e.image_id == "synth_0042" && e.tag == semantic::Tag::kCoherence;
  }));
  semantic::cache_write(files.semantic_cache, entries);
  const auto ds = Dataset::open({files.manifest, files.semantic_cache, files.quality_cache});
  const auto msg = message_of([&] { train(small_train(), ds); });
  EXPECT_NE(msg.find("synth_0042"), std::string::npos);
  EXPECT_EQ(code_of([&] { train(small_train(), ds); }), ErrorCode::kPartialFeature);
  auto only_a = small_train(1);
  only_a.model.fusion.mask = afm::ComponentMask::parse("qa");
  EXPECT_NO_THROW(train(only_a, ds));
}

TEST(Evaluation, EmptySetIsRejected) {
  afm::ModelConfig m;
  m.fusion.d = 4;
  m.fusion.quality_dim = 2;
  m.fusion.semantic_dim = 2;
  const afm::IqaModel model(m);
  EXPECT_EQ(code_of([&] { evaluate_model(model, {}); }), ErrorCode::kEmptyInput);
}

TEST(Evaluation, HandSetLinearModelGivesUnitPlcc) {
  // Quality feature carries the MOS in slot 0; an identity block plus a
  // unit head reproduces it exactly.
  const auto dir = scratch("oracle");
  DatasetManifest m;
  m.name = "lin";
  std::vector<semantic::CacheEntry> q;
  for (int i = 0; i < 40; ++i) {
    const double mos = 1.0 + 0.25 * (i % 17);
    m.records.push_back({"i" + std::to_string(i), "synth:1", mos});
    q.push_back({"i" + std::to_string(i), semantic::Tag::kQuality,
                 {static_cast<float>(mos), static_cast<float>(i % 3), 0.5f}});
  }
  write_manifest(dir / "lin.csv", m);
  semantic::cache_write(dir / "q.mafc", q);
  const auto ds = Dataset::open({dir / "lin.csv", {}, dir / "q.mafc"});

  afm::ModelConfig mc;
  mc.fusion.mask = afm::ComponentMask::parse("q");
  mc.fusion.d = 3;
  mc.fusion.quality_dim = 3;
  afm::IqaModel model(mc);
  model.fusion().block(afm::Component::kQuality).fc().init_identity();
  model.fusion().head().init_zero();
  model.fusion().head().weight().value[0] = 1.0;
  const auto ckpt = afm::encode_checkpoint(model, {{"train.seed", "3"}});
  for (auto part : {SplitPart::kTrain, SplitPart::kTest}) {
    const auto r = evaluate(ckpt, ds, part);
    EXPECT_NEAR(r.plcc, 1.0, 1e-9);
    EXPECT_NEAR(r.rmse, 0.0, 1e-12);
  }
  const auto no_seed = afm::encode_checkpoint(model, {});
  EXPECT_EQ(code_of([&] { evaluate(no_seed, ds, SplitPart::kTest); }), ErrorCode::kFormat);
}

TEST(CrossDataset, SameGeneratorTransfersAndSelfMatchesTest) {
  const auto a = synth_dataset("cross_a", small_spec(11));
  const auto b = synth_dataset("cross_b", small_spec(12));
  const auto run = train(small_train(8), a);
  const auto in_domain = evaluate(run.checkpoint, a, SplitPart::kTest);
  const auto transfer = cross_evaluate(run.checkpoint, b);
  EXPECT_NEAR(transfer.srcc, in_domain.srcc, 0.1);
  const auto self = cross_evaluate(run.checkpoint, a);
  EXPECT_EQ(self.srcc, in_domain.srcc);
  EXPECT_EQ(self.rmse, in_domain.rmse);

  const auto wide = synth_dataset("cross_wide", small_spec(12, 24));
  const auto msg = message_of([&] { cross_evaluate(run.checkpoint, wide); });
  EXPECT_EQ(code_of([&] { cross_evaluate(run.checkpoint, wide); }), ErrorCode::kCompatibility);
  EXPECT_NE(msg.find("16"), std::string::npos);
  EXPECT_NE(msg.find("24"), std::string::npos);
}

TEST(Ablation, EightRowsWithGateOnlyForMultiFeatureMoe) {
  const auto ds = synth_dataset("ablate", small_spec(5));
  const auto table = ablate(small_train(2), ds);
  ASSERT_EQ(table.rows.size(), 8u);
  const std::vector<std::string> labels{"q", "a", "b", "qa", "qb", "ab", "qab", "qab (concat)"};
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(table.rows[i].label(), labels[i]);
    EXPECT_EQ(table.rows[i].has_gate, i >= 3 && i < 7) << labels[i];
    EXPECT_EQ(table.rows[i].moe, i < 7);
    EXPECT_EQ(table.rows[i].test.n, table.rows[0].test.n);
  }
  const auto text = table.format_table();
  EXPECT_NE(text.find("SRCC↑"), std::string::npos);
  EXPECT_NE(text.find("qab (concat)"), std::string::npos);
  const auto recs = table.records();
  EXPECT_EQ(std::count(recs.begin(), recs.end(), '\n'), 8);
}
