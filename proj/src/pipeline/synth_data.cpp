#include "pipeline/synth_data.hpp"

#include <cmath>
#include <cstdio>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "numerics/rng.hpp"
#include "semantic/synth.hpp"

namespace agiqa::pipeline {

void SynthSpec::validate() const {
  if (n < 10) fail(ErrorCode::kConfig, "synthetic dataset needs n >= 10, got " + std::to_string(n));
  if (!(mos_max > mos_min)) fail(ErrorCode::kConfig, "mos_max must exceed mos_min");
  if (name.empty() || name.size() > 200) fail(ErrorCode::kConfig, "dataset name must be 1..200 bytes");
}

DatasetManifest synth_manifest(const SynthSpec& spec) {
  spec.validate();
  DatasetManifest m;
  m.name = spec.name;
  nn::Rng mos_rng(nn::derive_seed(spec.seed, "mos"));
  nn::Rng image_rng(nn::derive_seed(spec.seed, "image"));
  char id[256];
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::snprintf(id, sizeof id, "%s_%04zu", spec.name.c_str(), i);
    const double mos = std::round(mos_rng.uniform(spec.mos_min, spec.mos_max) * 100.0) / 100.0;
    m.records.push_back({id, "synth:" + std::to_string(image_rng.next_u64()), mos});
  }
  return m;
}

SynthFiles write_synth_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  const auto manifest = synth_manifest(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<semantic::LabeledId> labeled;
  for (const auto& r : manifest.records) labeled.push_back({r.image_id, r.mos});

  SynthFiles files;
  files.manifest = out_dir / (spec.name + ".csv");
  files.semantic_cache = out_dir / "semantic.mafc";
  files.quality_cache = out_dir / "quality.mafc";
  files.train_config = out_dir / "train.ini";

  write_manifest(files.manifest, manifest);
  const semantic::Tag semantic_tags[] = {semantic::Tag::kSemantic, semantic::Tag::kCoherence};
  files.semantic_crc = semantic::cache_write(
      files.semantic_cache,
      semantic::synth_features(labeled, semantic_tags, spec.dim, spec.seed, spec.mos_signal));
  const semantic::Tag quality_tags[] = {semantic::Tag::kQuality};
  files.quality_crc = semantic::cache_write(
      files.quality_cache,
      semantic::synth_features(labeled, quality_tags, spec.quality_dim, spec.seed, spec.mos_signal));

  const std::string ini =
      "# Generated by gen-synth (n=" + std::to_string(spec.n) + ", dim=" + std::to_string(spec.dim) +
      ", mos_signal=" + text::format_double(spec.mos_signal) + ", seed=" + std::to_string(spec.seed) +
      ")\n"
      "[data]\n"
      "manifest = " + spec.name + ".csv\n"
      "semantic_cache = semantic.mafc\n"
      "quality_cache = quality.mafc\n"
      "\n"
      "[train]\n"
      "seed = " + std::to_string(spec.seed) + "\n"
      "\n"
      "[output]\n"
      "dir = run\n";
  io::write_text_atomic(files.train_config, ini);
  return files;
}

}  // namespace agiqa::pipeline
