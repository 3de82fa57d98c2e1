#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pipeline/manifest.hpp"

namespace agiqa::pipeline {

struct SynthSpec {
  std::size_t n = 500;
  std::size_t dim = 64;           // semantic feature width (tags a, b)
  std::size_t quality_dim = 49;   // cached quality feature width (tag q)
  std::uint64_t seed = 0;
  double mos_signal = 0.9;
  double mos_min = 1.0;
  double mos_max = 5.0;
  std::string name = "synth";

  void validate() const;
};

struct SynthFiles {
  std::filesystem::path manifest;
  std::filesystem::path semantic_cache;
  std::filesystem::path quality_cache;
  std::filesystem::path train_config;
  std::uint32_t semantic_crc = 0;
  std::uint32_t quality_crc = 0;
};

/// Ids `<name>_0000...`, MOS uniform on [mos_min, mos_max] rounded to 0.01,
/// sources `synth:<image seed>` so the toy backbone can render each image.
DatasetManifest synth_manifest(const SynthSpec& spec);

/// Writes <name>.csv, semantic.mafc, quality.mafc and a train.ini that
/// points at them.
SynthFiles write_synth_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace agiqa::pipeline
