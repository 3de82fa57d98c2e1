#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afm/model.hpp"
#include "backbone/backbone.hpp"
#include "pipeline/manifest.hpp"
#include "semantic/feature_cache.hpp"

namespace agiqa::pipeline {

struct DataPaths {
  std::filesystem::path manifest;
  std::filesystem::path semantic_cache;  // tags a, b; optional when masked out
  std::filesystem::path quality_cache;   // tag q; only for cached quality features
};

/// Fully resolved inputs for one image.
struct Sample {
  std::string image_id;
  double mos = 0.0;
  nn::Tensor1 quality;
  nn::Tensor1 semantic;
  nn::Tensor1 coherence;
  std::optional<backbone::Image> image;

  afm::SampleInput input() const;
};

/// A manifest plus the feature caches that back it. Read-only once opened.
class Dataset {
 public:
  Dataset(DatasetManifest manifest, std::optional<semantic::FeatureCache> semantic_cache,
          std::optional<semantic::FeatureCache> quality_cache, std::filesystem::path image_root);

  static Dataset open(const DataPaths& paths);

  const DatasetManifest& manifest() const noexcept { return manifest_; }
  const std::string& name() const noexcept { return manifest_.name; }

  /// Fails with kCompatibility, listing dims, if the caches cannot feed `config`.
  void check_compatible(const afm::ModelConfig& config) const;

  /// Resolves every id before returning; any gap raises kPartialFeature
  /// naming the ids and tags involved.
  std::vector<Sample> samples(const std::vector<std::string>& ids,
                              const afm::ModelConfig& config) const;

  /// Fills cache-derived widths into `config.fusion` (quality_dim, semantic_dim).
  void infer_dims(afm::ModelConfig& config) const;

 private:
  backbone::Image load_image(const ImageRecord& record, const backbone::BackboneConfig& config) const;

  DatasetManifest manifest_;
  std::optional<semantic::FeatureCache> semantic_;
  std::optional<semantic::FeatureCache> quality_;
  std::filesystem::path image_root_;
};

}  // namespace agiqa::pipeline
