#include "pipeline/dataset.hpp"

#include <unordered_map>

#include "common/error.hpp"
#include "common/text.hpp"

namespace agiqa::pipeline {

using afm::Component;
using semantic::Tag;

afm::SampleInput Sample::input() const {
  afm::SampleInput in;
  in.quality = quality;
  in.image = image ? &*image : nullptr;
  in.semantic = semantic;
  in.coherence = coherence;
  return in;
}

Dataset::Dataset(DatasetManifest manifest, std::optional<semantic::FeatureCache> semantic_cache,
                 std::optional<semantic::FeatureCache> quality_cache,
                 std::filesystem::path image_root)
    : manifest_(std::move(manifest)),
      semantic_(std::move(semantic_cache)),
      quality_(std::move(quality_cache)),
      image_root_(std::move(image_root)) {}

Dataset Dataset::open(const DataPaths& paths) {
  if (paths.manifest.empty()) fail(ErrorCode::kConfig, "no manifest path configured");
  auto manifest = load_manifest(paths.manifest);
  std::optional<semantic::FeatureCache> sem, qual;
  if (!paths.semantic_cache.empty()) sem = semantic::FeatureCache::load(paths.semantic_cache);
  if (!paths.quality_cache.empty()) qual = semantic::FeatureCache::load(paths.quality_cache);
  return Dataset(std::move(manifest), std::move(sem), std::move(qual),
                 paths.manifest.has_parent_path() ? paths.manifest.parent_path()
                                                  : std::filesystem::path("."));
}

void Dataset::infer_dims(afm::ModelConfig& config) const {
  if (quality_ && config.source == afm::FeatureSource::kCached) {
    config.fusion.quality_dim = quality_->hidden_size();
  }
  if (semantic_) config.fusion.semantic_dim = semantic_->hidden_size();
}

void Dataset::check_compatible(const afm::ModelConfig& config) const {
  const auto& mask = config.fusion.mask;
  std::string problems;
  if (mask.has(Component::kQuality) && config.source == afm::FeatureSource::kCached) {
    if (!quality_) {
      problems += " model needs quality features (dim " + std::to_string(config.fusion.quality_dim) +
                  ") but no quality cache is configured;";
    } else if (quality_->hidden_size() != config.fusion.quality_dim) {
      problems += " quality dim: model " + std::to_string(config.fusion.quality_dim) + ", cache " +
                  std::to_string(quality_->hidden_size()) + ";";
    }
  }
  if (mask.has(Component::kSemantic) || mask.has(Component::kCoherence)) {
    if (!semantic_) {
      problems += " model needs semantic features (dim " +
                  std::to_string(config.fusion.semantic_dim) + ") but no semantic cache is configured;";
    } else if (semantic_->hidden_size() != config.fusion.semantic_dim) {
      problems += " semantic dim: model " + std::to_string(config.fusion.semantic_dim) + ", cache " +
                  std::to_string(semantic_->hidden_size()) + ";";
    }
  }
  if (!problems.empty()) {
    problems.pop_back();
    fail(ErrorCode::kCompatibility, "dataset '" + name() + "' is incompatible with the model:" + problems);
  }
}

backbone::Image Dataset::load_image(const ImageRecord& record,
                                    const backbone::BackboneConfig& config) const {
  constexpr std::string_view kSynth = "synth:";
  if (record.source.rfind(kSynth, 0) == 0) {
    const auto seed = text::parse_u64(std::string_view(record.source).substr(kSynth.size()),
                                      "synthetic image source of '" + record.image_id + "'");
    return backbone::synth_image(seed, record.mos, config);
  }
  std::filesystem::path p(record.source);
  if (p.is_relative()) p = image_root_ / p;
  return backbone::load_raw_image(p, config);
}

std::vector<Sample> Dataset::samples(const std::vector<std::string>& ids,
                                     const afm::ModelConfig& config) const {
  check_compatible(config);
  const auto& mask = config.fusion.mask;
  std::unordered_map<std::string, const ImageRecord*> by_id;
  for (const auto& r : manifest_.records) by_id.emplace(r.image_id, &r);

  // Collect every gap first so the error lists them together.
  std::vector<std::string> missing;
  auto need = [&](const std::string& id, const std::optional<semantic::FeatureCache>& cache, Tag tag) {
    if (!cache->contains(id, tag)) missing.push_back("'" + id + "' tag " + semantic::tag_char(tag));
  };
  for (const auto& id : ids) {
    if (!by_id.count(id)) {
      missing.push_back("'" + id + "' (not in manifest)");
      continue;
    }
    if (mask.has(Component::kQuality) && config.source == afm::FeatureSource::kCached) {
      need(id, quality_, Tag::kQuality);
    }
    if (mask.has(Component::kSemantic)) need(id, semantic_, Tag::kSemantic);
    if (mask.has(Component::kCoherence)) need(id, semantic_, Tag::kCoherence);
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " required feature(s) missing in dataset '" +
                      name() + "':";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 10); ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    fail(ErrorCode::kPartialFeature, msg);
  }

  std::vector<Sample> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const ImageRecord& rec = *by_id.at(id);
    Sample s;
    s.image_id = id;
    s.mos = rec.mos;
    if (mask.has(Component::kQuality)) {
      if (config.source == afm::FeatureSource::kCached) {
        s.quality = quality_->get(id, Tag::kQuality);
      } else {
        s.image = load_image(rec, config.backbone);
      }
    }
    if (mask.has(Component::kSemantic)) s.semantic = semantic_->get(id, Tag::kSemantic);
    if (mask.has(Component::kCoherence)) s.coherence = semantic_->get(id, Tag::kCoherence);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace agiqa::pipeline
