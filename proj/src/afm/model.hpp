#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afm/afm.hpp"
#include "backbone/backbone.hpp"

namespace agiqa::afm {

enum class FeatureSource { kCached, kToyBackbone };

const char* to_string(FeatureSource s) noexcept;
FeatureSource parse_feature_source(std::string_view text);

struct ModelConfig {
  FusionConfig fusion;
  FeatureSource source = FeatureSource::kCached;
  backbone::BackboneConfig backbone;

  /// Flat key=value view, keys prefixed "model." / "backbone.".
  std::map<std::string, std::string> to_echo() const;
  static ModelConfig from_echo(const std::map<std::string, std::string>& echo);
};

/// One sample's inputs. `quality` is used for cached sources, `image` for
/// the toy backbone; semantic spans may be empty when masked out.
struct SampleInput {
  std::span<const double> quality;
  const backbone::Image* image = nullptr;
  std::span<const double> semantic;
  std::span<const double> coherence;
};

/// Quality source (cached per-patch quality vector or trainable backbone) feeding a FusionModel.
class IqaModel {
 public:
  explicit IqaModel(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  FusionModel& fusion() noexcept { return fusion_; }
  const FusionModel& fusion() const noexcept { return fusion_; }
  backbone::ToyBackbone* backbone() noexcept { return backbone_ ? &*backbone_ : nullptr; }

  void init(nn::Rng& rng);

  FusionModel::Trace forward(nn::Graph& g, const SampleInput& in, nn::Mode mode, nn::Rng& rng) const;
  /// Eval-mode score; pure, safe to call concurrently on a frozen model.
  double predict(const SampleInput& in) const;

  std::vector<nn::Parameter*> parameters();

 private:
  ModelConfig config_;
  std::optional<backbone::ToyBackbone> backbone_;
  FusionModel fusion_;
};

// Checkpoint container, little-endian:
//
//   "MAFK" | version u16 = 1 | echo_len u32 | echo bytes (sorted key=value lines) |
//   param_count u32 | param_count x ( name_len u8 | name | rows u32 | cols u32 |
//   rows*cols f64 ) | CRC32 u32 over every preceding byte
inline constexpr std::uint16_t kCheckpointVersion = 1;

/// `extra_echo` is stored alongside the model config (e.g. the split seed).
std::vector<std::uint8_t> encode_checkpoint(IqaModel& model,
                                            const std::map<std::string, std::string>& extra_echo);
/// Rebuilds the model described by the echo and loads every parameter.
IqaModel decode_checkpoint(std::span<const std::uint8_t> bytes,
                           std::map<std::string, std::string>* echo_out = nullptr);

void save_checkpoint(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
IqaModel load_checkpoint(const std::filesystem::path& path,
                         std::map<std::string, std::string>* echo_out = nullptr);

}  // namespace agiqa::afm
