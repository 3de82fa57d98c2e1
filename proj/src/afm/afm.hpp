#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numerics/graph.hpp"
#include "numerics/tensor.hpp"

namespace agiqa::afm {

/// The three feature pathways, in fusion order.
enum class Component : std::uint8_t { kQuality = 0, kSemantic = 1, kCoherence = 2 };

inline constexpr std::array<Component, 3> kAllComponents{Component::kQuality, Component::kSemantic,
                                                         Component::kCoherence};

char component_char(Component c) noexcept;  // 'q', 'a', 'b'

/// Non-empty subset of {q, a, b}.
class ComponentMask {
 public:
  constexpr ComponentMask() = default;
  static constexpr ComponentMask all() { return ComponentMask(0b111); }
  static ComponentMask of(std::initializer_list<Component> components);
  /// Accepts any order of the letters q, a, b ("qab", "aq", ...).
  static ComponentMask parse(std::string_view text);

  bool has(Component c) const noexcept { return (bits_ >> static_cast<int>(c)) & 1u; }
  std::size_t count() const noexcept;
  std::vector<Component> components() const;
  std::string to_string() const;  // canonical "qab" order
  std::uint8_t bits() const noexcept { return bits_; }

  friend bool operator==(ComponentMask, ComponentMask) = default;

 private:
  constexpr explicit ComponentMask(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0b111;
};

/// The seven component combinations in ablation-table row order:
/// q, a, b, q+a, q+b, a+b, q+a+b.
const std::array<ComponentMask, 7>& ablation_masks();

enum class BlockKind { kQuality, kSemantic };

/// Projects one feature into the shared d-dim space. Quality blocks are a
/// single affine map; semantic blocks add relu and dropout.
class TransformBlock {
 public:
  TransformBlock(const std::string& name, BlockKind kind, std::size_t in, std::size_t d,
                 double dropout_rate);

  BlockKind kind() const noexcept { return kind_; }
  std::size_t in() const noexcept { return fc_.in(); }
  std::size_t out() const noexcept { return fc_.out(); }
  double dropout_rate() const noexcept { return dropout_rate_; }
  nn::AffineLayer& fc() noexcept { return fc_; }
  const nn::AffineLayer& fc() const noexcept { return fc_; }

  nn::Var forward(nn::Graph& g, nn::Var f, nn::Mode mode, nn::Rng& rng) const;

 private:
  std::string name_;
  BlockKind kind_;
  nn::AffineLayer fc_;
  double dropout_rate_;
};

/// One sigmoid weight per expert from the concatenated transformed features;
/// the weights are independent and need not sum to one.
class GateNetwork {
 public:
  GateNetwork(const std::string& name, std::size_t experts, std::size_t d);

  std::size_t experts() const noexcept { return fc_.out(); }
  nn::AffineLayer& fc() noexcept { return fc_; }
  const nn::AffineLayer& fc() const noexcept { return fc_; }

  nn::Var forward(nn::Graph& g, std::span<const nn::Var> transformed) const;

 private:
  nn::AffineLayer fc_;
  std::size_t d_;
};

struct FusionConfig {
  std::size_t d = 784;
  std::size_t quality_dim = 49;
  std::size_t semantic_dim = 4096;
  double dropout = 0.1;
  ComponentMask mask = ComponentMask::all();
  /// false selects the concatenation baseline: concat(f'_i) -> affine -> score.
  bool moe = true;

  void validate() const;
};

/// Graph handles for whichever features the mask enables.
struct FeatureVars {
  std::optional<nn::Var> quality;
  std::optional<nn::Var> semantic;
  std::optional<nn::Var> coherence;
};

/// Transform blocks + gate + weighted-sum fusion + regression head.
///
/// Sub-models built from a partial mask keep only the enabled blocks. With a
/// single component there is no gate and that component has weight 1.
class FusionModel {
 public:
  struct Trace {
    std::vector<nn::Var> transformed;  // f'_i, mask order
    std::optional<nn::Var> gate_weights;  // absent without a gate
    nn::Var fused;                     // g (or the concatenation, for the baseline)
    nn::Var score;                     // 1 x 1
  };

  explicit FusionModel(const FusionConfig& config);

  const FusionConfig& config() const noexcept { return config_; }
  bool has_gate() const noexcept { return gate_.has_value(); }

  void init(nn::Rng& rng);
  void init_zero();

  Trace forward(nn::Graph& g, const FeatureVars& features, nn::Mode mode, nn::Rng& rng) const;

  TransformBlock& block(Component c);
  const TransformBlock& block(Component c) const;
  GateNetwork& gate();
  nn::AffineLayer& head() noexcept { return head_; }
  const nn::AffineLayer& head() const noexcept { return head_; }

  std::vector<nn::Parameter*> parameters();

 private:
  std::optional<std::size_t> slot(Component c) const;

  FusionConfig config_;
  std::vector<Component> components_;
  std::vector<TransformBlock> blocks_;
  std::optional<GateNetwork> gate_;
  nn::AffineLayer head_;
};

// Eval-mode helpers on plain vectors.
nn::Tensor1 transform(const TransformBlock& block, std::span<const double> f);
nn::Tensor1 gate(const GateNetwork& gn, std::span<const nn::Tensor1> transformed);
/// out[j] = sum_i weights[i] * parts[i][j].
nn::Tensor1 fuse(std::span<const nn::Tensor1> parts, std::span<const double> weights);

}  // namespace agiqa::afm
