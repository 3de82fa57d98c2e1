#include "afm/afm.hpp"

#include <cmath>

#include "common/error.hpp"

namespace agiqa::afm {

namespace {

const char* component_name(Component c) {
  switch (c) {
    case Component::kQuality: return "quality";
    case Component::kSemantic: return "semantic";
    case Component::kCoherence: return "coherence";
  }
  return "?";
}

void check_finite(const nn::Graph& g, nn::Var v, const std::string& stage) {
  for (double x : g.value(v)) {
    if (!std::isfinite(x)) fail(ErrorCode::kNumeric, "non-finite value produced at stage " + stage);
  }
}

}  // namespace

char component_char(Component c) noexcept {
  switch (c) {
    case Component::kQuality: return 'q';
    case Component::kSemantic: return 'a';
    case Component::kCoherence: return 'b';
  }
  return '?';
}

ComponentMask ComponentMask::of(std::initializer_list<Component> components) {
  std::uint8_t bits = 0;
  for (Component c : components) bits |= static_cast<std::uint8_t>(1u << static_cast<int>(c));
  if (bits == 0) fail(ErrorCode::kConfig, "component mask must enable at least one feature");
  return ComponentMask(bits);
}

ComponentMask ComponentMask::parse(std::string_view text) {
  std::uint8_t bits = 0;
  for (char ch : text) {
    switch (ch) {
      case 'q': bits |= 1u; break;
      case 'a': bits |= 2u; break;
      case 'b': bits |= 4u; break;
      case '+': case ',': case ' ': break;
      default:
        fail(ErrorCode::kConfig, "component mask '" + std::string(text) +
                                     "' may only contain the letters q, a, b");
    }
  }
  if (bits == 0) fail(ErrorCode::kConfig, "component mask must enable at least one feature");
  return ComponentMask(bits);
}

std::size_t ComponentMask::count() const noexcept {
  return static_cast<std::size_t>((bits_ & 1u) + ((bits_ >> 1) & 1u) + ((bits_ >> 2) & 1u));
}

std::vector<Component> ComponentMask::components() const {
  std::vector<Component> out;
  for (Component c : kAllComponents)
    if (has(c)) out.push_back(c);
  return out;
}

std::string ComponentMask::to_string() const {
  std::string s;
  for (Component c : components()) s += component_char(c);
  return s;
}

const std::array<ComponentMask, 7>& ablation_masks() {
  using C = Component;
  static const std::array<ComponentMask, 7> kMasks{
      ComponentMask::of({C::kQuality}),
      ComponentMask::of({C::kSemantic}),
      ComponentMask::of({C::kCoherence}),
      ComponentMask::of({C::kQuality, C::kSemantic}),
      ComponentMask::of({C::kQuality, C::kCoherence}),
      ComponentMask::of({C::kSemantic, C::kCoherence}),
      ComponentMask::all(),
  };
  return kMasks;
}

TransformBlock::TransformBlock(const std::string& name, BlockKind kind, std::size_t in,
                               std::size_t d, double dropout_rate)
    : name_(name), kind_(kind), fc_(name, in, d), dropout_rate_(dropout_rate) {
  nn::check_dropout_rate(dropout_rate_);
}

nn::Var TransformBlock::forward(nn::Graph& g, nn::Var f, nn::Mode mode, nn::Rng& rng) const {
  if (g.numel(f) != in()) {
    fail(ErrorCode::kShape, std::string(kind_ == BlockKind::kQuality ? "quality" : "semantic") +
                                " transform block '" + name_ + "' expects " + std::to_string(in()) +
                                " inputs, got " + std::to_string(g.numel(f)));
  }
  nn::Var y = nn::affine(g, fc_, nn::reshape(g, f, 1, in()));
  if (kind_ == BlockKind::kSemantic) {
    y = nn::relu(g, y);
    y = nn::dropout(g, y, dropout_rate_, mode, rng);
  }
  return y;
}

GateNetwork::GateNetwork(const std::string& name, std::size_t experts, std::size_t d)
    : fc_(name, experts * d, experts), d_(d) {}

nn::Var GateNetwork::forward(nn::Graph& g, std::span<const nn::Var> transformed) const {
  if (transformed.size() != experts()) {
    fail(ErrorCode::kShape, "gate expects " + std::to_string(experts()) + " features, got " +
                                std::to_string(transformed.size()));
  }
  for (nn::Var v : transformed) {
    if (g.numel(v) != d_) {
      fail(ErrorCode::kShape, "gate input has length " + std::to_string(g.numel(v)) +
                                  ", expected d = " + std::to_string(d_));
    }
  }
  return nn::sigmoid(g, nn::affine(g, fc_, nn::concat(g, transformed)));
}

void FusionConfig::validate() const {
  if (d == 0) fail(ErrorCode::kConfig, "fusion width d must be positive");
  if (mask.has(Component::kQuality) && quality_dim == 0) {
    fail(ErrorCode::kConfig, "quality feature width must be positive");
  }
  if ((mask.has(Component::kSemantic) || mask.has(Component::kCoherence)) && semantic_dim == 0) {
    fail(ErrorCode::kConfig, "semantic feature width must be positive");
  }
  nn::check_dropout_rate(dropout);
}

FusionModel::FusionModel(const FusionConfig& config) : config_(config) {
  config_.validate();
  components_ = config_.mask.components();
  for (Component c : components_) {
    const std::string name = std::string("afm.transform_") + component_char(c);
    if (c == Component::kQuality) {
      blocks_.emplace_back(name, BlockKind::kQuality, config_.quality_dim, config_.d, 0.0);
    } else {
      blocks_.emplace_back(name, BlockKind::kSemantic, config_.semantic_dim, config_.d,
                           config_.dropout);
    }
  }
  const std::size_t k = components_.size();
  if (config_.moe) {
    if (k > 1) gate_.emplace("afm.gate", k, config_.d);
    head_ = nn::AffineLayer("afm.regression", config_.d, 1);
  } else {
    head_ = nn::AffineLayer("afm.concat_regression", k * config_.d, 1);
  }
}

void FusionModel::init(nn::Rng& rng) {
  for (auto& b : blocks_) b.fc().init_uniform(rng);
  if (gate_) gate_->fc().init_uniform(rng);
  head_.init_uniform(rng);
}

void FusionModel::init_zero() {
  for (auto& b : blocks_) b.fc().init_zero();
  if (gate_) gate_->fc().init_zero();
  head_.init_zero();
}

std::optional<std::size_t> FusionModel::slot(Component c) const {
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (components_[i] == c) return i;
  return std::nullopt;
}

TransformBlock& FusionModel::block(Component c) {
  const auto i = slot(c);
  if (!i) fail(ErrorCode::kInvalidArgument, std::string("no transform block for ") + component_name(c));
  return blocks_[*i];
}

const TransformBlock& FusionModel::block(Component c) const {
  return const_cast<FusionModel*>(this)->block(c);
}

GateNetwork& FusionModel::gate() {
  if (!gate_) fail(ErrorCode::kInvalidArgument, "this fusion model has no gate");
  return *gate_;
}

FusionModel::Trace FusionModel::forward(nn::Graph& g, const FeatureVars& features, nn::Mode mode,
                                        nn::Rng& rng) const {
  Trace t;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Component c = components_[i];
    const auto& in = c == Component::kQuality    ? features.quality
                     : c == Component::kSemantic ? features.semantic
                                                 : features.coherence;
    if (!in) fail(ErrorCode::kShape, std::string("missing ") + component_name(c) + " feature input");
    const nn::Var transformed = blocks_[i].forward(g, *in, mode, rng);
    check_finite(g, transformed, std::string("transform[") + component_char(c) + "]");
    t.transformed.push_back(transformed);
  }

  if (!config_.moe) {
    t.fused = nn::concat(g, t.transformed);
  } else if (gate_) {
    t.gate_weights = gate_->forward(g, t.transformed);
    check_finite(g, *t.gate_weights, "gate");
    t.fused = nn::weighted_sum(g, t.transformed, *t.gate_weights);
  } else {
    t.fused = t.transformed.front();  // sole component, weight 1
  }
  check_finite(g, t.fused, "fusion");
  t.score = nn::affine(g, head_, t.fused);
  check_finite(g, t.score, "regression");
  return t;
}

std::vector<nn::Parameter*> FusionModel::parameters() {
  std::vector<nn::Parameter*> out;
  for (auto& b : blocks_) {
    out.push_back(&b.fc().weight());
    out.push_back(&b.fc().bias());
  }
  if (gate_) {
    out.push_back(&gate_->fc().weight());
    out.push_back(&gate_->fc().bias());
  }
  out.push_back(&head_.weight());
  out.push_back(&head_.bias());
  return out;
}

nn::Tensor1 transform(const TransformBlock& block, std::span<const double> f) {
  nn::Graph g(false);
  nn::Rng unused(0);
  const nn::Var y = block.forward(g, g.input({f.begin(), f.end()}), nn::Mode::kEval, unused);
  return g.value(y);
}

nn::Tensor1 gate(const GateNetwork& gn, std::span<const nn::Tensor1> transformed) {
  nn::Graph g(false);
  std::vector<nn::Var> vars;
  for (const auto& t : transformed) vars.push_back(g.input(t));
  return g.value(gn.forward(g, vars));
}

nn::Tensor1 fuse(std::span<const nn::Tensor1> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    fail(ErrorCode::kShape, "fuse: " + std::to_string(parts.size()) + " features but " +
                                std::to_string(weights.size()) + " gate weights");
  }
  nn::Tensor1 g(parts.front().size(), 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != g.size()) {
      fail(ErrorCode::kShape, "fuse: feature " + std::to_string(i) + " has length " +
                                  std::to_string(parts[i].size()) + ", expected " +
                                  std::to_string(g.size()));
    }
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += weights[i] * parts[i][j];
  }
  return g;
}

}  // namespace agiqa::afm
