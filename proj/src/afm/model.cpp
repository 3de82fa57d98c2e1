#include "afm/model.hpp"

#include <cstring>
#include <set>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace agiqa::afm {

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'A', 'F', 'K'};

ModelConfig resolved(ModelConfig config) {
  if (config.source == FeatureSource::kToyBackbone) {
    config.backbone.validate();
    config.fusion.quality_dim = config.backbone.patch_count();
  }
  return config;
}

const std::string& require(const std::map<std::string, std::string>& echo, const std::string& key) {
  const auto it = echo.find(key);
  if (it == echo.end()) fail(ErrorCode::kFormat, "checkpoint config echo lacks '" + key + "'");
  return it->second;
}

}  // namespace

const char* to_string(FeatureSource s) noexcept {
  return s == FeatureSource::kCached ? "cached" : "toy-backbone";
}

FeatureSource parse_feature_source(std::string_view text) {
  if (text == "cached") return FeatureSource::kCached;
  if (text == "toy-backbone") return FeatureSource::kToyBackbone;
  fail(ErrorCode::kConfig, "feature source must be 'cached' or 'toy-backbone', got '" +
                               std::string(text) + "'");
}

std::map<std::string, std::string> ModelConfig::to_echo() const {
  std::map<std::string, std::string> e;
  e["model.d"] = std::to_string(fusion.d);
  e["model.dropout"] = text::format_double(fusion.dropout);
  e["model.mask"] = fusion.mask.to_string();
  e["model.moe"] = fusion.moe ? "true" : "false";
  e["model.quality_dim"] = std::to_string(fusion.quality_dim);
  e["model.semantic_dim"] = std::to_string(fusion.semantic_dim);
  e["model.source"] = to_string(source);
  if (source == FeatureSource::kToyBackbone) {
    e["backbone.image_height"] = std::to_string(backbone.image_height);
    e["backbone.image_width"] = std::to_string(backbone.image_width);
    e["backbone.channels"] = std::to_string(backbone.channels);
    e["backbone.patch_size"] = std::to_string(backbone.patch_size);
    e["backbone.hidden"] = std::to_string(backbone.hidden);
    e["backbone.depth"] = std::to_string(backbone.depth);
  }
  return e;
}

ModelConfig ModelConfig::from_echo(const std::map<std::string, std::string>& echo) {
  ModelConfig c;
  c.fusion.d = text::parse_u64(require(echo, "model.d"), "model.d");
  c.fusion.dropout = text::parse_double(require(echo, "model.dropout"), "model.dropout");
  c.fusion.mask = ComponentMask::parse(require(echo, "model.mask"));
  c.fusion.moe = text::parse_bool(require(echo, "model.moe"), "model.moe");
  c.fusion.quality_dim = text::parse_u64(require(echo, "model.quality_dim"), "model.quality_dim");
  c.fusion.semantic_dim = text::parse_u64(require(echo, "model.semantic_dim"), "model.semantic_dim");
  c.source = parse_feature_source(require(echo, "model.source"));
  if (c.source == FeatureSource::kToyBackbone) {
    auto& b = c.backbone;
    b.image_height = text::parse_u64(require(echo, "backbone.image_height"), "backbone.image_height");
    b.image_width = text::parse_u64(require(echo, "backbone.image_width"), "backbone.image_width");
    b.channels = text::parse_u64(require(echo, "backbone.channels"), "backbone.channels");
    b.patch_size = text::parse_u64(require(echo, "backbone.patch_size"), "backbone.patch_size");
    b.hidden = text::parse_u64(require(echo, "backbone.hidden"), "backbone.hidden");
    b.depth = text::parse_u64(require(echo, "backbone.depth"), "backbone.depth");
  }
  return c;
}

IqaModel::IqaModel(const ModelConfig& config)
    : config_(resolved(config)), fusion_(config_.fusion) {
  if (config_.source == FeatureSource::kToyBackbone) backbone_.emplace(config_.backbone);
}

void IqaModel::init(nn::Rng& rng) {
  if (backbone_) backbone_->init(rng);
  fusion_.init(rng);
}

FusionModel::Trace IqaModel::forward(nn::Graph& g, const SampleInput& in, nn::Mode mode,
                                     nn::Rng& rng) const {
  const auto& mask = config_.fusion.mask;
  FeatureVars vars;
  if (mask.has(Component::kQuality)) {
    if (backbone_) {
      if (in.image == nullptr) fail(ErrorCode::kShape, "toy-backbone model needs an image input");
      vars.quality = backbone_->quality_feature(g, *in.image);
    } else {
      vars.quality = g.input({in.quality.begin(), in.quality.end()});
    }
  }
  if (mask.has(Component::kSemantic)) vars.semantic = g.input({in.semantic.begin(), in.semantic.end()});
  if (mask.has(Component::kCoherence)) {
    vars.coherence = g.input({in.coherence.begin(), in.coherence.end()});
  }
  return fusion_.forward(g, vars, mode, rng);
}

double IqaModel::predict(const SampleInput& in) const {
  nn::Graph g(false);
  nn::Rng unused(0);
  return g.scalar(forward(g, in, nn::Mode::kEval, unused).score);
}

std::vector<nn::Parameter*> IqaModel::parameters() {
  std::vector<nn::Parameter*> out;
  if (backbone_) out = backbone_->parameters();
  for (auto* p : fusion_.parameters()) out.push_back(p);
  return out;
}

std::vector<std::uint8_t> encode_checkpoint(IqaModel& model,
                                            const std::map<std::string, std::string>& extra_echo) {
  auto echo = extra_echo;
  for (const auto& [k, v] : model.config().to_echo()) echo[k] = v;
  std::string echo_text;
  for (const auto& [k, v] : echo) echo_text += k + "=" + v + "\n";

  io::ByteWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put<std::uint16_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(echo_text.size()));
  w.put_bytes(echo_text);
  const auto params = model.parameters();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(p->name.size()));
    w.put_bytes(p->name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p->rows));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p->cols));
    for (double v : p->value) w.put<double>(v);
  }
  w.seal_with_crc();
  return w.release();
}

IqaModel decode_checkpoint(std::span<const std::uint8_t> bytes,
                           std::map<std::string, std::string>* echo_out) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    fail_at(ErrorCode::kMagic, 0, "not a model checkpoint: expected magic \"MAFK\"");
  }
  if (bytes.size() < 10) fail_at(ErrorCode::kChecksum, bytes.size(), "checkpoint truncated");
  std::uint16_t version;
  std::memcpy(&version, bytes.data() + 4, 2);
  if (version != kCheckpointVersion) {
    fail_at(ErrorCode::kVersion, 4, "checkpoint version " + std::to_string(version) +
                                        " is not supported (supported versions: 1)");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (stored != io::crc32(bytes.first(body))) {
    fail_at(ErrorCode::kChecksum, body, "checkpoint checksum mismatch");
  }

  io::ByteReader r(bytes.first(body));
  r.get_string(4, "magic");
  r.get<std::uint16_t>("version");
  const auto echo_len = r.get<std::uint32_t>("echo length");
  const std::string echo_text = r.get_string(echo_len, "config echo");
  std::map<std::string, std::string> echo;
  for (auto line : text::split(echo_text, '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kFormat, "malformed checkpoint echo line");
    echo.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }

  IqaModel model(ModelConfig::from_echo(echo));
  auto params = model.parameters();
  const auto count = r.get<std::uint32_t>("parameter count");
  if (count != params.size()) {
    fail(ErrorCode::kCompatibility, "checkpoint holds " + std::to_string(count) +
                                        " parameters, its config implies " +
                                        std::to_string(params.size()));
  }
  std::set<std::string> loaded;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    const auto name_len = r.get<std::uint8_t>("parameter name length");
    const std::string name = r.get_string(name_len, "parameter name");
    const auto rows = r.get<std::uint32_t>("rows");
    const auto cols = r.get<std::uint32_t>("cols");
    nn::Parameter* target = nullptr;
    for (auto* p : params)
      if (p->name == name) target = p;
    if (target == nullptr) fail_at(ErrorCode::kFormat, at, "unknown parameter '" + name + "'");
    if (target->rows != rows || target->cols != cols) {
      fail_at(ErrorCode::kCompatibility, at,
              "parameter '" + name + "' is " + std::to_string(rows) + "x" + std::to_string(cols) +
                  ", model expects " + std::to_string(target->rows) + "x" +
                  std::to_string(target->cols));
    }
    if (!loaded.insert(name).second) fail_at(ErrorCode::kFormat, at, "duplicate parameter '" + name + "'");
    for (double& v : target->value) v = r.get<double>("parameter values");
  }
  if (r.remaining() != 0) fail_at(ErrorCode::kFormat, r.offset(), "trailing bytes in checkpoint");
  if (echo_out != nullptr) *echo_out = std::move(echo);
  return model;
}

void save_checkpoint(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  io::write_file_atomic(path, bytes);
}

IqaModel load_checkpoint(const std::filesystem::path& path,
                         std::map<std::string, std::string>* echo_out) {
  return decode_checkpoint(io::read_file(path), echo_out);
}

}  // namespace agiqa::afm
