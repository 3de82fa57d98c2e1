#include "pipeline/config.hpp"

#include <algorithm>
#include <array>

#include "afm/afm.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace agiqa::pipeline {
namespace {

enum class Kind { kU64, kDouble, kBool, kString, kPath, kMask, kSource, kPart };

struct KeySpec {
  std::string_view section;
  std::string_view key;
  Kind kind;
  std::optional<std::string_view> fallback;  // nullopt: required when used
};

constexpr std::string_view kNone{};

// Canonical order for echoes.
const std::array kSchema{
    KeySpec{"synth", "n", Kind::kU64, "500"},
    KeySpec{"synth", "dim", Kind::kU64, "64"},
    KeySpec{"synth", "quality_dim", Kind::kU64, "49"},
    KeySpec{"synth", "mos_signal", Kind::kDouble, "0.9"},
    KeySpec{"synth", "mos_min", Kind::kDouble, "1"},
    KeySpec{"synth", "mos_max", Kind::kDouble, "5"},
    KeySpec{"synth", "name", Kind::kString, "synth"},
    KeySpec{"synth", "seed", Kind::kU64, std::nullopt},
    KeySpec{"synth", "out_dir", Kind::kPath, "synth"},
    KeySpec{"data", "manifest", Kind::kPath, std::nullopt},
    KeySpec{"data", "semantic_cache", Kind::kPath, kNone},
    KeySpec{"data", "quality_cache", Kind::kPath, kNone},
    KeySpec{"cross", "manifest", Kind::kPath, std::nullopt},
    KeySpec{"cross", "semantic_cache", Kind::kPath, kNone},
    KeySpec{"cross", "quality_cache", Kind::kPath, kNone},
    KeySpec{"model", "d", Kind::kU64, "784"},
    KeySpec{"model", "dropout", Kind::kDouble, "0.1"},
    KeySpec{"model", "mask", Kind::kMask, "qab"},
    KeySpec{"model", "moe", Kind::kBool, "true"},
    KeySpec{"model", "source", Kind::kSource, "cached"},
    KeySpec{"backbone", "image_height", Kind::kU64, "56"},
    KeySpec{"backbone", "image_width", Kind::kU64, "56"},
    KeySpec{"backbone", "channels", Kind::kU64, "1"},
    KeySpec{"backbone", "patch_size", Kind::kU64, "8"},
    KeySpec{"backbone", "hidden", Kind::kU64, "16"},
    KeySpec{"backbone", "depth", Kind::kU64, "2"},
    KeySpec{"train", "epochs", Kind::kU64, "30"},
    KeySpec{"train", "batch_size", Kind::kU64, "16"},
    KeySpec{"train", "lr", Kind::kDouble, "0.0001"},
    KeySpec{"train", "beta1", Kind::kDouble, "0.9"},
    KeySpec{"train", "beta2", Kind::kDouble, "0.999"},
    KeySpec{"train", "eps", Kind::kDouble, "1e-08"},
    KeySpec{"train", "seed", Kind::kU64, std::nullopt},
    KeySpec{"output", "dir", Kind::kPath, "run"},
    KeySpec{"output", "checkpoint", Kind::kPath, kNone},
    KeySpec{"eval", "checkpoint", Kind::kPath, kNone},
    KeySpec{"eval", "part", Kind::kPart, "test"},
};

const KeySpec* find_spec(std::string_view section, std::string_view key) {
  for (const auto& s : kSchema)
    if (s.section == section && s.key == key) return &s;
  return nullptr;
}

std::string qualified(const KeySpec& s) {
  return std::string(s.section) + "." + std::string(s.key);
}

const KeySpec& spec_for(std::string_view qualified_key) {
  const auto dot = qualified_key.find('.');
  const KeySpec* s = dot == std::string_view::npos
                         ? nullptr
                         : find_spec(qualified_key.substr(0, dot), qualified_key.substr(dot + 1));
  if (s == nullptr) fail(ErrorCode::kConfig, "unknown config key '" + std::string(qualified_key) + "'");
  return *s;
}

void check_value(const KeySpec& s, std::string_view value, const std::string& where) {
  const std::string what = where + ": " + qualified(s);
  switch (s.kind) {
    case Kind::kU64: (void)text::parse_u64(value, what); break;
    case Kind::kDouble: (void)text::parse_double(value, what); break;
    case Kind::kBool: (void)text::parse_bool(value, what); break;
    case Kind::kMask:
      try {
        (void)afm::ComponentMask::parse(value);
      } catch (const Error& e) {
        fail(ErrorCode::kConfig, what + ": " + e.what());
      }
      break;
    case Kind::kSource:
      try {
        (void)afm::parse_feature_source(value);
      } catch (const Error& e) {
        fail(ErrorCode::kConfig, what + ": " + e.what());
      }
      break;
    case Kind::kPart:
      try {
        (void)parse_split_part(value);
      } catch (const Error& e) {
        fail(ErrorCode::kConfig, what + ": " + e.what());
      }
      break;
    case Kind::kString:
    case Kind::kPath: break;
  }
}

}  // namespace

std::string Config::resolve(std::string_view key, std::span<const std::string_view> preferred) {
  const auto dot = key.find('.');
  if (dot != std::string_view::npos) return qualified(spec_for(key));

  std::vector<const KeySpec*> matches;
  for (const auto& s : kSchema)
    if (s.key == key) matches.push_back(&s);
  if (matches.empty()) fail(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
  if (matches.size() == 1) return qualified(*matches.front());
  for (auto section : preferred) {
    for (const auto* m : matches)
      if (m->section == section) return qualified(*m);
  }
  std::string options;
  for (const auto* m : matches) options += " " + qualified(*m);
  fail(ErrorCode::kConfig, "key '" + std::string(key) + "' is ambiguous; qualify it as one of:" + options);
}

void Config::set(std::string_view key, std::string_view value,
                 std::span<const std::string_view> preferred, const std::string& origin) {
  const std::string name = resolve(key, preferred);
  const std::string v(text::trim(value));
  check_value(spec_for(name), v, origin);
  values_[name] = Value{v, origin};
}

void Config::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    const auto bytes = io::read_file(path);
    text.assign(bytes.begin(), bytes.end());
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("cannot read config: ") + e.what());
  }
  parse(text, path.string(), path.has_parent_path() ? path.parent_path() : std::filesystem::path{});
}

void Config::parse(std::string_view text, const std::string& source_name,
                   const std::filesystem::path& base_dir) {
  std::string section;
  std::size_t line_no = 0;
  for (auto raw : text::split(text, '\n')) {
    ++line_no;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kConfig, where + ": unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(kSchema.begin(), kSchema.end(),
                                     [&](const KeySpec& s) { return s.section == section; });
      if (!known) fail(ErrorCode::kConfig, where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kConfig, where + ": expected 'key = value'");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    std::string name;
    if (key.find('.') != std::string_view::npos) {
      name = std::string(key);
    } else {
      if (section.empty()) {
        fail(ErrorCode::kConfig, where + ": key '" + std::string(key) + "' appears before any [section]");
      }
      name = section + "." + std::string(key);
    }
    const auto dot = name.find('.');
    const KeySpec* spec = find_spec(std::string_view(name).substr(0, dot),
                                    std::string_view(name).substr(dot + 1));
    if (spec == nullptr) fail(ErrorCode::kConfig, where + ": unknown key '" + name + "'");
    std::string v(value);
    if (spec->kind == Kind::kPath && !v.empty() && !base_dir.empty() &&
        std::filesystem::path(v).is_relative()) {
      v = (base_dir / v).lexically_normal().string();
    }
    check_value(*spec, v, where);
    values_[name] = Value{v, where};
  }
}

bool Config::has(std::string_view qualified_key) const {
  const auto& s = spec_for(qualified_key);
  if (values_.count(std::string(qualified_key))) return true;
  return s.fallback.has_value();
}

std::string Config::get(std::string_view qualified_key) const {
  const auto& s = spec_for(qualified_key);
  if (auto it = values_.find(std::string(qualified_key)); it != values_.end()) return it->second.text;
  if (!s.fallback) {
    std::string hint;
    if (s.key == "seed") hint = " (runs are never seeded from the clock)";
    fail(ErrorCode::kConfig, "required config key '" + std::string(qualified_key) + "' is not set" + hint);
  }
  return std::string(*s.fallback);
}

std::uint64_t Config::get_u64(std::string_view key) const { return text::parse_u64(get(key), key); }

double Config::get_double(std::string_view key) const { return text::parse_double(get(key), key); }

bool Config::get_bool(std::string_view key) const { return text::parse_bool(get(key), key); }

std::filesystem::path Config::get_path(std::string_view key) const { return get(key); }

std::string Config::echo() const {
  std::string out;
  std::string_view current;
  for (const auto& s : kSchema) {
    const std::string name = qualified(s);
    const auto it = values_.find(name);
    if (it == values_.end() && !s.fallback) continue;
    if (s.section != current) {
      if (!out.empty()) out += "\n";
      out += "[" + std::string(s.section) + "]\n";
      current = s.section;
    }
    out += std::string(s.key) + " = " + (it != values_.end() ? it->second.text : std::string(*s.fallback)) + "\n";
  }
  return out;
}

TrainConfig train_config(const Config& c) {
  TrainConfig t;
  t.epochs = c.get_u64("train.epochs");
  t.batch_size = c.get_u64("train.batch_size");
  t.adam.lr = c.get_double("train.lr");
  t.adam.beta1 = c.get_double("train.beta1");
  t.adam.beta2 = c.get_double("train.beta2");
  t.adam.eps = c.get_double("train.eps");
  t.seed = c.get_u64("train.seed");

  auto& m = t.model;
  m.fusion.d = c.get_u64("model.d");
  m.fusion.dropout = c.get_double("model.dropout");
  m.fusion.mask = afm::ComponentMask::parse(c.get("model.mask"));
  m.fusion.moe = c.get_bool("model.moe");
  m.source = afm::parse_feature_source(c.get("model.source"));
  m.backbone.image_height = c.get_u64("backbone.image_height");
  m.backbone.image_width = c.get_u64("backbone.image_width");
  m.backbone.channels = c.get_u64("backbone.channels");
  m.backbone.patch_size = c.get_u64("backbone.patch_size");
  m.backbone.hidden = c.get_u64("backbone.hidden");
  m.backbone.depth = c.get_u64("backbone.depth");
  if (m.source == afm::FeatureSource::kToyBackbone) m.fusion.quality_dim = m.backbone.patch_count();

  try {
    t.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("invalid training config: ") + e.what());
  }
  return t;
}

DataPaths data_paths(const Config& c, std::string_view section) {
  const std::string s(section);
  DataPaths p;
  p.manifest = c.get_path(s + ".manifest");
  p.semantic_cache = c.get_path(s + ".semantic_cache");
  p.quality_cache = c.get_path(s + ".quality_cache");
  return p;
}

}  // namespace agiqa::pipeline
