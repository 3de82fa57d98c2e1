#include "pipeline/manifest.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_set>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace agiqa::pipeline {

namespace {

constexpr std::string_view kHeader = "image_id,source,mos";

[[noreturn]] void bad_line(const std::string& name, std::size_t line, const std::string& why) {
  fail(ErrorCode::kManifest, "manifest '" + name + "' line " + std::to_string(line) + ": " + why);
}

}  // namespace

const ImageRecord& DatasetManifest::find(const std::string& image_id) const {
  for (const auto& r : records)
    if (r.image_id == image_id) return r;
  fail(ErrorCode::kNotFound, "image '" + image_id + "' is not in manifest '" + name + "'");
}

DatasetManifest parse_manifest(std::string_view content, std::string name) {
  DatasetManifest m;
  m.name = std::move(name);
  auto lines = text::split(content, '\n');
  if (lines.empty() || text::trim(lines.front()) != kHeader) {
    bad_line(m.name, 1, "expected header '" + std::string(kHeader) + "'");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    const std::size_t lineno = i + 1;
    const auto fields = text::split(line, ',');
    if (fields.size() != 3) {
      bad_line(m.name, lineno, "expected 3 comma-separated fields, got " + std::to_string(fields.size()));
    }
    ImageRecord r;
    r.image_id = std::string(text::trim(fields[0]));
    r.source = std::string(text::trim(fields[1]));
    if (r.image_id.empty() || r.image_id.size() > 255) {
      bad_line(m.name, lineno, "image_id must be 1..255 bytes");
    }
    const std::string mos(text::trim(fields[2]));
    char* end = nullptr;
    r.mos = std::strtod(mos.c_str(), &end);
    if (mos.empty() || end != mos.c_str() + mos.size() || !std::isfinite(r.mos)) {
      bad_line(m.name, lineno, "mos '" + mos + "' is not a finite number");
    }
    if (!seen.insert(r.image_id).second) bad_line(m.name, lineno, "duplicate image_id '" + r.image_id + "'");
    m.records.push_back(std::move(r));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_manifest({reinterpret_cast<const char*>(bytes.data()), bytes.size()},
                        path.filename().string());
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& r : manifest.records) {
    out += r.image_id + "," + r.source + "," + text::format_double(r.mos) + "\n";
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  io::write_text_atomic(path, format_manifest(manifest));
}

}  // namespace agiqa::pipeline
