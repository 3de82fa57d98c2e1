#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace agiqa::pipeline {

struct ImageRecord {
  std::string image_id;
  std::string source;  // file path, or "synth:<seed>" for generated images
  double mos = 0.0;
};

/// Dataset listing: UTF-8 text, header `image_id,source,mos`, one record per line.
struct DatasetManifest {
  std::string name;
  std::vector<ImageRecord> records;

  const ImageRecord& find(const std::string& image_id) const;
};

/// Errors are ErrorCode::kManifest and cite the 1-based line number.
DatasetManifest parse_manifest(std::string_view text, std::string name);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace agiqa::pipeline
