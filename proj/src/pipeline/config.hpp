#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pipeline/dataset.hpp"
#include "pipeline/trainer.hpp"

namespace agiqa::pipeline {

/// Run configuration: `key = value` lines grouped under `[section]` headers.
///
///   # comment            ; also a comment
///   [train]
///   epochs = 30
///   seed = 7
///
/// Every key belongs to a fixed schema with typed values and defaults. Keys
/// may also be given qualified (`train.seed`) on a line of their own section
/// or as overrides. Relative paths in a file resolve against that file's
/// directory. Errors are ErrorCode::kConfig and cite `source:line` and the key.
class Config {
 public:
  Config() = default;

  void load_file(const std::filesystem::path& path);
  void parse(std::string_view text, const std::string& source_name,
             const std::filesystem::path& base_dir = {});

  /// `key` is `section.key` or a bare key. Bare keys resolve to the single
  /// section that defines them, else to the first of `preferred` that does.
  void set(std::string_view key, std::string_view value,
           std::span<const std::string_view> preferred = {},
           const std::string& origin = "override");

  /// Qualified name for `key` under the same resolution rules as set().
  static std::string resolve(std::string_view key, std::span<const std::string_view> preferred = {});

  bool has(std::string_view qualified) const;
  /// Effective value (explicit or default); a required key that was never
  /// set raises kConfig.
  std::string get(std::string_view qualified) const;
  std::uint64_t get_u64(std::string_view qualified) const;
  double get_double(std::string_view qualified) const;
  bool get_bool(std::string_view qualified) const;
  std::filesystem::path get_path(std::string_view qualified) const;

  /// Every effective value in canonical order, as a loadable config file.
  std::string echo() const;

 private:
  struct Value {
    std::string text;
    std::string origin;
  };
  std::map<std::string, Value> values_;
};

TrainConfig train_config(const Config& config);
/// Manifest and cache paths from the `data` or `cross` section.
DataPaths data_paths(const Config& config, std::string_view section);

}  // namespace agiqa::pipeline
