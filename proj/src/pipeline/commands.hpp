#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metrics/metrics.hpp"
#include "pipeline/config.hpp"

namespace agiqa::pipeline {

/// What a command prints: a human table, machine-readable records (one per
/// line, `kind key=value ...`), and the metric rows behind the table.
struct CommandResult {
  std::string table;
  std::string records;
  std::vector<metrics::EvalReport> rows;
  std::optional<std::size_t> selected_row;
};

/// Section search order used to resolve bare override keys for `command`.
std::span<const std::string_view> preferred_sections(std::string_view command);

CommandResult run_gen_synth(const Config& config);
/// Writes <output.dir>/model.ckpt (or output.checkpoint), run.log and config.ini.
CommandResult run_train(const Config& config);
CommandResult run_eval(const Config& config);
CommandResult run_cross(const Config& config);
/// Writes <output.dir>/ablation.txt and config.ini.
CommandResult run_ablate(const Config& config);

/// eval.checkpoint, else output.checkpoint, else <output.dir>/model.ckpt.
std::filesystem::path checkpoint_path(const Config& config);

}  // namespace agiqa::pipeline
