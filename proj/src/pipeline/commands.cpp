#include "pipeline/commands.hpp"

#include <array>
#include <cstdio>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "pipeline/ablation.hpp"
#include "pipeline/synth_data.hpp"

namespace agiqa::pipeline {
namespace {

constexpr std::array<std::string_view, 1> kSynthSections{"synth"};
constexpr std::array<std::string_view, 4> kTrainSections{"train", "data", "model", "output"};
constexpr std::array<std::string_view, 4> kEvalSections{"eval", "data", "output", "train"};
constexpr std::array<std::string_view, 3> kCrossSections{"eval", "cross", "output"};

std::string labeled_row(const std::string& label, const metrics::EvalReport& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-16s", label.c_str());
  return buf + metrics::table_row(r) + "\n";
}

std::string table_head(const std::string& first_column) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-16s", first_column.c_str());
  return buf + metrics::table_header() + "\n";
}

std::filesystem::path output_dir(const Config& config) {
  const auto dir = config.get_path("output.dir");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

}  // namespace

std::span<const std::string_view> preferred_sections(std::string_view command) {
  if (command == "gen-synth") return kSynthSections;
  if (command == "eval") return kEvalSections;
  if (command == "cross") return kCrossSections;
  return kTrainSections;
}

std::filesystem::path checkpoint_path(const Config& config) {
  if (auto p = config.get_path("eval.checkpoint"); !p.empty()) return p;
  if (auto p = config.get_path("output.checkpoint"); !p.empty()) return p;
  return config.get_path("output.dir") / "model.ckpt";
}

CommandResult run_gen_synth(const Config& config) {
  SynthSpec spec;
  spec.n = config.get_u64("synth.n");
  spec.dim = config.get_u64("synth.dim");
  spec.quality_dim = config.get_u64("synth.quality_dim");
  spec.seed = config.get_u64("synth.seed");
  spec.mos_signal = config.get_double("synth.mos_signal");
  spec.mos_min = config.get_double("synth.mos_min");
  spec.mos_max = config.get_double("synth.mos_max");
  spec.name = config.get("synth.name");
  const auto out_dir = config.get_path("synth.out_dir");
  const auto files = write_synth_dataset(spec, out_dir);
  io::write_text_atomic(out_dir / "gen-synth.ini", config.echo());

  char crc[16];
  CommandResult r;
  r.table = "wrote " + std::to_string(spec.n) + " images to " + out_dir.string() + "\n";
  r.table += "  manifest        " + files.manifest.string() + "\n";
  std::snprintf(crc, sizeof crc, "%08x", files.semantic_crc);
  r.table += "  semantic cache  " + files.semantic_cache.string() + " (dim " +
             std::to_string(spec.dim) + ", crc32 " + crc + ")\n";
  r.records += "file kind=semantic_cache path=" + files.semantic_cache.string() + " crc32=" + crc + "\n";
  std::snprintf(crc, sizeof crc, "%08x", files.quality_crc);
  r.table += "  quality cache   " + files.quality_cache.string() + " (dim " +
             std::to_string(spec.quality_dim) + ", crc32 " + crc + ")\n";
  r.table += "  train config    " + files.train_config.string() + "\n";
  r.records = "file kind=manifest path=" + files.manifest.string() + "\n" + r.records;
  r.records += "file kind=quality_cache path=" + files.quality_cache.string() + " crc32=" + crc + "\n";
  r.records += "file kind=train_config path=" + files.train_config.string() + "\n";
  return r;
}

CommandResult run_train(const Config& config) {
  const auto train_cfg = train_config(config);
  const auto dataset = Dataset::open(data_paths(config, "data"));
  const auto dir = output_dir(config);
  const auto ckpt = checkpoint_path(config);

  const auto run = train(train_cfg, dataset, ckpt);
  const auto test = evaluate(run.checkpoint, dataset, SplitPart::kTest);
  io::write_text_atomic(dir / "config.ini", config.echo());
  io::write_text_atomic(dir / "run.log", run.log_text());

  CommandResult r;
  r.records = run.log_text();
  r.table = table_head("part");
  if (run.selected_val) {
    r.table += labeled_row("val (epoch " + std::to_string(run.selected_epoch) + ")", *run.selected_val);
    r.rows.push_back(*run.selected_val);
    r.records += "eval part=val " + metrics::format_record(*run.selected_val) + "\n";
  }
  r.table += labeled_row("test", test);
  r.rows.push_back(test);
  r.selected_row = r.rows.size() - 1;
  r.records += "eval part=test " + metrics::format_record(test) + "\n";
  return r;
}

CommandResult run_eval(const Config& config) {
  const auto dataset = Dataset::open(data_paths(config, "data"));
  const auto part = parse_split_part(config.get("eval.part"));
  const auto bytes = io::read_file(checkpoint_path(config));
  const auto report = evaluate(bytes, dataset, part);

  CommandResult r;
  r.table = table_head("part") + labeled_row(to_string(part), report);
  r.records = "eval dataset=" + dataset.name() + " part=" + to_string(part) + " " +
              metrics::format_record(report) + "\n";
  r.rows.push_back(report);
  r.selected_row = 0;
  return r;
}

CommandResult run_cross(const Config& config) {
  const auto other = Dataset::open(data_paths(config, "cross"));
  const auto bytes = io::read_file(checkpoint_path(config));
  const auto report = cross_evaluate(bytes, other);

  CommandResult r;
  r.table = table_head("target") + labeled_row(other.name() + " test", report);
  r.records = "cross dataset=" + other.name() + " part=test " + metrics::format_record(report) + "\n";
  r.rows.push_back(report);
  r.selected_row = 0;
  return r;
}

CommandResult run_ablate(const Config& config) {
  const auto train_cfg = train_config(config);
  const auto dataset = Dataset::open(data_paths(config, "data"));
  const auto dir = output_dir(config);
  const auto table = ablate(train_cfg, dataset);

  CommandResult r;
  r.table = table.format_table();
  r.records = table.records();
  for (const auto& row : table.rows) r.rows.push_back(row.test);
  io::write_text_atomic(dir / "config.ini", config.echo());
  io::write_text_atomic(dir / "ablation.txt", r.table + "\n" + r.records);
  return r;
}

}  // namespace agiqa::pipeline
