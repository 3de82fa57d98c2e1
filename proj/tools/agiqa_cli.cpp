// Command-line front end over the C API.
//
//   agiqa gen-synth [CONFIG] [key=value ...]
//   agiqa train|eval|ablate|cross CONFIG [key=value ...]
//   agiqa cache-info PATH
//   agiqa prompts PATH
//
// Exit status: 0 success, 1 runtime error, 2 usage or configuration error.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agiqa/agiqa.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code_for(agiqa_status status) {
  switch (status) {
    case AGIQA_OK: return kExitOk;
    case AGIQA_ERR_CONFIG:
    case AGIQA_ERR_MANIFEST:
    case AGIQA_ERR_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitRuntime;
  }
}

int report(agiqa_status status) {
  std::fprintf(stderr, "error [%s]: %s\n", agiqa_status_string(status), agiqa_last_error());
  return exit_code_for(status);
}

struct ConfigHandle {
  agiqa_config* ptr = nullptr;
  ~ConfigHandle() { agiqa_config_destroy(ptr); }
};

struct ResultHandle {
  agiqa_result* ptr = nullptr;
  ~ResultHandle() { agiqa_result_destroy(ptr); }
};

using CommandFn = agiqa_status (*)(const agiqa_config*, agiqa_result**);

int run_command(const std::string& name, CommandFn fn, const std::vector<std::string>& args,
                const std::string& format) {
  ConfigHandle config;
  if (auto st = agiqa_config_create(&config.ptr); st != AGIQA_OK) return report(st);
  bool have_file = false;
  for (const auto& arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
      if (have_file) {
        std::fprintf(stderr, "error: more than one config file given ('%s')\n", arg.c_str());
        return kExitUsage;
      }
      have_file = true;
      if (auto st = agiqa_config_load_file(config.ptr, arg.c_str()); st != AGIQA_OK) return report(st);
    }
  }
  if (!have_file && name != "gen-synth") {
    std::fprintf(stderr, "error: '%s' needs a config file\n", name.c_str());
    return kExitUsage;
  }
  // Overrides apply after the file regardless of their position.
  for (const auto& arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = arg.substr(0, eq);
    const std::string value = arg.substr(eq + 1);
    if (auto st = agiqa_config_set(config.ptr, name.c_str(), key.c_str(), value.c_str()); st != AGIQA_OK) {
      return report(st);
    }
  }

  ResultHandle result;
  if (auto st = fn(config.ptr, &result.ptr); st != AGIQA_OK) return report(st);
  if (format != "records") std::fputs(agiqa_result_table(result.ptr), stdout);
  if (format == "both") std::fputs("\n", stdout);
  if (format != "table") std::fputs(agiqa_result_records(result.ptr), stdout);
  return kExitOk;
}

int run_cache_info(const std::string& path) {
  if (path.empty()) {
    std::fprintf(stderr, "error: cache-info needs a non-empty cache path\n");
    return kExitUsage;
  }
  agiqa_cache_summary s{};
  const agiqa_status st = agiqa_cache_info(path.c_str(), &s);
  if (st == AGIQA_ERR_IO || st == AGIQA_ERR_INVALID_ARGUMENT || st == AGIQA_ERR_INTERNAL) return report(st);
  std::printf("file         %s (%llu bytes)\n", path.c_str(), static_cast<unsigned long long>(s.file_size));
  std::printf("magic        %s\n", s.magic_ok ? "MAFC" : "BAD");
  std::printf("version      %u\n", static_cast<unsigned>(s.version));
  std::printf("hidden_size  %u\n", static_cast<unsigned>(s.hidden_size));
  std::printf("entries      %llu (a=%llu b=%llu q=%llu)\n",
              static_cast<unsigned long long>(s.entry_count), static_cast<unsigned long long>(s.count_a),
              static_cast<unsigned long long>(s.count_b), static_cast<unsigned long long>(s.count_q));
  if (s.checksum_ok) {
    std::printf("checksum OK (crc32 %08x)\n", s.stored_crc);
  } else {
    std::printf("checksum FAIL (stored %08x, computed %08x)\n", s.stored_crc, s.computed_crc);
  }
  if (st != AGIQA_OK) {
    std::printf("problem      %s\n", s.problem);
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AGI image quality assessment: synthetic data, training, evaluation, ablation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(agiqa_version()));

  std::string format = "both";
  app.add_option("--format", format, "What to print for commands: table, records or both")
      ->check(CLI::IsMember({"table", "records", "both"}))
      ->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    CommandFn fn;
  };
  const Command commands[] = {
      {"gen-synth", "Write a seeded synthetic manifest, feature caches and train.ini", agiqa_gen_synth},
      {"train", "Train, select the best validation epoch, report test metrics", agiqa_train},
      {"eval", "Evaluate a checkpoint on one split part", agiqa_eval},
      {"ablate", "Run the 7 component masks plus the concatenation baseline", agiqa_ablate},
      {"cross", "Evaluate a checkpoint on another dataset's test part", agiqa_cross},
  };
  std::vector<std::string> args[std::size(commands)];
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
    sub->add_option("args", args[i], "[CONFIG] [key=value | section.key=value ...]");
    subs.push_back(sub);
  }

  std::string cache_path;
  auto* info = app.add_subcommand("cache-info", "Print header fields, tag counts and checksum status");
  info->add_option("path", cache_path, "Feature cache file")->required();

  std::string prompts_path;
  auto* prompts = app.add_subcommand("prompts", "Write the prompt registry for the feature extractor");
  prompts->add_option("path", prompts_path, "Output text file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return run_command(commands[i].name, commands[i].fn, args[i], format);
  }
  if (info->parsed()) return run_cache_info(cache_path);
  if (prompts->parsed()) {
    if (auto st = agiqa_write_prompt_registry(prompts_path.c_str()); st != AGIQA_OK) return report(st);
    return kExitOk;
  }
  return kExitUsage;
}
