#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afm/model.hpp"
#include "metrics/metrics.hpp"
#include "numerics/optimizer.hpp"
#include "pipeline/dataset.hpp"
#include "pipeline/split.hpp"

namespace agiqa::pipeline {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;
  afm::ModelConfig model;

  void validate() const;
  /// Model echo plus "train.*" keys; stored in checkpoints and run logs.
  std::map<std::string, std::string> to_echo() const;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<metrics::EvalReport> val;  // absent when correlations were undefined
};

struct RunRecord {
  std::vector<EpochLog> epochs;
  std::size_t selected_epoch = 0;
  std::optional<metrics::EvalReport> selected_val;
  std::vector<std::uint8_t> checkpoint;  // best epoch, encoded
  std::filesystem::path checkpoint_path;
  std::map<std::string, std::string> config_echo;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;

  /// Line-oriented records:
  ///   config key=value
  ///   epoch epoch=N loss=L srcc=.. plcc=.. krcc=.. rmse=.. n=..
  ///   selected epoch=N checkpoint=PATH
  std::string log_text() const;
};

/// Minibatch MSE training with per-epoch validation and selection of the
/// epoch maximizing val SRCC + PLCC (earliest wins ties). Deterministic in
/// (config, dataset). Writes the checkpoint when `checkpoint_path` is set.
RunRecord train(const TrainConfig& config, const Dataset& dataset,
                const std::filesystem::path& checkpoint_path = {});

/// Eval-mode predictions over `samples`, then the metric bundle.
metrics::EvalReport evaluate_model(const afm::IqaModel& model, const std::vector<Sample>& samples);

/// Evaluates a checkpoint on one part of `dataset`, re-splitting with the
/// seed stored in the checkpoint.
metrics::EvalReport evaluate(std::span<const std::uint8_t> checkpoint, const Dataset& dataset,
                             SplitPart part);

/// Test part of another dataset under the checkpoint's split seed.
metrics::EvalReport cross_evaluate(std::span<const std::uint8_t> checkpoint, const Dataset& other);

}  // namespace agiqa::pipeline
