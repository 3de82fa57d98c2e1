#include "pipeline/trainer.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "common/text.hpp"
#include "numerics/graph.hpp"
#include "numerics/rng.hpp"

namespace agiqa::pipeline {

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::kConfig, "epochs must be >= 1, got " + std::to_string(epochs));
  if (batch_size < 1) fail(ErrorCode::kConfig, "batch_size must be >= 1");
  if (!(adam.lr > 0.0)) fail(ErrorCode::kConfig, "lr must be > 0");
  model.fusion.validate();
  if (model.source == afm::FeatureSource::kToyBackbone) model.backbone.validate();
}

std::map<std::string, std::string> TrainConfig::to_echo() const {
  auto e = model.to_echo();
  e["train.epochs"] = std::to_string(epochs);
  e["train.batch_size"] = std::to_string(batch_size);
  e["train.lr"] = text::format_double(adam.lr);
  e["train.beta1"] = text::format_double(adam.beta1);
  e["train.beta2"] = text::format_double(adam.beta2);
  e["train.eps"] = text::format_double(adam.eps);
  e["train.seed"] = std::to_string(seed);
  return e;
}

std::string RunRecord::log_text() const {
  std::string out;
  for (const auto& [k, v] : config_echo) out += "config " + k + "=" + v + "\n";
  out += "split train=" + std::to_string(train_size) + " val=" + std::to_string(val_size) +
         " test=" + std::to_string(test_size) + "\n";
  for (const auto& e : epochs) {
    out += "epoch epoch=" + std::to_string(e.epoch) + " loss=" + text::format_double(e.train_loss);
    out += e.val ? " " + metrics::format_record(*e.val) : std::string(" val=undefined");
    out += "\n";
  }
  out += "selected epoch=" + std::to_string(selected_epoch);
  if (!checkpoint_path.empty()) out += " checkpoint=" + checkpoint_path.string();
  out += "\n";
  return out;
}

metrics::EvalReport evaluate_model(const afm::IqaModel& model, const std::vector<Sample>& samples) {
  if (samples.empty()) fail(ErrorCode::kEmptyInput, "cannot evaluate on an empty set of images");
  std::vector<double> pred, truth;
  pred.reserve(samples.size());
  truth.reserve(samples.size());
  for (const auto& s : samples) {
    pred.push_back(model.predict(s.input()));
    truth.push_back(s.mos);
  }
  return metrics::evaluate(pred, truth);
}

RunRecord train(const TrainConfig& config, const Dataset& dataset,
                const std::filesystem::path& checkpoint_path) {
  config.validate();
  TrainConfig cfg = config;
  dataset.infer_dims(cfg.model);

  const auto parts = split(dataset.manifest(), cfg.seed);
  // Resolve everything up front so missing features fail before training.
  const auto train_set = dataset.samples(parts.train, cfg.model);
  const auto val_set = dataset.samples(parts.val, cfg.model);
  (void)dataset.samples(parts.test, cfg.model);

  afm::IqaModel model(cfg.model);
  nn::Rng init_rng(nn::derive_seed(cfg.seed, "init"));
  model.init(init_rng);
  nn::Adam optimizer(model.parameters(), cfg.adam);
  nn::Rng shuffle_rng(nn::derive_seed(cfg.seed, "shuffle"));
  nn::Rng dropout_rng(nn::derive_seed(cfg.seed, "dropout"));

  RunRecord record;
  record.config_echo = cfg.to_echo();
  record.train_size = parts.train.size();
  record.val_size = parts.val.size();
  record.test_size = parts.test.size();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<double> best_score;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      nn::Graph g;
      std::vector<nn::Var> preds;
      std::vector<double> targets;
      for (std::size_t k = start; k < end; ++k) {
        const Sample& s = train_set[order[k]];
        preds.push_back(model.forward(g, s.input(), nn::Mode::kTrain, dropout_rng).score);
        targets.push_back(s.mos);
      }
      const nn::Var loss = nn::mse_loss(g, nn::concat(g, preds), targets);
      const double value = g.scalar(loss);
      const std::string where =
          "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
      if (!std::isfinite(value)) fail(ErrorCode::kNumeric, "training diverged: non-finite loss at " + where);
      optimizer.zero_grad();
      g.backward(loss);
      try {
        optimizer.step();
      } catch (const Error& e) {
        fail(e.code(), std::string(e.what()) + " at " + where);
      }
      loss_sum += value * static_cast<double>(end - start);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / static_cast<double>(order.size());
    try {
      log.val = evaluate_model(model, val_set);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedCorrelation && e.code() != ErrorCode::kTooSmall) throw;
    }
    if (log.val && (!best_score || log.val->selection_score() > *best_score)) {
      best_score = log.val->selection_score();
      record.selected_epoch = epoch;
      record.selected_val = log.val;
      record.checkpoint = afm::encode_checkpoint(model, record.config_echo);
    }
    record.epochs.push_back(log);
  }

  if (!best_score) {
    // No epoch produced defined validation correlations; keep the final weights.
    record.selected_epoch = cfg.epochs;
    record.checkpoint = afm::encode_checkpoint(model, record.config_echo);
  }
  if (!checkpoint_path.empty()) {
    afm::save_checkpoint(checkpoint_path, record.checkpoint);
    record.checkpoint_path = checkpoint_path;
  }
  return record;
}

metrics::EvalReport evaluate(std::span<const std::uint8_t> checkpoint, const Dataset& dataset,
                             SplitPart part) {
  std::map<std::string, std::string> echo;
  const afm::IqaModel model = afm::decode_checkpoint(checkpoint, &echo);
  const auto seed_it = echo.find("train.seed");
  if (seed_it == echo.end()) fail(ErrorCode::kFormat, "checkpoint does not record its split seed");
  const auto seed = text::parse_u64(seed_it->second, "train.seed");
  const auto parts = split(dataset.manifest(), seed);
  const auto& ids = parts.part(part);
  if (ids.empty()) {
    fail(ErrorCode::kEmptyInput, std::string("split part '") + to_string(part) + "' of dataset '" +
                                     dataset.name() + "' is empty");
  }
  return evaluate_model(model, dataset.samples(ids, model.config()));
}

metrics::EvalReport cross_evaluate(std::span<const std::uint8_t> checkpoint, const Dataset& other) {
  return evaluate(checkpoint, other, SplitPart::kTest);
}

}  // namespace agiqa::pipeline
