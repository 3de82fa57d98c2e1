#pragma once

#include <string>
#include <vector>

#include "afm/afm.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/trainer.hpp"

namespace agiqa::pipeline {

struct AblationRow {
  afm::ComponentMask mask;
  bool moe = true;
  bool has_gate = false;
  RunRecord run;
  metrics::EvalReport test;

  std::string label() const;  // "qab" or "qab (concat)"
};

struct AblationTable {
  std::vector<AblationRow> rows;

  /// Components column plus SRCC↑ PLCC↑ KRCC↑ RMSE↓ n.
  std::string format_table() const;
  /// `ablation row=I mask=M moe=on|off gate=yes|no epoch=E srcc=.. plcc=.. krcc=.. rmse=.. n=..`
  std::string records() const;
};

/// Seven component masks in table order, then the full mask with the
/// concatenation baseline. Each row trains on the same split and reports
/// its test metrics.
AblationTable ablate(const TrainConfig& base, const Dataset& dataset);

}  // namespace agiqa::pipeline
