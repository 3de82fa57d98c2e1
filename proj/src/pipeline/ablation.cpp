#include "pipeline/ablation.hpp"

#include <cstdio>

namespace agiqa::pipeline {

std::string AblationRow::label() const {
  return mask.to_string() + (moe ? "" : " (concat)");
}

std::string AblationTable::format_table() const {
  std::string out = "components     " + metrics::table_header() + "\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-15s", r.label().c_str());
    out += buf + metrics::table_row(r.test) + "\n";
  }
  return out;
}

std::string AblationTable::records() const {
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += "ablation row=" + std::to_string(i + 1) + " mask=" + r.mask.to_string() +
           " moe=" + (r.moe ? "on" : "off") + " gate=" + (r.has_gate ? "yes" : "no") +
           " epoch=" + std::to_string(r.run.selected_epoch) + " " + metrics::format_record(r.test) +
           "\n";
  }
  return out;
}

AblationTable ablate(const TrainConfig& base, const Dataset& dataset) {
  struct Variant {
    afm::ComponentMask mask;
    bool moe;
  };
  std::vector<Variant> variants;
  for (const auto& m : afm::ablation_masks()) variants.push_back({m, true});
  variants.push_back({afm::ComponentMask::all(), false});

  AblationTable table;
  for (const auto& v : variants) {
    TrainConfig cfg = base;
    cfg.model.fusion.mask = v.mask;
    cfg.model.fusion.moe = v.moe;
    AblationRow row;
    row.mask = v.mask;
    row.moe = v.moe;
    row.run = train(cfg, dataset);
    row.has_gate = afm::decode_checkpoint(row.run.checkpoint).fusion().has_gate();
    row.test = evaluate(row.run.checkpoint, dataset, SplitPart::kTest);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace agiqa::pipeline
