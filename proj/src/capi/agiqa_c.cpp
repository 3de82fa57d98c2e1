#include "agiqa/agiqa.h"

#include <memory>
#include <new>
#include <string>

#include "afm/model.hpp"
#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"
#include "semantic/feature_cache.hpp"
#include "semantic/prompts.hpp"

struct agiqa_config {
  agiqa::pipeline::Config config;
  std::string scratch;
};

struct agiqa_result {
  agiqa::pipeline::CommandResult result;
};

struct agiqa_cache {
  agiqa::semantic::FeatureCache cache;
};

struct agiqa_model {
  explicit agiqa_model(agiqa::afm::IqaModel m) : model(std::move(m)) {}
  agiqa::afm::IqaModel model;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_problem;

agiqa_status set_error(agiqa_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `fn`, mapping exceptions onto status codes and the thread's message.
template <typename Fn>
agiqa_status guarded(Fn&& fn) noexcept {
  try {
    last_error.clear();
    fn();
    return AGIQA_OK;
  } catch (const agiqa::Error& e) {
    return set_error(static_cast<agiqa_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AGIQA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AGIQA_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(AGIQA_ERR_INTERNAL, "unknown failure");
  }
}

agiqa_status null_argument(const char* name) {
  return set_error(AGIQA_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

agiqa_metrics to_c(const agiqa::metrics::EvalReport& r) {
  return agiqa_metrics{r.srcc, r.plcc, r.krcc, r.rmse, r.n};
}

using CommandFn = agiqa::pipeline::CommandResult (*)(const agiqa::pipeline::Config&);

agiqa_status run_command(const agiqa_config* config, agiqa_result** out, CommandFn fn) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<agiqa_result>();
    r->result = fn(config->config);
    *out = r.release();
  });
}

}  // namespace

extern "C" {

const char* agiqa_last_error(void) { return last_error.c_str(); }

const char* agiqa_status_string(agiqa_status status) {
  if (status == AGIQA_OK) return "ok";
  if (status == AGIQA_ERR_INTERNAL) return "internal error";
  return agiqa::to_string(static_cast<agiqa::ErrorCode>(status));
}

const char* agiqa_version(void) { return "0.1.0"; }

agiqa_status agiqa_config_create(agiqa_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new agiqa_config(); });
}

agiqa_status agiqa_config_load_file(agiqa_config* config, const char* path) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  return guarded([&] { config->config.load_file(path); });
}

agiqa_status agiqa_config_set(agiqa_config* config, const char* command, const char* key,
                              const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  if (value == nullptr) return null_argument("value");
  return guarded([&] {
    const auto preferred = agiqa::pipeline::preferred_sections(command ? command : "");
    config->config.set(key, value, preferred, std::string("override ") + key);
  });
}

agiqa_status agiqa_config_get(agiqa_config* config, const char* qualified_key, const char** out) {
  if (config == nullptr) return null_argument("config");
  if (qualified_key == nullptr) return null_argument("qualified_key");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    config->scratch = config->config.get(qualified_key);
    *out = config->scratch.c_str();
  });
}

agiqa_status agiqa_config_echo(agiqa_config* config, const char** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    config->scratch = config->config.echo();
    *out = config->scratch.c_str();
  });
}

void agiqa_config_destroy(agiqa_config* config) { delete config; }

agiqa_status agiqa_gen_synth(const agiqa_config* config, agiqa_result** out) {
  return run_command(config, out, agiqa::pipeline::run_gen_synth);
}

agiqa_status agiqa_train(const agiqa_config* config, agiqa_result** out) {
  return run_command(config, out, agiqa::pipeline::run_train);
}

agiqa_status agiqa_eval(const agiqa_config* config, agiqa_result** out) {
  return run_command(config, out, agiqa::pipeline::run_eval);
}

agiqa_status agiqa_cross(const agiqa_config* config, agiqa_result** out) {
  return run_command(config, out, agiqa::pipeline::run_cross);
}

agiqa_status agiqa_ablate(const agiqa_config* config, agiqa_result** out) {
  return run_command(config, out, agiqa::pipeline::run_ablate);
}

const char* agiqa_result_table(const agiqa_result* result) {
  return result ? result->result.table.c_str() : "";
}

const char* agiqa_result_records(const agiqa_result* result) {
  return result ? result->result.records.c_str() : "";
}

size_t agiqa_result_row_count(const agiqa_result* result) {
  return result ? result->result.rows.size() : 0;
}

agiqa_status agiqa_result_row(const agiqa_result* result, size_t index, agiqa_metrics* out) {
  if (result == nullptr) return null_argument("result");
  if (out == nullptr) return null_argument("out");
  if (index >= result->result.rows.size()) {
    return set_error(AGIQA_ERR_INVALID_ARGUMENT,
                     "row " + std::to_string(index) + " out of range; result has " +
                         std::to_string(result->result.rows.size()) + " rows");
  }
  *out = to_c(result->result.rows[index]);
  return AGIQA_OK;
}

ptrdiff_t agiqa_result_selected_row(const agiqa_result* result) {
  if (result == nullptr || !result->result.selected_row) return -1;
  return static_cast<ptrdiff_t>(*result->result.selected_row);
}

void agiqa_result_destroy(agiqa_result* result) { delete result; }

agiqa_status agiqa_cache_info(const char* path, agiqa_cache_summary* out) {
  if (path == nullptr || *path == '\0') return null_argument("path");
  if (out == nullptr) return null_argument("out");
  agiqa::semantic::CacheSummary s;
  const agiqa_status st = guarded([&] { s = agiqa::semantic::inspect_cache(agiqa::io::read_file(path)); });
  if (st != AGIQA_OK) return st;
  last_problem = s.problem;
  *out = agiqa_cache_summary{s.magic_ok ? 1 : 0, s.version,       s.hidden_size,
                             s.entry_count,     s.count_a,       s.count_b,
                             s.count_q,         s.checksum_ok ? 1 : 0, s.stored_crc,
                             s.computed_crc,    s.file_size,     last_problem.c_str()};
  if (s.problem.empty()) return AGIQA_OK;
  // Re-run the strict decoder to report the precise error class.
  return guarded([&] { (void)agiqa::semantic::cache_read(path); });
}

agiqa_status agiqa_cache_open(const char* path, agiqa_cache** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<agiqa_cache>();
    c->cache = agiqa::semantic::FeatureCache::load(path);
    *out = c.release();
  });
}

uint32_t agiqa_cache_hidden_size(const agiqa_cache* cache) {
  return cache ? cache->cache.hidden_size() : 0;
}

agiqa_status agiqa_cache_lookup(const agiqa_cache* cache, const char* image_id, char tag,
                                const float** vec, size_t* len) {
  if (cache == nullptr) return null_argument("cache");
  if (image_id == nullptr) return null_argument("image_id");
  if (vec == nullptr || len == nullptr) return null_argument("vec/len");
  return guarded([&] {
    const auto t = agiqa::semantic::tag_from_byte(static_cast<std::uint8_t>(tag));
    if (!t) agiqa::fail(agiqa::ErrorCode::kInvalidArgument, std::string("unknown tag '") + tag + "'");
    const auto* v = cache->cache.find(image_id, *t);
    if (v == nullptr) (void)cache->cache.get(image_id, *t);  // raises not-found with suggestions
    *vec = v->data();
    *len = v->size();
  });
}

void agiqa_cache_close(agiqa_cache* cache) { delete cache; }

agiqa_status agiqa_compute_metrics(const double* pred, const double* truth, size_t n,
                                   agiqa_metrics* out) {
  if ((pred == nullptr || truth == nullptr) && n > 0) return null_argument("pred/truth");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = to_c(agiqa::metrics::evaluate({pred, n}, {truth, n})); });
}

agiqa_status agiqa_write_prompt_registry(const char* path) {
  if (path == nullptr) return null_argument("path");
  return guarded([&] { agiqa::semantic::write_prompt_registry(path); });
}

agiqa_status agiqa_model_load(const char* checkpoint_path, agiqa_model** out) {
  if (checkpoint_path == nullptr) return null_argument("checkpoint_path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<agiqa_model>(agiqa::afm::load_checkpoint(checkpoint_path));
    if (m->model.config().source != agiqa::afm::FeatureSource::kCached) {
      agiqa::fail(agiqa::ErrorCode::kCompatibility,
                  "the C predict interface takes cached feature vectors; this checkpoint uses the toy backbone");
    }
    *out = m.release();
  });
}

agiqa_status agiqa_model_predict(const agiqa_model* model, const double* quality, size_t quality_len,
                                 const double* semantic, size_t semantic_len,
                                 const double* coherence, size_t coherence_len, double* score) {
  if (model == nullptr) return null_argument("model");
  if (score == nullptr) return null_argument("score");
  return guarded([&] {
    agiqa::afm::SampleInput in;
    if (quality) in.quality = {quality, quality_len};
    if (semantic) in.semantic = {semantic, semantic_len};
    if (coherence) in.coherence = {coherence, coherence_len};
    *score = model->model.predict(in);
  });
}

void agiqa_model_destroy(agiqa_model* model) { delete model; }

}  // extern "C"
