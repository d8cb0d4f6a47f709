#include "omg/omg.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "omg/commands.hpp"
#include "omg/geometry.hpp"
#include "omg/parallel.hpp"

struct omg_context {
  std::string last_error;
  int threads = omg::threads_from_env();
  std::optional<omg::Lexicons> lexicons;

  const omg::Lexicons& lex() const { return lexicons ? *lexicons : omg::default_lexicons(); }
};

struct omg_tracks {
  omg::TrackSet set;
};

struct omg_model {
  omg::Model model;
};

namespace {

// Raised for caller mistakes (bad arguments, inconsistent options).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

omg_status guarded(omg_context* ctx, const std::function<void()>& body) {
  if (ctx == nullptr) return OMG_ERR_USAGE;
  ctx->last_error.clear();
  try {
    body();
    return OMG_OK;
  } catch (const std::invalid_argument& e) {
    ctx->last_error = e.what();
    return OMG_ERR_USAGE;
  } catch (const omg::NumericError& e) {
    ctx->last_error = e.what();
    return OMG_ERR_NUMERIC;
  } catch (const std::exception& e) {
    // Data errors, I/O failures and anything unexpected.
    ctx->last_error = e.what();
    return OMG_ERR_DATA;
  } catch (...) {
    ctx->last_error = "unknown error";
    return OMG_ERR_DATA;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

omg::RunConfig to_run_config(const omg_run_config& c, int threads) {
  omg::RunConfig r;
  r.train.batch_size = c.batch_size;
  r.model.embed_dim = c.embed_dim;
  r.model.text_dim = c.text_dim;
  r.model.grid = c.grid;
  r.model.granularities = {c.use_context != 0, c.use_motion != 0, c.use_local != 0,
                           c.use_prompt != 0};
  r.eval.mft = c.mft;
  r.eval.threads = threads;
  r.train.weights.lambda1 = c.lambda1;
  r.train.weights.lambda2 = c.lambda2;
  r.train.schedule = {c.base_lr, c.min_lr, c.total_epochs, c.warmup_epochs};
  r.train.seed = c.seed;
  r.train.threads = threads;
  r.train.augment_text = c.augment_text != 0;
  r.model.shared_id_head = c.shared_id_head != 0;
  r.model.motion.thickness = c.line_thickness;
  r.model.motion.out_width = c.motion_size;
  r.model.motion.out_height = c.motion_size;
  r.num_classes = c.num_classes;
  return r;
}

void from_run_config(const omg::RunConfig& r, omg_run_config* c) {
  c->batch_size = r.train.batch_size;
  c->embed_dim = r.model.embed_dim;
  c->text_dim = r.model.text_dim;
  c->grid = r.model.grid;
  c->use_context = r.model.granularities.context;
  c->use_motion = r.model.granularities.motion;
  c->use_local = r.model.granularities.local;
  c->use_prompt = r.model.granularities.prompt;
  c->mft = r.eval.mft;
  c->lambda1 = r.train.weights.lambda1;
  c->lambda2 = r.train.weights.lambda2;
  c->base_lr = r.train.schedule.base_lr;
  c->min_lr = r.train.schedule.min_lr;
  c->total_epochs = r.train.schedule.total_epochs;
  c->warmup_epochs = r.train.schedule.warmup_epochs;
  c->seed = r.train.seed;
  c->shared_id_head = r.model.shared_id_head;
  c->line_thickness = r.model.motion.thickness;
  c->motion_size = r.model.motion.out_width;
  c->augment_text = r.train.augment_text;
  c->num_classes = r.num_classes;
}

omg::RunConfig checked_config(const omg_run_config* cfg, int threads) {
  require(cfg != nullptr, "null run config");
  omg::RunConfig r = to_run_config(*cfg, threads);
  try {
    omg::validate_run_config(r);
  } catch (const omg::DataError& e) {
    throw UsageError(e.what());
  }
  return r;
}

}  // namespace

extern "C" {

const char* omg_version(void) { return "1.0.0"; }

void omg_string_free(char* s) { std::free(s); }

omg_status omg_context_create(omg_context** out) {
  if (out == nullptr) return OMG_ERR_USAGE;
  *out = new (std::nothrow) omg_context();
  return *out ? OMG_OK : OMG_ERR_DATA;
}

void omg_context_destroy(omg_context* ctx) { delete ctx; }

const char* omg_context_last_error(const omg_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

omg_status omg_context_set_threads(omg_context* ctx, int threads) {
  return guarded(ctx, [&] {
    require(threads >= 1, "thread count must be >= 1");
    ctx->threads = threads;
  });
}

omg_status omg_context_load_lexicons(omg_context* ctx, const char* path) {
  return guarded(ctx, [&] {
    require(path != nullptr, "null lexicon path");
    ctx->lexicons = omg::load_lexicons(path);
  });
}

void omg_run_config_default(omg_run_config* cfg) {
  if (cfg != nullptr) from_run_config(omg::RunConfig{}, cfg);
}

omg_status omg_run_config_load(omg_context* ctx, const char* path, omg_run_config* cfg) {
  return guarded(ctx, [&] {
    require(path != nullptr && cfg != nullptr, "null config argument");
    const omg::RunConfig base = to_run_config(*cfg, ctx->threads);
    from_run_config(omg::parse_run_config(omg::read_file(path), base), cfg);
  });
}

void omg_synth_options_default(omg_synth_options* opts) {
  if (opts == nullptr) return;
  const omg::SyntheticOptions d;
  opts->seed = d.seed;
  opts->vehicles = d.vehicles;
  opts->noise = d.noise;
  opts->duplicated_ids = d.duplicated_ids;
  opts->tracks_per_duplicate = d.tracks_per_duplicate;
  opts->frames = d.frames;
  opts->relation_rate = d.relation_rate;
}

void omg_preprocess_options_default(omg_preprocess_options* opts) {
  if (opts == nullptr) return;
  const omg::MotionMapOptions d;
  opts->line_thickness = d.thickness;
  opts->motion_size = d.out_width;
  opts->overlap_threshold = d.overlap_threshold;
  opts->write_pgm = 0;
}

omg_status omg_tracks_load(omg_context* ctx, const char* path, omg_tracks** out) {
  return guarded(ctx, [&] {
    require(path != nullptr && out != nullptr, "null tracks argument");
    *out = new omg_tracks{omg::load_track_set(path)};
  });
}

omg_status omg_tracks_parse(omg_context* ctx, const char* json, const char* base_dir,
                            omg_tracks** out) {
  return guarded(ctx, [&] {
    require(json != nullptr && out != nullptr, "null tracks argument");
    omg::TrackSet set{omg::parse_tracks_json(json), base_dir ? base_dir : "."};
    *out = new omg_tracks{std::move(set)};
  });
}

size_t omg_tracks_count(const omg_tracks* tracks) { return tracks ? tracks->set.tracks.size() : 0; }

const char* omg_tracks_id(const omg_tracks* tracks, size_t index) {
  if (tracks == nullptr || index >= tracks->set.tracks.size()) return nullptr;
  return tracks->set.tracks[index].track_id.c_str();
}

void omg_tracks_destroy(omg_tracks* tracks) { delete tracks; }

omg_status omg_preprocess(omg_context* ctx, const omg_tracks* tracks, const char* out_dir,
                          const omg_preprocess_options* opts, char** manifest_json) {
  return guarded(ctx, [&] {
    require(tracks != nullptr && out_dir != nullptr, "null preprocess argument");
    omg::PreprocessOptions p;
    if (opts != nullptr) {
      require(opts->line_thickness >= 1, "line thickness must be >= 1");
      require(opts->motion_size >= 1, "motion map size must be >= 1");
      p.motion.thickness = opts->line_thickness;
      p.motion.out_width = p.motion.out_height = opts->motion_size;
      p.motion.overlap_threshold = opts->overlap_threshold;
      p.write_pgm = opts->write_pgm != 0;
    }
    p.threads = ctx->threads;
    const std::string manifest = omg::run_preprocess(tracks->set, out_dir, p);
    if (manifest_json != nullptr) *manifest_json = dup_string(manifest);
  });
}

omg_status omg_prompts(omg_context* ctx, const omg_tracks* tracks, char** prompts_json) {
  return guarded(ctx, [&] {
    require(tracks != nullptr && prompts_json != nullptr, "null prompts argument");
    *prompts_json = dup_string(omg::run_prompts(tracks->set, ctx->lex()));
  });
}

omg_status omg_synth(omg_context* ctx, const omg_synth_options* opts, const char* out_dir,
                     char** summary_json) {
  return guarded(ctx, [&] {
    require(opts != nullptr && out_dir != nullptr, "null synth argument");
    require(opts->vehicles >= 2, "synthetic world needs at least 2 vehicles");
    require(opts->frames >= 1, "synthetic tracks need at least 1 frame");
    require(opts->duplicated_ids >= 0 && opts->duplicated_ids <= opts->vehicles,
            "duplicated ids must lie in [0, vehicles]");
    require(opts->tracks_per_duplicate >= 1, "tracks per duplicate must be >= 1");
    require(opts->noise >= 0, "noise must be >= 0");
    omg::SyntheticOptions s;
    s.seed = opts->seed;
    s.vehicles = opts->vehicles;
    s.noise = opts->noise;
    s.duplicated_ids = opts->duplicated_ids;
    s.tracks_per_duplicate = opts->tracks_per_duplicate;
    s.frames = opts->frames;
    s.relation_rate = opts->relation_rate;
    const std::string summary = omg::run_synth(s, out_dir);
    if (summary_json != nullptr) *summary_json = dup_string(summary);
  });
}

omg_status omg_train(omg_context* ctx, const omg_tracks* tracks, const omg_run_config* cfg,
                     omg_model** out, char** loss_csv) {
  return guarded(ctx, [&] {
    require(tracks != nullptr && out != nullptr, "null train argument");
    const omg::RunConfig r = checked_config(cfg, ctx->threads);
    omg::TrainOutput result = omg::run_train(tracks->set, r, ctx->lex());
    std::string csv = omg::trace_to_csv(result.trace);
    *out = new omg_model{std::move(result.model)};
    if (loss_csv != nullptr) *loss_csv = dup_string(csv);
  });
}

omg_status omg_model_save(omg_context* ctx, const omg_model* model, const char* path) {
  return guarded(ctx, [&] {
    require(model != nullptr && path != nullptr, "null model argument");
    omg::write_file(path, omg::encode_container(omg::model_to_sections(model->model)));
  });
}

omg_status omg_model_load(omg_context* ctx, const char* path, omg_model** out) {
  return guarded(ctx, [&] {
    require(path != nullptr && out != nullptr, "null model argument");
    omg::Model m = omg::model_from_sections(omg::decode_container(omg::read_file(path)));
    *out = new omg_model{std::move(m)};
  });
}

void omg_model_destroy(omg_model* model) { delete model; }

omg_status omg_evaluate(omg_context* ctx, const omg_model* model, const omg_tracks* tracks,
                        int mft, char** results_json) {
  return guarded(ctx, [&] {
    require(model != nullptr && tracks != nullptr && results_json != nullptr,
            "null evaluate argument");
    omg::EvalOptions opts;
    opts.mft = mft < 1 ? 1 : mft;
    opts.threads = ctx->threads;
    *results_json = dup_string(omg::run_eval(model->model, tracks->set, opts, ctx->lex()));
  });
}

omg_status omg_evaluate_tensor(omg_context* ctx, const char* tensor_path, const omg_tracks* tracks,
                               const int* truth, size_t truth_count, char** results_json) {
  return guarded(ctx, [&] {
    require(tensor_path != nullptr && results_json != nullptr, "null evaluate argument");
    require(truth != nullptr || truth_count == 0, "null truth with nonzero count");
    const omg::Tensor t = omg::decode_tensor(omg::read_file(tensor_path));
    std::vector<std::string> gallery;
    if (tracks != nullptr)
      for (const auto& tr : tracks->set.tracks) gallery.push_back(tr.track_id);
    std::vector<int> tv(truth, truth + truth_count);
    if (!tv.empty() && t.dims.size() == 3 && tv.size() != t.dims[0])
      throw omg::DataError("truth list length differs from the number of queries");
    omg::EvalOptions opts;
    opts.threads = ctx->threads;
    *results_json = dup_string(omg::run_eval_tensor(t, gallery, std::move(tv), opts));
  });
}

double omg_box_iou(omg_box a, omg_box b) {
  return omg::iou({a.x, a.y, a.w, a.h}, {b.x, b.y, b.w, b.h});
}

omg_status omg_expand_context_box(omg_context* ctx, omg_box box, int frame_width,
                                  int frame_height, omg_box* out) {
  return guarded(ctx, [&] {
    require(out != nullptr, "null output box");
    require(frame_width > 0 && frame_height > 0, "frame size must be positive");
    const omg::BoundingBox c =
        omg::expand_context_box({box.x, box.y, box.w, box.h}, {frame_width, frame_height});
    *out = {c.x, c.y, c.w, c.h};
  });
}

omg_status omg_lr_at(omg_context* ctx, const omg_run_config* cfg, double epoch, double* out) {
  return guarded(ctx, [&] {
    require(cfg != nullptr && out != nullptr, "null schedule argument");
    const omg::ScheduleConfig s{cfg->base_lr, cfg->min_lr, cfg->total_epochs, cfg->warmup_epochs};
    try {
      s.validate();
    } catch (const omg::DataError& e) {
      throw UsageError(e.what());
    }
    *out = omg::lr_at(s, epoch);
  });
}

omg_status omg_mrr(omg_context* ctx, const int* ranks, size_t count, double* out) {
  return guarded(ctx, [&] {
    require(out != nullptr && (ranks != nullptr || count == 0), "null ranks argument");
    *out = omg::mrr(std::span<const int>(ranks, count));
  });
}

omg_status omg_recall_at_k(omg_context* ctx, const int* ranks, size_t count, int k, double* out) {
  return guarded(ctx, [&] {
    require(out != nullptr && (ranks != nullptr || count == 0), "null ranks argument");
    *out = omg::recall_at_k(std::span<const int>(ranks, count), k);
  });
}

}  // extern "C"
