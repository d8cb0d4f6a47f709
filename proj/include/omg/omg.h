/*
 * C interface to the multi-granularity vehicle retrieval library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns an omg_status; on failure the context keeps a message
 * retrievable with omg_context_last_error(). Strings handed back through
 * `char** out` parameters are heap-allocated and must be released with
 * omg_string_free().
 */
#ifndef OMG_OMG_H_
#define OMG_OMG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OMG_API __declspec(dllexport)
#else
#define OMG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum omg_status {
  OMG_OK = 0,
  OMG_ERR_USAGE = 1,   /* invalid argument or option */
  OMG_ERR_DATA = 2,    /* malformed or inconsistent input, I/O failure */
  OMG_ERR_NUMERIC = 3  /* degenerate embedding, non-finite loss */
} omg_status;

typedef struct omg_context omg_context;
typedef struct omg_tracks omg_tracks;
typedef struct omg_model omg_model;

typedef struct omg_box {
  double x, y, w, h;
} omg_box;

/* Training and evaluation settings. Fill with omg_run_config_default(). */
typedef struct omg_run_config {
  int batch_size;
  int embed_dim;
  int text_dim;
  int grid;
  int use_context;
  int use_motion;
  int use_local;
  int use_prompt;
  int mft;
  double lambda1;
  double lambda2;
  double base_lr;
  double min_lr;
  int total_epochs;
  int warmup_epochs;
  uint64_t seed;
  int shared_id_head;
  double line_thickness;
  int motion_size;
  int augment_text;
  int num_classes; /* 0: derive from the data */
} omg_run_config;

typedef struct omg_synth_options {
  uint64_t seed;
  int vehicles;
  double noise;
  int duplicated_ids;
  int tracks_per_duplicate;
  int frames;
  double relation_rate;
} omg_synth_options;

typedef struct omg_preprocess_options {
  double line_thickness;
  int motion_size;
  double overlap_threshold;
  int write_pgm;
} omg_preprocess_options;

OMG_API const char* omg_version(void);
OMG_API void omg_string_free(char* s);

OMG_API omg_status omg_context_create(omg_context** out);
OMG_API void omg_context_destroy(omg_context* ctx);
OMG_API const char* omg_context_last_error(const omg_context* ctx);
/* Worker cap for parallel stages; defaults to OMG_THREADS or 1. */
OMG_API omg_status omg_context_set_threads(omg_context* ctx, int threads);
OMG_API omg_status omg_context_load_lexicons(omg_context* ctx, const char* path);

OMG_API void omg_run_config_default(omg_run_config* cfg);
/* Overrides fields of *cfg from a JSON config file. */
OMG_API omg_status omg_run_config_load(omg_context* ctx, const char* path, omg_run_config* cfg);
OMG_API void omg_synth_options_default(omg_synth_options* opts);
OMG_API void omg_preprocess_options_default(omg_preprocess_options* opts);

OMG_API omg_status omg_tracks_load(omg_context* ctx, const char* path, omg_tracks** out);
/* base_dir resolves relative "crops" paths; may be NULL for ".". */
OMG_API omg_status omg_tracks_parse(omg_context* ctx, const char* json, const char* base_dir,
                                    omg_tracks** out);
OMG_API size_t omg_tracks_count(const omg_tracks* tracks);
OMG_API const char* omg_tracks_id(const omg_tracks* tracks, size_t index);
OMG_API void omg_tracks_destroy(omg_tracks* tracks);

OMG_API omg_status omg_preprocess(omg_context* ctx, const omg_tracks* tracks, const char* out_dir,
                                  const omg_preprocess_options* opts, char** manifest_json);
OMG_API omg_status omg_prompts(omg_context* ctx, const omg_tracks* tracks, char** prompts_json);
OMG_API omg_status omg_synth(omg_context* ctx, const omg_synth_options* opts, const char* out_dir,
                             char** summary_json);

OMG_API omg_status omg_train(omg_context* ctx, const omg_tracks* tracks, const omg_run_config* cfg,
                             omg_model** out, char** loss_csv);
OMG_API omg_status omg_model_save(omg_context* ctx, const omg_model* model, const char* path);
OMG_API omg_status omg_model_load(omg_context* ctx, const char* path, omg_model** out);
OMG_API void omg_model_destroy(omg_model* model);

/* mft < 1 keeps the default of one (middle) frame. */
OMG_API omg_status omg_evaluate(omg_context* ctx, const omg_model* model, const omg_tracks* tracks,
                                int mft, char** results_json);
/* Similarity tensor file [Q, G, P]. tracks (optional) names the gallery;
 * truth (optional, length Q) gives each query's gallery index. */
OMG_API omg_status omg_evaluate_tensor(omg_context* ctx, const char* tensor_path,
                                       const omg_tracks* tracks, const int* truth,
                                       size_t truth_count, char** results_json);

OMG_API double omg_box_iou(omg_box a, omg_box b);
OMG_API omg_status omg_expand_context_box(omg_context* ctx, omg_box box, int frame_width,
                                          int frame_height, omg_box* out);
OMG_API omg_status omg_lr_at(omg_context* ctx, const omg_run_config* cfg, double epoch,
                             double* out);
OMG_API omg_status omg_mrr(omg_context* ctx, const int* ranks, size_t count, double* out);
OMG_API omg_status omg_recall_at_k(omg_context* ctx, const int* ranks, size_t count, int k,
                                   double* out);

#ifdef __cplusplus
}
#endif

#endif /* OMG_OMG_H_ */
