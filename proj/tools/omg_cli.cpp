// Batch command-line front end. Machine-readable output goes to stdout,
// diagnostics to stderr.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "omg/omg.h"

namespace {

using ContextPtr = std::unique_ptr<omg_context, decltype(&omg_context_destroy)>;
using TracksPtr = std::unique_ptr<omg_tracks, decltype(&omg_tracks_destroy)>;
using ModelPtr = std::unique_ptr<omg_model, decltype(&omg_model_destroy)>;

// Thrown to unwind with a status already reported on stderr.
struct Failure {
  int code;
};

void check(omg_context* ctx, omg_status s, const std::string& what) {
  if (s == OMG_OK) return;
  std::cerr << "omg: " << what << ": " << omg_context_last_error(ctx) << "\n";
  throw Failure{static_cast<int>(s)};
}

void emit(char* text) {
  std::fputs(text, stdout);
  omg_string_free(text);
}

TracksPtr load_tracks(omg_context* ctx, const std::string& path) {
  omg_tracks* t = nullptr;
  check(ctx, omg_tracks_load(ctx, path.c_str(), &t), "loading " + path);
  return TracksPtr(t, omg_tracks_destroy);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "omg: cannot write " << path << "\n";
    throw Failure{OMG_ERR_DATA};
  }
}

std::vector<int> parse_truth(const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::cerr << "omg: bad truth index '" << item << "'\n";
      throw Failure{OMG_ERR_USAGE};
    }
  }
  return out;
}

// Granularity switch that may stay unset so config files keep precedence.
struct Toggle {
  bool value = false;
  CLI::Option* opt = nullptr;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    opt = app->add_flag("--" + name + ",!--no-" + name, value, help);
  }
  void apply(int& field) const {
    if (opt != nullptr && opt->count() > 0) field = value ? 1 : 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-granularity text-to-vehicle retrieval toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path, lexicon_path;
  std::optional<uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--threads", threads, "Worker cap (default: OMG_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--lexicon", lexicon_path, "Color/type lexicon file")->check(CLI::ExistingFile);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Motion maps and context boxes per track");
  std::string pre_tracks, pre_out;
  omg_preprocess_options pre_opts;
  omg_preprocess_options_default(&pre_opts);
  bool pre_pgm = false;
  pre->add_option("tracks", pre_tracks, "Track JSON")->required();
  pre->add_option("-o,--out", pre_out, "Output directory")->required();
  pre->add_option("--thickness", pre_opts.line_thickness, "Trajectory line thickness (px)");
  pre->add_option("--motion-size", pre_opts.motion_size, "Motion map side (px)");
  pre->add_flag("--pgm", pre_pgm, "Also write the trajectory mask as PGM");

  // prompt
  auto* prm = app.add_subcommand("prompt", "Color-type prompts and global text per track");
  std::string prm_tracks;
  prm->add_option("tracks", prm_tracks, "Track JSON")->required();

  // train
  auto* trn = app.add_subcommand("train", "Train encoders; writes a checkpoint and loss CSV");
  std::string trn_tracks, trn_ckpt, trn_csv;
  std::optional<int> epochs, warmup, batch;
  std::optional<double> lambda1, lambda2, base_lr, min_lr;
  Toggle t_context, t_motion, t_local, t_prompt;
  trn->add_option("tracks", trn_tracks, "Track JSON")->required();
  trn->add_option("-o,--checkpoint", trn_ckpt, "Checkpoint output path")->required();
  trn->add_option("--loss-csv", trn_csv, "Loss trace CSV path");
  trn->add_option("--epochs", epochs, "Total epochs");
  trn->add_option("--warmup", warmup, "Warm-up epochs");
  trn->add_option("--batch-size", batch, "Pairs per batch");
  trn->add_option("--lambda1", lambda1, "Contrastive loss weight");
  trn->add_option("--lambda2", lambda2, "ID loss weight");
  trn->add_option("--base-lr", base_lr, "Peak learning rate");
  trn->add_option("--min-lr", min_lr, "Floor learning rate");
  t_context.add(trn, "context", "Context crop branch");
  t_motion.add(trn, "motion", "Motion map branch");
  t_local.add(trn, "local", "Per-sentence local text");
  t_prompt.add(trn, "prompt", "Color-type prompt text");

  // eval
  auto* evl = app.add_subcommand("eval", "Retrieval metrics from a checkpoint or similarity tensor");
  std::string evl_ckpt, evl_tensor, evl_tracks, evl_truth;
  std::optional<int> mft;
  auto* ck = evl->add_option("--checkpoint", evl_ckpt, "Model checkpoint");
  auto* st = evl->add_option("--similarity", evl_tensor, "Similarity tensor [Q, G, P]");
  ck->excludes(st);
  evl->add_option("--tracks", evl_tracks, "Track JSON (gallery for --similarity)");
  evl->add_option("--truth", evl_truth, "Comma-separated gallery index per query")->needs(st);
  evl->add_option("--mft", mft, "Frames averaged per gallery track")->check(CLI::PositiveNumber);

  // synth
  auto* syn = app.add_subcommand("synth", "Generate a seeded synthetic world");
  std::string syn_out;
  omg_synth_options syn_opts;
  omg_synth_options_default(&syn_opts);
  syn->add_option("-o,--out", syn_out, "Output directory")->required();
  syn->add_option("-n,--vehicles", syn_opts.vehicles, "Distinct vehicle IDs");
  syn->add_option("--noise", syn_opts.noise, "Pixel noise stddev");
  syn->add_option("--duplicated-ids", syn_opts.duplicated_ids, "IDs with several tracks");
  syn->add_option("--tracks-per-duplicate", syn_opts.tracks_per_duplicate,
                  "Tracks per duplicated ID");
  syn->add_option("--frames", syn_opts.frames, "Frames per track");
  syn->add_option("--relation-rate", syn_opts.relation_rate,
                  "Probability of a following vehicle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : OMG_ERR_USAGE;
  }

  omg_context* raw = nullptr;
  if (omg_context_create(&raw) != OMG_OK) return OMG_ERR_DATA;
  ContextPtr ctx(raw, omg_context_destroy);

  try {
    if (threads > 0) check(ctx.get(), omg_context_set_threads(ctx.get(), threads), "--threads");
    if (!lexicon_path.empty())
      check(ctx.get(), omg_context_load_lexicons(ctx.get(), lexicon_path.c_str()), "--lexicon");

    omg_run_config cfg;
    omg_run_config_default(&cfg);
    if (!config_path.empty())
      check(ctx.get(), omg_run_config_load(ctx.get(), config_path.c_str(), &cfg), "--config");
    if (seed) cfg.seed = *seed;

    if (*pre) {
      auto tracks = load_tracks(ctx.get(), pre_tracks);
      if (!config_path.empty()) {
        pre_opts.line_thickness = cfg.line_thickness;
        pre_opts.motion_size = cfg.motion_size;
      }
      pre_opts.write_pgm = pre_pgm;
      char* manifest = nullptr;
      check(ctx.get(),
            omg_preprocess(ctx.get(), tracks.get(), pre_out.c_str(), &pre_opts, &manifest),
            "preprocess");
      std::cerr << "omg: preprocessed " << omg_tracks_count(tracks.get()) << " tracks\n";
      emit(manifest);
    } else if (*prm) {
      auto tracks = load_tracks(ctx.get(), prm_tracks);
      char* out = nullptr;
      check(ctx.get(), omg_prompts(ctx.get(), tracks.get(), &out), "prompt");
      emit(out);
    } else if (*trn) {
      auto tracks = load_tracks(ctx.get(), trn_tracks);
      if (epochs) cfg.total_epochs = *epochs;
      if (warmup) cfg.warmup_epochs = *warmup;
      if (batch) cfg.batch_size = *batch;
      if (lambda1) cfg.lambda1 = *lambda1;
      if (lambda2) cfg.lambda2 = *lambda2;
      if (base_lr) cfg.base_lr = *base_lr;
      if (min_lr) cfg.min_lr = *min_lr;
      t_context.apply(cfg.use_context);
      t_motion.apply(cfg.use_motion);
      t_local.apply(cfg.use_local);
      t_prompt.apply(cfg.use_prompt);
      std::cerr << "omg: training on " << omg_tracks_count(tracks.get()) << " tracks for "
                << cfg.total_epochs << " epochs\n";
      omg_model* model = nullptr;
      char* csv = nullptr;
      check(ctx.get(), omg_train(ctx.get(), tracks.get(), &cfg, &model, &csv), "train");
      ModelPtr owned(model, omg_model_destroy);
      const std::string trace = csv;
      omg_string_free(csv);
      check(ctx.get(), omg_model_save(ctx.get(), owned.get(), trn_ckpt.c_str()), "saving");
      if (!trn_csv.empty()) write_text(trn_csv, trace);
      // Last CSV row: epoch,L_info,L_id,L_total,tau
      std::string last;
      std::stringstream ss(trace);
      for (std::string line; std::getline(ss, line);)
        if (!line.empty()) last = line;
      std::printf("{\n \"checkpoint\": \"%s\",\n \"epochs\": %d,\n \"seed\": %llu,\n \"final\": \"%s\"\n}\n",
                  trn_ckpt.c_str(), cfg.total_epochs, static_cast<unsigned long long>(cfg.seed),
                  last.c_str());
    } else if (*evl) {
      char* out = nullptr;
      if (!evl_tensor.empty()) {
        TracksPtr tracks(nullptr, omg_tracks_destroy);
        if (!evl_tracks.empty()) tracks = load_tracks(ctx.get(), evl_tracks);
        const std::vector<int> truth = parse_truth(evl_truth);
        check(ctx.get(),
              omg_evaluate_tensor(ctx.get(), evl_tensor.c_str(), tracks.get(),
                                  truth.empty() ? nullptr : truth.data(), truth.size(), &out),
              "eval");
      } else {
        if (evl_ckpt.empty() || evl_tracks.empty()) {
          std::cerr << "omg: eval needs --checkpoint with --tracks, or --similarity\n";
          return OMG_ERR_USAGE;
        }
        auto tracks = load_tracks(ctx.get(), evl_tracks);
        omg_model* model = nullptr;
        check(ctx.get(), omg_model_load(ctx.get(), evl_ckpt.c_str(), &model), "loading checkpoint");
        ModelPtr owned(model, omg_model_destroy);
        check(ctx.get(),
              omg_evaluate(ctx.get(), owned.get(), tracks.get(), mft ? *mft : cfg.mft, &out),
              "eval");
      }
      emit(out);
    } else if (*syn) {
      if (seed) syn_opts.seed = *seed;
      char* summary = nullptr;
      check(ctx.get(), omg_synth(ctx.get(), &syn_opts, syn_out.c_str(), &summary), "synth");
      emit(summary);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
