#include "omg/commands.hpp"

#include <algorithm>
#include <json.hpp>

#include "omg/geometry.hpp"
#include "omg/parallel.hpp"

namespace omg {

using nlohmann::json;
using nlohmann::ordered_json;

RunConfig parse_run_config(const std::string& json_text, RunConfig cfg) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "batch_size", "embed_dim",     "text_dim",      "grid",          "context",
      "motion",     "local",         "prompt",        "mft",           "lambda1",
      "lambda2",    "base_lr",       "min_lr",        "total_epochs",  "warmup_epochs",
      "seed",       "shared_id_head", "thickness",    "motion_size",   "augment_text",
      "num_classes"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw DataError("unknown config key '" + key + "'");
  try {
    auto set = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    set("batch_size", cfg.train.batch_size);
    set("embed_dim", cfg.model.embed_dim);
    set("text_dim", cfg.model.text_dim);
    set("grid", cfg.model.grid);
    set("context", cfg.model.granularities.context);
    set("motion", cfg.model.granularities.motion);
    set("local", cfg.model.granularities.local);
    set("prompt", cfg.model.granularities.prompt);
    set("mft", cfg.eval.mft);
    set("lambda1", cfg.train.weights.lambda1);
    set("lambda2", cfg.train.weights.lambda2);
    set("base_lr", cfg.train.schedule.base_lr);
    set("min_lr", cfg.train.schedule.min_lr);
    set("total_epochs", cfg.train.schedule.total_epochs);
    set("warmup_epochs", cfg.train.schedule.warmup_epochs);
    set("seed", cfg.train.seed);
    set("shared_id_head", cfg.model.shared_id_head);
    set("thickness", cfg.model.motion.thickness);
    set("augment_text", cfg.train.augment_text);
    set("num_classes", cfg.num_classes);
    if (j.contains("motion_size")) {
      const int s = j.at("motion_size").get<int>();
      cfg.model.motion.out_width = s;
      cfg.model.motion.out_height = s;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

void validate_run_config(const RunConfig& cfg) {
  if (cfg.train.batch_size < 1) throw DataError("batch_size must be >= 1");
  if (cfg.model.embed_dim < 1) throw DataError("embed_dim must be >= 1");
  if (cfg.model.text_dim < 1) throw DataError("text_dim must be >= 1");
  if (cfg.model.grid < 1) throw DataError("grid must be >= 1");
  if (cfg.eval.mft < 1) throw DataError("mft must be >= 1");
  if (cfg.train.weights.lambda1 < 0 || cfg.train.weights.lambda2 < 0)
    throw DataError("loss weights must be >= 0");
  if (!(cfg.model.motion.thickness >= 1)) throw DataError("thickness must be >= 1");
  if (cfg.model.motion.out_width < 1 || cfg.model.motion.out_height < 1)
    throw DataError("motion_size must be >= 1");
  if (cfg.num_classes < 0) throw DataError("num_classes must be >= 0");
  cfg.train.schedule.validate();
}

std::string run_preprocess(const TrackSet& set, const std::filesystem::path& out_dir,
                           const PreprocessOptions& options) {
  const std::size_t n = set.tracks.size();
  std::vector<ordered_json> entries(n);
  std::filesystem::create_directories(out_dir);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const Track& t = set.tracks[i];
    const TrackPixels px = load_pixels(set, i);
    const Raster map = build_motion_map(t, px.target, options.motion);
    const std::string stem = file_stem(t.track_id);
    const std::string map_rel = "motion/" + stem + ".omgt";
    const std::string map_bytes = encode_tensor(raster_to_tensor(map));
    write_file(out_dir / map_rel, map_bytes);

    ordered_json boxes;
    boxes["id"] = t.track_id;
    boxes["kept"] = filter_overlapping_boxes(t, options.motion.overlap_threshold);
    auto frames = ordered_json::array();
    for (const auto& f : t.frames) {
      const BoundingBox c = expand_context_box(f.box, t.frame_size);
      frames.push_back({{"frame", f.frame_index},
                        {"target", {f.box.x, f.box.y, f.box.w, f.box.h}},
                        {"context", {c.x, c.y, c.w, c.h}}});
    }
    boxes["frames"] = std::move(frames);
    const std::string boxes_rel = "boxes/" + stem + ".json";
    const std::string boxes_bytes = boxes.dump(1) + "\n";
    write_file(out_dir / boxes_rel, boxes_bytes);

    ordered_json e;
    e["id"] = t.track_id;
    e["motion_map"] = map_rel;
    e["motion_map_hash"] = content_hash(map_bytes);
    e["boxes"] = boxes_rel;
    e["boxes_hash"] = content_hash(boxes_bytes);
    e["has_pixels"] = !px.empty();
    if (options.write_pgm) {
      const std::string pgm_rel = "motion/" + stem + ".pgm";
      write_file(out_dir / pgm_rel, to_pgm(map.plane(3)));
      e["trajectory_pgm"] = pgm_rel;
    }
    entries[i] = std::move(e);
  });
  ordered_json manifest;
  manifest["tracks"] = ordered_json::array();
  for (auto& e : entries) manifest["tracks"].push_back(std::move(e));
  const std::string text = manifest.dump(1) + "\n";
  write_file(out_dir / "manifest.json", text);
  return text;
}

std::string run_prompts(const TrackSet& set, const Lexicons& lex) {
  auto out = ordered_json::array();
  for (const auto& t : set.tracks) {
    const QueryTexts q = build_query_texts(t.sentences, lex);
    ordered_json e;
    e["id"] = t.track_id;
    e["color"] = q.attributes.color ? json(*q.attributes.color) : json(nullptr);
    e["type"] = q.attributes.vtype ? json(lex.types.display(*q.attributes.vtype)) : json(nullptr);
    e["prompt"] = q.prompt_text;
    e["global_text"] = q.global_text;
    out.push_back(std::move(e));
  }
  return out.dump(1) + "\n";
}

std::string run_synth(const SyntheticOptions& options, const std::filesystem::path& out_dir) {
  SyntheticWorld world = generate_synthetic(options);
  std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < world.tracks.size(); ++i) {
    Track& t = world.tracks[i];
    t.crops = "crops/" + file_stem(t.track_id) + ".omgt";
    write_file(out_dir / t.crops, encode_container(pixels_to_sections(t, world.pixels[i])));
  }
  const std::string tracks = tracks_to_json(world.tracks);
  write_file(out_dir / "tracks.json", tracks);
  ordered_json summary;
  summary["tracks"] = "tracks.json";
  summary["track_count"] = world.tracks.size();
  summary["vehicle_count"] = options.vehicles;
  summary["seed"] = options.seed;
  summary["tracks_hash"] = content_hash(tracks);
  return summary.dump(1) + "\n";
}

std::vector<TrackPixels> load_all_pixels(const TrackSet& set, int threads) {
  std::vector<TrackPixels> px(set.tracks.size());
  parallel_for(px.size(), threads, [&](std::size_t i) { px[i] = load_pixels(set, i); });
  return px;
}

namespace {

int classes_for(const TrackSet& set, int configured) {
  int max_id = 0;
  for (const auto& t : set.tracks) max_id = std::max(max_id, t.vehicle_class_id);
  if (configured == 0) return max_id + 1;
  if (max_id >= configured)
    throw DataError("class id " + std::to_string(max_id) + " exceeds num_classes");
  return configured;
}

}  // namespace

TrainOutput run_train(const TrackSet& set, const RunConfig& cfg, const Lexicons& lex) {
  validate_run_config(cfg);
  if (set.tracks.empty()) throw DataError("no training tracks");
  ModelConfig mc = cfg.model;
  mc.num_classes = classes_for(set, cfg.num_classes);
  const auto pixels = load_all_pixels(set, cfg.train.threads);
  const auto prepared = prepare_tracks(set.tracks, pixels, mc, lex, cfg.train.threads);
  const Model initial = Model::initialize(mc, cfg.train.seed);
  TrainResult r = train(initial, prepared, cfg.train, lex);
  return {std::move(r.model), std::move(r.trace)};
}

std::string run_eval(const Model& model, const TrackSet& set, const EvalOptions& options,
                     const Lexicons& lex) {
  if (set.tracks.empty()) throw DataError("no tracks to evaluate");
  const auto pixels = load_all_pixels(set, options.threads);
  const auto prepared = prepare_tracks(set.tracks, pixels, model.config, lex, options.threads);
  return results_to_json(evaluate(model, prepared, options));
}

std::string run_eval_tensor(const Tensor& tensor, const std::vector<std::string>& gallery_ids,
                            std::vector<int> truth, const EvalOptions& options) {
  if (tensor.dims.size() != 3)
    throw DataError("similarity tensor must have rank 3 [queries, gallery, pairs]");
  SimilarityTensor sims(static_cast<int>(tensor.dims[0]), static_cast<int>(tensor.dims[1]),
                        static_cast<int>(tensor.dims[2]));
  for (std::size_t i = 0; i < tensor.values.size(); ++i) sims.values[i] = tensor.values[i];
  std::vector<std::string> gallery = gallery_ids;
  if (gallery.empty())
    for (int g = 0; g < sims.gallery; ++g) gallery.push_back("g" + std::to_string(g));
  if (static_cast<int>(gallery.size()) < sims.gallery)
    throw DataError("fewer gallery ids than gallery columns in the tensor");
  gallery.resize(static_cast<std::size_t>(sims.gallery));
  if (truth.empty()) {
    if (sims.queries > sims.gallery)
      throw DataError("default truth needs queries <= gallery; pass explicit truth indices");
    for (int q = 0; q < sims.queries; ++q) truth.push_back(q);
  }
  std::vector<std::string> queries;
  for (int q = 0; q < sims.queries; ++q) {
    const int t = truth.at(static_cast<std::size_t>(q));
    if (t < 0 || t >= sims.gallery) throw DataError("truth index outside the gallery");
    queries.push_back(gallery[static_cast<std::size_t>(t)]);
  }
  return results_to_json(evaluate_similarities(sims, queries, gallery, truth, options));
}

}  // namespace omg
