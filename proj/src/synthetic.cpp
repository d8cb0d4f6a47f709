#include "omg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "omg/geometry.hpp"
#include "omg/motion_raster.hpp"

namespace omg {

const std::vector<SyntheticColor>& synthetic_colors() {
  static const std::vector<SyntheticColor> colors = {
      {"black", {0.08f, 0.08f, 0.08f}},  {"white", {0.95f, 0.95f, 0.95f}},
      {"gray", {0.50f, 0.50f, 0.50f}},   {"silver", {0.76f, 0.76f, 0.80f}},
      {"red", {0.85f, 0.10f, 0.10f}},    {"blue", {0.10f, 0.20f, 0.85f}},
      {"green", {0.10f, 0.60f, 0.20f}},  {"brown", {0.45f, 0.28f, 0.12f}},
      {"maroon", {0.45f, 0.05f, 0.12f}}, {"gold", {0.80f, 0.65f, 0.20f}},
      {"yellow", {0.95f, 0.85f, 0.10f}}, {"orange", {0.95f, 0.50f, 0.05f}},
      {"purple", {0.50f, 0.15f, 0.60f}},
  };
  return colors;
}

const std::vector<SyntheticType>& synthetic_types() {
  static const std::vector<SyntheticType> types = {
      {"sedan", 36, 20, 0x0660},   {"SUV", 40, 26, 0x0ff0},
      {"pickup truck", 44, 26, 0x0330}, {"van", 42, 30, 0x000f},
      {"wagon", 40, 22, 0x0ee0},   {"hatchback", 32, 20, 0x0cc0},
      {"coupe", 34, 18, 0x0240},   {"bus", 44, 30, 0x0f0f},
      {"minivan", 40, 28, 0x00ff}, {"jeep", 34, 26, 0x0990},
  };
  return types;
}

const std::vector<SyntheticMotion>& synthetic_motions() {
  static const std::vector<SyntheticMotion> motions = {
      {"goes straight east through the intersection"},
      {"goes straight north through the intersection"},
      {"turns left at the intersection"},
      {"turns right at the intersection"},
      {"switches to the left lane"},
      {"switches to the right lane"},
      {"slows down and stops at the light"},
      {"goes straight south down the road"},
  };
  return motions;
}

namespace {

constexpr float kGlass[3] = {0.55f, 0.62f, 0.70f};
constexpr float kRoad = 0.30f;

const char* const kDistractors[] = {
    "near the gas station", "in light traffic", "on a cloudy day",
    "under the overpass",   "past a crosswalk", "beside the sidewalk",
};

double smoothstep(double t) { return t * t * (3 - 2 * t); }

// Center of the vehicle at path position t in [0, 1] for a 320 x 240 frame,
// scaled to the configured frame size.
void path_center(int motion, double t, FrameSize frame, double& cx, double& cy) {
  constexpr double kPi = 3.14159265358979323846;
  switch (motion) {
    case 0: cx = 80 + 160 * t; cy = 120; break;
    case 1: cx = 160; cy = 180 - 110 * t; break;
    case 2: {
      const double a = t * kPi / 2;
      cx = 110 + 90 * std::cos(a);
      cy = 185 - 90 * std::sin(a);
      break;
    }
    case 3: {
      const double a = t * kPi / 2;
      cx = 210 - 90 * std::cos(a);
      cy = 185 - 90 * std::sin(a);
      break;
    }
    case 4: cx = 80 + 160 * t; cy = 140 - 40 * smoothstep(t); break;
    case 5: cx = 80 + 160 * t; cy = 100 + 40 * smoothstep(t); break;
    case 6: {
      const double s = std::min(1.0, t / 0.6);
      cx = 240 - 120 * (1 - (1 - s) * (1 - s));
      cy = 110;
      break;
    }
    default: cx = 160; cy = 70 + 110 * t; break;
  }
  cx *= frame.width / 320.0;
  cy *= frame.height / 240.0;
}

float noisy(float v, double noise, Rng& rng) {
  if (noise <= 0) return v;
  return std::clamp(static_cast<float>(v + noise * rng.normal()), 0.0f, 1.0f);
}

// Colour of a vehicle pixel at fractional position (u, v) inside its box.
const float* vehicle_pixel(const SyntheticColor& color, const SyntheticType& type, double u,
                           double v) {
  const int cx = std::min(3, static_cast<int>(u * 4));
  const int cy = std::min(3, static_cast<int>(v * 4));
  const bool glass = (type.glass_mask >> (cy * 4 + cx)) & 1;
  return glass ? kGlass : color.rgb;
}

Raster render_target(const BoundingBox& box, const VehicleLatent& lat, double noise, Rng& rng) {
  const PixelRect r = pixel_rect(box);
  Raster crop(3, r.h, r.w);
  const auto& color = synthetic_colors()[static_cast<std::size_t>(lat.color)];
  const auto& type = synthetic_types()[static_cast<std::size_t>(lat.vtype)];
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) {
      const float* px = vehicle_pixel(color, type, (x + 0.5) / r.w, (y + 0.5) / r.h);
      for (int c = 0; c < 3; ++c) crop.at(c, y, x) = noisy(px[c], noise, rng);
    }
  return crop;
}

Raster render_context(const BoundingBox& box, const VehicleLatent& lat, FrameSize frame,
                      double noise, Rng& rng) {
  const PixelRect r = pixel_rect(expand_context_box(box, frame));
  const PixelRect t = pixel_rect(box);
  const PixelRect n{t.x - static_cast<int>(std::lround(0.9 * t.w)),
                    t.y + static_cast<int>(std::lround(0.1 * t.h)),
                    static_cast<int>(std::lround(0.8 * t.w)),
                    static_cast<int>(std::lround(0.8 * t.h))};
  const auto& color = synthetic_colors()[static_cast<std::size_t>(lat.color)];
  const auto& type = synthetic_types()[static_cast<std::size_t>(lat.vtype)];
  Raster crop(3, r.h, r.w);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) {
      const int ax = r.x + x;
      const int ay = r.y + y;
      float bg[3] = {kRoad, kRoad, kRoad};
      const float* px = bg;
      if (ax >= t.x && ax < t.x + t.w && ay >= t.y && ay < t.y + t.h) {
        px = vehicle_pixel(color, type, (ax - t.x + 0.5) / t.w, (ay - t.y + 0.5) / t.h);
      } else if (lat.neighbor_color >= 0 && ax >= n.x && ax < n.x + n.w && ay >= n.y &&
                 ay < n.y + n.h) {
        px = vehicle_pixel(synthetic_colors()[static_cast<std::size_t>(lat.neighbor_color)],
                           synthetic_types()[0], (ax - n.x + 0.5) / n.w, (ay - n.y + 0.5) / n.h);
      }
      for (int c = 0; c < 3; ++c) crop.at(c, y, x) = noisy(px[c], noise, rng);
    }
  return crop;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::array<std::string, 3> compose_sentences(const VehicleLatent& lat, Rng& rng) {
  std::string color = synthetic_colors()[static_cast<std::size_t>(lat.color)].word;
  const std::string type = synthetic_types()[static_cast<std::size_t>(lat.vtype)].word;
  const std::string motion = synthetic_motions()[static_cast<std::size_t>(lat.motion)].phrase;
  std::string distractor = kDistractors[rng.below(std::size(kDistractors))];
  if (lat.neighbor_color >= 0 && (lat.phrasing & 1))
    distractor = "ahead of a " +
                 synthetic_colors()[static_cast<std::size_t>(lat.neighbor_color)].word + " car";
  const std::string alt_color = (color == "gray" && (lat.phrasing & 1)) ? "grey" : color;

  std::array<std::string, 3> s;
  s[0] = "A " + color + " " + type + " " + motion + ".";
  s[1] = (lat.phrasing & 2) ? "The " + type + " in " + alt_color + " " + motion + " " + distractor + "."
                            : "A " + alt_color + " " + type + " " + motion + " " + distractor + ".";
  if (lat.neighbor_color >= 0) {
    s[2] = "A " + color + " vehicle " + motion + ", followed by another " +
           synthetic_colors()[static_cast<std::size_t>(lat.neighbor_color)].word + " car.";
  } else {
    s[2] = capitalized(alt_color) + " " + type + " " + motion + ".";
  }
  return s;
}

}  // namespace

RenderedTrack render_track(const VehicleLatent& latent, const std::string& track_id,
                           int64_t first_frame, const SyntheticOptions& options, Rng& rng) {
  if (options.frames < 1) throw DataError("synthetic tracks need at least one frame");
  RenderedTrack out;
  Track& t = out.track;
  t.track_id = track_id;
  t.vehicle_class_id = latent.vehicle_id;
  t.frame_size = options.frame;
  const auto& type = synthetic_types()[static_cast<std::size_t>(latent.vtype)];
  for (int f = 0; f < options.frames; ++f) {
    const double s = options.frames == 1 ? 0.5 : static_cast<double>(f) / (options.frames - 1);
    double cx, cy;
    path_center(latent.motion, s, options.frame, cx, cy);
    const BoundingBox box{std::round(cx - type.width / 2.0), std::round(cy - type.height / 2.0),
                          static_cast<double>(type.width), static_cast<double>(type.height)};
    t.frames.push_back({first_frame + f, clamp_to_frame(box, options.frame)});
  }
  for (const auto& f : t.frames) {
    out.pixels.target.push_back(render_target(f.box, latent, options.noise, rng));
    out.pixels.context.push_back(render_context(f.box, latent, options.frame, options.noise, rng));
  }
  t.sentences = compose_sentences(latent, rng);
  validate_track(t);
  return out;
}

SyntheticWorld generate_synthetic(const SyntheticOptions& options) {
  if (options.vehicles < 2) throw DataError("a synthetic world needs at least 2 vehicles");
  if (options.duplicated_ids < 0 || options.duplicated_ids > options.vehicles)
    throw DataError("duplicated_ids must lie in [0, vehicles]");
  const int n_motion = static_cast<int>(synthetic_motions().size());
  if (options.tracks_per_duplicate < 1 || options.tracks_per_duplicate > n_motion)
    throw DataError("tracks_per_duplicate must lie in [1, motion pattern count]");

  Rng rng(options.seed);
  SyntheticWorld world;
  world.options = options;
  const int n_color = static_cast<int>(synthetic_colors().size());
  const int n_type = static_cast<int>(synthetic_types().size());
  std::set<std::tuple<int, int, int>> used;

  for (int id = 0; id < options.vehicles; ++id) {
    const int copies = id < options.duplicated_ids ? options.tracks_per_duplicate : 1;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw DataError("cannot draw distinct synthetic vehicles");
      const int color = static_cast<int>(rng.below(static_cast<uint64_t>(n_color)));
      const int vtype = static_cast<int>(rng.below(static_cast<uint64_t>(n_type)));
      std::vector<int> motions(static_cast<std::size_t>(n_motion));
      for (int m = 0; m < n_motion; ++m) motions[static_cast<std::size_t>(m)] = m;
      rng.shuffle(motions.begin(), motions.end());
      motions.resize(static_cast<std::size_t>(copies));
      const bool clash = std::any_of(motions.begin(), motions.end(), [&](int m) {
        return used.count({color, vtype, m}) > 0;
      });
      if (clash) continue;
      for (int m : motions) {
        used.insert({color, vtype, m});
        VehicleLatent lat;
        lat.vehicle_id = id;
        lat.color = color;
        lat.vtype = vtype;
        lat.motion = m;
        lat.neighbor_color =
            rng.uniform() >= options.relation_rate
                ? -1
                : static_cast<int>(rng.below(static_cast<uint64_t>(n_color)));
        lat.phrasing = static_cast<int>(rng.below(4));
        world.latents.push_back(lat);
      }
      break;
    }
  }

  std::vector<int> per_id(static_cast<std::size_t>(options.vehicles), 0);
  for (const auto& lat : world.latents) {
    char id[32];
    std::snprintf(id, sizeof id, "veh%03d_%d", lat.vehicle_id,
                  per_id[static_cast<std::size_t>(lat.vehicle_id)]++);
    const int64_t first = static_cast<int64_t>(rng.below(5000));
    RenderedTrack r = render_track(lat, id, first, options, rng);
    world.tracks.push_back(std::move(r.track));
    world.pixels.push_back(std::move(r.pixels));
  }
  return world;
}

}  // namespace omg
