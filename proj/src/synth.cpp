#include "vbsf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vbsf/error.hpp"
#include "vbsf/pso.hpp"

namespace vbsf::synth {
namespace {

using pso::RandomStream;

// splitmix64 finalizer; derives independent substreams from (seed, tag).
std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kTextureTag = ~std::uint64_t{0};

double gaussian(RandomStream& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint8_t clamp_sample(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

bool inside_ellipse(double dx, double dy, double a, double b) {
  return (dx * dx) / (a * a) + (dy * dy) / (b * b) <= 1.0;
}

// Silhouette membership in object-local coordinates (origin at the center).
bool covers(ObjectKind kind, double s, double dx, double dy, std::int64_t age) {
  const double half = s / 2.0;
  switch (kind) {
    case ObjectKind::Drone: {
      const double arm = std::max(2.0, s / 5.0) / 2.0;
      if ((std::abs(dx) <= half && std::abs(dy) <= arm) || (std::abs(dy) <= half && std::abs(dx) <= arm)) {
        return true;
      }
      const double r = s / 5.0;
      const double o = half - r;
      return inside_ellipse(dx - o, dy, r, r) || inside_ellipse(dx + o, dy, r, r) ||
             inside_ellipse(dx, dy - o, r, r) || inside_ellipse(dx, dy + o, r, r);
    }
    case ObjectKind::Bird: {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(age) / 8.0;
      const double lift = s / 6.0 * std::sin(phase);
      const double a = s / 4.0;
      const double b = std::max(1.5, s / 8.0 * (0.6 + 0.4 * std::abs(std::cos(phase))));
      return inside_ellipse(dx - a, dy - lift, a, b) || inside_ellipse(dx + a, dy - lift, a, b) ||
             inside_ellipse(dx, dy, std::max(1.0, s / 10.0), std::max(1.0, s / 10.0));
    }
    case ObjectKind::Plane:
      return std::abs(dx) <= half && std::abs(dy) <= std::max(1.5, s / 10.0);
  }
  return false;
}

std::optional<BoundingBox> mask_bounds(const ForegroundMask& mask) {
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      min_x = std::min(min_x, x), max_x = std::max(max_x, x);
      min_y = std::min(min_y, y), max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) return std::nullopt;
  return BoundingBox{double(min_x), double(min_y), double(max_x - min_x + 1), double(max_y - min_y + 1)};
}

double bilinear(const Frame& f, double sx, double sy, int c) {
  sx = std::clamp(sx, 0.0, f.width() - 1.0);
  sy = std::clamp(sy, 0.0, f.height() - 1.0);
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, f.width() - 1), y1 = std::min(y0 + 1, f.height() - 1);
  const double fx = sx - x0, fy = sy - y0;
  const double top = f.at(x0, y0, c) * (1 - fx) + f.at(x1, y0, c) * fx;
  const double bottom = f.at(x0, y1, c) * (1 - fx) + f.at(x1, y1, c) * fx;
  return top * (1 - fy) + bottom * fy;
}

Frame keep_metadata(Frame out, const Frame& src) {
  out.index = src.index;
  out.timestamp = src.timestamp;
  return out;
}

}  // namespace

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Drone: return "drone";
    case ObjectKind::Bird: return "bird";
    case ObjectKind::Plane: return "plane";
  }
  return "unknown";
}

ObjectKind parse_object_kind(std::string_view name) {
  if (name == "drone") return ObjectKind::Drone;
  if (name == "bird") return ObjectKind::Bird;
  if (name == "plane") return ObjectKind::Plane;
  throw ValidationError("unknown object kind '" + std::string(name) + "'");
}

double Background::mean_level() const {
  return kind == Kind::Gradient ? (level + level_end) / 2.0 : double(level);
}

void SceneConfig::validate() const {
  if (width < 1 || height < 1) throw ValidationError("scene dimensions must be positive");
  if (frame_count < 1) throw ValidationError("scene needs at least one frame");
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  auto level_ok = [](int v) { return v >= 0 && v <= 255; };
  if (!level_ok(background.level) || !level_ok(background.level_end)) {
    throw ValidationError("background levels must lie in [0, 255]");
  }
  if (!(background.sigma >= 0.0)) throw ValidationError("background sigma must be >= 0");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string tag = "object " + std::to_string(i) + ": ";
    if (!(o.size >= 4.0)) throw ValidationError(tag + "size must be >= 4 px");
    if (!level_ok(o.intensity)) throw ValidationError(tag + "intensity must lie in [0, 255]");
    if (std::abs(o.intensity - background.mean_level()) < 40.0) {
      throw ValidationError(tag + "intensity must differ from the background mean by >= 40");
    }
    if (o.first_frame < 0 || o.first_frame >= frame_count) {
      throw ValidationError(tag + "first_frame outside the sequence");
    }
    const double half = o.size / 2.0;
    if (o.start_x - half < 0.0 || o.start_y - half < 0.0 || o.start_x + half > width ||
        o.start_y + half > height) {
      throw ValidationError(tag + "initially out of frame");
    }
  }
}

Frame render_background(const SceneConfig& config) {
  Frame bg(config.width, config.height, PixelFormat::Gray8);
  const auto& b = config.background;
  RandomStream texture(mix(config.seed, kTextureTag));
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      double v = b.level;
      if (b.kind == Background::Kind::Gradient) {
        const double t = config.width > 1 ? double(x) / (config.width - 1) : 0.0;
        v = b.level + (b.level_end - b.level) * t;
      } else if (b.kind == Background::Kind::NoisyFlat) {
        v += b.sigma * gaussian(texture);
      }
      bg.at(x, y) = clamp_sample(v);
    }
  }
  return bg;
}

ForegroundMask render_object_mask(const SceneConfig& config, const ObjectSpec& object,
                                  std::int64_t frame) {
  ForegroundMask mask(config.width, config.height);
  if (frame < object.first_frame) return mask;
  const auto age = frame - object.first_frame;
  const double cx = object.start_x + object.velocity_x * double(age);
  const double cy = object.start_y + object.velocity_y * double(age);
  const double reach = object.size / 2.0 + 1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
  const int x1 = std::min(config.width - 1, static_cast<int>(std::ceil(cx + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
  const int y1 = std::min(config.height - 1, static_cast<int>(std::ceil(cy + reach)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (covers(object.kind, object.size, x + 0.5 - cx, y + 0.5 - cy, age)) mask.set(x, y, true);
    }
  }
  return mask;
}

AnnotatedSequence render_sequence(const SceneConfig& config) {
  config.validate();
  const Frame background = render_background(config);
  AnnotatedSequence seq;
  seq.fps = config.fps;
  seq.seed = config.seed;
  seq.frames.reserve(static_cast<std::size_t>(config.frame_count));
  seq.annotations.resize(static_cast<std::size_t>(config.frame_count));

  for (std::int64_t f = 0; f < config.frame_count; ++f) {
    Frame frame = background;
    frame.index = f;
    frame.timestamp = double(f) / config.fps;
    for (const auto& object : config.objects) {
      const auto mask = render_object_mask(config, object, f);
      const auto bounds = mask_bounds(mask);
      if (!bounds) continue;
      for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
          if (mask.at(x, y)) frame.at(x, y) = static_cast<std::uint8_t>(object.intensity);
      seq.annotations[static_cast<std::size_t>(f)].push_back({*bounds, object.kind});
    }
    if (config.noise_sigma > 0.0) {
      RandomStream rng(mix(config.seed, static_cast<std::uint64_t>(f)));
      for (auto& v : frame.pixels()) v = clamp_sample(v + config.noise_sigma * gaussian(rng));
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

namespace {

struct Augmenter {
  const AnnotatedImage& in;

  AnnotatedImage operator()(FlipH) const {
    const Frame& src = in.image;
    Frame out(src.width(), src.height(), src.format());
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x)
        for (int c = 0; c < src.channels(); ++c) out.at(src.width() - 1 - x, y, c) = src.at(x, y, c);
    AnnotatedImage r{keep_metadata(std::move(out), src), in.boxes};
    for (auto& a : r.boxes) a.box.x = src.width() - a.box.x - a.box.w;
    return r;
  }

  AnnotatedImage operator()(FlipV) const {
    const Frame& src = in.image;
    Frame out(src.width(), src.height(), src.format());
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x)
        for (int c = 0; c < src.channels(); ++c) out.at(x, src.height() - 1 - y, c) = src.at(x, y, c);
    AnnotatedImage r{keep_metadata(std::move(out), src), in.boxes};
    for (auto& a : r.boxes) a.box.y = src.height() - a.box.y - a.box.h;
    return r;
  }

  AnnotatedImage operator()(Rotate op) const {
    const int turns = ((op.quarter_turns % 4) + 4) % 4;
    AnnotatedImage r = in;
    for (int t = 0; t < turns; ++t) r = rotate_cw(r);
    return r;
  }

  // One clockwise quarter turn: pixel (x, y) -> (H - 1 - y, x).
  static AnnotatedImage rotate_cw(const AnnotatedImage& a) {
    const Frame& src = a.image;
    const int w = src.width(), h = src.height();
    Frame out(h, w, src.format());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < src.channels(); ++c) out.at(h - 1 - y, x, c) = src.at(x, y, c);
    AnnotatedImage r{keep_metadata(std::move(out), src), a.boxes};
    for (auto& ann : r.boxes) {
      const BoundingBox b = ann.box;
      ann.box = {h - b.y - b.h, b.x, b.h, b.w};
    }
    return r;
  }

  AnnotatedImage operator()(Scale op) const {
    if (!(op.factor > 0.0) || !std::isfinite(op.factor)) throw ValidationError("scale factor must be > 0");
    const Frame& src = in.image;
    const int w = std::max(1, static_cast<int>(std::lround(src.width() * op.factor)));
    const int h = std::max(1, static_cast<int>(std::lround(src.height() * op.factor)));
    const double sx = double(w) / src.width(), sy = double(h) / src.height();
    Frame out(w, h, src.format());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < src.channels(); ++c)
          out.at(x, y, c) = clamp_sample(bilinear(src, (x + 0.5) / sx - 0.5, (y + 0.5) / sy - 0.5, c));
    AnnotatedImage r{keep_metadata(std::move(out), src), in.boxes};
    for (auto& a : r.boxes) a.box = {a.box.x * sx, a.box.y * sy, a.box.w * sx, a.box.h * sy};
    return r;
  }

  AnnotatedImage operator()(Crop op) const {
    const Frame& src = in.image;
    if (op.w < 1 || op.h < 1 || op.x < 0 || op.y < 0 || op.x + op.w > src.width() ||
        op.y + op.h > src.height()) {
      throw ValidationError("crop region must lie within the image");
    }
    Frame out(op.w, op.h, src.format());
    for (int y = 0; y < op.h; ++y)
      for (int x = 0; x < op.w; ++x)
        for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(op.x + x, op.y + y, c);
    AnnotatedImage r{keep_metadata(std::move(out), src), {}};
    const BoundingBox region{double(op.x), double(op.y), double(op.w), double(op.h)};
    for (const auto& a : in.boxes) {
      const auto clipped = box_intersection(a.box, region);
      if (!clipped || box_area(*clipped) < 0.25 * box_area(a.box)) continue;
      r.boxes.push_back({clipped->translated(-op.x, -op.y), a.kind});
    }
    return r;
  }

  AnnotatedImage operator()(Brightness op) const {
    AnnotatedImage r = in;
    for (auto& v : r.image.pixels()) v = clamp_sample(int{v} + op.delta);
    return r;
  }

  AnnotatedImage operator()(GaussianNoise op) const {
    if (!(op.sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
    AnnotatedImage r = in;
    RandomStream rng(op.seed);
    for (auto& v : r.image.pixels()) v = clamp_sample(v + op.sigma * gaussian(rng));
    return r;
  }
};

}  // namespace

AnnotatedImage augment(const AnnotatedImage& input, const AugmentOp& op) {
  return std::visit(Augmenter{input}, op);
}

}  // namespace vbsf::synth
