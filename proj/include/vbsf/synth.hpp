#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "vbsf/geometry.hpp"
#include "vbsf/image.hpp"

namespace vbsf::synth {

enum class ObjectKind { Drone, Bird, Plane };

std::string_view to_string(ObjectKind kind);
/// Throws ValidationError on an unknown name.
ObjectKind parse_object_kind(std::string_view name);
inline Label label_of(ObjectKind kind) { return kind == ObjectKind::Drone ? Label::Drone : Label::NonDrone; }

struct Background {
  enum class Kind { Flat, Gradient, NoisyFlat };
  Kind kind = Kind::Flat;
  /// Flat level, or the left-edge level of a gradient.
  int level = 0;
  /// Right-edge level of a horizontal gradient.
  int level_end = 0;
  /// Static texture strength for NoisyFlat; the same pattern on every frame.
  double sigma = 0.0;

  double mean_level() const;
};

struct ObjectSpec {
  ObjectKind kind = ObjectKind::Drone;
  /// Side of the square the silhouette is drawn in.
  double size = 12.0;
  /// Silhouette center on `first_frame`.
  double start_x = 0.0;
  double start_y = 0.0;
  /// Pixels per frame.
  double velocity_x = 0.0;
  double velocity_y = 0.0;
  int intensity = 255;
  /// Frames before this one do not show the object.
  std::int64_t first_frame = 0;
};

struct SceneConfig {
  int width = 160;
  int height = 120;
  std::int64_t frame_count = 1;
  double fps = 25.0;
  Background background;
  std::vector<ObjectSpec> objects;
  /// Per-frame Gaussian pixel noise, added after annotation capture.
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Annotation {
  BoundingBox box;
  ObjectKind kind = ObjectKind::Drone;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct AnnotatedSequence {
  std::vector<Frame> frames;
  /// annotations[frame]
  std::vector<std::vector<Annotation>> annotations;
  double fps = 25.0;
  std::uint64_t seed = 0;

  friend bool operator==(const AnnotatedSequence&, const AnnotatedSequence&) = default;
};

/// Deterministic per seed; frames are independent given the seed.
AnnotatedSequence render_sequence(const SceneConfig& config);

/// The scene with no objects and no per-frame noise.
Frame render_background(const SceneConfig& config);

/// Pixel coverage of one object at `frame` (true where its silhouette is drawn).
ForegroundMask render_object_mask(const SceneConfig& config, const ObjectSpec& object,
                                  std::int64_t frame);

struct FlipH {};
struct FlipV {};
/// Clockwise quarter turns, 1 to 3.
struct Rotate {
  int quarter_turns = 1;
};
struct Scale {
  double factor = 1.0;
};
struct Crop {
  int x = 0, y = 0, w = 1, h = 1;
};
struct Brightness {
  int delta = 0;
};
struct GaussianNoise {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};
using AugmentOp = std::variant<FlipH, FlipV, Rotate, Scale, Crop, Brightness, GaussianNoise>;

struct AnnotatedImage {
  Frame image;
  std::vector<Annotation> boxes;

  friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

/// Applies one augmentation to pixels and boxes under the same geometric map.
/// Crops drop boxes left with under 25% of their area.
AnnotatedImage augment(const AnnotatedImage& input, const AugmentOp& op);

/// Dataset directory: frame_NNNNNN.pgm, annotations.csv (frame,x,y,w,h,kind)
/// and manifest.json (width, height, frame_count, seed, fps).
void write_dataset(const AnnotatedSequence& sequence, const std::filesystem::path& dir);
/// Throws DataError on missing or corrupt files.
AnnotatedSequence read_dataset(const std::filesystem::path& dir);

/// Binary PGM (P5, maxval 255).
void write_pgm(const Frame& frame, const std::filesystem::path& path);
Frame read_pgm(const std::filesystem::path& path);

}  // namespace vbsf::synth
