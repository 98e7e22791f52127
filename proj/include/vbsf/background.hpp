#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "vbsf/geometry.hpp"
#include "vbsf/image.hpp"

namespace vbsf {

/// Sliding window of the most recent Gray8 frames for temporal-median modeling.
///
/// Single writer: frames must be applied in stream order. Read-only queries
/// may run concurrently with each other but not with update().
class BackgroundModel {
 public:
  static constexpr std::size_t kDefaultWindow = 25;

  explicit BackgroundModel(std::size_t window = kDefaultWindow);

  /// Appends `frame`, evicting the oldest one once the window is full.
  /// Throws ValidationError on a non-Gray8 frame or a size change.
  void update(const Frame& frame);

  std::size_t size() const { return frames_.size(); }
  std::size_t window() const { return window_; }
  bool empty() const { return frames_.empty(); }
  int width() const { return width_; }
  int height() const { return height_; }

 private:
  friend Frame median_background(const BackgroundModel& model);

  std::size_t window_;
  int width_ = 0;
  int height_ = 0;
  std::deque<Frame> frames_;
  // Per-pixel history kept sorted, window_ slots per pixel, so the median is a lookup.
  std::vector<std::uint8_t> sorted_;
};

/// Per-pixel median of the buffered frames; the lower median for even counts.
Frame median_background(const BackgroundModel& model);

/// Marks pixels whose absolute difference from the median background exceeds
/// `diff_threshold` gray levels.
ForegroundMask foreground_mask(const BackgroundModel& model, const Frame& frame, int diff_threshold);

/// Same comparison against an explicit background frame.
ForegroundMask foreground_mask(const Frame& background, const Frame& frame, int diff_threshold);

/// Tight boxes around 8-connected foreground components holding at least
/// `min_area` pixels, ordered by (top, left).
std::vector<BoundingBox> connected_components(const ForegroundMask& mask, std::size_t min_area);

/// Seam for a mask producer (a learned segmenter, or the temporal median).
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  /// Consumes the next frame of the stream and returns its foreground.
  virtual ForegroundMask segment(const Frame& frame) = 0;
};

struct TemporalMedianConfig {
  std::size_t window = BackgroundModel::kDefaultWindow;
  int diff_threshold = 30;
  std::size_t warmup_frames = 5;
};

/// Mask-then-update segmenter over a BackgroundModel. Returns an all-false
/// mask while the model holds fewer than `warmup_frames` frames.
class TemporalMedianSegmenter final : public Segmenter {
 public:
  explicit TemporalMedianSegmenter(TemporalMedianConfig config = {});
  ForegroundMask segment(const Frame& frame) override;
  const BackgroundModel& model() const { return model_; }

 private:
  TemporalMedianConfig config_;
  BackgroundModel model_;
};

}  // namespace vbsf
