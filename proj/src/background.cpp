#include "vbsf/background.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "vbsf/error.hpp"

namespace vbsf {

BackgroundModel::BackgroundModel(std::size_t window) : window_(window) {
  if (window == 0) throw ValidationError("background window must hold at least one frame");
}

void BackgroundModel::update(const Frame& frame) {
  if (frame.format() != PixelFormat::Gray8) {
    throw ValidationError("background model accepts Gray8 frames only");
  }
  if (!frames_.empty() && (frame.width() != width_ || frame.height() != height_)) {
    throw ValidationError("frame " + std::to_string(frame.width()) + "x" +
                          std::to_string(frame.height()) + " does not match background model " +
                          std::to_string(width_) + "x" + std::to_string(height_));
  }
  width_ = frame.width();
  height_ = frame.height();
  const std::size_t pixels = frame.pixel_count();
  if (frames_.empty()) sorted_.assign(pixels * window_, 0);

  const bool full = frames_.size() == window_;
  const std::size_t n = frames_.size();
  const auto incoming = frame.pixels();
  for (std::size_t p = 0; p < pixels; ++p) {
    std::uint8_t* slot = sorted_.data() + p * window_;
    std::size_t count = n;
    if (full) {
      // Drop one copy of the evicted sample.
      const std::uint8_t old = frames_.front().pixels()[p];
      std::uint8_t* hit = std::lower_bound(slot, slot + count, old);
      std::copy(hit + 1, slot + count, hit);
      --count;
    }
    const std::uint8_t v = incoming[p];
    std::uint8_t* at = std::upper_bound(slot, slot + count, v);
    std::copy_backward(at, slot + count, slot + count + 1);
    *at = v;
  }
  frames_.push_back(frame);
  if (full) frames_.pop_front();
}

Frame median_background(const BackgroundModel& model) {
  if (model.empty()) throw ValidationError("median of an empty background model");
  const auto& frames = model.frames_;
  const std::size_t n = frames.size();
  const auto lower_median = static_cast<std::ptrdiff_t>((n - 1) / 2);

  Frame out(model.width(), model.height(), PixelFormat::Gray8);
  out.index = frames.back().index;
  out.timestamp = frames.back().timestamp;
  auto dst = out.pixels();
  for (std::size_t p = 0; p < dst.size(); ++p) {
    dst[p] = model.sorted_[p * model.window_ + static_cast<std::size_t>(lower_median)];
  }
  return out;
}

ForegroundMask foreground_mask(const Frame& background, const Frame& frame, int diff_threshold) {
  if (!background.same_shape(frame) || frame.format() != PixelFormat::Gray8) {
    throw ValidationError("foreground mask needs Gray8 frames of equal size");
  }
  ForegroundMask mask(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const int diff = std::abs(int{frame.at(x, y)} - int{background.at(x, y)});
      if (diff > diff_threshold) mask.set(x, y, true);
    }
  }
  return mask;
}

ForegroundMask foreground_mask(const BackgroundModel& model, const Frame& frame, int diff_threshold) {
  return foreground_mask(median_background(model), frame, diff_threshold);
}

std::vector<BoundingBox> connected_components(const ForegroundMask& mask, std::size_t min_area) {
  std::vector<BoundingBox> boxes;
  const int w = mask.width();
  const int h = mask.height();
  if (w == 0 || h == 0) return boxes;

  std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || visited[static_cast<std::size_t>(y) * w + x]) continue;
      int min_x = x, max_x = x, min_y = y, max_y = y;
      std::size_t area = 0;
      stack.assign(1, {x, y});
      visited[static_cast<std::size_t>(y) * w + x] = 1;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++area;
        min_x = std::min(min_x, cx);
        max_x = std::max(max_x, cx);
        min_y = std::min(min_y, cy);
        max_y = std::max(max_y, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            auto& seen = visited[static_cast<std::size_t>(ny) * w + nx];
            if (seen || !mask.at(nx, ny)) continue;
            seen = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      if (area >= min_area) {
        boxes.push_back({double(min_x), double(min_y), double(max_x - min_x + 1),
                         double(max_y - min_y + 1)});
      }
    }
  }
  // Raster discovery order is by the first pixel found, not the box corner.
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return boxes;
}

TemporalMedianSegmenter::TemporalMedianSegmenter(TemporalMedianConfig config)
    : config_(config), model_(config.window) {}

ForegroundMask TemporalMedianSegmenter::segment(const Frame& frame) {
  ForegroundMask mask(frame.width(), frame.height());
  if (model_.size() >= config_.warmup_frames) {
    mask = foreground_mask(model_, frame, config_.diff_threshold);
  }
  model_.update(frame);
  return mask;
}

}  // namespace vbsf
