#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vbsf {

enum class PixelFormat { Gray8, Rgba8 };

constexpr int channel_count(PixelFormat format) { return format == PixelFormat::Gray8 ? 1 : 4; }

/// A timestamped raster. Samples are row-major and channel-interleaved.
class Frame {
 public:
  Frame() = default;
  /// Zero-filled frame. Throws ValidationError for non-positive dimensions.
  Frame(int width, int height, PixelFormat format = PixelFormat::Gray8);
  Frame(int width, int height, PixelFormat format, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  PixelFormat format() const { return format_; }
  int channels() const { return channel_count(format_); }
  bool empty() const { return pixels_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  std::uint8_t at(int x, int y, int channel = 0) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels() + channel];
  }
  std::uint8_t& at(int x, int y, int channel = 0) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels() + channel];
  }

  bool same_shape(const Frame& other) const {
    return width_ == other.width_ && height_ == other.height_ && format_ == other.format_;
  }

  std::int64_t index = 0;
  double timestamp = 0.0;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  PixelFormat format_ = PixelFormat::Gray8;
  std::vector<std::uint8_t> pixels_;
};

/// One boolean per pixel; true marks foreground.
class ForegroundMask {
 public:
  ForegroundMask() = default;
  ForegroundMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool value) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }

  std::size_t count() const;
  bool any() const { return count() > 0; }

  friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace vbsf
