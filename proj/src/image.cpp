#include "vbsf/image.hpp"

#include <algorithm>
#include <string>

#include "vbsf/error.hpp"

namespace vbsf {

Frame::Frame(int width, int height, PixelFormat format)
    : Frame(width, height, format,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                      std::max(height, 0) * channel_count(format))) {}

Frame::Frame(int width, int height, PixelFormat format, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), format_(format), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw ValidationError("frame dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  if (pixels_.size() != pixel_count() * channels()) {
    throw ValidationError("pixel buffer holds " + std::to_string(pixels_.size()) +
                          " samples, expected " + std::to_string(pixel_count() * channels()));
  }
}

ForegroundMask::ForegroundMask(int width, int height)
    : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {
  if (width < 1 || height < 1) throw ValidationError("mask dimensions must be positive");
}

std::size_t ForegroundMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

}  // namespace vbsf
