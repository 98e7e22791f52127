#pragma once

#include "vbsf/image.hpp"

namespace vbsf {

/// Mean luma normalized to [0, 1]. Rgba8 uses Rec.601 weights; alpha is ignored.
double mean_brightness(const Frame& frame);

/// Luma conversion followed by a gamma-0.5 brightening curve. Always returns Gray8.
Frame nightvision_grayscale(const Frame& frame);

/// (2r+1)^2 median filter with edge replication. Gray8 only.
Frame denoise_median(const Frame& frame, int radius);

/// Linear contrast stretch that sends the low/high percentile samples to 0/255.
/// Returns the input unchanged when both percentiles land on the same value. Gray8 only.
Frame dehaze_stretch(const Frame& frame, double low_pct, double high_pct);

enum class Interpolation { Nearest, Bilinear, Lanczos3 };

Frame upscale(const Frame& frame, int factor, Interpolation method);

/// Seam for a resolution enhancer: maps a frame to one `factor()` times larger.
class Enhancer {
 public:
  virtual ~Enhancer() = default;
  virtual int factor() const = 0;
  virtual Frame enhance(const Frame& frame) const = 0;
};

class InterpolatingEnhancer final : public Enhancer {
 public:
  InterpolatingEnhancer(int factor, Interpolation method);
  int factor() const override { return factor_; }
  Frame enhance(const Frame& frame) const override { return upscale(frame, factor_, method_); }

 private:
  int factor_;
  Interpolation method_;
};

}  // namespace vbsf
