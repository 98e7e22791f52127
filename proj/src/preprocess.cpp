#include "vbsf/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "vbsf/error.hpp"

namespace vbsf {
namespace {

constexpr double kGamma = 0.5;

double luma(const Frame& frame, int x, int y) {
  if (frame.format() == PixelFormat::Gray8) return frame.at(x, y);
  return 0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) + 0.114 * frame.at(x, y, 2);
}

std::uint8_t to_sample(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void require_gray(const Frame& frame, const char* op) {
  if (frame.format() != PixelFormat::Gray8) {
    throw ValidationError(std::string(op) + " requires a Gray8 frame");
  }
}

Frame with_metadata(Frame out, const Frame& src) {
  out.index = src.index;
  out.timestamp = src.timestamp;
  return out;
}

double lanczos3(double t) {
  t = std::abs(t);
  if (t < 1e-12) return 1.0;
  if (t >= 3.0) return 0.0;
  const double pt = std::numbers::pi * t;
  return 3.0 * std::sin(pt) * std::sin(pt / 3.0) / (pt * pt);
}

// Per-output-coordinate source taps for one axis.
struct Taps {
  std::vector<int> first;
  std::vector<int> count;
  std::vector<int> index;
  std::vector<double> weight;
};

Taps make_taps(int src_len, int factor, Interpolation method) {
  Taps taps;
  const int dst_len = src_len * factor;
  const int radius = method == Interpolation::Lanczos3 ? 3 : 1;
  for (int o = 0; o < dst_len; ++o) {
    const double center = (o + 0.5) / factor - 0.5;
    taps.first.push_back(static_cast<int>(taps.index.size()));
    const int lo = static_cast<int>(std::floor(center)) - radius + 1;
    const int hi = static_cast<int>(std::floor(center)) + radius;
    double total = 0.0;
    const auto start = taps.weight.size();
    for (int s = lo; s <= hi; ++s) {
      const double d = center - s;
      const double w = method == Interpolation::Lanczos3 ? lanczos3(d) : std::max(0.0, 1.0 - std::abs(d));
      if (w == 0.0) continue;
      taps.index.push_back(std::clamp(s, 0, src_len - 1));
      taps.weight.push_back(w);
      total += w;
    }
    for (auto i = start; i < taps.weight.size(); ++i) taps.weight[i] /= total;
    taps.count.push_back(static_cast<int>(taps.weight.size() - start));
  }
  return taps;
}

}  // namespace

double mean_brightness(const Frame& frame) {
  if (frame.empty()) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < frame.height(); ++y)
    for (int x = 0; x < frame.width(); ++x) sum += luma(frame, x, y);
  return sum / (255.0 * static_cast<double>(frame.pixel_count()));
}

Frame nightvision_grayscale(const Frame& frame) {
  std::array<std::uint8_t, 256> curve{};
  for (int v = 0; v < 256; ++v) curve[v] = to_sample(255.0 * std::pow(v / 255.0, kGamma));

  Frame out(frame.width(), frame.height(), PixelFormat::Gray8);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (frame.format() == PixelFormat::Gray8) {
        out.at(x, y) = curve[frame.at(x, y)];
      } else {
        out.at(x, y) = to_sample(255.0 * std::pow(luma(frame, x, y) / 255.0, kGamma));
      }
    }
  }
  return with_metadata(std::move(out), frame);
}

Frame denoise_median(const Frame& frame, int radius) {
  require_gray(frame, "denoise_median");
  if (radius < 1) throw ValidationError("denoise radius must be >= 1");
  const int w = frame.width();
  const int h = frame.height();
  const int side = 2 * radius + 1;
  std::vector<std::uint8_t> window(static_cast<std::size_t>(side) * side);
  const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);

  Frame out(w, h, PixelFormat::Gray8);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t k = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -radius; dx <= radius; ++dx) {
          window[k++] = frame.at(std::clamp(x + dx, 0, w - 1), sy);
        }
      }
      std::nth_element(window.begin(), mid, window.end());
      out.at(x, y) = *mid;
    }
  }
  return with_metadata(std::move(out), frame);
}

Frame dehaze_stretch(const Frame& frame, double low_pct, double high_pct) {
  require_gray(frame, "dehaze_stretch");
  if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0)) {
    throw ValidationError("dehaze percentiles must satisfy 0 <= low < high <= 100");
  }
  std::array<std::size_t, 256> histogram{};
  for (auto v : frame.pixels()) ++histogram[v];

  // Nearest-rank (lower) percentile over the sorted samples.
  const auto n = frame.pixel_count();
  auto percentile_value = [&](double pct) {
    const auto rank = static_cast<std::size_t>(std::floor(pct / 100.0 * static_cast<double>(n - 1)));
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
      seen += histogram[v];
      if (seen > rank) return v;
    }
    return 255;
  };
  const int lo = percentile_value(low_pct);
  const int hi = percentile_value(high_pct);
  if (lo == hi) return frame;

  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) lut[v] = to_sample((v - lo) * 255.0 / (hi - lo));
  Frame out = frame;
  for (auto& v : out.pixels()) v = lut[v];
  return out;
}

Frame upscale(const Frame& frame, int factor, Interpolation method) {
  if (factor < 1) throw ValidationError("upscale factor must be >= 1");
  if (factor == 1) return frame;
  const int ch = frame.channels();
  const int w = frame.width() * factor;
  const int h = frame.height() * factor;
  Frame out(w, h, frame.format());

  if (method == Interpolation::Nearest) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < ch; ++c) out.at(x, y, c) = frame.at(x / factor, y / factor, c);
    return with_metadata(std::move(out), frame);
  }

  // Separable: horizontal pass into a real-valued buffer, then vertical.
  const Taps tx = make_taps(frame.width(), factor, method);
  const Taps ty = make_taps(frame.height(), factor, method);
  std::vector<double> rows(static_cast<std::size_t>(w) * frame.height() * ch);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = 0; k < tx.count[x]; ++k) {
          const int t = tx.first[x] + k;
          acc += tx.weight[t] * frame.at(tx.index[t], y, c);
        }
        rows[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = 0; k < ty.count[y]; ++k) {
          const int t = ty.first[y] + k;
          acc += ty.weight[t] * rows[(static_cast<std::size_t>(ty.index[t]) * w + x) * ch + c];
        }
        out.at(x, y, c) = to_sample(acc);
      }
    }
  }
  return with_metadata(std::move(out), frame);
}

InterpolatingEnhancer::InterpolatingEnhancer(int factor, Interpolation method)
    : factor_(factor), method_(method) {
  if (factor < 1) throw ValidationError("enhancer factor must be >= 1");
}

}  // namespace vbsf
