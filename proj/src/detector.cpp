#include "vbsf/detector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "vbsf/error.hpp"

namespace vbsf {
namespace {

constexpr const char* kModelMagic = "VBSF1";

struct PixelRegion {
  int x0, y0, x1, y1;  // half-open
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

PixelRegion clip_to_frame(const Frame& frame, const BoundingBox& box) {
  PixelRegion r{static_cast<int>(std::max(0.0, std::floor(box.x))),
                static_cast<int>(std::max(0.0, std::floor(box.y))),
                static_cast<int>(std::min<double>(frame.width(), std::ceil(box.right()))),
                static_cast<int>(std::min<double>(frame.height(), std::ceil(box.bottom())))};
  if (r.x1 <= r.x0 || r.y1 <= r.y0) throw ValidationError("proposal box lies outside the frame");
  return r;
}

double logit(const SigmoidClassifier& c, const FeatureVector& x) {
  return std::inner_product(x.begin(), x.end(), c.weights.begin(), c.bias);
}

}  // namespace

FeatureVector extract_features(const Frame& frame, const BoundingBox& box,
                               const ForegroundMask* mask) {
  if (frame.format() != PixelFormat::Gray8) throw ValidationError("features need a Gray8 frame");
  if (!box.valid()) throw ValidationError("invalid proposal box");
  if (mask && (mask->width() != frame.width() || mask->height() != frame.height())) {
    throw ValidationError("foreground mask does not match the frame");
  }
  const PixelRegion r = clip_to_frame(frame, box);
  FeatureVector f{};

  constexpr int side = static_cast<int>(kGridSide);
  for (int cy = 0; cy < side; ++cy) {
    int sy0 = r.y0 + cy * r.height() / side;
    int sy1 = std::max(r.y0 + (cy + 1) * r.height() / side, sy0 + 1);
    for (int cx = 0; cx < side; ++cx) {
      int sx0 = r.x0 + cx * r.width() / side;
      int sx1 = std::max(r.x0 + (cx + 1) * r.width() / side, sx0 + 1);
      double sum = 0.0;
      for (int y = sy0; y < sy1; ++y)
        for (int x = sx0; x < sx1; ++x) sum += frame.at(x, y);
      f[static_cast<std::size_t>(cy * side + cx)] = sum / (255.0 * (sy1 - sy0) * (sx1 - sx0));
    }
  }

  const double area = static_cast<double>(r.width()) * r.height();
  std::size_t filled = 0;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      f[kGridSide * kGridSide + frame.at(x, y) / 16] += 1.0 / area;
      if (mask && mask->at(x, y)) ++filled;
    }
  }

  const auto clipped = box_intersection(box, {0.0, 0.0, double(frame.width()), double(frame.height())});
  const double aspect = clipped ? clipped->w / clipped->h : box.w / box.h;
  f[kAspectIndex] = std::clamp(aspect, 0.0, 8.0) / 8.0;
  f[kFillIndex] = mask ? static_cast<double>(filled) / area : 0.5;
  return f;
}

std::vector<double> SigmoidClassifier::parameters() const {
  std::vector<double> p(weights.begin(), weights.end());
  p.push_back(bias);
  return p;
}

SigmoidClassifier SigmoidClassifier::from_parameters(std::span<const double> params) {
  if (params.size() != kParameterCount) {
    throw ValidationError("classifier needs " + std::to_string(kParameterCount) +
                          " parameters, got " + std::to_string(params.size()));
  }
  SigmoidClassifier c;
  std::copy_n(params.begin(), kFeatureLength, c.weights.begin());
  c.bias = params.back();
  return c;
}

double sigmoid(double z) {
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(s, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

double predict(const SigmoidClassifier& classifier, const FeatureVector& x) {
  return sigmoid(logit(classifier, x));
}

double bce_loss(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("bce_loss: length mismatch");
  if (scores.empty()) throw ValidationError("bce_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kBceEpsilon, 1.0 - kBceEpsilon);
    sum += labels[i] == 1 ? std::log(s) : std::log(1.0 - s);
  }
  return -sum / static_cast<double>(scores.size());
}

pso::PsoConfig default_training_config(std::uint64_t seed) {
  pso::PsoConfig config;
  config.swarm_size = 60;
  config.max_iterations = 50;
  config.bounds = pso::uniform_bounds(SigmoidClassifier::kParameterCount, -3.0, 3.0);
  config.seed = seed;
  return config;
}

TrainingResult train(std::span<const LabeledPatch> data, pso::PsoConfig config) {
  if (data.empty()) throw ValidationError("training data is empty");
  const bool has_pos = std::any_of(data.begin(), data.end(), [](auto& p) { return p.label == 1; });
  const bool has_neg = std::any_of(data.begin(), data.end(), [](auto& p) { return p.label == 0; });
  if (!has_pos || !has_neg) {
    throw ValidationError("single-class data: training needs both drone and non-drone patches");
  }
  for (const auto& p : data) {
    if (p.label != 0 && p.label != 1) throw ValidationError("patch labels must be 0 or 1");
  }
  if (config.bounds.empty()) {
    config.bounds = pso::uniform_bounds(SigmoidClassifier::kParameterCount, -10.0, 10.0);
  }
  if (config.dimensions() != SigmoidClassifier::kParameterCount) {
    throw ValidationError("training bounds must cover " +
                          std::to_string(SigmoidClassifier::kParameterCount) + " parameters");
  }
  const std::vector<double> origin(SigmoidClassifier::kParameterCount, 0.0);
  if (std::find(config.seeded_positions.begin(), config.seeded_positions.end(), origin) ==
      config.seeded_positions.end()) {
    config.seeded_positions.insert(config.seeded_positions.begin(), origin);
    if (config.seeded_positions.size() > config.swarm_size) config.seeded_positions.resize(config.swarm_size);
  }

  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& p : data) labels.push_back(p.label);

  auto scores_for = [&](std::span<const double> params) {
    const auto c = SigmoidClassifier::from_parameters(params);
    std::vector<double> scores(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) scores[i] = predict(c, data[i].features);
    return scores;
  };
  const pso::Objective objective = [&](std::span<const double> params) {
    return bce_loss(scores_for(params), labels);
  };
  auto accuracy_of = [&](std::span<const double> params) {
    const auto scores = scores_for(params);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) correct += (scores[i] >= 0.5) == (labels[i] == 1);
    return static_cast<double>(correct) / static_cast<double>(scores.size());
  };

  auto state = pso::initialize_swarm(objective, config);
  TrainingResult result;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    pso::iterate(state, objective, config);
    result.loss_history.push_back(state.gbest_value);
    result.accuracy_history.push_back(accuracy_of(state.gbest_position));
  }
  result.classifier = SigmoidClassifier::from_parameters(state.gbest_position);
  return result;
}

std::vector<Detection> detect(const Frame& frame, std::span<const BoundingBox> proposals,
                              const SigmoidClassifier& classifier, double score_threshold,
                              const ForegroundMask* mask) {
  std::vector<Detection> out;
  for (const auto& box : proposals) {
    const double score = predict(classifier, extract_features(frame, box, mask));
    if (score >= score_threshold) out.push_back({box, score, Label::Drone});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return out;
}

void write_model(std::ostream& out, const SigmoidClassifier& classifier) {
  out << kModelMagic << '\n' << kFeatureLength << '\n';
  char buf[64];
  for (double p : classifier.parameters()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, p);
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
}

SigmoidClassifier read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kModelMagic) throw DataError("model file: bad magic");
  if (!std::getline(in, line)) throw DataError("model file: missing dimension count");
  std::size_t dims = 0;
  {
    const auto res = std::from_chars(line.data(), line.data() + line.size(), dims);
    if (res.ec != std::errc{} || res.ptr != line.data() + line.size() || dims != kFeatureLength) {
      throw DataError("model file: expected dimension " + std::to_string(kFeatureLength) +
                      ", got '" + line + "'");
    }
  }
  std::vector<double> params;
  while (params.size() < SigmoidClassifier::kParameterCount && std::getline(in, line)) {
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc{} || res.ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw DataError("model file: bad parameter '" + line + "'");
    }
    params.push_back(v);
  }
  if (params.size() != SigmoidClassifier::kParameterCount) throw DataError("model file: truncated");
  return SigmoidClassifier::from_parameters(params);
}

void save_model(const std::filesystem::path& path, const SigmoidClassifier& classifier) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path.string());
  write_model(out, classifier);
  if (!out) throw DataError("failed writing model " + path.string());
}

SigmoidClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model " + path.string());
  return read_model(in);
}

}  // namespace vbsf
