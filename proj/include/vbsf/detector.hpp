#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "vbsf/geometry.hpp"
#include "vbsf/image.hpp"
#include "vbsf/pso.hpp"

namespace vbsf {

/// Feature layout:
///   [0, 64)   proposal resampled to 8x8, intensities / 255
///   [64, 80)  16-bin intensity histogram, normalized to sum 1
///   80        aspect ratio w/h clamped to [0, 8], divided by 8
///   81        foreground fill ratio (0.5 without a mask)
inline constexpr std::size_t kGridSide = 8;
inline constexpr std::size_t kHistogramBins = 16;
inline constexpr std::size_t kAspectIndex = kGridSide * kGridSide + kHistogramBins;
inline constexpr std::size_t kFillIndex = kAspectIndex + 1;
inline constexpr std::size_t kFeatureLength = kFillIndex + 1;

using FeatureVector = std::array<double, kFeatureLength>;

/// Throws ValidationError for non-Gray8 frames, a mask of the wrong size, or a
/// box that does not overlap the frame.
FeatureVector extract_features(const Frame& frame, const BoundingBox& box,
                               const ForegroundMask* mask = nullptr);

struct SigmoidClassifier {
  std::array<double, kFeatureLength> weights{};
  double bias = 0.0;

  static constexpr std::size_t kParameterCount = kFeatureLength + 1;
  /// Weights followed by the bias.
  std::vector<double> parameters() const;
  static SigmoidClassifier from_parameters(std::span<const double> params);

  friend bool operator==(const SigmoidClassifier&, const SigmoidClassifier&) = default;
};

/// Logistic function, kept strictly inside (0, 1) even where it would round to 0 or 1.
double sigmoid(double z);

double predict(const SigmoidClassifier& classifier, const FeatureVector& x);

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy with scores clamped into [eps, 1 - eps].
double bce_loss(std::span<const double> scores, std::span<const int> labels);

struct LabeledPatch {
  FeatureVector features{};
  int label = 0;
};

/// Defaults for training: 60 particles, 50 sweeps, weights and bias bounded to +-3,
/// with the zero classifier seeded as the first particle.
pso::PsoConfig default_training_config(std::uint64_t seed = 0);

struct TrainingResult {
  SigmoidClassifier classifier;
  /// gbest BCE after each sweep.
  std::vector<double> loss_history;
  /// Training accuracy of gbest at threshold 0.5 after each sweep.
  std::vector<double> accuracy_history;
};

/// Fits the classifier by swarm search minimizing BCE on `data`. The zero
/// classifier is always among the seeded particles, so the result never does
/// worse than it. Throws ValidationError on single-class data.
TrainingResult train(std::span<const LabeledPatch> data, pso::PsoConfig config);

/// Scores every proposal and keeps those at or above `score_threshold`,
/// labeled Drone and sorted by descending score.
std::vector<Detection> detect(const Frame& frame, std::span<const BoundingBox> proposals,
                              const SigmoidClassifier& classifier, double score_threshold,
                              const ForegroundMask* mask = nullptr);

/// Text model file: "VBSF1", the feature count, then each weight and finally
/// the bias, one decimal value per line.
void write_model(std::ostream& out, const SigmoidClassifier& classifier);
SigmoidClassifier read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const SigmoidClassifier& classifier);
SigmoidClassifier load_model(const std::filesystem::path& path);

}  // namespace vbsf
