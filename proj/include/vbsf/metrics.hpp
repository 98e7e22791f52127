#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vbsf/detector.hpp"
#include "vbsf/pso.hpp"

namespace vbsf {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Scores at or above `threshold` count as positive predictions.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when some ratio was 0/0 and reported as 0.
  bool degenerate = false;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

/// Throws ValidationError when the counts are all zero.
Metrics metrics(const ConfusionCounts& counts);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  /// From (0,0) at an infinite threshold down to (1,1); equal scores move together.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Throws ValidationError unless both classes are present.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

struct FoldAssignment {
  std::vector<std::size_t> fold_of;
  std::size_t folds = 0;

  std::vector<std::size_t> sizes() const;
};

/// Seeded shuffle, then round-robin assignment. Requires 2 <= k <= n.
FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct FoldResult {
  ConfusionCounts counts;
  Metrics metrics;
  std::vector<double> loss_history;
  std::vector<double> accuracy_history;
};

struct Summary {
  double mean = 0.0;
  double stdev = 0.0;  ///< sample standard deviation
};

Summary summarize(std::span<const double> values);

struct CrossValidationReport {
  std::vector<FoldResult> folds;
  Summary accuracy, precision, recall, f1;
};

/// K-fold protocol: train on the complement of each fold (PSO seed = base
/// seed + fold index), score the fold at 0.5, then aggregate.
CrossValidationReport cross_validate(std::span<const LabeledPatch> data, std::size_t k,
                                     const pso::PsoConfig& pso_config, std::uint64_t split_seed);

void write_metrics_csv(std::ostream& out, const CrossValidationReport& report);
void write_metrics_csv(std::ostream& out, const ConfusionCounts& counts, const Metrics& m);
void write_roc_csv(std::ostream& out, const RocCurve& curve);
/// `iteration,loss,accuracy` rows, iterations counted from 1.
void write_training_csv(std::ostream& out, std::span<const double> loss,
                        std::span<const double> accuracy);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart with axes and a legend.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const PlotSeries> series);

}  // namespace vbsf
