#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vbsf/geometry.hpp"

namespace vbsf {

struct ValidatorConfig {
  /// Consecutive-frame agreement needed for a frame to count as consistent.
  double runtime_iou_threshold = 0.5;
  /// Agreement with ground truth needed for a frame to pass offline validation.
  double offline_iou_threshold = 0.9;
  /// Consistent frames in a row before an alert fires (M).
  int consecutive_required = 2;
  /// Inconsistent frames in a row that re-arm a latched alert (K).
  int rearm_after = 10;

  void validate() const;
};

struct Match {
  std::size_t first = 0;
  std::size_t second = 0;
  double iou = 0.0;
};

/// Greedy one-to-one matching by descending IoU over all overlapping cross
/// pairs with IoU >= threshold. Ties go to the lower (first, second) index.
std::vector<Match> match_boxes(std::span<const BoundingBox> a, std::span<const BoundingBox> b,
                               double threshold);
std::vector<Match> match_detections(std::span<const Detection> a, std::span<const Detection> b,
                                    double threshold);

struct TrackState {
  std::vector<Detection> last_detections;
  int consecutive_consistent = 0;
  int inconsistent_streak = 0;
  bool alert_active = false;
  /// Best-scoring current detection that matched the previous frame.
  std::optional<Detection> confirmed;
};

struct ConsistencyResult {
  TrackState state;
  bool consistent = false;
};

/// A frame is consistent when it has detections and at least one of them
/// matches a detection of the previous frame. A non-empty frame that matches
/// nothing restarts the run at 1; an empty frame resets it to 0.
ConsistencyResult check_consistency(TrackState state, std::span<const Detection> current,
                                    const ValidatorConfig& config);

struct AlertEvent {
  std::int64_t frame_index = 0;
  BoundingBox box;
  double score = 0.0;
  double timestamp = 0.0;

  friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

/// Latched alert rule: fires once when the run reaches M, then stays silent
/// until K inconsistent frames in a row re-arm it.
std::optional<AlertEvent> alert_decision(TrackState& state, const ValidatorConfig& config,
                                         std::int64_t frame_index, double timestamp);

struct FrameValidation {
  bool pass = false;
  double best_iou = 0.0;
};

struct OfflineReport {
  std::vector<FrameValidation> frames;
  double pass_rate = 0.0;
};

/// Per-frame ground-truth check: a frame passes when every truth box is
/// matched at the offline threshold and no prediction is left unmatched.
OfflineReport offline_validate(std::span<const std::vector<Detection>> predictions,
                               std::span<const std::vector<BoundingBox>> ground_truth,
                               const ValidatorConfig& config);

/// `frame,pass,best_iou` rows.
void write_offline_report_csv(std::ostream& out, const OfflineReport& report);

}  // namespace vbsf
