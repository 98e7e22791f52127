#include "vbsf/validator.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "vbsf/error.hpp"

namespace vbsf {

void ValidatorConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(runtime_iou_threshold) || !unit(offline_iou_threshold)) {
    throw ValidationError("IoU thresholds must lie in [0, 1]");
  }
  if (consecutive_required < 1) throw ValidationError("consecutive_required must be >= 1");
  if (rearm_after < 1) throw ValidationError("rearm_after must be >= 1");
}

std::vector<Match> match_boxes(std::span<const BoundingBox> a, std::span<const BoundingBox> b,
                               double threshold) {
  std::vector<Match> candidates;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = iou(a[i], b[j]);
      if (v > 0.0 && v >= threshold) candidates.push_back({i, j, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& l, const Match& r) {
    if (l.iou != r.iou) return l.iou > r.iou;
    if (l.first != r.first) return l.first < r.first;
    return l.second < r.second;
  });
  std::vector<bool> used_a(a.size()), used_b(b.size());
  std::vector<Match> matches;
  for (const auto& m : candidates) {
    if (used_a[m.first] || used_b[m.second]) continue;
    used_a[m.first] = used_b[m.second] = true;
    matches.push_back(m);
  }
  return matches;
}

namespace {
std::vector<BoundingBox> boxes_of(std::span<const Detection> detections) {
  std::vector<BoundingBox> boxes;
  boxes.reserve(detections.size());
  for (const auto& d : detections) boxes.push_back(d.box);
  return boxes;
}
}  // namespace

std::vector<Match> match_detections(std::span<const Detection> a, std::span<const Detection> b,
                                    double threshold) {
  return match_boxes(boxes_of(a), boxes_of(b), threshold);
}

ConsistencyResult check_consistency(TrackState state, std::span<const Detection> current,
                                    const ValidatorConfig& config) {
  ConsistencyResult result;
  state.confirmed.reset();
  if (!current.empty()) {
    const auto matches = match_detections(current, state.last_detections, config.runtime_iou_threshold);
    for (const auto& m : matches) {
      if (!state.confirmed || current[m.first].score > state.confirmed->score) {
        state.confirmed = current[m.first];
      }
    }
    result.consistent = !matches.empty();
  }
  if (result.consistent) {
    ++state.consecutive_consistent;
    state.inconsistent_streak = 0;
  } else {
    state.consecutive_consistent = current.empty() ? 0 : 1;
    ++state.inconsistent_streak;
  }
  state.last_detections.assign(current.begin(), current.end());
  result.state = std::move(state);
  return result;
}

std::optional<AlertEvent> alert_decision(TrackState& state, const ValidatorConfig& config,
                                         std::int64_t frame_index, double timestamp) {
  if (state.alert_active && state.inconsistent_streak >= config.rearm_after) {
    state.alert_active = false;
  }
  if (state.alert_active || state.consecutive_consistent < config.consecutive_required ||
      !state.confirmed) {
    return std::nullopt;
  }
  state.alert_active = true;
  return AlertEvent{frame_index, state.confirmed->box, state.confirmed->score, timestamp};
}

OfflineReport offline_validate(std::span<const std::vector<Detection>> predictions,
                               std::span<const std::vector<BoundingBox>> ground_truth,
                               const ValidatorConfig& config) {
  if (predictions.size() != ground_truth.size()) {
    throw ValidationError("offline validation: " + std::to_string(predictions.size()) +
                          " prediction frames vs " + std::to_string(ground_truth.size()) +
                          " ground-truth frames");
  }
  OfflineReport report;
  std::size_t passing = 0;
  for (std::size_t f = 0; f < predictions.size(); ++f) {
    const auto pred_boxes = boxes_of(predictions[f]);
    const auto& truth = ground_truth[f];
    FrameValidation fv;
    for (const auto& p : pred_boxes)
      for (const auto& t : truth) fv.best_iou = std::max(fv.best_iou, iou(p, t));
    const auto matches = match_boxes(truth, pred_boxes, config.offline_iou_threshold);
    fv.pass = matches.size() == truth.size() && matches.size() == pred_boxes.size();
    passing += fv.pass ? 1 : 0;
    report.frames.push_back(fv);
  }
  report.pass_rate = predictions.empty()
                         ? 0.0
                         : static_cast<double>(passing) / static_cast<double>(predictions.size());
  return report;
}

void write_offline_report_csv(std::ostream& out, const OfflineReport& report) {
  const auto precision = out.precision(17);
  out << "frame,pass,best_iou\n";
  for (std::size_t f = 0; f < report.frames.size(); ++f) {
    out << f << ',' << (report.frames[f].pass ? 1 : 0) << ',' << report.frames[f].best_iou << '\n';
  }
  out.precision(precision);
}

}  // namespace vbsf
