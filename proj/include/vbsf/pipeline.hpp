#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbsf/alert.hpp"
#include "vbsf/background.hpp"
#include "vbsf/config.hpp"
#include "vbsf/detector.hpp"
#include "vbsf/synth.hpp"

namespace vbsf {

/// Time source for the acquisition schedule.
class Clock {
 public:
  virtual ~Clock() = default;
  /// Seconds since an arbitrary fixed origin.
  virtual double now() const = 0;
  virtual void wait(double seconds) = 0;
  /// Called once per acquired frame.
  virtual void on_frame() = 0;
  virtual bool is_virtual() const = 0;
};

class WallClock final : public Clock {
 public:
  double now() const override;
  void wait(double seconds) override;
  void on_frame() override {}
  bool is_virtual() const override { return false; }
};

/// Advances a fixed step per frame and jumps through waits instantly.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(double step_seconds) : step_(step_seconds) {}
  double now() const override { return now_; }
  void wait(double seconds) override { now_ += seconds; }
  void on_frame() override { now_ += step_; }
  bool is_virtual() const override { return true; }

 private:
  double step_;
  double now_ = 0.0;
};

std::unique_ptr<Clock> make_clock(const ClockConfig& config);

/// Runs `cycles` acquisition windows. Inside a window `body` is invoked once
/// per frame until the window duration elapses; the clock then waits before
/// the next window. `body` returning false (source exhausted) ends the loop
/// early. Returns the number of windows started.
int schedule_loop(const ScheduleConfig& schedule, Clock& clock, const std::function<bool()>& body);

/// Pull-based frame stream. next() returns nullopt at the end and may throw
/// DataError for a frame that cannot be decoded; that frame is then skipped.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<Frame> next() = 0;
};

class MemoryFrameSource final : public FrameSource {
 public:
  explicit MemoryFrameSource(std::vector<Frame> frames) : frames_(std::move(frames)) {}
  std::optional<Frame> next() override;

 private:
  std::vector<Frame> frames_;
  std::size_t cursor_ = 0;
};

/// Reads frame_NNNNNN.pgm files of a dataset directory lazily, in order.
class DatasetFrameSource final : public FrameSource {
 public:
  explicit DatasetFrameSource(std::filesystem::path dir);
  std::optional<Frame> next() override;
  std::int64_t frame_count() const { return frame_count_; }

 private:
  std::filesystem::path dir_;
  std::int64_t frame_count_ = 0;
  double fps_ = 25.0;
  std::int64_t cursor_ = 0;
};

/// Enhancement chain of the low-light branch: night-vision grayscale,
/// super-resolution, median denoise, then dehaze stretch.
Frame enhance_frame(const Frame& frame, const PipelineConfig& config);

struct StageTimings {
  double brightness_ms = 0.0;
  double enhance_ms = 0.0;
  double background_ms = 0.0;
  double detect_ms = 0.0;
  double validate_ms = 0.0;
};

struct RunReport {
  std::int64_t frames_processed = 0;
  std::int64_t frames_skipped_bright = 0;
  std::int64_t frames_failed = 0;
  std::int64_t detections_total = 0;
  int windows_executed = 0;
  std::vector<AlertEvent> alerts;
  /// Parallel to `alerts` when sinks were attached.
  std::vector<DeliveryRecord> deliveries;
  StageTimings timings;
  bool timings_measured = false;

  std::int64_t frames_consumed() const {
    return frames_processed + frames_skipped_bright + frames_failed;
  }
};

/// Keys are emitted in sorted order, so equal reports serialize identically.
nlohmann::json to_json(const RunReport& report);

/// Per-frame callback: detections are in source-frame coordinates; an
/// unprocessed (bright) frame reports processed = false and no detections.
struct FrameOutcome {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  bool processed = false;
  std::vector<Detection> detections;
  std::optional<AlertEvent> alert;
};
using FrameObserver = std::function<void(const FrameOutcome&)>;

/// The full acquisition loop: brightness gate, enhancement, background
/// subtraction, detection, consistency validation and alerting, driven by the
/// configured schedule and clock. Stage timings are wall time with a Wall
/// clock and zero with a Virtual one.
RunReport run_pipeline(FrameSource& source, const PipelineConfig& config,
                       const SigmoidClassifier& classifier, std::span<AlertSink* const> sinks,
                       const FrameObserver& observer = {});

/// Overload that builds its clock from `config.clock`.
RunReport run_pipeline(FrameSource& source, const PipelineConfig& config,
                       const SigmoidClassifier& classifier, std::span<AlertSink* const> sinks,
                       Clock& clock, const FrameObserver& observer = {});

/// Training patches from an annotated sequence, seen the way the pipeline sees
/// frames: each frame goes through the enhancement chain and the temporal-median
/// segmenter; the component best matching each annotation becomes its patch
/// (drone = 1, other kinds = 0), and `background_per_frame` boxes sampled away
/// from every annotation add further negatives.
std::vector<LabeledPatch> build_training_patches(const synth::AnnotatedSequence& sequence,
                                                 const PipelineConfig& config, std::uint64_t seed,
                                                 int background_per_frame = 1);

}  // namespace vbsf
