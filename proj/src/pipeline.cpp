#include "vbsf/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <thread>

#include "vbsf/error.hpp"
#include "vbsf/log.hpp"
#include "vbsf/preprocess.hpp"

namespace vbsf {
namespace {

using SteadyClock = std::chrono::steady_clock;

// Accumulates wall milliseconds into a stage slot; inert under a virtual clock.
class StageTimer {
 public:
  StageTimer(bool enabled, double& slot) : enabled_(enabled), slot_(slot) {
    if (enabled_) start_ = SteadyClock::now();
  }
  ~StageTimer() {
    if (enabled_) {
      slot_ += std::chrono::duration<double, std::milli>(SteadyClock::now() - start_).count();
    }
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  bool enabled_;
  double& slot_;
  SteadyClock::time_point start_;
};

BoundingBox scale_box(const BoundingBox& b, double s) { return {b.x * s, b.y * s, b.w * s, b.h * s}; }

}  // namespace

double WallClock::now() const {
  return std::chrono::duration<double>(SteadyClock::now().time_since_epoch()).count();
}

void WallClock::wait(double seconds) {
  std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

std::unique_ptr<Clock> make_clock(const ClockConfig& config) {
  if (config.kind == ClockConfig::Kind::Virtual) return std::make_unique<VirtualClock>(config.step);
  return std::make_unique<WallClock>();
}

int schedule_loop(const ScheduleConfig& schedule, Clock& clock, const std::function<bool()>& body) {
  if (!(schedule.window_duration > 0.0) || !(schedule.wait_duration > 0.0) || schedule.cycles < 1) {
    throw ValidationError("schedule needs positive durations and at least one cycle");
  }
  int executed = 0;
  for (int cycle = 0; cycle < schedule.cycles; ++cycle) {
    ++executed;
    const double start = clock.now();
    while (clock.now() - start < schedule.window_duration) {
      if (!body()) return executed;
      clock.on_frame();
    }
    if (cycle + 1 < schedule.cycles) clock.wait(schedule.wait_duration);
  }
  return executed;
}

std::optional<Frame> MemoryFrameSource::next() {
  if (cursor_ >= frames_.size()) return std::nullopt;
  return frames_[cursor_++];
}

DatasetFrameSource::DatasetFrameSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto manifest = read_json_file(dir_ / "manifest.json");
  try {
    frame_count_ = manifest.at("frame_count").get<std::int64_t>();
    fps_ = manifest.value("fps", 25.0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest.json: " + std::string(e.what()));
  }
}

std::optional<Frame> DatasetFrameSource::next() {
  if (cursor_ >= frame_count_) return std::nullopt;
  const std::int64_t index = cursor_++;
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06lld.pgm", static_cast<long long>(index));
  Frame frame = synth::read_pgm(dir_ / name);
  frame.index = index;
  frame.timestamp = double(index) / fps_;
  return frame;
}

Frame enhance_frame(const Frame& frame, const PipelineConfig& config) {
  Frame out = nightvision_grayscale(frame);
  out = upscale(out, config.sr_factor, config.sr_method);
  out = denoise_median(out, config.denoise_radius);
  return dehaze_stretch(out, config.dehaze_low_pct, config.dehaze_high_pct);
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json alerts = nlohmann::json::array();
  for (std::size_t i = 0; i < report.alerts.size(); ++i) {
    nlohmann::json a = nlohmann::json::parse(alert_to_json(report.alerts[i]).dump());
    if (i < report.deliveries.size()) {
      a["delivery"] = to_string(report.deliveries[i].status);
      a["attempts"] = report.deliveries[i].attempts;
    }
    alerts.push_back(std::move(a));
  }
  return {
      {"frames_processed", report.frames_processed},
      {"frames_skipped_bright", report.frames_skipped_bright},
      {"frames_failed", report.frames_failed},
      {"detections_total", report.detections_total},
      {"windows_executed", report.windows_executed},
      {"alerts", alerts},
      {"timings_ms",
       {{"brightness", report.timings.brightness_ms},
        {"enhance", report.timings.enhance_ms},
        {"background", report.timings.background_ms},
        {"detect", report.timings.detect_ms},
        {"validate", report.timings.validate_ms},
        {"measured", report.timings_measured}}},
  };
}

RunReport run_pipeline(FrameSource& source, const PipelineConfig& config,
                       const SigmoidClassifier& classifier, std::span<AlertSink* const> sinks,
                       const FrameObserver& observer) {
  auto clock = make_clock(config.clock);
  return run_pipeline(source, config, classifier, sinks, *clock, observer);
}

RunReport run_pipeline(FrameSource& source, const PipelineConfig& config,
                       const SigmoidClassifier& classifier, std::span<AlertSink* const> sinks,
                       Clock& clock, const FrameObserver& observer) {
  config.validate();
  RunReport report;
  report.timings_measured = !clock.is_virtual();
  const bool timed = report.timings_measured;
  const double inverse_scale = 1.0 / config.sr_factor;

  TemporalMedianSegmenter segmenter(
      {config.background.window, config.background.diff_threshold, config.background.warmup_frames});
  TrackState track;
  std::optional<AlertDispatcher> dispatcher;
  if (!sinks.empty()) {
    dispatcher.emplace(std::vector<AlertSink*>(sinks.begin(), sinks.end()), config.delivery);
  }

  auto process_one = [&]() -> bool {
    std::optional<Frame> frame;
    try {
      frame = source.next();
    } catch (const DataError& e) {
      spdlog::warn("skipping undecodable frame: {}", e.what());
      ++report.frames_failed;
      return true;
    }
    if (!frame) return false;

    FrameOutcome outcome{frame->index, frame->timestamp, false, {}, std::nullopt};
    double brightness = 0.0;
    {
      StageTimer t(timed, report.timings.brightness_ms);
      brightness = mean_brightness(*frame);
    }
    if (brightness >= config.brightness_threshold && !config.enhance_always) {
      ++report.frames_skipped_bright;
      if (observer) observer(outcome);
      return true;
    }
    ++report.frames_processed;
    outcome.processed = true;

    Frame enhanced;
    {
      StageTimer t(timed, report.timings.enhance_ms);
      enhanced = enhance_frame(*frame, config);
    }
    ForegroundMask mask;
    std::vector<BoundingBox> proposals;
    {
      StageTimer t(timed, report.timings.background_ms);
      mask = segmenter.segment(enhanced);
      proposals = connected_components(mask, config.background.min_area);
    }
    {
      StageTimer t(timed, report.timings.detect_ms);
      outcome.detections = detect(enhanced, proposals, classifier, config.score_threshold, &mask);
      for (auto& d : outcome.detections) d.box = scale_box(d.box, inverse_scale);
      report.detections_total += static_cast<std::int64_t>(outcome.detections.size());
    }
    {
      StageTimer t(timed, report.timings.validate_ms);
      auto checked = check_consistency(std::move(track), outcome.detections, config.validator);
      track = std::move(checked.state);
      outcome.alert = alert_decision(track, config.validator, frame->index, frame->timestamp);
    }
    if (outcome.alert) {
      spdlog::info("drone alert at frame {} (score {:.3f})", outcome.alert->frame_index,
                   outcome.alert->score);
      report.alerts.push_back(*outcome.alert);
      if (dispatcher) dispatcher->submit(*outcome.alert);
    }
    if (observer) observer(outcome);
    return true;
  };

  report.windows_executed = schedule_loop(config.schedule, clock, process_one);
  if (dispatcher) report.deliveries = dispatcher->drain();
  return report;
}

std::vector<LabeledPatch> build_training_patches(const synth::AnnotatedSequence& sequence,
                                                 const PipelineConfig& config, std::uint64_t seed,
                                                 int background_per_frame) {
  config.validate();
  if (sequence.frames.size() != sequence.annotations.size()) {
    throw ValidationError("annotation list does not match the frame count");
  }
  std::vector<Frame> enhanced;
  enhanced.reserve(sequence.frames.size());
  for (const auto& f : sequence.frames) enhanced.push_back(enhance_frame(f, config));

  // Warm-up frames get their mask from a median over the whole sequence.
  BackgroundModel global(std::min(config.background.window, enhanced.size()));
  const std::size_t stride = std::max<std::size_t>(1, enhanced.size() / global.window());
  for (std::size_t i = 0; i < enhanced.size() && global.size() < global.window(); i += stride) {
    global.update(enhanced[i]);
  }
  const Frame global_background = median_background(global);

  TemporalMedianSegmenter segmenter(
      {config.background.window, config.background.diff_threshold, config.background.warmup_frames});
  pso::RandomStream rng(seed);
  const double scale = config.sr_factor;
  std::vector<LabeledPatch> patches;

  for (std::size_t f = 0; f < enhanced.size(); ++f) {
    const Frame& frame = enhanced[f];
    const bool warm = segmenter.model().size() >= config.background.warmup_frames;
    ForegroundMask mask = segmenter.segment(frame);
    if (!warm) mask = foreground_mask(global_background, frame, config.background.diff_threshold);
    const auto components = connected_components(mask, config.background.min_area);
    const BoundingBox bounds{0.0, 0.0, double(frame.width()), double(frame.height())};

    std::vector<BoundingBox> truth;
    for (const auto& a : sequence.annotations[f]) {
      const auto clipped = box_intersection(scale_box(a.box, scale), bounds);
      if (!clipped) continue;
      truth.push_back(*clipped);
      BoundingBox box = *clipped;
      double best = 0.5;
      for (const auto& c : components) {
        const double v = iou(c, *clipped);
        if (v >= best) best = v, box = c;
      }
      patches.push_back({extract_features(frame, box, &mask), a.kind == synth::ObjectKind::Drone ? 1 : 0});
    }

    auto overlaps_truth = [&](const BoundingBox& b) {
      for (const auto& t : truth)
        if (box_intersection(b, t)) return true;
      return false;
    };
    for (const auto& c : components) {
      if (!overlaps_truth(c)) patches.push_back({extract_features(frame, c, &mask), 0});
    }
    for (int k = 0; k < background_per_frame; ++k) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        const double w = std::min(rng.uniform(8.0, 24.0) * scale, bounds.w);
        const double h = std::min(w * rng.uniform(0.5, 2.0), bounds.h);
        const BoundingBox b{std::floor(rng.uniform(0.0, bounds.w - w)),
                            std::floor(rng.uniform(0.0, bounds.h - h)), std::round(w), std::round(h)};
        if (!b.valid() || overlaps_truth(b)) continue;
        patches.push_back({extract_features(frame, b, &mask), 0});
        break;
      }
    }
  }
  return patches;
}

}  // namespace vbsf
