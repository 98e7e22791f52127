#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vbsf/error.hpp"
#include "vbsf/pipeline.hpp"
#include "vbsf/synth.hpp"

namespace vbsf {
namespace {

using testing::constant_frame;

TEST(ScheduleLoop, DefaultsGiveTenWindowsOfTenFrames) {
  VirtualClock clock(60);
  int frames = 0;
  const int windows = schedule_loop({}, clock, [&] { return ++frames, true; });
  EXPECT_EQ(windows, 10);
  EXPECT_EQ(frames, 100);
  // No wait after the last window.
  EXPECT_EQ(clock.now(), 10 * 600.0 + 9 * 1800.0);
}

TEST(ScheduleLoop, PartialStepsRoundUp) {
  VirtualClock clock(7);
  int frames = 0;
  schedule_loop({60, 5, 3}, clock, [&] { return ++frames, true; });
  EXPECT_EQ(frames, 3 * 9);  // ceil(60 / 7)
}

TEST(ScheduleLoop, ExhaustedBodyStopsEarly) {
  VirtualClock clock(60);
  int frames = 0;
  EXPECT_EQ(schedule_loop({}, clock, [&] { return ++frames <= 25; }), 3);
  EXPECT_EQ(frames, 26);
  EXPECT_THROW(schedule_loop({0, 1, 1}, clock, [] { return true; }), ValidationError);
}

PipelineConfig virtual_config(double step = 60) {
  PipelineConfig cfg;
  cfg.clock = {ClockConfig::Kind::Virtual, step};
  return cfg;
}

std::vector<Frame> frames_of(int n, std::uint8_t level) {
  std::vector<Frame> out;
  for (int i = 0; i < n; ++i) {
    auto f = constant_frame(32, 24, level);
    f.index = i;
    out.push_back(f);
  }
  return out;
}

TEST(RunPipeline, EmptySource) {
  MemoryFrameSource source({});
  const auto report = run_pipeline(source, virtual_config(), SigmoidClassifier{}, {});
  EXPECT_EQ(report.frames_consumed(), 0);
  EXPECT_TRUE(report.alerts.empty());
  EXPECT_EQ(report.windows_executed, 1);
}

TEST(RunPipeline, BrightFramesAreSkipped) {
  MemoryFrameSource source(frames_of(30, 200));
  const auto report = run_pipeline(source, virtual_config(1), SigmoidClassifier{}, {});
  EXPECT_EQ(report.frames_skipped_bright, 30);
  EXPECT_EQ(report.frames_processed, 0);

  auto always = virtual_config(1);
  always.enhance_always = true;
  MemoryFrameSource again(frames_of(30, 200));
  EXPECT_EQ(run_pipeline(again, always, SigmoidClassifier{}, {}).frames_processed, 30);
}

class FlakySource : public FrameSource {
 public:
  std::optional<Frame> next() override {
    const int i = cursor_++;
    if (i >= 40) return std::nullopt;
    if (i % 7 == 3) throw DataError("corrupt frame");
    auto f = constant_frame(32, 24, i % 3 ? 20 : 220);
    f.index = i;
    return f;
  }

 private:
  int cursor_ = 0;
};

TEST(RunPipeline, EveryConsumedFrameIsAccounted) {
  FlakySource source;
  const auto report = run_pipeline(source, virtual_config(1), SigmoidClassifier{}, {});
  EXPECT_EQ(report.frames_consumed(), 40);
  EXPECT_EQ(report.frames_failed, 6);
  EXPECT_GT(report.frames_processed, 0);
  EXPECT_GT(report.frames_skipped_bright, 0);
}

synth::SceneConfig moving_drone_scene() {
  synth::SceneConfig s;
  s.frame_count = 60;
  s.background = {synth::Background::Kind::Gradient, 20, 90, 0};
  s.objects.push_back({synth::ObjectKind::Drone, 12, 20, 25, 1.2, 0.6, 255, 20});
  s.noise_sigma = 2;
  s.seed = 5;
  return s;
}

TEST(RunPipeline, AcceptAllClassifierAlertsOnMovingObject) {
  SigmoidClassifier accept;
  accept.bias = 10;
  const auto seq = synth::render_sequence(moving_drone_scene());
  MemoryFrameSource source(seq.frames);
  std::vector<FrameOutcome> outcomes;
  const auto report = run_pipeline(source, virtual_config(1), accept, {},
                                   [&](const FrameOutcome& o) { outcomes.push_back(o); });
  ASSERT_EQ(outcomes.size(), 60u);
  EXPECT_EQ(report.frames_processed, 60);
  ASSERT_EQ(report.alerts.size(), 1u);
  int hits = 0, visible = 0;
  for (std::size_t f = 20; f < 60; ++f) {
    ++visible;
    for (const auto& d : outcomes[f].detections) {
      if (iou(d.box, seq.annotations[f][0].box) >= 0.5) {
        ++hits;
        break;
      }
    }
  }
  EXPECT_GE(hits, visible * 9 / 10);
}

TEST(RunPipeline, RejectAllClassifierNeverAlerts) {
  SigmoidClassifier reject;
  reject.bias = -10;
  MemoryFrameSource source(synth::render_sequence(moving_drone_scene()).frames);
  const auto report = run_pipeline(source, virtual_config(1), reject, {});
  EXPECT_EQ(report.detections_total, 0);
  EXPECT_TRUE(report.alerts.empty());
}

TEST(RunPipeline, VirtualRunsSerializeIdentically) {
  SigmoidClassifier accept;
  accept.bias = 10;
  const auto frames = synth::render_sequence(moving_drone_scene()).frames;
  MemoryFrameSource a(frames), b(frames);
  const auto ra = to_json(run_pipeline(a, virtual_config(1), accept, {}));
  const auto rb = to_json(run_pipeline(b, virtual_config(1), accept, {}));
  EXPECT_EQ(ra.dump(), rb.dump());
  EXPECT_EQ(ra["timings_ms"]["measured"], false);
}

TEST(EnhanceFrame, UpscalesToGray) {
  Frame rgba(10, 8, PixelFormat::Rgba8);
  const auto out = enhance_frame(rgba, PipelineConfig{});
  EXPECT_EQ(out.width(), 20);
  EXPECT_EQ(out.height(), 16);
  EXPECT_EQ(out.format(), PixelFormat::Gray8);
}

TEST(DatasetFrameSource, ReadsInOrderAndReportsCorruptFrames) {
  auto scene = moving_drone_scene();
  scene.frame_count = 4;
  scene.objects[0].first_frame = 0;
  const auto dir = testing::scratch_dir("frame_source");
  synth::write_dataset(synth::render_sequence(scene), dir);
  std::filesystem::resize_file(dir / "frame_000002.pgm", 10);
  DatasetFrameSource source(dir);
  EXPECT_EQ(source.frame_count(), 4);
  EXPECT_EQ(source.next()->index, 0);
  EXPECT_EQ(source.next()->index, 1);
  EXPECT_THROW(source.next(), DataError);
  EXPECT_EQ(source.next()->index, 3);
  EXPECT_FALSE(source.next().has_value());
}

TEST(BuildTrainingPatches, LabelsFollowObjectKinds) {
  auto scene = moving_drone_scene();
  scene.objects.push_back({synth::ObjectKind::Plane, 14, 60, 40, -1.0, 0.0, 255, 0});
  const auto seq = synth::render_sequence(scene);
  const auto patches = build_training_patches(seq, PipelineConfig{}, 3);
  int drones = 0;
  for (const auto& p : patches) drones += p.label;
  EXPECT_EQ(drones, 40);
  EXPECT_GE(patches.size() - drones, 60u + 60u);
}

}  // namespace
}  // namespace vbsf
