#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "vbsf/preprocess.hpp"
#include "vbsf/synth.hpp"
#include "vbsf/validator.hpp"

namespace vbsf {

struct ScheduleConfig {
  double window_duration = 600.0;  ///< seconds of acquisition per cycle
  double wait_duration = 1800.0;   ///< seconds idle between cycles
  int cycles = 10;
};

struct ClockConfig {
  enum class Kind { Wall, Virtual };
  Kind kind = Kind::Wall;
  /// Virtual seconds that pass per processed source frame.
  double step = 60.0;
};

struct BackgroundConfig {
  std::size_t window = 25;
  int diff_threshold = 30;
  std::size_t min_area = 25;
  std::size_t warmup_frames = 5;
};

struct DeliveryConfig {
  int attempts = 3;
  /// First retry delay; doubles after every failed attempt.
  double backoff_seconds = 1.0;
  std::size_t queue_capacity = 64;
  double http_timeout_seconds = 5.0;
};

struct PipelineConfig {
  double brightness_threshold = 0.35;
  bool enhance_always = false;
  int sr_factor = 2;
  Interpolation sr_method = Interpolation::Lanczos3;
  int denoise_radius = 1;
  double dehaze_low_pct = 1.0;
  double dehaze_high_pct = 99.0;
  BackgroundConfig background;
  double score_threshold = 0.5;
  ValidatorConfig validator;
  ScheduleConfig schedule;
  ClockConfig clock;
  DeliveryConfig delivery;

  /// Throws ValidationError on any out-of-range field.
  void validate() const;
};

/// Strict readers: unknown keys and wrongly typed values raise ValidationError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);
synth::SceneConfig scene_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const synth::SceneConfig& config);

/// Parses a JSON file; DataError when unreadable or malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace vbsf
