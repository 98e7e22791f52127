#include "vbsf/config.hpp"

#include <fstream>
#include <set>

#include "vbsf/error.hpp"

namespace vbsf {
namespace {

using nlohmann::json;

// Typed field access that tracks which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ValidationError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ValidationError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ValidationError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ValidationError("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw ValidationError(where_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ValidationError(where_ + ": unknown field '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Interpolation parse_interpolation(const std::string& s) {
  if (s == "nearest") return Interpolation::Nearest;
  if (s == "bilinear") return Interpolation::Bilinear;
  if (s == "lanczos3") return Interpolation::Lanczos3;
  throw ValidationError("unknown sr_method '" + s + "'");
}

const char* interpolation_name(Interpolation m) {
  switch (m) {
    case Interpolation::Nearest: return "nearest";
    case Interpolation::Bilinear: return "bilinear";
    case Interpolation::Lanczos3: return "lanczos3";
  }
  return "lanczos3";
}

}  // namespace

void PipelineConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(brightness_threshold)) throw ValidationError("brightness_threshold must lie in [0, 1]");
  if (sr_factor < 1) throw ValidationError("sr_factor must be >= 1");
  if (denoise_radius < 1) throw ValidationError("denoise_radius must be >= 1");
  if (!(dehaze_low_pct >= 0.0 && dehaze_low_pct < dehaze_high_pct && dehaze_high_pct <= 100.0)) {
    throw ValidationError("dehaze percentiles must satisfy 0 <= low < high <= 100");
  }
  if (background.window < 1) throw ValidationError("background.window must be >= 1");
  if (background.diff_threshold < 0) throw ValidationError("background.diff_threshold must be >= 0");
  if (!unit(score_threshold)) throw ValidationError("score_threshold must lie in [0, 1]");
  validator.validate();
  if (!(schedule.window_duration > 0.0)) throw ValidationError("schedule.window_duration must be > 0");
  if (!(schedule.wait_duration > 0.0)) throw ValidationError("schedule.wait_duration must be > 0");
  if (schedule.cycles < 1) throw ValidationError("schedule.cycles must be >= 1");
  if (clock.kind == ClockConfig::Kind::Virtual && !(clock.step > 0.0)) {
    throw ValidationError("clock.step must be > 0");
  }
  if (delivery.attempts < 1) throw ValidationError("delivery.attempts must be >= 1");
  if (!(delivery.backoff_seconds >= 0.0)) throw ValidationError("delivery.backoff_seconds must be >= 0");
  if (delivery.queue_capacity < 1) throw ValidationError("delivery.queue_capacity must be >= 1");
  if (!(delivery.http_timeout_seconds > 0.0)) throw ValidationError("delivery.http_timeout_seconds must be > 0");
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig c;
  Reader r(j, "pipeline");
  r.get("brightness_threshold", c.brightness_threshold);
  r.get("enhance_always", c.enhance_always);
  r.get("sr_factor", c.sr_factor);
  if (const json* m = r.child("sr_method")) {
    if (!m->is_string()) throw ValidationError("pipeline.sr_method: wrong type");
    c.sr_method = parse_interpolation(m->get<std::string>());
  }
  r.get("denoise_radius", c.denoise_radius);
  if (const json* d = r.child("dehaze")) {
    Reader dr(*d, r.path("dehaze"));
    dr.get("low_pct", c.dehaze_low_pct);
    dr.get("high_pct", c.dehaze_high_pct);
    dr.finish();
  }
  if (const json* b = r.child("background")) {
    Reader br(*b, r.path("background"));
    br.get("window", c.background.window);
    br.get("diff_threshold", c.background.diff_threshold);
    br.get("min_area", c.background.min_area);
    br.get("warmup_frames", c.background.warmup_frames);
    br.finish();
  }
  r.get("score_threshold", c.score_threshold);
  if (const json* v = r.child("validator")) {
    Reader vr(*v, r.path("validator"));
    vr.get("runtime_iou_threshold", c.validator.runtime_iou_threshold);
    vr.get("offline_iou_threshold", c.validator.offline_iou_threshold);
    vr.get("consecutive_required", c.validator.consecutive_required);
    vr.get("rearm_after", c.validator.rearm_after);
    vr.finish();
  }
  if (const json* s = r.child("schedule")) {
    Reader sr(*s, r.path("schedule"));
    sr.get("window_duration", c.schedule.window_duration);
    sr.get("wait_duration", c.schedule.wait_duration);
    sr.get("cycles", c.schedule.cycles);
    sr.finish();
  }
  if (const json* k = r.child("clock")) {
    Reader kr(*k, r.path("clock"));
    std::string kind = "wall";
    kr.get("kind", kind);
    if (kind == "wall") c.clock.kind = ClockConfig::Kind::Wall;
    else if (kind == "virtual") c.clock.kind = ClockConfig::Kind::Virtual;
    else throw ValidationError("pipeline.clock.kind must be 'wall' or 'virtual'");
    kr.get("step", c.clock.step);
    kr.finish();
  }
  if (const json* d = r.child("delivery")) {
    Reader dr(*d, r.path("delivery"));
    dr.get("attempts", c.delivery.attempts);
    dr.get("backoff_seconds", c.delivery.backoff_seconds);
    dr.get("queue_capacity", c.delivery.queue_capacity);
    dr.get("http_timeout_seconds", c.delivery.http_timeout_seconds);
    dr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

json to_json(const PipelineConfig& c) {
  return {
      {"brightness_threshold", c.brightness_threshold},
      {"enhance_always", c.enhance_always},
      {"sr_factor", c.sr_factor},
      {"sr_method", interpolation_name(c.sr_method)},
      {"denoise_radius", c.denoise_radius},
      {"dehaze", {{"low_pct", c.dehaze_low_pct}, {"high_pct", c.dehaze_high_pct}}},
      {"background",
       {{"window", c.background.window},
        {"diff_threshold", c.background.diff_threshold},
        {"min_area", c.background.min_area},
        {"warmup_frames", c.background.warmup_frames}}},
      {"score_threshold", c.score_threshold},
      {"validator",
       {{"runtime_iou_threshold", c.validator.runtime_iou_threshold},
        {"offline_iou_threshold", c.validator.offline_iou_threshold},
        {"consecutive_required", c.validator.consecutive_required},
        {"rearm_after", c.validator.rearm_after}}},
      {"schedule",
       {{"window_duration", c.schedule.window_duration},
        {"wait_duration", c.schedule.wait_duration},
        {"cycles", c.schedule.cycles}}},
      {"clock",
       {{"kind", c.clock.kind == ClockConfig::Kind::Wall ? "wall" : "virtual"},
        {"step", c.clock.step}}},
      {"delivery",
       {{"attempts", c.delivery.attempts},
        {"backoff_seconds", c.delivery.backoff_seconds},
        {"queue_capacity", c.delivery.queue_capacity},
        {"http_timeout_seconds", c.delivery.http_timeout_seconds}}},
  };
}

synth::SceneConfig scene_config_from_json(const json& j) {
  synth::SceneConfig c;
  Reader r(j, "scene");
  r.get("width", c.width);
  r.get("height", c.height);
  r.get("frame_count", c.frame_count);
  r.get("fps", c.fps);
  r.get("noise_sigma", c.noise_sigma);
  r.get("seed", c.seed);
  if (const json* b = r.child("background")) {
    Reader br(*b, r.path("background"));
    std::string kind = "flat";
    br.get("kind", kind);
    if (kind == "flat") c.background.kind = synth::Background::Kind::Flat;
    else if (kind == "gradient") c.background.kind = synth::Background::Kind::Gradient;
    else if (kind == "noisy_flat") c.background.kind = synth::Background::Kind::NoisyFlat;
    else throw ValidationError("scene.background.kind must be flat, gradient or noisy_flat");
    br.get("level", c.background.level);
    br.get("level_end", c.background.level_end);
    br.get("sigma", c.background.sigma);
    br.finish();
  }
  if (const json* objects = r.child("objects")) {
    if (!objects->is_array()) throw ValidationError("scene.objects must be an array");
    for (std::size_t i = 0; i < objects->size(); ++i) {
      Reader orr((*objects)[i], "scene.objects[" + std::to_string(i) + "]");
      synth::ObjectSpec o;
      std::string kind = "drone";
      orr.get("kind", kind);
      o.kind = synth::parse_object_kind(kind);
      orr.get("size", o.size);
      orr.get("start_x", o.start_x);
      orr.get("start_y", o.start_y);
      orr.get("velocity_x", o.velocity_x);
      orr.get("velocity_y", o.velocity_y);
      orr.get("intensity", o.intensity);
      orr.get("first_frame", o.first_frame);
      orr.finish();
      c.objects.push_back(o);
    }
  }
  r.finish();
  c.validate();
  return c;
}

json to_json(const synth::SceneConfig& c) {
  const char* kind = "flat";
  if (c.background.kind == synth::Background::Kind::Gradient) kind = "gradient";
  if (c.background.kind == synth::Background::Kind::NoisyFlat) kind = "noisy_flat";
  json objects = json::array();
  for (const auto& o : c.objects) {
    objects.push_back({{"kind", synth::to_string(o.kind)},
                       {"size", o.size},
                       {"start_x", o.start_x},
                       {"start_y", o.start_y},
                       {"velocity_x", o.velocity_x},
                       {"velocity_y", o.velocity_y},
                       {"intensity", o.intensity},
                       {"first_frame", o.first_frame}});
  }
  return {{"width", c.width},
          {"height", c.height},
          {"frame_count", c.frame_count},
          {"fps", c.fps},
          {"noise_sigma", c.noise_sigma},
          {"seed", c.seed},
          {"background",
           {{"kind", kind},
            {"level", c.background.level},
            {"level_end", c.background.level_end},
            {"sigma", c.background.sigma}}},
          {"objects", objects}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace vbsf
