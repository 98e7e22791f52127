// vbsf: dataset synthesis, detector training and evaluation, offline
// validation, and the scheduled detection loop.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "vbsf/alert.hpp"
#include "vbsf/config.hpp"
#include "vbsf/detector.hpp"
#include "vbsf/error.hpp"
#include "vbsf/log.hpp"
#include "vbsf/metrics.hpp"
#include "vbsf/pipeline.hpp"
#include "vbsf/synth.hpp"
#include "vbsf/validator.hpp"

namespace fs = std::filesystem;
using namespace vbsf;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  auto config = pipeline_config_from_json(read_json_file(path));
  config.validate();
  return config;
}

// model.vbsf -> model.<suffix>
fs::path sibling(const fs::path& model, const std::string& suffix) {
  fs::path p = model;
  return p.replace_extension(suffix);
}

std::vector<LabeledPatch> collect_patches(const std::vector<std::string>& dirs,
                                          const PipelineConfig& config, std::uint64_t seed) {
  std::vector<LabeledPatch> data;
  bool drones = false, others = false;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto seq = synth::read_dataset(dirs[i]);
    for (const auto& frame : seq.annotations)
      for (const auto& ann : frame) (ann.kind == synth::ObjectKind::Drone ? drones : others) = true;
    const auto patches = build_training_patches(seq, config, seed + i);
    spdlog::info("{}: {} frames, {} patches", dirs[i], seq.frames.size(), patches.size());
    data.insert(data.end(), patches.begin(), patches.end());
  }
  // Background crops alone do not make a second class.
  if (!drones || !others)
    throw ValidationError(std::string("single-class data: annotations contain no ") +
                          (drones ? "non-drone" : "drone") + " objects");
  return data;
}

struct SynthArgs {
  std::string config;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  const auto scene = scene_config_from_json(read_json_file(a.config));
  const auto seq = synth::render_sequence(scene);
  synth::write_dataset(seq, a.out);
  std::printf("wrote %zu frames to %s\n", seq.frames.size(), a.out.c_str());
  return 0;
}

struct TrainArgs {
  std::vector<std::string> data;
  std::string out;
  std::string config;
  std::uint64_t pso_seed = 0;
  std::size_t iterations = 50;
  unsigned threads = 1;
};

int cmd_train(const TrainArgs& a) {
  const auto config = load_pipeline_config(a.config);
  const auto data = collect_patches(a.data, config, a.pso_seed);
  auto pso = default_training_config(a.pso_seed);
  pso.max_iterations = a.iterations;
  pso.threads = a.threads;
  const auto result = train(data, pso);
  save_model(a.out, result.classifier);

  const fs::path model = a.out;
  auto csv = open_out(sibling(model, ".training.csv"));
  write_training_csv(csv, result.loss_history, result.accuracy_history);
  std::vector<double> xs(result.loss_history.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = double(i + 1);
  const std::vector<PlotSeries> loss{{"gbest loss", xs, result.loss_history}};
  const std::vector<PlotSeries> acc{{"training accuracy", xs, result.accuracy_history}};
  write_text(sibling(model, ".loss.svg"), svg_line_plot("Training loss", "iteration", "BCE", loss));
  write_text(sibling(model, ".accuracy.svg"),
             svg_line_plot("Training accuracy", "iteration", "accuracy", acc));

  std::size_t positives = 0;
  for (const auto& p : data) positives += p.label;
  std::printf("trained on %zu patches (%zu drone), final loss %.6f, accuracy %.4f\n", data.size(),
              positives, result.loss_history.back(), result.accuracy_history.back());
  return 0;
}

struct EvaluateArgs {
  std::vector<std::string> data;
  std::string model;
  std::string config;
  std::string out = ".";
  std::size_t kfold = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto config = load_pipeline_config(a.config);
  const auto classifier = load_model(a.model);
  const auto data = collect_patches(a.data, config, a.seed);
  const fs::path out = a.out;

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : data) {
    scores.push_back(predict(classifier, p.features));
    labels.push_back(p.label);
  }
  const auto counts = confusion(scores, labels, 0.5);
  const auto m = metrics(counts);
  {
    auto csv = open_out(out / "metrics.csv");
    write_metrics_csv(csv, counts, m);
  }
  const auto curve = roc(scores, labels);
  {
    auto csv = open_out(out / "roc.csv");
    write_roc_csv(csv, curve);
  }
  PlotSeries series{"model", {}, {}};
  for (const auto& p : curve.points) {
    series.x.push_back(p.fpr);
    series.y.push_back(p.tpr);
  }
  const std::vector<PlotSeries> plot{series};
  write_text(out / "roc.svg", svg_line_plot("ROC", "false positive rate", "true positive rate", plot));
  std::printf("accuracy %.4f precision %.4f recall %.4f f1 %.4f auc %.4f\n", m.accuracy,
              m.precision, m.recall, m.f1, curve.auc);

  if (a.kfold > 0) {
    auto pso = default_training_config(a.seed);
    pso.threads = a.threads;
    const auto cv = cross_validate(data, a.kfold, pso, a.seed);
    auto csv = open_out(out / "kfold.csv");
    write_metrics_csv(csv, cv);
    std::printf("%zu-fold accuracy %.4f +- %.4f, f1 %.4f +- %.4f\n", a.kfold, cv.accuracy.mean,
                cv.accuracy.stdev, cv.f1.mean, cv.f1.stdev);
  }
  return 0;
}

// frame,x,y,w,h,score with a header; frames without rows have no detections.
void write_predictions(std::ostream& out, const std::vector<FrameOutcome>& frames) {
  out << "frame,x,y,w,h,score\n";
  for (const auto& f : frames)
    for (const auto& d : f.detections)
      out << f.frame_index << ',' << d.box.x << ',' << d.box.y << ',' << d.box.w << ','
          << d.box.h << ',' << d.score << '\n';
}

std::vector<std::vector<Detection>> read_predictions(const fs::path& path, std::size_t frames) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("frame,x,y,w,h", 0) != 0)
    throw DataError(path.string() + ": expected header frame,x,y,w,h,score");
  std::vector<std::vector<Detection>> out(frames);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() < 5) throw DataError(path.string() + ": row " + std::to_string(row) + " is short");
    try {
      const long long f = std::stoll(cells[0]);
      if (f < 0 || std::size_t(f) >= frames)
        throw DataError(path.string() + ": row " + std::to_string(row) + " names frame " +
                        cells[0] + " outside the dataset");
      Detection d;
      d.box = {std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3]), std::stod(cells[4])};
      d.score = cells.size() > 5 ? std::stod(cells[5]) : 1.0;
      out[f].push_back(d);
    } catch (const std::logic_error&) {
      throw DataError(path.string() + ": row " + std::to_string(row) + " is not numeric");
    }
  }
  return out;
}

struct ValidateArgs {
  std::string pred;
  std::string gt;
  double threshold = 0.9;
  std::string out;
};

int cmd_validate(const ValidateArgs& a) {
  const auto seq = synth::read_dataset(a.gt);
  const auto predictions = read_predictions(a.pred, seq.frames.size());
  std::vector<std::vector<BoundingBox>> truth(seq.frames.size());
  for (std::size_t f = 0; f < seq.annotations.size(); ++f)
    for (const auto& ann : seq.annotations[f])
      if (ann.kind == synth::ObjectKind::Drone) truth[f].push_back(ann.box);
  ValidatorConfig vc;
  vc.offline_iou_threshold = a.threshold;
  vc.validate();
  const auto report = offline_validate(predictions, truth, vc);
  if (!a.out.empty()) {
    auto csv = open_out(a.out);
    write_offline_report_csv(csv, report);
  }
  std::printf("pass_rate %.4f over %zu frames at IoU %.2f\n", report.pass_rate,
              report.frames.size(), a.threshold);
  return 0;
}

struct RunArgs {
  std::string data;
  std::string model;
  std::string config;
  std::string alert_file;
  std::string alert_url;
  std::string pred_out;
  std::string report;
  double virtual_step = 0.0;
};

int cmd_run(const RunArgs& a) {
  auto config = load_pipeline_config(a.config);
  if (a.virtual_step > 0.0) {
    config.clock.kind = ClockConfig::Kind::Virtual;
    config.clock.step = a.virtual_step;
  }
  config.validate();
  const auto classifier = load_model(a.model);
  DatasetFrameSource source(a.data);

  std::vector<std::unique_ptr<AlertSink>> owned;
  if (!a.alert_file.empty()) owned.push_back(file_sink(a.alert_file));
  if (!a.alert_url.empty()) owned.push_back(webhook_sink(a.alert_url, config.delivery.http_timeout_seconds));
  std::vector<AlertSink*> sinks;
  for (auto& s : owned) sinks.push_back(s.get());

  std::vector<FrameOutcome> frames;
  FrameObserver observer;
  if (!a.pred_out.empty()) observer = [&](const FrameOutcome& o) { frames.push_back(o); };
  const auto report = run_pipeline(source, config, classifier, sinks, observer);

  if (!a.pred_out.empty()) {
    auto out = open_out(a.pred_out);
    write_predictions(out, frames);
  }
  const std::string dump = to_json(report).dump(2) + "\n";
  if (a.report.empty()) std::fputs(dump.c_str(), stdout);
  else write_text(a.report, dump);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Drone detection: synthetic data, PSO-trained detector, scheduled pipeline"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset from a scene config");
  synth->add_option("--config", synth_args.config, "scene.json")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_args.out, "Output dataset directory")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the patch classifier");
  train_cmd->add_option("--data", train_args.data, "Dataset directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", train_args.out, "Model file")->required();
  train_cmd->add_option("--config", train_args.config, "pipeline.json for patch extraction")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--pso-seed", train_args.pso_seed, "Swarm seed");
  train_cmd->add_option("--iterations", train_args.iterations, "PSO sweeps")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--threads", train_args.threads, "Objective evaluation threads")
      ->check(CLI::PositiveNumber);

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on datasets, optionally k-fold");
  evaluate->add_option("--data", eval_args.data, "Dataset directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--model", eval_args.model, "Model file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--config", eval_args.config, "pipeline.json for patch extraction")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_args.out, "Report directory");
  evaluate->add_option("--kfold", eval_args.kfold, "Also cross-validate with k folds");
  evaluate->add_option("--seed", eval_args.seed, "Split and swarm seed");
  evaluate->add_option("--threads", eval_args.threads, "Objective evaluation threads")
      ->check(CLI::PositiveNumber);

  ValidateArgs val_args;
  auto* validate = app.add_subcommand("validate", "Offline IoU validation against ground truth");
  validate->add_option("--pred", val_args.pred, "Predictions CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("--gt", val_args.gt, "Ground-truth dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  validate->add_option("--threshold", val_args.threshold, "IoU needed per frame");
  validate->add_option("--out", val_args.out, "Per-frame report CSV");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the scheduled detection loop over a dataset");
  run->add_option("--data", run_args.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--model", run_args.model, "Model file")->required()->check(CLI::ExistingFile);
  run->add_option("--config", run_args.config, "pipeline.json")->check(CLI::ExistingFile);
  run->add_option("--alert-file", run_args.alert_file, "Append alerts as JSON lines");
  run->add_option("--alert-url", run_args.alert_url, "POST alerts to this http:// URL");
  run->add_option("--virtual-clock", run_args.virtual_step, "Virtual seconds per frame")
      ->check(CLI::PositiveNumber);
  run->add_option("--pred-out", run_args.pred_out, "Per-frame detections CSV");
  run->add_option("--report", run_args.report, "Write the run report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    std::fprintf(stderr, "vbsf: %s\n", msg.c_str());
    return 1;
  }

  try {
    if (*synth) return cmd_synth(synth_args);
    if (*train_cmd) return cmd_train(train_args);
    if (*evaluate) return cmd_evaluate(eval_args);
    if (*validate) return cmd_validate(val_args);
    if (*run) return cmd_run(run_args);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "vbsf: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "vbsf: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vbsf: %s\n", e.what());
    return 2;
  }
  return 1;
}
