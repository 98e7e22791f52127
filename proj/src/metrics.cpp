#include "vbsf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vbsf/error.hpp"

namespace vbsf {
namespace {

void require_pairs(std::size_t scores, std::size_t labels, const char* op) {
  if (scores != labels) throw ValidationError(std::string(op) + ": length mismatch");
  if (scores == 0) throw ValidationError(std::string(op) + ": empty input");
}

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  require_pairs(scores.size(), labels.size(), "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Metrics metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw ValidationError("metrics need at least one counted sample");
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.precision = ratio(c.tp, c.tp + c.fp, m.degenerate);
  m.recall = ratio(c.tp, c.tp + c.fn, m.degenerate);
  if (m.precision + m.recall == 0.0) m.degenerate = true;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  require_pairs(scores.size(), labels.size(), "roc");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw ValidationError("roc needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      labels[order[i]] == 1 ? ++tp : ++fp;
      ++i;
    }
    const RocPoint p{threshold, double(fp) / double(negatives), double(tp) / double(positives)};
    const RocPoint& prev = curve.points.back();
    curve.auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    curve.points.push_back(p);
  }
  return curve;
}

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> s(folds, 0);
  for (auto f : fold_of) ++s[f];
  return s;
}

FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  if (n < k) {
    throw ValidationError("k-fold needs at least k samples (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates on the portable stream so assignments match across toolchains.
  pso::RandomStream rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(order[i], order[j]);
  }
  FoldAssignment a{std::vector<std::size_t>(n), k};
  for (std::size_t pos = 0; pos < n; ++pos) a.fold_of[order[pos]] = pos % k;
  return a;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / double(values.size() - 1));
  }
  return s;
}

CrossValidationReport cross_validate(std::span<const LabeledPatch> data, std::size_t k,
                                     const pso::PsoConfig& pso_config, std::uint64_t split_seed) {
  const FoldAssignment assignment = kfold_split(data.size(), k, split_seed);
  CrossValidationReport report;
  std::vector<double> acc, prec, rec, f1;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<LabeledPatch> train_set, test_set;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (assignment.fold_of[i] == fold ? test_set : train_set).push_back(data[i]);
    }
    const auto positives = std::count_if(train_set.begin(), train_set.end(),
                                         [](const LabeledPatch& p) { return p.label == 1; });
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(train_set.size())) {
      throw ValidationError("fold " + std::to_string(fold) +
                            ": training portion is single-class data");
    }
    pso::PsoConfig cfg = pso_config;
    cfg.seed = pso_config.seed + fold;
    const TrainingResult trained = train(train_set, cfg);

    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& p : test_set) {
      scores.push_back(predict(trained.classifier, p.features));
      labels.push_back(p.label);
    }
    FoldResult r;
    r.counts = confusion(scores, labels, 0.5);
    r.metrics = metrics(r.counts);
    r.loss_history = trained.loss_history;
    r.accuracy_history = trained.accuracy_history;
    acc.push_back(r.metrics.accuracy);
    prec.push_back(r.metrics.precision);
    rec.push_back(r.metrics.recall);
    f1.push_back(r.metrics.f1);
    report.folds.push_back(std::move(r));
  }
  report.accuracy = summarize(acc);
  report.precision = summarize(prec);
  report.recall = summarize(rec);
  report.f1 = summarize(f1);
  return report;
}

void write_metrics_csv(std::ostream& out, const ConfusionCounts& c, const Metrics& m) {
  const auto precision = out.precision(17);
  out << "tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate\n";
  out << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ',' << m.accuracy << ','
      << m.precision << ',' << m.recall << ',' << m.f1 << ',' << (m.degenerate ? 1 : 0) << '\n';
  out.precision(precision);
}

void write_metrics_csv(std::ostream& out, const CrossValidationReport& report) {
  const auto precision = out.precision(17);
  out << "fold,tp,fp,tn,fn,accuracy,precision,recall,f1,degenerate\n";
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& c = report.folds[i].counts;
    const auto& m = report.folds[i].metrics;
    out << i << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ',' << m.accuracy
        << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ',' << (m.degenerate ? 1 : 0)
        << '\n';
  }
  out << "mean,,,,," << report.accuracy.mean << ',' << report.precision.mean << ','
      << report.recall.mean << ',' << report.f1.mean << ",\n";
  out << "stdev,,,,," << report.accuracy.stdev << ',' << report.precision.stdev << ','
      << report.recall.stdev << ',' << report.f1.stdev << ",\n";
  out.precision(precision);
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  const auto precision = out.precision(17);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    if (std::isinf(p.threshold)) out << "inf";
    else out << p.threshold;
    out << ',' << p.fpr << ',' << p.tpr << '\n';
  }
  out << "# auc=" << curve.auc << '\n';
  out.precision(precision);
}

void write_training_csv(std::ostream& out, std::span<const double> loss,
                        std::span<const double> accuracy) {
  const auto precision = out.precision(17);
  out << "iteration,loss,accuracy\n";
  const std::size_t n = std::max(loss.size(), accuracy.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << (i + 1) << ',';
    if (i < loss.size()) out << loss[i];
    out << ',';
    if (i < accuracy.size()) out << accuracy[i];
    out << '\n';
  }
  out.precision(precision);
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::span<const PlotSeries> series) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (double v : s.x) x_min = std::min(x_min, v), x_max = std::max(x_max, v);
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y_min = std::min(y_min, v), y_max = std::max(y_max, v);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
  if (!std::isfinite(y_min)) y_min = 0, y_max = 1;
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      svg << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 14 + 16 * static_cast<double>(i);
    svg << "<line x1=\"" << kLeft + plot_w - 120 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w - 100 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w - 95 << "\" y=\"" << ly << "\">" << escape_xml(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vbsf
