#include "aenet/eval.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "aenet/aent_io.hpp"
#include "aenet/errors.hpp"

namespace aenet {

void PredictionScores::validate() const {
  require_rank(scores, 2, "PredictionScores");
  if (seen.size() != scores.cols()) {
    throw ShapeError("scores: seen-flag count " + std::to_string(seen.size()) +
                     " != class count " + std::to_string(scores.cols()));
  }
  if (labels.size() != scores.rows()) {
    throw ShapeError("scores: label count does not match sample count");
  }
  for (std::size_t l : labels) {
    if (l >= scores.cols()) {
      throw DomainError("scores: label " + std::to_string(l) +
                        " outside class list");
    }
  }
  if (!scores.all_finite()) {
    throw DomainError("scores: non-finite entries");
  }
}

std::vector<std::size_t> infer_zsl(const PredictionScores& p) {
  p.validate();
  std::vector<std::size_t> unseen_classes;
  for (std::size_t c = 0; c < p.seen.size(); ++c) {
    if (!p.seen[c]) unseen_classes.push_back(c);
  }
  if (unseen_classes.empty()) {
    throw DomainError("infer_zsl: no unseen class");
  }
  std::vector<std::size_t> pred(p.sample_count());
  for (std::size_t i = 0; i < p.sample_count(); ++i) {
    std::size_t best = unseen_classes[0];
    for (std::size_t c : unseen_classes) {
      if (p.scores.at(i, c) > p.scores.at(i, best)) {
        best = c;
      }
    }
    pred[i] = best;
  }
  return pred;
}

std::vector<std::size_t> infer_gzsl(const PredictionScores& p, double gamma) {
  p.validate();
  std::vector<std::size_t> pred(p.sample_count());
  for (std::size_t i = 0; i < p.sample_count(); ++i) {
    std::size_t best = 0;
    double best_score = p.scores.at(i, 0) - (p.seen[0] ? gamma : 0.0);
    for (std::size_t c = 1; c < p.class_count(); ++c) {
      double s = p.scores.at(i, c) - (p.seen[c] ? gamma : 0.0);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    pred[i] = best;
  }
  return pred;
}

std::vector<double> per_class_accuracy(const std::vector<std::size_t>& pred,
                                       const std::vector<std::size_t>& truth,
                                       const std::vector<std::size_t>& classes) {
  if (classes.empty()) {
    throw DomainError("per_class_accuracy: empty class set");
  }
  if (pred.size() != truth.size()) {
    throw ShapeError("per_class_accuracy: prediction/truth length mismatch");
  }
  std::vector<double> acc;
  acc.reserve(classes.size());
  for (std::size_t c : classes) {
    std::size_t total = 0, correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == c) {
        ++total;
        if (pred[i] == c) ++correct;
      }
    }
    if (total == 0) {
      throw DomainError("per_class_accuracy: class " + std::to_string(c) +
                        " has no test samples");
    }
    acc.push_back(static_cast<double>(correct) / static_cast<double>(total));
  }
  return acc;
}

double harmonic_mean(double seen_acc, double unseen_acc) {
  double sum = seen_acc + unseen_acc;
  if (sum <= 0.0) {
    return 0.0;
  }
  return 2.0 * seen_acc * unseen_acc / sum;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

GzslPoint gzsl_point(const PredictionScores& p, double gamma,
                     const std::vector<std::size_t>& seen_classes,
                     const std::vector<std::size_t>& unseen_classes,
                     std::vector<std::size_t>* pred_out = nullptr) {
  auto pred = infer_gzsl(p, gamma);
  GzslPoint pt;
  pt.gamma = gamma;
  pt.seen_acc = mean_of(per_class_accuracy(pred, p.labels, seen_classes));
  pt.unseen_acc = mean_of(per_class_accuracy(pred, p.labels, unseen_classes));
  pt.harmonic = harmonic_mean(pt.seen_acc, pt.unseen_acc);
  if (pred_out) {
    *pred_out = std::move(pred);
  }
  return pt;
}

}  // namespace

std::vector<GzslPoint> sweep_gamma(const PredictionScores& p,
                                   const std::vector<double>& grid) {
  if (grid.empty()) {
    throw DomainError("sweep_gamma: empty grid");
  }
  p.validate();
  std::vector<std::size_t> seen_classes, unseen_classes;
  for (std::size_t c = 0; c < p.seen.size(); ++c) {
    (p.seen[c] ? seen_classes : unseen_classes).push_back(c);
  }
  std::vector<GzslPoint> out;
  out.reserve(grid.size());
  for (double gamma : grid) {
    out.push_back(gzsl_point(p, gamma, seen_classes, unseen_classes));
  }
  return out;
}

EvalReport evaluate(const PredictionScores& p, const std::vector<double>& grid) {
  p.validate();
  std::vector<std::size_t> seen_classes, unseen_classes;
  for (std::size_t c = 0; c < p.seen.size(); ++c) {
    (p.seen[c] ? seen_classes : unseen_classes).push_back(c);
  }

  EvalReport report;
  report.sweep = sweep_gamma(p, grid);
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.sweep.size(); ++i) {
    if (report.sweep[i].harmonic > report.sweep[best].harmonic) {
      best = i;
    }
  }
  report.gamma = report.sweep[best].gamma;
  report.seen_acc = report.sweep[best].seen_acc;
  report.unseen_acc = report.sweep[best].unseen_acc;
  report.harmonic = report.sweep[best].harmonic;

  // conventional ZSL: unseen-domain samples only, unseen label space
  PredictionScores unseen_only;
  unseen_only.seen = p.seen;
  unseen_only.class_names = p.class_names;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < p.sample_count(); ++i) {
    if (!p.seen[p.labels[i]]) {
      rows.push_back(i);
      unseen_only.labels.push_back(p.labels[i]);
    }
  }
  if (!rows.empty()) {
    unseen_only.scores = Tensor::zeros({rows.size(), p.class_count()});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < p.class_count(); ++c) {
        unseen_only.scores.at(i, c) = p.scores.at(rows[i], c);
      }
    }
    auto zsl_pred = infer_zsl(unseen_only);
    report.acc_zsl =
        mean_of(per_class_accuracy(zsl_pred, unseen_only.labels, unseen_classes));
  }

  std::vector<std::size_t> gzsl_pred;
  std::vector<std::size_t> all_classes(p.class_count());
  for (std::size_t c = 0; c < p.class_count(); ++c) all_classes[c] = c;
  gzsl_point(p, report.gamma, seen_classes, unseen_classes, &gzsl_pred);
  report.per_class_accuracy = per_class_accuracy(gzsl_pred, p.labels, all_classes);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gzsl_pred.size(); ++i) {
    if (gzsl_pred[i] == p.labels[i]) ++correct;
  }
  report.sample_acc =
      static_cast<double>(correct) / static_cast<double>(p.sample_count());
  report.stats = score_stats(p.scores, p.seen);
  return report;
}

void write_scores(const std::filesystem::path& aent_path,
                  const PredictionScores& p) {
  p.validate();
  write_aent(aent_path, p.scores);
  nlohmann::ordered_json j;
  j["class_names"] = p.class_names;
  j["seen"] = p.seen;
  j["labels"] = p.labels;
  std::filesystem::path side = aent_path;
  side.replace_extension(".json");
  std::ofstream os(side);
  if (!os) {
    throw std::runtime_error("scores: cannot write " + side.string());
  }
  os << j.dump(2) << "\n";
}

PredictionScores read_scores(const std::filesystem::path& aent_path) {
  PredictionScores p;
  p.scores = read_aent(aent_path);
  std::filesystem::path side = aent_path;
  side.replace_extension(".json");
  std::ifstream is(side);
  if (!is) {
    throw std::runtime_error("scores: cannot open sidecar " + side.string());
  }
  nlohmann::json j = nlohmann::json::parse(is);
  p.seen = j.at("seen").get<std::vector<bool>>();
  p.labels = j.at("labels").get<std::vector<std::size_t>>();
  p.class_names = j.value("class_names", std::vector<std::string>{});
  p.validate();
  return p;
}

namespace {

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["acc_zsl"] = r.acc_zsl;
  j["seen_accuracy"] = r.seen_acc;
  j["unseen_accuracy"] = r.unseen_acc;
  j["harmonic_mean"] = r.harmonic;
  j["gamma"] = r.gamma;
  j["sample_accuracy"] = r.sample_acc;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["score_stats"] = {{"alpha_seen", r.stats.alpha_seen},
                      {"beta_seen", r.stats.beta_seen},
                      {"alpha_unseen", r.stats.alpha_unseen},
                      {"beta_unseen", r.stats.beta_unseen}};
  auto sweep = nlohmann::ordered_json::array();
  for (const auto& pt : r.sweep) {
    sweep.push_back({{"gamma", pt.gamma},
                     {"seen_accuracy", pt.seen_acc},
                     {"unseen_accuracy", pt.unseen_acc},
                     {"harmonic_mean", pt.harmonic}});
  }
  j["gamma_sweep"] = std::move(sweep);
  return j;
}

}  // namespace

void write_report_json(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("report: cannot write " + path.string());
  }
  os << report_to_json(r).dump(2) << "\n";
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<GzslPoint>& sweep) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("sweep: cannot write " + path.string());
  }
  os << "gamma,seen_accuracy,unseen_accuracy,harmonic_mean\n";
  char buf[160];
  for (const auto& pt : sweep) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", pt.gamma,
                  pt.seen_acc, pt.unseen_acc, pt.harmonic);
    os << buf;
  }
}

}  // namespace aenet
