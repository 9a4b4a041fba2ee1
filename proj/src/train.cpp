#include "aenet/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "aenet/errors.hpp"

namespace aenet {

Optimizer::Optimizer(std::vector<std::pair<std::string, Var>> params,
                     const RunConfig& cfg)
    : params_(std::move(params)),
      adam_(cfg.optimizer == "adam"),
      lr_(cfg.learning_rate),
      beta1_(cfg.adam_beta1),
      beta2_(cfg.adam_beta2),
      eps_(cfg.adam_epsilon) {
  for (const auto& [name, var] : params_) {
    (void)name;
    m_.push_back(Tensor::zeros(var.value().shape()));
    v_.push_back(Tensor::zeros(var.value().shape()));
  }
}

void Optimizer::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Tensor& w = params_[p].second.node()->value;
    const Tensor& g = params_[p].second.grad();
    if (!adam_) {
      w.axpy(-lr_, g);
      continue;
    }
    Tensor& m = m_[p];
    Tensor& v = v_[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      double m_hat = m[i] / bc1;
      double v_hat = v[i] / bc2;
      w[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

namespace {

Var mean_of_scalars(const std::vector<Var>& terms) {
  Var acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) {
    acc = add(acc, terms[i]);
  }
  return scale(acc, 1.0 / static_cast<double>(terms.size()));
}

Tensor prototype_row(const ZslDataset& data, std::size_t label) {
  std::size_t K = data.prototypes.cols();
  return Tensor::from({1, K},
                      std::vector<double>(data.prototypes.data() + label * K,
                                          data.prototypes.data() + (label + 1) * K));
}

}  // namespace

PredictionScores test_scores(const Model& model, const ZslDataset& data,
                             const SemanticBasis& basis, const Ablation& abl) {
  PredictionScores p;
  p.scores = model.score_matrix(data, data.test_indices(), basis, abl);
  p.seen = data.seen;
  p.class_names = data.class_names;
  for (std::size_t idx : data.test_indices()) {
    p.labels.push_back(data.sample(idx).label);
  }
  return p;
}

BatchLoss batch_loss(const Model& model, const ZslDataset& data,
                     const SemanticBasis& basis, const Ablation& abl,
                     const std::vector<std::size_t>& batch) {
  const RunConfig& cfg = model.config();
  bool residual_live = !abl.no_prompt && !abl.no_residual;
  bool use_cons = residual_live && cfg.lambda_cons > 0.0;
  bool use_deb = cfg.lambda_deb > 0.0;

  Var text = model.text_token(abl);
  std::vector<Var> cls_terms, cons_terms;
  std::vector<Var> seen_rows, unseen_rows;
  for (std::size_t b : batch) {
    const Sample& s = data.sample(b);
    SampleScores scores = model.score_sample(s.patches, basis, text, abl);
    std::size_t col = basis.seen_index_of[s.label];
    cls_terms.push_back(
        classification_loss(scores.seen, col, cfg.softmax_temperature));
    if (use_cons) {
      cons_terms.push_back(consistency_loss(
          scores.residual, Var::constant(prototype_row(data, s.label)),
          model.params().vrru));
    }
    if (use_deb) {
      seen_rows.push_back(scores.seen);
      unseen_rows.push_back(scores.unseen);
    }
  }
  Var zero = Var::constant(Tensor::scalar(0.0));
  BatchLoss out;
  out.cls = mean_of_scalars(cls_terms);
  out.cons = use_cons ? mean_of_scalars(cons_terms) : zero;
  out.deb = use_deb
                ? debias_loss(concat_rows(seen_rows), concat_rows(unseen_rows))
                : zero;
  out.total = total_loss(out.cls, out.cons, out.deb, cfg.lambda_cons,
                         cfg.lambda_deb);
  return out;
}

TrainLog train(Model& model, const ZslDataset& data, const SemanticBasis& basis,
               const Ablation& abl) {
  const RunConfig& cfg = model.config();
  Rng batch_rng = Rng(cfg.seed).substream("batch-order");
  Optimizer opt(model.trainable(), cfg);
  TrainLog log;

  const auto& train_idx = data.train_indices();
  if (train_idx.empty()) {
    throw ConfigError("train: no training samples");
  }

  data.arm_training_guard(true);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    std::vector<std::size_t> batch(cfg.batch_size);
    for (auto& b : batch) {
      b = train_idx[batch_rng.index(train_idx.size())];
    }

    model.zero_grad();
    BatchLoss loss = batch_loss(model, data, basis, abl, batch);
    Var& total = loss.total;
    Var& cls = loss.cls;
    Var& cons = loss.cons;
    Var& deb = loss.deb;

    if (!std::isfinite(total.value().item())) {
      data.arm_training_guard(false);
      throw DivergenceError("train: non-finite loss at step " +
                                std::to_string(step),
                            static_cast<long>(step));
    }
    backward(total);

    double grad_sq = 0.0;
    for (const auto& [name, var] : model.trainable()) {
      (void)name;
      double n = var.grad().l2_norm();
      grad_sq += n * n;
    }
    opt.step();

    log.steps.push_back({step, total.value().item(), cls.value().item(),
                         cons.value().item(), deb.value().item(),
                         std::sqrt(grad_sq)});

    if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
      data.arm_training_guard(false);
      PredictionScores p = test_scores(model, data, basis, abl);
      log.evals.push_back({step, evaluate(p, cfg.gamma_grid)});
      data.arm_training_guard(true);
    }
  }
  data.arm_training_guard(false);
  return log;
}

void write_trainlog_json(const std::filesystem::path& path, const TrainLog& log) {
  nlohmann::ordered_json j;
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : log.steps) {
    steps.push_back({{"step", s.step},
                     {"loss_total", s.total},
                     {"loss_cls", s.cls},
                     {"loss_cons", s.cons},
                     {"loss_deb", s.deb},
                     {"grad_norm", s.grad_norm}});
  }
  j["steps"] = std::move(steps);
  auto evals = nlohmann::ordered_json::array();
  for (const auto& e : log.evals) {
    evals.push_back({{"step", e.step},
                     {"acc_zsl", e.report.acc_zsl},
                     {"seen_accuracy", e.report.seen_acc},
                     {"unseen_accuracy", e.report.unseen_acc},
                     {"harmonic_mean", e.report.harmonic},
                     {"gamma", e.report.gamma}});
  }
  j["evals"] = std::move(evals);
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("trainlog: cannot write " + path.string());
  }
  os << j.dump(2) << "\n";
}

RunArtifacts make_run_data(const RunConfig& cfg) {
  RunArtifacts a{generate_dataset(cfg, Rng(cfg.seed).substream("data")), {}};
  a.basis = SemanticBasis::build(a.data.prototypes, a.data.seen);
  return a;
}

Model make_model(const RunConfig& cfg) {
  return Model(cfg, Rng(cfg.seed).substream("init"));
}

std::vector<AblationRow> run_ablation(const RunConfig& cfg) {
  RunConfig base = cfg;
  base.no_prompt = base.no_residual = base.no_caa = false;
  RunArtifacts run = make_run_data(base);

  std::vector<std::pair<std::string, Ablation>> variants = {
      {"full", {}},
      {"no_prompt", {true, false, false}},
      {"no_residual", {false, true, false}},
      {"no_caa", {false, false, true}},
  };
  std::vector<AblationRow> rows;
  for (auto& [name, abl] : variants) {
    Model model = make_model(base);
    train(model, run.data, run.basis, abl);
    PredictionScores p = test_scores(model, run.data, run.basis, abl);
    rows.push_back({name, evaluate(p, base.gamma_grid)});
  }
  return rows;
}

namespace {

std::vector<SweepRow> sweep_impl(const RunConfig& cfg,
                                 const std::vector<double>& grid,
                                 void (*apply)(RunConfig&, double)) {
  std::vector<SweepRow> rows;
  for (double v : grid) {
    RunConfig variant = cfg;
    apply(variant, v);
    variant.validate();
    RunArtifacts run = make_run_data(variant);
    Model model = make_model(variant);
    train(model, run.data, run.basis, Ablation::from_config(variant));
    PredictionScores p = test_scores(model, run.data, run.basis,
                                     Ablation::from_config(variant));
    rows.push_back({v, evaluate(p, variant.gamma_grid)});
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_prompt_length(const RunConfig& cfg) {
  std::vector<double> grid;
  for (std::size_t t : cfg.prompt_grid) grid.push_back(static_cast<double>(t));
  return sweep_impl(cfg, grid, [](RunConfig& c, double v) {
    c.prompt_length = static_cast<std::size_t>(v);
  });
}

std::vector<SweepRow> sweep_lambda_cons(const RunConfig& cfg) {
  return sweep_impl(cfg, cfg.lambda_grid,
                    [](RunConfig& c, double v) { c.lambda_cons = v; });
}

void write_sweep_rows_csv(const std::filesystem::path& path,
                          const std::string& value_column,
                          const std::vector<SweepRow>& rows) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("sweep: cannot write " + path.string());
  }
  os << value_column
     << ",acc_zsl,seen_accuracy,unseen_accuracy,harmonic_mean,gamma\n";
  char buf[240];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.value, r.report.acc_zsl, r.report.seen_acc,
                  r.report.unseen_acc, r.report.harmonic, r.report.gamma);
    os << buf;
  }
}

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("ablation: cannot write " + path.string());
  }
  os << "variant,acc_zsl,seen_accuracy,unseen_accuracy,harmonic_mean,gamma\n";
  char buf[240];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.name.c_str(), r.report.acc_zsl, r.report.seen_acc,
                  r.report.unseen_acc, r.report.harmonic, r.report.gamma);
    os << buf;
  }
}

}  // namespace aenet
