#include "doctest.h"

#include <cmath>

#include "aenet/train.hpp"

using namespace aenet;

TEST_CASE("adam tracks a hand-rolled single-parameter trajectory") {
  RunConfig cfg = tiny_config();
  cfg.learning_rate = 0.1;
  Var w(Tensor::scalar(0.5));
  Optimizer opt({{"w", w}}, cfg);

  double m = 0.0, v = 0.0, ref = 0.5;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2, eps = cfg.adam_epsilon;
  for (int t = 1; t <= 10; ++t) {
    double g = std::sin(static_cast<double>(t)) + 0.3;
    w.zero_grad();
    w.grad()[0] = g;
    opt.step();

    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    double m_hat = m / (1.0 - std::pow(b1, t));
    double v_hat = v / (1.0 - std::pow(b2, t));
    ref -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + eps);
    CHECK(std::abs(w.value()[0] - ref) <= 1e-12);
  }
}

TEST_CASE("zero learning rate leaves every parameter bit-identical") {
  RunConfig cfg = tiny_config();
  cfg.learning_rate = 0.0;
  cfg.steps = 8;
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  std::vector<Tensor> before;
  for (const auto& [name, var] : model.trainable()) {
    (void)name;
    before.push_back(var.value());
  }
  train(model, run.data, run.basis, Ablation::from_config(cfg));
  auto params = model.trainable();
  for (std::size_t i = 0; i < params.size(); ++i) {
    CHECK(params[i].second.value().max_abs_diff(before[i]) == 0.0);
  }
}

TEST_CASE("training is deterministic given config and seed") {
  RunConfig cfg = tiny_config();
  cfg.steps = 25;
  auto run_once = [&] {
    RunArtifacts run = make_run_data(cfg);
    Model model = make_model(cfg);
    return train(model, run.data, run.basis, Ablation::from_config(cfg));
  };
  TrainLog a = run_once();
  TrainLog b = run_once();
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].step == b.steps[i].step);
    CHECK(a.steps[i].total == b.steps[i].total);
    CHECK(a.steps[i].cls == b.steps[i].cls);
    CHECK(a.steps[i].cons == b.steps[i].cons);
    CHECK(a.steps[i].deb == b.steps[i].deb);
    CHECK(a.steps[i].grad_norm == b.steps[i].grad_norm);
  }
}

TEST_CASE("recorded losses are finite with strictly increasing steps") {
  RunConfig cfg = tiny_config();
  cfg.steps = 20;
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  TrainLog log = train(model, run.data, run.basis, Ablation::from_config(cfg));
  REQUIRE(log.steps.size() == cfg.steps);
  std::size_t prev = 0;
  for (const auto& s : log.steps) {
    CHECK(s.step > prev);
    prev = s.step;
    CHECK(std::isfinite(s.total));
    CHECK(std::isfinite(s.grad_norm));
    CHECK(s.cons >= 0.0);
    CHECK(s.deb >= 0.0);
  }
}

TEST_CASE("guard is released after training and test samples stay readable") {
  RunConfig cfg = tiny_config();
  cfg.steps = 5;
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  train(model, run.data, run.basis, Ablation::from_config(cfg));
  CHECK_NOTHROW(run.data.sample(run.data.test_indices().front()));
}

TEST_CASE("a pathological dataset raises a divergence error with its step") {
  RunConfig cfg = tiny_config();
  cfg.steps = 10;
  cfg.optimizer = "sgd";
  cfg.learning_rate = 1e18;
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  try {
    train(model, run.data, run.basis, Ablation::from_config(cfg));
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 1);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  // guard must have been released on the error path
  CHECK_NOTHROW(run.data.sample(run.data.test_indices().front()));
}

TEST_CASE("plain prompt-tuned classifier loss decreases over early steps") {
  // residual ablated, aux weights off: the pipeline reduces to prompt
  // tuning plus the mapping head
  RunConfig cfg;  // default desk-scale benchmark
  cfg.steps = 100;
  cfg.lambda_cons = 0.0;
  cfg.lambda_deb = 0.0;
  cfg.no_residual = true;
  cfg.eval_every = 0;
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  TrainLog log = train(model, run.data, run.basis, Ablation::from_config(cfg));
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    head += log.steps[i].total;
    tail += log.steps[log.steps.size() - 10 + i].total;
  }
  CHECK(tail / 10.0 < head / 10.0);
}
