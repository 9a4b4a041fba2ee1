#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "aenet/gradcheck.hpp"
#include "aenet/train.hpp"

namespace fs = std::filesystem;
using namespace aenet;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "root seed override");
  cmd->add_option("--out", args.out, "output directory override");
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg =
      args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
  if (args.seed) {
    cfg.seed = *args.seed;
  }
  if (args.out) {
    cfg.output_dir = *args.out;
  }
  cfg.validate();
  return cfg;
}

fs::path ensure_out(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_gen_data(const RunConfig& cfg) {
  fs::path dir = ensure_out(cfg);
  ZslDataset data = generate_dataset(cfg, Rng(cfg.seed).substream("data"));
  write_dataset(dir / "dataset", data);
  std::cout << "wrote " << data.size() << " samples across "
            << data.class_count() << " classes to " << (dir / "dataset").string()
            << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  fs::path dir = ensure_out(cfg);
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  Ablation abl = Ablation::from_config(cfg);

  TrainLog log = train(model, run.data, run.basis, abl);
  write_trainlog_json(dir / "trainlog.json", log);
  model.save(dir / "params");

  PredictionScores scores = test_scores(model, run.data, run.basis, abl);
  write_scores(dir / "scores.aent", scores);
  EvalReport report = evaluate(scores, cfg.gamma_grid);
  write_report_json(dir / "evalreport.json", report);
  write_sweep_csv(dir / "gamma_sweep.csv", report.sweep);

  std::printf("final loss %.6f | zsl acc %.4f | S %.4f U %.4f H %.4f (gamma %.3f)\n",
              log.steps.back().total, report.acc_zsl, report.seen_acc,
              report.unseen_acc, report.harmonic, report.gamma);
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& scores_path) {
  if (scores_path.empty()) {
    throw ConfigError("eval requires --scores pointing at a .aent score matrix");
  }
  fs::path dir = ensure_out(cfg);
  PredictionScores scores = read_scores(scores_path);
  EvalReport report = evaluate(scores, cfg.gamma_grid);
  write_report_json(dir / "evalreport.json", report);
  write_sweep_csv(dir / "gamma_sweep.csv", report.sweep);
  std::printf("zsl acc %.4f | S %.4f U %.4f H %.4f (gamma %.3f)\n",
              report.acc_zsl, report.seen_acc, report.unseen_acc,
              report.harmonic, report.gamma);
  return 0;
}

int cmd_ablate(const RunConfig& cfg) {
  fs::path dir = ensure_out(cfg);
  auto rows = run_ablation(cfg);
  write_ablation_csv(dir / "ablation.csv", rows);
  for (const auto& r : rows) {
    std::printf("%-12s zsl acc %.4f | S %.4f U %.4f H %.4f\n", r.name.c_str(),
                r.report.acc_zsl, r.report.seen_acc, r.report.unseen_acc,
                r.report.harmonic);
  }
  return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
  RunArtifacts run = make_run_data(cfg);
  Model model = make_model(cfg);
  std::vector<std::size_t> batch(
      run.data.train_indices().begin(),
      run.data.train_indices().begin() +
          std::min<std::size_t>(3, run.data.train_indices().size()));
  auto build = [&] {
    return batch_loss(model, run.data, run.basis, Ablation::from_config(cfg),
                      batch)
        .total;
  };
  GradCheckReport report = gradcheck(build, model.trainable());
  for (const auto& entry : report.params) {
    std::printf("%-24s max rel err %.3e\n", entry.name.c_str(),
                entry.max_rel_err);
  }
  std::printf("overall max rel err %.3e\n", report.max_rel_err);
  if (!report.passes(1e-4)) {
    std::cerr << "gradient check failed tolerance 1e-4\n";
    return 2;
  }
  return 0;
}

int cmd_sweep_gamma(const RunConfig& cfg, const std::string& scores_path) {
  if (scores_path.empty()) {
    throw ConfigError("sweep-gamma requires --scores");
  }
  fs::path dir = ensure_out(cfg);
  PredictionScores scores = read_scores(scores_path);
  auto sweep = sweep_gamma(scores, cfg.gamma_grid);
  write_sweep_csv(dir / "gamma_sweep.csv", sweep);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].harmonic > sweep[best].harmonic) best = i;
  }
  std::printf("best gamma %.4f with H %.4f\n", sweep[best].gamma,
              sweep[best].harmonic);
  return 0;
}

int cmd_sweep_t(const RunConfig& cfg) {
  fs::path dir = ensure_out(cfg);
  auto rows = sweep_prompt_length(cfg);
  write_sweep_rows_csv(dir / "sweep_T.csv", "prompt_length", rows);
  for (const auto& r : rows) {
    std::printf("T=%-3d zsl acc %.4f | H %.4f\n", static_cast<int>(r.value),
                r.report.acc_zsl, r.report.harmonic);
  }
  return 0;
}

int cmd_sweep_lambda(const RunConfig& cfg) {
  fs::path dir = ensure_out(cfg);
  auto rows = sweep_lambda_cons(cfg);
  write_sweep_rows_csv(dir / "sweep_lambda_cons.csv", "lambda_cons", rows);
  for (const auto& r : rows) {
    std::printf("lambda_cons=%-5.2f zsl acc %.4f | H %.4f\n", r.value,
                r.report.acc_zsl, r.report.harmonic);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aenet: attribute-enhanced prompt model on a synthetic "
               "zero-shot benchmark"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string scores_path;

  CLI::App* gen = app.add_subcommand("gen-data", "generate the seeded dataset");
  add_common(gen, args);
  CLI::App* tr = app.add_subcommand("train", "train and evaluate one model");
  add_common(tr, args);
  CLI::App* ev = app.add_subcommand("eval", "evaluate a stored score matrix");
  add_common(ev, args);
  ev->add_option("--scores", scores_path, ".aent score matrix with sidecar");
  CLI::App* ab = app.add_subcommand("ablate", "train all ablation variants");
  add_common(ab, args);
  CLI::App* gc = app.add_subcommand("gradcheck",
                                    "finite-difference check of the objective");
  add_common(gc, args);
  CLI::App* sg = app.add_subcommand("sweep-gamma", "calibration sweep on scores");
  add_common(sg, args);
  sg->add_option("--scores", scores_path, ".aent score matrix with sidecar");
  CLI::App* st = app.add_subcommand("sweep-T", "prompt-length sweep");
  add_common(st, args);
  CLI::App* sl = app.add_subcommand("sweep-lambda", "consistency-weight sweep");
  add_common(sl, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    RunConfig cfg = resolve_config(args);
    if (gen->parsed()) return cmd_gen_data(cfg);
    if (tr->parsed()) return cmd_train(cfg);
    if (ev->parsed()) return cmd_eval(cfg, scores_path);
    if (ab->parsed()) return cmd_ablate(cfg);
    if (gc->parsed()) return cmd_gradcheck(cfg);
    if (sg->parsed()) return cmd_sweep_gamma(cfg, scores_path);
    if (st->parsed()) return cmd_sweep_t(cfg);
    if (sl->parsed()) return cmd_sweep_lambda(cfg);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
