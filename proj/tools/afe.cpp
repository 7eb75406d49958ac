// afe: command-line driver for the affect-estimation workflow.
//
//   afe --out data synth
//   afe --out runs train-cnn --manifest data/train.csv --dev data/dev.csv --template data/template.json
//   afe --out feats/train extract --model runs/cnn.afen --manifest data/train.csv --template data/template.json
//   afe --out runs train-rnn --features feats/train --dev-features feats/dev
//   afe --out report eval --cnn runs/cnn.afen --rnn runs/rnn.afen --manifest data/dev.csv --template data/template.json
//   afe --out sweeps sweep --axis window --features feats/train --dev-features feats/dev

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "afe/commands.hpp"
#include "afe/error.hpp"
#include "afe/sweep.hpp"

namespace {

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

void print_report(const char* label, const afe::EvalReport& r) {
  std::printf("%-8s rmse %.4f  cc %.4f  ccc %.4f  (n=%zu)\n", label, r.pooled.rmse, r.pooled.cc, r.pooled.ccc,
              r.pooled.n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous valence estimation from face video: CNN feature extractor + RNN"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string config_file;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Seed for every stochastic stage (overrides the config)");
  app.add_option("--config", config_file, "JSON run configuration");
  app.add_option("--out", out_dir, "Output directory");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic dataset");

  std::string manifest, dev_manifest, template_file, flags;
  bool verbose = false;
  auto* train_cnn = app.add_subcommand("train-cnn", "Train the single-frame CNN");
  train_cnn->add_option("--manifest", manifest, "Training manifest CSV")->required();
  train_cnn->add_option("--dev", dev_manifest, "Dev manifest CSV scored after every epoch");
  train_cnn->add_option("--template", template_file, "Face template JSON")->required();
  train_cnn->add_option("--flags", flags, "Regularization: '', D, A or AD (overrides the config)");
  train_cnn->add_flag("-v,--verbose", verbose, "Print per-epoch progress");

  std::string model;
  auto* extract = app.add_subcommand("extract", "Write per-sequence CNN feature files");
  extract->add_option("--model", model, "CNN model file")->required();
  extract->add_option("--manifest", manifest, "Manifest CSV")->required();
  extract->add_option("--template", template_file, "Face template JSON")->required();

  std::string features, dev_features;
  auto* train_rnn = app.add_subcommand("train-rnn", "Train the RNN on extracted features");
  train_rnn->add_option("--features", features, "Directory of training feature files")->required();
  train_rnn->add_option("--dev-features", dev_features, "Directory of dev feature files");
  train_rnn->add_flag("-v,--verbose", verbose, "Print per-epoch progress");

  std::string cnn_model, rnn_model;
  auto* eval = app.add_subcommand("eval", "Score models on a labeled manifest");
  eval->add_option("--cnn", cnn_model, "CNN model file")->required();
  eval->add_option("--rnn", rnn_model, "RNN model file");
  eval->add_option("--manifest", manifest, "Labeled manifest CSV")->required();
  eval->add_option("--template", template_file, "Face template JSON")->required();

  std::string grid_file;
  std::vector<std::string> axes;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a hyperparameter grid, appending to sweep.csv");
  auto* grid_opt = sweep->add_option("--grid", grid_file, "Grid JSON");
  sweep->add_option("--axis", axes, "Built-in axis: hidden, window, layers, activation, cnn_flags")
      ->excludes(grid_opt);
  sweep->add_option("--features", features, "Training features (RNN axes)");
  sweep->add_option("--dev-features", dev_features, "Dev features (RNN axes)");
  sweep->add_option("--manifest", manifest, "Training manifest (cnn_flags axis)");
  sweep->add_option("--dev", dev_manifest, "Dev manifest (cnn_flags axis)");
  sweep->add_option("--template", template_file, "Face template (cnn_flags axis)");
  sweep->add_option("--jobs", jobs, "Configurations trained concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    afe::RunConfig cfg = config_file.empty() ? afe::RunConfig{} : afe::load_run_config(config_file);
    if (seed) cfg.set_seed(*seed);
    const std::filesystem::path out = out_dir;

    if (synth->parsed()) {
      const auto o = afe::cmd_synth(cfg, out);
      std::printf("wrote %s, %s, %s\n", o.train_manifest.c_str(), o.dev_manifest.c_str(), o.template_file.c_str());
    } else if (train_cnn->parsed()) {
      if (train_cnn->count("--flags")) {
        const auto keep = cfg.cnn_flags.augment_config;
        cfg.cnn_flags = afe::parse_cnn_flags(flags);
        cfg.cnn_flags.augment_config = keep;
      }
      const auto o = afe::cmd_train_cnn(manifest, opt_path(dev_manifest), template_file, cfg, out, verbose);
      std::printf("wrote %s, %s\n", o.model.c_str(), o.history.c_str());
    } else if (extract->parsed()) {
      const auto files = afe::cmd_extract(model, manifest, template_file, out);
      std::printf("wrote %zu feature files to %s\n", files.size(), out.c_str());
    } else if (train_rnn->parsed()) {
      const auto o = afe::cmd_train_rnn(features, opt_path(dev_features), cfg, out, verbose);
      std::printf("wrote %s, %s\n", o.model.c_str(), o.history.c_str());
    } else if (eval->parsed()) {
      const auto o = afe::cmd_eval(cnn_model, opt_path(rnn_model), manifest, template_file, out);
      print_report("cnn", o.cnn);
      if (o.cnn_rnn) print_report("cnn+rnn", *o.cnn_rnn);
      std::printf("wrote %s\n", o.timeline_csv.c_str());
    } else if (sweep->parsed()) {
      afe::SweepGrid grid;
      if (!grid_file.empty()) {
        grid = afe::load_grid(grid_file);
      } else if (!axes.empty()) {
        for (const auto& a : axes) grid.axes.push_back(afe::default_axis(a));
      } else {
        throw afe::InputError("sweep needs --grid or --axis");
      }
      afe::SweepInputs in{opt_path(features), opt_path(dev_features), opt_path(manifest), opt_path(dev_manifest),
                          opt_path(template_file)};
      std::filesystem::create_directories(out);
      const auto s = afe::run_sweep(grid, cfg, in, out / "sweep.csv", jobs);
      std::printf("sweep: %zu trained, %zu skipped, %zu failed -> %s\n", s.trained, s.skipped, s.failed,
                  (out / "sweep.csv").c_str());
    }
  } catch (const afe::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
