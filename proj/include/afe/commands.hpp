#pragma once

// The experiment workflow as library calls. The `afe` command-line tool is a
// thin wrapper around these; tests drive them directly.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "afe/config.hpp"
#include "afe/metrics.hpp"
#include "afe/synth.hpp"
#include "afe/train.hpp"

namespace afe {

namespace fs = std::filesystem;

SynthOutput cmd_synth(const RunConfig& cfg, const fs::path& out_dir);

struct TrainOutput {
  fs::path model;
  fs::path history;
  TrainHistory log;
};

/// Trains the single-frame CNN. The input extent of the CNN is taken from
/// the template's crop size. Writes cnn.afen and cnn_history.csv.
TrainOutput cmd_train_cnn(const fs::path& manifest, const std::optional<fs::path>& dev_manifest,
                          const fs::path& template_file, const RunConfig& cfg, const fs::path& out_dir,
                          bool verbose = false);

/// Writes one <sequence_id>.afft per sequence of the manifest.
std::vector<fs::path> cmd_extract(const fs::path& cnn_model, const fs::path& manifest, const fs::path& template_file,
                                  const fs::path& out_dir);

/// Trains the windowed RNN on extracted features. The RNN input width is
/// taken from the feature files. Writes rnn.afen and rnn_history.csv.
TrainOutput cmd_train_rnn(const fs::path& features_dir, const std::optional<fs::path>& dev_features_dir,
                          const RunConfig& cfg, const fs::path& out_dir, bool verbose = false);

struct EvalOutput {
  EvalReport cnn;
  std::optional<EvalReport> cnn_rnn;
  fs::path timeline_csv;
};

/// Scores the CNN (and the CNN+RNN when an RNN model is given) on a labeled
/// manifest. Writes eval_cnn.csv, eval_cnn_rnn.csv, eval.json and timeline.csv.
EvalOutput cmd_eval(const fs::path& cnn_model, const std::optional<fs::path>& rnn_model, const fs::path& manifest,
                    const fs::path& template_file, const fs::path& out_dir);

}  // namespace afe
