#include "afe/commands.hpp"

#include <iostream>
#include <sstream>

#include "afe/error.hpp"
#include "afe/frames.hpp"
#include "afe/inference.hpp"
#include "afe/model_io.hpp"

namespace afe {
namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

std::vector<PreparedSequence> prepare(const fs::path& manifest, const FaceTemplate& tmpl) {
  return prepare_dataset(load_manifest(manifest), tmpl);
}

EpochCallback progress(const char* what, bool verbose) {
  if (!verbose) return {};
  return [what](const EpochRecord& r) {
    std::cerr << what << " epoch " << r.epoch << ": loss " << r.loss << ", dev rmse " << r.rmse << " cc " << r.cc
              << " ccc " << r.ccc << " (" << r.seconds << " s)\n";
  };
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

SynthOutput cmd_synth(const RunConfig& cfg, const fs::path& out_dir) {
  return write_synthetic_dataset(cfg.synth, out_dir);
}

TrainOutput cmd_train_cnn(const fs::path& manifest, const std::optional<fs::path>& dev_manifest,
                          const fs::path& template_file, const RunConfig& cfg, const fs::path& out_dir,
                          bool verbose) {
  const FaceTemplate tmpl = load_template(template_file);
  const auto train = prepare(manifest, tmpl);
  const auto dev = dev_manifest ? prepare(*dev_manifest, tmpl) : std::vector<PreparedSequence>{};
  ensure_dir(out_dir);

  CnnSpec spec = cfg.cnn;
  spec.input_height = spec.input_width = tmpl.out_size;
  spec.input_channels = 1;
  auto result = train_cnn(train, dev, spec, cfg.cnn_train, cfg.cnn_flags, progress("cnn", verbose));

  TrainOutput out{out_dir / "cnn.afen", out_dir / "cnn_history.csv", result.history};
  save_model(out.model, result.model);
  write_file(out.history, result.history.csv());
  return out;
}

std::vector<fs::path> cmd_extract(const fs::path& cnn_model, const fs::path& manifest, const fs::path& template_file,
                                  const fs::path& out_dir) {
  const CnnModel model = load_cnn(cnn_model);
  const FaceTemplate tmpl = load_template(template_file);
  const auto sequences = prepare(manifest, tmpl);
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  for (const auto& seq : sequences) {
    const fs::path path = out_dir / (seq.id + ".afft");
    save_timeline(path, cnn_feature_timeline(model, seq));
    written.push_back(path);
  }
  return written;
}

TrainOutput cmd_train_rnn(const fs::path& features_dir, const std::optional<fs::path>& dev_features_dir,
                          const RunConfig& cfg, const fs::path& out_dir, bool verbose) {
  const auto train = load_timelines(features_dir);
  const auto dev = dev_features_dir ? load_timelines(*dev_features_dir) : std::vector<FeatureTimeline>{};
  ensure_dir(out_dir);
  RnnSpec spec = cfg.rnn;
  spec.input_dim = train.front().dim();
  auto result = train_rnn(train, dev, spec, cfg.rnn_train, progress("rnn", verbose));
  TrainOutput out{out_dir / "rnn.afen", out_dir / "rnn_history.csv", result.history};
  save_model(out.model, result.model);
  write_file(out.history, result.history.csv());
  return out;
}

EvalOutput cmd_eval(const fs::path& cnn_model, const std::optional<fs::path>& rnn_model, const fs::path& manifest,
                    const fs::path& template_file, const fs::path& out_dir) {
  const CnnModel cnn = load_cnn(cnn_model);
  const std::optional<RnnModel> rnn = rnn_model ? std::optional<RnnModel>(load_rnn(*rnn_model)) : std::nullopt;
  if (rnn && rnn->spec().input_dim != cnn.spec().fc_units) {
    throw InputError("rnn input_dim " + std::to_string(rnn->spec().input_dim) + " does not match cnn fc_units " +
                     std::to_string(cnn.spec().fc_units));
  }
  const auto sequences = prepare(manifest, load_template(template_file));
  ensure_dir(out_dir);

  std::vector<SequencePrediction> cnn_preds, rnn_preds;
  std::string timeline = "sequence_id,frame_index,gold,pred_cnn,pred_cnn_rnn,interpolated\n";
  for (const auto& seq : sequences) {
    if (!seq.has_labels()) throw InputError("sequence " + seq.id + " has no gold labels to score against");
    const std::vector<double> pc = cnn_timeline(cnn, seq);
    std::vector<double> pr;
    if (rnn) {
      const FeatureTimeline features = cnn_feature_timeline(cnn, seq);
      if (features.length() < rnn->spec().window) {
        std::cerr << "warning: sequence " << seq.id << " is shorter than the RNN window; early frames use "
                  << "truncated history\n";
      }
      pr = rnn_timeline(*rnn, features);
      rnn_preds.push_back({seq.id, pr, seq.gold, seq.gold_mask});
    }
    cnn_preds.push_back({seq.id, pc, seq.gold, seq.gold_mask});
    for (std::size_t t = 0; t < seq.length(); ++t) {
      timeline += seq.id + ',' + std::to_string(seq.frame_index[t]) + ',' + num(seq.gold[t]) + ',' + num(pc[t]) +
                  ',' + (rnn ? num(pr[t]) : std::string()) + ',' + (seq.face_found[t] ? "0" : "1") + '\n';
    }
  }

  EvalOutput out;
  out.cnn = evaluate(cnn_preds, MetricPolicy::lenient);
  nlohmann::json j;
  j["cnn"] = report_json(out.cnn);
  write_file(out_dir / "eval_cnn.csv", report_csv(out.cnn));
  if (rnn) {
    out.cnn_rnn = evaluate(rnn_preds, MetricPolicy::lenient);
    j["cnn_rnn"] = report_json(*out.cnn_rnn);
    write_file(out_dir / "eval_cnn_rnn.csv", report_csv(*out.cnn_rnn));
  }
  j["reference_best_dev"] = {{"rmse", kReferenceBestDev.rmse}, {"cc", kReferenceBestDev.cc},
                             {"ccc", kReferenceBestDev.ccc}};
  write_file(out_dir / "eval.json", j.dump(2) + "\n");
  out.timeline_csv = out_dir / "timeline.csv";
  write_file(out.timeline_csv, timeline);
  return out;
}

}  // namespace afe
