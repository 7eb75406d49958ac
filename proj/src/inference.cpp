#include "afe/inference.hpp"

#include "afe/error.hpp"
#include "afe/preprocess.hpp"

namespace afe {
namespace {

std::vector<Tensor> face_frames(const PreparedSequence& seq) {
  std::vector<Tensor> frames;
  for (std::size_t t = 0; t < seq.length(); ++t) {
    if (seq.face_found[t]) frames.push_back(seq.images[t]);
  }
  if (frames.empty()) throw InputError("sequence " + seq.id + " has no frames with a detected face");
  return frames;
}

std::vector<std::uint8_t> misses(const PreparedSequence& seq) {
  std::vector<std::uint8_t> m(seq.length());
  for (std::size_t t = 0; t < seq.length(); ++t) m[t] = seq.face_found[t] ? 0 : 1;
  return m;
}

}  // namespace

std::vector<double> cnn_timeline(const CnnModel& model, const PreparedSequence& seq) {
  const std::vector<double> face_pred = cnn_predict(model, face_frames(seq));
  std::vector<double> pred(seq.length(), 0.0);
  for (std::size_t t = 0, k = 0; t < seq.length(); ++t) {
    if (seq.face_found[t]) pred[t] = face_pred[k++];
  }
  return fill_gaps(pred, misses(seq)).values;
}

FeatureTimeline cnn_feature_timeline(const CnnModel& model, const PreparedSequence& seq) {
  const Tensor face_features = extract_features(model, face_frames(seq));
  const std::size_t dim = face_features.dim(1);
  FeatureTimeline tl;
  tl.sequence_id = seq.id;
  tl.features = Tensor({seq.length(), dim});
  for (std::size_t t = 0, k = 0; t < seq.length(); ++t) {
    if (!seq.face_found[t]) continue;
    for (std::size_t d = 0; d < dim; ++d) tl.features.at(t, d) = face_features.at(k, d);
    ++k;
  }
  tl.mask = fill_feature_gaps(tl.features, misses(seq));
  tl.labels = seq.gold;
  return tl;
}

std::vector<double> rnn_timeline(const RnnModel& model, const FeatureTimeline& timeline) {
  timeline.validate();
  const Tensor raw = predict_timeline(model, timeline.features);
  return fill_gaps(raw.data(), timeline.mask).values;
}

EvalReport evaluate_cnn(const CnnModel& model, const std::vector<PreparedSequence>& sequences,
                        MetricPolicy policy) {
  std::vector<SequencePrediction> preds;
  for (const auto& seq : sequences) {
    if (!seq.has_labels()) throw InputError("sequence " + seq.id + " has no gold labels to score against");
    preds.push_back({seq.id, cnn_timeline(model, seq), seq.gold, seq.gold_mask});
  }
  return evaluate(preds, policy);
}

EvalReport evaluate_rnn(const RnnModel& model, const std::vector<FeatureTimeline>& timelines,
                        MetricPolicy policy) {
  std::vector<SequencePrediction> preds;
  for (const auto& tl : timelines) {
    if (!tl.has_labels()) throw InputError("sequence " + tl.sequence_id + " has no gold labels to score against");
    preds.push_back({tl.sequence_id, rnn_timeline(model, tl), tl.labels, {}});
  }
  return evaluate(preds, policy);
}

}  // namespace afe
