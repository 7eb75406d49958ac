#include "afe/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "afe/error.hpp"
#include "afe/inference.hpp"
#include "afe/metrics.hpp"

namespace afe {
namespace {

// Fixed number of partial sums per batch. Independent of the thread count so
// that gradients are bitwise reproducible.
constexpr std::size_t kLanes = 8;

template <typename Fn>
BatchGradient reduce_batch(const ParamSet& layout, std::size_t n, Fn&& per_sample) {
  if (n == 0) throw InputError("empty batch");
  const std::size_t lanes = std::min(kLanes, n);
  std::vector<ParamSet> lane_grads(lanes);
  std::vector<double> lane_loss(lanes, 0.0);
  const auto n_lanes = static_cast<std::int64_t>(lanes);
#pragma omp parallel for schedule(static, 1)
  for (std::int64_t k = 0; k < n_lanes; ++k) {
    const std::size_t lo = static_cast<std::size_t>(k) * n / lanes;
    const std::size_t hi = static_cast<std::size_t>(k + 1) * n / lanes;
    lane_grads[k] = zeros_like(layout);
    for (std::size_t i = lo; i < hi; ++i) lane_loss[k] += per_sample(i, lane_grads[k]);
  }
  BatchGradient out{lane_loss[0], std::move(lane_grads[0])};
  for (std::size_t k = 1; k < lanes; ++k) {
    out.loss += lane_loss[k];
    accumulate(out.grads, lane_grads[k]);
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.loss *= inv;
  scale(out.grads, inv);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_dev_scores(EpochRecord& rec, const EvalReport* report) {
  if (report == nullptr) {
    rec.rmse = rec.cc = rec.ccc = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  rec.rmse = report->pooled.rmse;
  rec.cc = report->pooled.cc;
  rec.ccc = report->pooled.ccc;
}

void check_finite(double loss, std::size_t epoch, std::size_t batch) {
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "training diverged: non-finite loss " << loss << " at epoch " << epoch << ", batch " << batch;
    throw TrainingError(os.str());
  }
}

}  // namespace

std::string TrainHistory::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,loss,rmse,cc,ccc,seconds\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << e.loss << ',' << e.rmse << ',' << e.cc << ',' << e.ccc << ',' << e.seconds << '\n';
  }
  return os.str();
}

CnnTrainFlags parse_cnn_flags(const std::string& flags) {
  CnnTrainFlags f;
  for (char ch : flags) {
    if (ch == 'D' || ch == 'd') {
      f.dropout = true;
    } else if (ch == 'A' || ch == 'a') {
      f.augment = true;
    } else {
      throw InputError("unknown CNN flag '" + std::string(1, ch) + "' (expected D and/or A)");
    }
  }
  return f;
}

std::string format_cnn_flags(const CnnTrainFlags& flags) {
  std::string s;
  if (flags.augment) s += 'A';
  if (flags.dropout) s += 'D';
  return s;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  return idx;
}

BatchGradient cnn_batch_gradient(const CnnModel& model, std::span<const CnnSample> batch, Mode mode,
                                 const Rng& rng) {
  return reduce_batch(model.params(), batch.size(), [&](std::size_t i, ParamSet& acc) {
    const CnnSample& s = batch[i];
    Rng sample_rng = rng.fork(s.rng_stream);
    const CnnOutput fwd = cnn_forward(model, *s.image, mode, sample_rng);
    const double err = fwd.valence - s.label;
    accumulate(acc, cnn_backward(model, fwd.context, 2.0 * err));
    return err * err;
  });
}

BatchGradient rnn_batch_gradient(const RnnModel& model, std::span<const RnnSample> batch) {
  const std::size_t W = model.spec().window;
  return reduce_batch(model.params(), batch.size(), [&](std::size_t i, ParamSet& acc) {
    const Window w = window_at(*batch[i].timeline, W, batch[i].end);
    const RnnOutput fwd = rnn_forward(model, w.features);
    const MseResult mse = mse_forward(fwd.outputs, w.labels);
    accumulate(acc, rnn_backward(model, fwd.context, mse_backward(mse.context)));
    return mse.loss;
  });
}

TrainResult<CnnModel> train_cnn(const std::vector<PreparedSequence>& train, const std::vector<PreparedSequence>& dev,
                                CnnSpec spec, const SgdConfig& cfg, const CnnTrainFlags& flags,
                                const EpochCallback& on_epoch) {
  cfg.validate();
  spec.dropout_p = flags.dropout ? (spec.dropout_p > 0.0 ? spec.dropout_p : kDropoutProbability) : 0.0;

  std::vector<CnnSample> samples;
  for (const auto& seq : train) {
    if (!seq.has_labels()) throw InputError("training sequence " + seq.id + " has no labels");
    for (std::size_t t = 0; t < seq.length(); ++t) {
      if (seq.face_found[t]) samples.push_back({&seq.images[t], seq.gold[t], 0});
    }
  }
  if (samples.empty()) throw InputError("train_cnn: dataset has no labeled face frames");

  const Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  TrainResult<CnnModel> result{CnnModel::initialized(spec, init_rng), {}};
  CnnModel& model = result.model;
  OptState state;
  const Rng dropout_root = root.fork(2);
  const Rng augment_root = root.fork(3);
  Rng shuffle_rng = root.fork(4);

  std::vector<CnnSample> batch;
  std::vector<Tensor> augmented;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto order = shuffled_indices(samples.size(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++batch_no) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      batch.clear();
      augmented.assign(hi - lo, Tensor());
      for (std::size_t i = lo; i < hi; ++i) {
        CnnSample s = samples[order[i]];
        const std::uint64_t stream = (static_cast<std::uint64_t>(epoch) << 32) | i;
        s.rng_stream = stream;
        if (flags.augment) {
          Rng aug_rng = augment_root.fork(stream);
          augmented[i - lo] = augment(*s.image, aug_rng, flags.augment_config);
          s.image = &augmented[i - lo];
        }
        batch.push_back(s);
      }
      BatchGradient bg = cnn_batch_gradient(model, batch, Mode::train, dropout_root);
      check_finite(bg.loss, epoch, batch_no);
      loss_sum += bg.loss * static_cast<double>(batch.size());
      sgd_step(model.mutable_params(), bg.grads, state, cfg);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(samples.size());
    if (!dev.empty()) {
      const EvalReport report = evaluate_cnn(model, dev, MetricPolicy::lenient);
      fill_dev_scores(rec, &report);
    } else {
      fill_dev_scores(rec, nullptr);
    }
    rec.seconds = seconds_since(start);
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

TrainResult<RnnModel> train_rnn(const std::vector<FeatureTimeline>& train, const std::vector<FeatureTimeline>& dev,
                                const RnnSpec& spec, const SgdConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  validate(spec);
  if (train.empty()) throw InputError("train_rnn: no training timelines");
  std::vector<RnnSample> samples;
  const FeatureTimeline* shortest = nullptr;
  for (const auto* set : {&train, &dev}) {
    for (const auto& tl : *set) {
      tl.validate();
      if (tl.length() < spec.window && (shortest == nullptr || tl.length() < shortest->length())) {
        shortest = &tl;
      }
      if (tl.dim() != spec.input_dim) {
        throw InputError("sequence " + tl.sequence_id + " has feature dimension " + std::to_string(tl.dim()) +
                         " but the RNN expects " + std::to_string(spec.input_dim));
      }
      if (!tl.has_labels()) throw InputError("sequence " + tl.sequence_id + " has no labels");
    }
  }
  if (shortest != nullptr) {
    throw InputError("sequence " + shortest->sequence_id + " has " + std::to_string(shortest->length()) +
                     " frames, shorter than the window of " + std::to_string(spec.window));
  }
  for (const auto& tl : train) {
    for (std::size_t end = spec.window - 1; end < tl.length(); ++end) samples.push_back({&tl, end});
  }

  const Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  TrainResult<RnnModel> result{RnnModel::initialized(spec, init_rng), {}};
  RnnModel& model = result.model;
  OptState state;
  Rng shuffle_rng = root.fork(4);

  std::vector<RnnSample> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto order = shuffled_indices(samples.size(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++batch_no) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      batch.clear();
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(samples[order[i]]);
      BatchGradient bg = rnn_batch_gradient(model, batch);
      check_finite(bg.loss, epoch, batch_no);
      loss_sum += bg.loss * static_cast<double>(batch.size());
      sgd_step(model.mutable_params(), bg.grads, state, cfg);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(samples.size());
    if (!dev.empty()) {
      const EvalReport report = evaluate_rnn(model, dev, MetricPolicy::lenient);
      fill_dev_scores(rec, &report);
    } else {
      fill_dev_scores(rec, nullptr);
    }
    rec.seconds = seconds_since(start);
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace afe
