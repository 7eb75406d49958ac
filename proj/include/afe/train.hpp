#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "afe/augment.hpp"
#include "afe/cnn.hpp"
#include "afe/frames.hpp"
#include "afe/params.hpp"
#include "afe/rnn.hpp"
#include "afe/sgd.hpp"
#include "afe/timeline.hpp"

namespace afe {

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  ///< mean training MSE over the epoch
  double rmse = 0.0;  ///< dev scores; NaN when no dev data was given
  double cc = 0.0;
  double ccc = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  /// `epoch,loss,rmse,cc,ccc,seconds`
  std::string csv() const;
};

/// Regularization switches of the single-frame CNN (the D and A variants).
struct CnnTrainFlags {
  bool dropout = false;
  bool augment = false;
  AugmentConfig augment_config{};
};

inline constexpr double kDropoutProbability = 0.5;

/// Parses "", "D", "A" or "AD"/"DA".
CnnTrainFlags parse_cnn_flags(const std::string& flags);
std::string format_cnn_flags(const CnnTrainFlags& flags);

/// Epoch-level progress hook; receives each record as soon as it is complete.
using EpochCallback = std::function<void(const EpochRecord&)>;

template <typename Model>
struct TrainResult {
  Model model;
  TrainHistory history;
};

/// Uniformly shuffled 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

struct BatchGradient {
  double loss = 0.0;  ///< mean over the batch
  ParamSet grads;     ///< gradient of the mean loss
};

struct CnnSample {
  const Tensor* image = nullptr;
  double label = 0.0;
  std::uint64_t rng_stream = 0;  ///< dropout draws come from rng.fork(rng_stream)
};

/// Mean-MSE gradient of a batch. Per-sample work runs in parallel; partial
/// sums are combined in a fixed order so the result is independent of the
/// thread count.
BatchGradient cnn_batch_gradient(const CnnModel& model, std::span<const CnnSample> batch, Mode mode,
                                 const Rng& rng);

struct RnnSample {
  const FeatureTimeline* timeline = nullptr;
  std::size_t end = 0;  ///< window covers [end-W+1, end]
};

/// Mean over the batch of the per-window mean-over-steps MSE.
BatchGradient rnn_batch_gradient(const RnnModel& model, std::span<const RnnSample> batch);

/// Trains the single-frame CNN on every face frame of `train`. Dev scores in
/// the history are computed over the full dev timelines.
TrainResult<CnnModel> train_cnn(const std::vector<PreparedSequence>& train, const std::vector<PreparedSequence>& dev,
                                CnnSpec spec, const SgdConfig& cfg, const CnnTrainFlags& flags,
                                const EpochCallback& on_epoch = {});

/// Trains the windowed RNN on every complete window of every train timeline.
TrainResult<RnnModel> train_rnn(const std::vector<FeatureTimeline>& train, const std::vector<FeatureTimeline>& dev,
                                const RnnSpec& spec, const SgdConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace afe
