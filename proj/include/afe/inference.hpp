#pragma once

// Whole-sequence inference: runs a model on the face frames of a sequence and
// fills the frames without a face by the same interpolation used for gold.

#include <vector>

#include "afe/cnn.hpp"
#include "afe/frames.hpp"
#include "afe/metrics.hpp"
#include "afe/rnn.hpp"
#include "afe/timeline.hpp"

namespace afe {

/// Single-frame CNN valence for every frame of the sequence.
std::vector<double> cnn_timeline(const CnnModel& model, const PreparedSequence& seq);

/// Frozen-CNN features for every frame; rows of face-miss frames are
/// interpolated and flagged in the mask. Labels are the sequence's gold.
FeatureTimeline cnn_feature_timeline(const CnnModel& model, const PreparedSequence& seq);

/// Windowed RNN valence for every frame; predictions at masked frames are
/// replaced by interpolation from their neighbours.
std::vector<double> rnn_timeline(const RnnModel& model, const FeatureTimeline& timeline);

/// Pooled and per-sequence scores of a model over labeled sequences.
EvalReport evaluate_cnn(const CnnModel& model, const std::vector<PreparedSequence>& sequences,
                        MetricPolicy policy = MetricPolicy::strict);
EvalReport evaluate_rnn(const RnnModel& model, const std::vector<FeatureTimeline>& timelines,
                        MetricPolicy policy = MetricPolicy::strict);

}  // namespace afe
