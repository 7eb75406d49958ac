#pragma once

// Per-frame CNN features for one sequence, the hand-off between the frozen
// CNN and the RNN.
//
// Feature file layout: magic "AFFT1", little-endian uint64 header length,
// JSON header {"sequence_id", "T", "dim", "has_labels"}, T*dim float64
// features (row-major), T float64 labels when has_labels, then T mask bytes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "afe/tensor.hpp"

namespace afe {

struct FeatureTimeline {
  std::string sequence_id;
  Tensor features;                 ///< [T, dim]
  std::vector<double> labels;      ///< T gold values, or empty
  std::vector<std::uint8_t> mask;  ///< 1 where the frame's features were interpolated

  std::size_t length() const { return features.rank() == 2 ? features.dim(0) : 0; }
  std::size_t dim() const { return features.rank() == 2 ? features.dim(1) : 0; }
  bool has_labels() const { return !labels.empty(); }
  /// Throws ShapeError unless features, labels and mask have equal length.
  void validate() const;
};

struct Window {
  Tensor features;  ///< [W, dim]
  Tensor labels;    ///< [W]; empty Tensor if the timeline is unlabeled
  std::size_t end = 0;
};

/// Number of complete windows: T - W + 1.
std::size_t window_count(std::size_t length, std::size_t window);
/// Every complete window [t-W+1, t], ordered by end index t.
std::vector<Window> make_windows(const FeatureTimeline& timeline, std::size_t window);
/// Rows [end-W+1, end] of the timeline.
Window window_at(const FeatureTimeline& timeline, std::size_t window, std::size_t end);

/// Replaces rows flagged in `missing` by per-dimension interpolation
/// (`fill_gaps` on each column) and returns the mask.
std::vector<std::uint8_t> fill_feature_gaps(Tensor& features, const std::vector<std::uint8_t>& missing);

std::string encode_timeline(const FeatureTimeline& timeline);
FeatureTimeline decode_timeline(const std::string& bytes);
void save_timeline(const std::filesystem::path& path, const FeatureTimeline& timeline);
FeatureTimeline load_timeline(const std::filesystem::path& path);
/// Loads every *.afft file in a directory, sorted by file name.
std::vector<FeatureTimeline> load_timelines(const std::filesystem::path& dir);

}  // namespace afe
