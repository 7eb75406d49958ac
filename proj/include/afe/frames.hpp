#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afe/dataset.hpp"
#include "afe/tensor.hpp"

namespace afe {

/// One sequence after alignment, normalization and gold gap filling.
struct PreparedSequence {
  std::string id;
  std::vector<long> frame_index;
  std::vector<Tensor> images;             ///< [1, out, out]; empty where no face was found
  std::vector<std::uint8_t> face_found;
  std::vector<double> gold;               ///< gap-filled; empty if the sequence has no labels
  std::vector<std::uint8_t> gold_mask;    ///< 1 where gold was interpolated

  std::size_t length() const { return frame_index.size(); }
  bool has_labels() const { return !gold.empty(); }
};

/// Loads, aligns and normalizes every face frame (in parallel across frames)
/// and fills missing gold labels. Deterministic for identical inputs.
std::vector<PreparedSequence> prepare_dataset(const SequenceDataset& dataset, const FaceTemplate& tmpl);

}  // namespace afe
