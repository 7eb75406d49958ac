#include "afe/frames.hpp"

#include <cstdint>
#include <optional>

#include "afe/align.hpp"
#include "afe/error.hpp"
#include "afe/image.hpp"
#include "afe/preprocess.hpp"

namespace afe {

std::vector<PreparedSequence> prepare_dataset(const SequenceDataset& dataset, const FaceTemplate& tmpl) {
  std::vector<PreparedSequence> out;
  out.reserve(dataset.sequences.size());
  for (const Sequence& seq : dataset.sequences) {
    PreparedSequence p;
    p.id = seq.id;
    const std::size_t T = seq.frames.size();
    p.images.resize(T);
    std::vector<std::optional<double>> labels(T);
    bool any_label = false;
    for (const FrameRecord& r : seq.frames) {
      p.frame_index.push_back(r.frame_index);
      p.face_found.push_back(r.face_found ? 1 : 0);
      labels[p.frame_index.size() - 1] = r.valence;
      any_label = any_label || r.valence.has_value();
    }
    if (any_label) {
      FilledSeries filled = fill_gaps(labels);
      p.gold = std::move(filled.values);
      p.gold_mask = std::move(filled.mask);
    }

    std::vector<std::string> errors(T);
    const auto n = static_cast<std::int64_t>(T);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      const FrameRecord& r = seq.frames[i];
      if (!r.face_found) continue;
      try {
        const Image img = read_pnm(dataset.base_dir / r.image_path);
        p.images[i] = normalize(align_face(img, *r.landmarks, tmpl));
      } catch (const Error& e) {
        errors[i] = "sequence " + seq.id + " frame " + std::to_string(r.frame_index) + ": " + e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw InputError(e);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace afe
