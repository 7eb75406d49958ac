#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afe {

inline constexpr double kFramesPerSecond = 25.0;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Eye-left, eye-right, nose.
using Landmarks = std::array<Point, 3>;

struct FrameRecord {
  std::string sequence_id;
  long frame_index = 0;
  double timestamp_s = 0.0;
  std::string image_path;
  bool face_found = false;
  std::optional<Landmarks> landmarks;  ///< present iff face_found
  std::optional<double> valence;       ///< empty cell = gold missing, filled by interpolation
};

struct Sequence {
  std::string id;
  std::vector<FrameRecord> frames;
};

/// Frames grouped by sequence, in first-appearance order. Image paths are
/// resolved against `base_dir` (the manifest's directory).
struct SequenceDataset {
  std::filesystem::path base_dir;
  std::vector<Sequence> sequences;

  std::size_t frame_count() const;
  const Sequence& sequence(const std::string& id) const;
};

inline constexpr std::string_view kManifestHeader =
    "sequence_id,frame_index,timestamp_s,image_path,face_found,eye_l_x,eye_l_y,eye_r_x,eye_r_y,nose_x,nose_y,"
    "valence";

SequenceDataset parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
SequenceDataset load_manifest(const std::filesystem::path& path);
std::string format_manifest(const SequenceDataset& dataset);

/// Canonical landmark positions in the aligned crop, plus the crop size.
struct FaceTemplate {
  Landmarks points{};
  std::size_t out_size = 96;
};

FaceTemplate parse_template(std::string_view json_text);
FaceTemplate load_template(const std::filesystem::path& path);
std::string format_template(const FaceTemplate& tmpl);

}  // namespace afe
