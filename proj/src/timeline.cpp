#include "afe/timeline.hpp"

#include <algorithm>
#include <json.hpp>

#include "afe/binary.hpp"
#include "afe/error.hpp"
#include "afe/model_io.hpp"
#include "afe/preprocess.hpp"

namespace afe {

void FeatureTimeline::validate() const {
  require_rank(features, 2, "feature timeline " + sequence_id);
  const std::size_t T = length();
  if (!labels.empty() && labels.size() != T) {
    throw ShapeError("feature timeline " + sequence_id + ": " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(T) + " frames");
  }
  if (mask.size() != T) {
    throw ShapeError("feature timeline " + sequence_id + ": mask length " + std::to_string(mask.size()) +
                     " for " + std::to_string(T) + " frames");
  }
}

std::size_t window_count(std::size_t length, std::size_t window) {
  if (window == 0) throw InputError("window length must be at least 1");
  return length >= window ? length - window + 1 : 0;
}

Window window_at(const FeatureTimeline& timeline, std::size_t window, std::size_t end) {
  const std::size_t dim = timeline.dim();
  if (end >= timeline.length() || end + 1 < window) {
    throw ShapeError("window ending at " + std::to_string(end) + " does not fit the timeline");
  }
  const std::size_t first = end + 1 - window;
  Window w;
  w.end = end;
  w.features = Tensor({window, dim}, std::vector<double>(timeline.features.data().begin() + first * dim,
                                                         timeline.features.data().begin() + (end + 1) * dim));
  if (timeline.has_labels()) {
    w.labels = Tensor({window}, std::vector<double>(timeline.labels.begin() + static_cast<std::ptrdiff_t>(first),
                                                    timeline.labels.begin() + static_cast<std::ptrdiff_t>(end + 1)));
  }
  return w;
}

std::vector<Window> make_windows(const FeatureTimeline& timeline, std::size_t window) {
  const std::size_t T = timeline.length();
  if (window == 0) throw InputError("window length must be at least 1");
  if (T < window) {
    throw InputError("sequence " + timeline.sequence_id + " has " + std::to_string(T) +
                     " frames, shorter than the window of " + std::to_string(window));
  }
  std::vector<Window> out;
  out.reserve(window_count(T, window));
  for (std::size_t end = window - 1; end < T; ++end) out.push_back(window_at(timeline, window, end));
  return out;
}

std::vector<std::uint8_t> fill_feature_gaps(Tensor& features, const std::vector<std::uint8_t>& missing) {
  require_rank(features, 2, "fill_feature_gaps");
  const std::size_t T = features.dim(0), dim = features.dim(1);
  if (missing.size() != T) throw ShapeError("fill_feature_gaps: mask length differs from frame count");
  if (std::none_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; })) {
    return std::vector<std::uint8_t>(T, 0);
  }
  std::vector<double> column(T);
  std::vector<std::uint8_t> mask;
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t t = 0; t < T; ++t) column[t] = features.at(t, d);
    FilledSeries filled = fill_gaps(column, missing);
    for (std::size_t t = 0; t < T; ++t) features.at(t, d) = filled.values[t];
    mask = std::move(filled.mask);
  }
  return mask;
}

namespace {
constexpr std::string_view kMagic = "AFFT1";
}

std::string encode_timeline(const FeatureTimeline& timeline) {
  timeline.validate();
  nlohmann::json header{{"sequence_id", timeline.sequence_id},
                        {"T", timeline.length()},
                        {"dim", timeline.dim()},
                        {"has_labels", timeline.has_labels()}};
  const std::string text = header.dump();
  std::string out(kMagic);
  binary::put_u64(out, text.size());
  out += text;
  for (double v : timeline.features.data()) binary::put_f64(out, v);
  for (double v : timeline.labels) binary::put_f64(out, v);
  for (std::uint8_t m : timeline.mask) out.push_back(static_cast<char>(m));
  return out;
}

FeatureTimeline decode_timeline(const std::string& bytes) {
  binary::Reader in(bytes, "feature file");
  if (in.take(kMagic.size()) != kMagic) throw InputError("feature file: bad magic (expected AFFT1)");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.take(in.u64()));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("feature file: bad header: ") + e.what());
  }
  FeatureTimeline tl;
  std::size_t T = 0, dim = 0;
  bool has_labels = false;
  try {
    tl.sequence_id = header.at("sequence_id").get<std::string>();
    T = header.at("T").get<std::size_t>();
    dim = header.at("dim").get<std::size_t>();
    has_labels = header.at("has_labels").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("feature file: bad header: ") + e.what());
  }
  std::vector<double> values(T * dim);
  for (double& v : values) v = in.f64();
  tl.features = Tensor({T, dim}, std::move(values));
  if (has_labels) {
    tl.labels.resize(T);
    for (double& v : tl.labels) v = in.f64();
  }
  tl.mask.resize(T);
  for (auto& m : tl.mask) m = in.u8();
  if (!in.done()) throw InputError("feature file: trailing bytes");
  return tl;
}

void save_timeline(const std::filesystem::path& path, const FeatureTimeline& timeline) {
  write_file(path, encode_timeline(timeline));
}

FeatureTimeline load_timeline(const std::filesystem::path& path) {
  try {
    return decode_timeline(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<FeatureTimeline> load_timelines(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("feature directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".afft") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError("no .afft feature files in " + dir.string());
  std::vector<FeatureTimeline> out;
  for (const auto& f : files) out.push_back(load_timeline(f));
  return out;
}

}  // namespace afe
