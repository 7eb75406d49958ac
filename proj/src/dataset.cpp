#include "afe/dataset.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "afe/error.hpp"
#include "afe/json_io.hpp"
#include "afe/model_io.hpp"

namespace afe {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view cell, const std::string& where) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw InputError(where + ": '" + std::string(cell) + "' is not a number");
  }
  return v;
}

long parse_long(std::string_view cell, const std::string& where) {
  long v = 0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InputError(where + ": '" + std::string(cell) + "' is not an integer");
  }
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::size_t SequenceDataset::frame_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.frames.size();
  return n;
}

const Sequence& SequenceDataset::sequence(const std::string& id) const {
  for (const auto& s : sequences) {
    if (s.id == id) return s;
  }
  throw InputError("no sequence named '" + id + "'");
}

SequenceDataset parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  static const std::vector<std::string_view> columns = split(kManifestHeader, ',');
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw InputError("manifest: missing header");

  const auto header = split(trim(lines[0]), ',');
  std::vector<std::size_t> col(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (trim(header[h]) == columns[c]) found = h;
    }
    if (found == header.size()) throw InputError("manifest: missing column '" + std::string(columns[c]) + "'");
    col[c] = found;
  }

  SequenceDataset ds;
  ds.base_dir = base_dir;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = "manifest row " + std::to_string(li);
    const auto line = trim(lines[li]);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    auto cell = [&](std::size_t c) { return trim(cells[col[c]]); };

    FrameRecord r;
    r.sequence_id = std::string(cell(0));
    if (r.sequence_id.empty()) throw InputError(where + ": empty sequence_id");
    r.frame_index = parse_long(cell(1), where + " frame_index");
    r.timestamp_s = parse_double(cell(2), where + " timestamp_s");
    r.image_path = std::string(cell(3));
    const auto face = cell(4);
    if (face != "0" && face != "1") throw InputError(where + ": face_found must be 0 or 1");
    r.face_found = face == "1";

    std::size_t present = 0;
    for (std::size_t c = 5; c <= 10; ++c) present += cell(c).empty() ? 0 : 1;
    if (!r.face_found && present != 0) {
      throw InputError(where + ": landmarks present although face_found=0");
    }
    if (r.face_found) {
      if (present != 6) throw InputError(where + ": face_found=1 requires all six landmark cells");
      Landmarks lm;
      for (std::size_t k = 0; k < 3; ++k) {
        lm[k].x = parse_double(cell(5 + 2 * k), where + " " + std::string(columns[5 + 2 * k]));
        lm[k].y = parse_double(cell(6 + 2 * k), where + " " + std::string(columns[6 + 2 * k]));
      }
      r.landmarks = lm;
      if (r.image_path.empty()) throw InputError(where + ": face_found=1 requires an image_path");
    }
    if (!cell(11).empty()) {
      const double v = parse_double(cell(11), where + " valence");
      if (v < -1.0 || v > 1.0) throw InputError(where + ": valence " + fmt(v) + " outside [-1, 1]");
      r.valence = v;
    }

    const double ticks = r.timestamp_s * kFramesPerSecond;
    if (std::abs(ticks - std::round(ticks)) > 1e-6) {
      throw InputError(where + ": timestamp " + fmt(r.timestamp_s) + " is not on the 25 fps grid");
    }

    Sequence* seq = nullptr;
    for (auto& s : ds.sequences) {
      if (s.id == r.sequence_id) seq = &s;
    }
    if (seq == nullptr) {
      ds.sequences.push_back({r.sequence_id, {}});
      seq = &ds.sequences.back();
    } else {
      const FrameRecord& prev = seq->frames.back();
      if (r.timestamp_s <= prev.timestamp_s) throw InputError(where + ": timestamps are not strictly increasing");
      if (r.frame_index <= prev.frame_index) throw InputError(where + ": frame_index is not strictly increasing");
    }
    seq->frames.push_back(std::move(r));
  }
  if (ds.sequences.empty()) throw InputError("manifest: no frames");
  return ds;
}

SequenceDataset load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("manifest not found: " + path.string());
  return parse_manifest(read_file(path), path.parent_path());
}

std::string format_manifest(const SequenceDataset& dataset) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& s : dataset.sequences) {
    for (const auto& r : s.frames) {
      out += r.sequence_id + ',' + std::to_string(r.frame_index) + ',' + fmt(r.timestamp_s) + ',' + r.image_path +
             ',' + (r.face_found ? "1" : "0");
      for (std::size_t k = 0; k < 3; ++k) {
        if (r.landmarks) {
          out += ',' + fmt((*r.landmarks)[k].x) + ',' + fmt((*r.landmarks)[k].y);
        } else {
          out += ",,";
        }
      }
      out += ',';
      if (r.valence) out += fmt(*r.valence);
      out += '\n';
    }
  }
  return out;
}

FaceTemplate parse_template(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("template: invalid JSON: ") + e.what());
  }
  reject_unknown_keys(j, {"eye_l", "eye_r", "nose", "out_size"}, "template");
  FaceTemplate t;
  const char* names[3] = {"eye_l", "eye_r", "nose"};
  try {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto xy = j.at(names[k]).get<std::vector<double>>();
      if (xy.size() != 2) throw InputError(std::string("template: ") + names[k] + " must be [x, y]");
      t.points[k] = {xy[0], xy[1]};
    }
    t.out_size = j.at("out_size").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("template: ") + e.what());
  }
  if (t.out_size == 0) throw InputError("template: out_size must be positive");
  return t;
}

FaceTemplate load_template(const std::filesystem::path& path) { return parse_template(read_file(path)); }

std::string format_template(const FaceTemplate& tmpl) {
  nlohmann::json j;
  j["eye_l"] = {tmpl.points[0].x, tmpl.points[0].y};
  j["eye_r"] = {tmpl.points[1].x, tmpl.points[1].y};
  j["nose"] = {tmpl.points[2].x, tmpl.points[2].y};
  j["out_size"] = tmpl.out_size;
  return j.dump(2) + "\n";
}

}  // namespace afe
