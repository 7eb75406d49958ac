#include "afe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "afe/error.hpp"
#include "afe/model_io.hpp"

namespace afe {

void SynthConfig::validate() const {
  if (train_sequences == 0) throw InputError("synth: need at least one training sequence");
  if (length < 2) throw InputError("synth: length must be at least 2");
  if (image_size < 8) throw InputError("synth: image_size must be at least 8");
  if (crop_size == 0) throw InputError("synth: crop_size must be positive");
  if (!(noise_sigma >= 0.0)) throw InputError("synth: noise_sigma must be non-negative");
  if (!(tau_s > 0.0)) throw InputError("synth: tau_s must be positive");
  if (!(walk_step >= 0.0)) throw InputError("synth: walk_step must be non-negative");
  if (!(gap_fraction >= 0.0 && gap_fraction < 1.0)) throw InputError("synth: gap_fraction must lie in [0, 1)");
}

std::vector<double> synth_valence(std::size_t length, double tau_s, double walk_step, Rng& rng) {
  const double alpha = 1.0 - std::exp(-1.0 / (kFramesPerSecond * tau_s));
  std::vector<double> v(length);
  double walk = rng.uniform(-0.8, 0.8);
  double smooth = walk;
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) {
      walk = std::clamp(walk + rng.normal(0.0, walk_step), -1.0, 1.0);
      smooth += alpha * (walk - smooth);
    }
    v[t] = std::clamp(smooth, -1.0, 1.0);
  }
  return v;
}

Image render_frame(double v, std::size_t size, double noise_sigma, Rng& rng) {
  const double s = static_cast<double>(size);
  const double cx = s / 2.0 + v * s / 4.0;
  const double cy = s / 2.0;
  const double radius = s / 8.0;
  const double amplitude = 0.35 + 0.25 * v;
  const double background = 0.3;
  Image img;
  img.width = img.height = size;
  img.channels = 1;
  img.pixels.resize(size * size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      double p = background + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * radius * radius));
      if (noise_sigma > 0.0) p += rng.normal(0.0, noise_sigma);
      p = std::clamp(p, 0.0, 1.0);
      img.pixels[y * size + x] = static_cast<std::uint8_t>(std::lround(p * 255.0));
    }
  }
  return img;
}

FaceTemplate synth_template(std::size_t crop_size) {
  const double c = static_cast<double>(crop_size);
  FaceTemplate t;
  t.points = {Point{c / 3.0, c * 0.35}, Point{2.0 * c / 3.0, c * 0.35}, Point{c / 2.0, c * 0.6}};
  t.out_size = crop_size;
  return t;
}

Landmarks synth_landmarks(const SynthConfig& cfg) {
  const FaceTemplate t = synth_template(cfg.crop_size);
  const double ratio = static_cast<double>(cfg.image_size) / static_cast<double>(cfg.crop_size);
  Landmarks lm;
  for (std::size_t k = 0; k < 3; ++k) lm[k] = {t.points[k].x * ratio, t.points[k].y * ratio};
  return lm;
}

std::vector<std::size_t> synth_gap_frames(std::size_t length, double gap_fraction, Rng& rng) {
  auto count = static_cast<std::size_t>(std::llround(gap_fraction * static_cast<double>(length)));
  count = std::min(count, length - 1);
  std::vector<std::size_t> idx(length);
  for (std::size_t i = 0; i < length; ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

Sequence synth_sequence(const SynthConfig& cfg, const std::string& id, Rng rng,
                        const std::filesystem::path& out_dir) {
  Rng latent_rng = rng.fork(1);
  Rng gap_rng = rng.fork(2);
  Rng noise_rng = rng.fork(3);
  const std::vector<double> v = synth_valence(cfg.length, cfg.tau_s, cfg.walk_step, latent_rng);
  const std::vector<std::size_t> gaps = synth_gap_frames(cfg.length, cfg.gap_fraction, gap_rng);
  const Landmarks lm = synth_landmarks(cfg);

  const std::filesystem::path rel_dir = std::filesystem::path("frames") / id;
  std::filesystem::create_directories(out_dir / rel_dir);
  Sequence seq{id, {}};
  for (std::size_t t = 0; t < cfg.length; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.pgm", t);
    const std::filesystem::path rel = rel_dir / name;
    write_pnm(out_dir / rel, render_frame(v[t], cfg.image_size, cfg.noise_sigma, noise_rng));
    FrameRecord r;
    r.sequence_id = id;
    r.frame_index = static_cast<long>(t);
    r.timestamp_s = static_cast<double>(t) / kFramesPerSecond;
    r.image_path = rel.generic_string();
    r.face_found = !std::binary_search(gaps.begin(), gaps.end(), t);
    if (r.face_found) r.landmarks = lm;
    r.valence = v[t];
    seq.frames.push_back(std::move(r));
  }
  return seq;
}

}  // namespace

SynthOutput write_synthetic_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw InputError("synth: cannot create output directory " + out_dir.string());
  }
  const Rng root(cfg.seed);
  SequenceDataset train, dev;
  for (std::size_t i = 0; i < cfg.train_sequences + cfg.dev_sequences; ++i) {
    const bool is_train = i < cfg.train_sequences;
    char id[32];
    std::snprintf(id, sizeof id, "%s_%03zu", is_train ? "train" : "dev",
                  is_train ? i : i - cfg.train_sequences);
    (is_train ? train : dev).sequences.push_back(synth_sequence(cfg, id, root.fork(i), out_dir));
  }
  SynthOutput out{out_dir / "train.csv", out_dir / "dev.csv", out_dir / "template.json"};
  write_file(out.train_manifest, format_manifest(train));
  write_file(out.dev_manifest, format_manifest(dev));
  write_file(out.template_file, format_template(synth_template(cfg.crop_size)));
  return out;
}

}  // namespace afe
