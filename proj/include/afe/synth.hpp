#pragma once

// Synthetic stand-in for a face-video corpus with per-frame valence.
//
// The latent valence v(t) is an exponentially smoothed, clipped random walk.
// Each frame shows a Gaussian blob whose brightness and horizontal position
// are fixed functions of v(t), plus pixel noise. A single frame therefore
// determines v(t) up to noise, and averaging over time reduces that noise.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "afe/dataset.hpp"
#include "afe/image.hpp"
#include "afe/rng.hpp"

namespace afe {

struct SynthConfig {
  std::size_t train_sequences = 20;
  std::size_t dev_sequences = 4;
  std::size_t length = 300;      ///< frames per sequence
  std::size_t image_size = 32;   ///< rendered frames are image_size x image_size
  std::size_t crop_size = 36;    ///< template out_size of the aligned crop
  double noise_sigma = 1.0;      ///< pixel noise std, in [0, 1] intensity units
  double tau_s = 1.0;            ///< smoothing time constant of the latent signal
  double walk_step = 0.12;       ///< per-frame std of the underlying random walk
  double gap_fraction = 0.05;    ///< share of frames flagged face_found = 0
  std::uint64_t seed = 7;

  void validate() const;
};

/// Latent valence trajectory of `length` frames, always within [-1, 1].
std::vector<double> synth_valence(std::size_t length, double tau_s, double walk_step, Rng& rng);

/// Renders one frame for valence v (noise drawn from `rng` when sigma > 0).
Image render_frame(double v, std::size_t size, double noise_sigma, Rng& rng);

/// The template used for synthetic data: fixed eye/nose targets in a crop of
/// `crop_size` pixels.
FaceTemplate synth_template(std::size_t crop_size);

/// Landmarks emitted for every detected face: the template points mapped
/// into the rendered frame's coordinates.
Landmarks synth_landmarks(const SynthConfig& cfg);

/// Indices of frames flagged as face misses: round(gap_fraction * length)
/// distinct frames, never the whole sequence.
std::vector<std::size_t> synth_gap_frames(std::size_t length, double gap_fraction, Rng& rng);

struct SynthOutput {
  std::filesystem::path train_manifest;
  std::filesystem::path dev_manifest;
  std::filesystem::path template_file;
};

/// Writes train.csv, dev.csv, template.json and frames/<sequence>/<frame>.pgm
/// under `out_dir`. Identical config gives byte-identical files.
SynthOutput write_synthetic_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace afe
