#pragma once

// One JSON document configures a whole experiment. Every section is optional
// and missing keys keep their defaults:
//
//   {
//     "seed": 7,
//     "synth":     { SynthConfig fields },
//     "cnn":       { CnnSpec fields },
//     "cnn_train": { SgdConfig fields, "flags": "AD" },
//     "augment":   { AugmentConfig fields },
//     "rnn":       { RnnSpec fields },
//     "rnn_train": { SgdConfig fields }
//   }

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "afe/augment.hpp"
#include "afe/cnn.hpp"
#include "afe/rnn.hpp"
#include "afe/sgd.hpp"
#include "afe/synth.hpp"
#include "afe/train.hpp"

namespace afe {

struct RunConfig {
  SynthConfig synth;
  CnnSpec cnn;
  SgdConfig cnn_train;
  CnnTrainFlags cnn_flags;
  RnnSpec rnn;
  SgdConfig rnn_train = SgdConfig::rnn_defaults();

  /// Replaces the seed of every stochastic stage.
  void set_seed(std::uint64_t seed);
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json to_json(const SgdConfig& cfg);
SgdConfig sgd_from_json(const nlohmann::json& j, SgdConfig defaults, bool allow_flags = false);

}  // namespace afe
