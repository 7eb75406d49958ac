#include "afe/config.hpp"

#include "afe/error.hpp"
#include "afe/json_io.hpp"
#include "afe/model_io.hpp"

namespace afe {

void RunConfig::set_seed(std::uint64_t seed) {
  synth.seed = seed;
  cnn_train.seed = seed;
  rnn_train.seed = seed;
}

nlohmann::json to_json(const SgdConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate}, {"momentum", cfg.momentum},   {"weight_decay", cfg.weight_decay},
          {"batch_size", cfg.batch_size},       {"epochs", cfg.epochs},       {"seed", cfg.seed}};
}

SgdConfig sgd_from_json(const nlohmann::json& j, SgdConfig c, bool allow_flags) {
  if (allow_flags) {
    reject_unknown_keys(j, {"learning_rate", "momentum", "weight_decay", "batch_size", "epochs", "seed", "flags"},
                        "training config");
  } else {
    reject_unknown_keys(j, {"learning_rate", "momentum", "weight_decay", "batch_size", "epochs", "seed"},
                        "training config");
  }
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

namespace {

SynthConfig synth_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"train_sequences", "dev_sequences", "length", "image_size", "crop_size", "noise_sigma",
                       "tau_s", "walk_step", "gap_fraction", "seed"},
                      "synth config");
  SynthConfig s;
  s.train_sequences = j.value("train_sequences", s.train_sequences);
  s.dev_sequences = j.value("dev_sequences", s.dev_sequences);
  s.length = j.value("length", s.length);
  s.image_size = j.value("image_size", s.image_size);
  s.crop_size = j.value("crop_size", s.crop_size);
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.tau_s = j.value("tau_s", s.tau_s);
  s.walk_step = j.value("walk_step", s.walk_step);
  s.gap_fraction = j.value("gap_fraction", s.gap_fraction);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

nlohmann::json synth_to_json(const SynthConfig& s) {
  return {{"train_sequences", s.train_sequences},
          {"dev_sequences", s.dev_sequences},
          {"length", s.length},
          {"image_size", s.image_size},
          {"crop_size", s.crop_size},
          {"noise_sigma", s.noise_sigma},
          {"tau_s", s.tau_s},
          {"walk_step", s.walk_step},
          {"gap_fraction", s.gap_fraction},
          {"seed", s.seed}};
}

AugmentConfig augment_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"flip_probability", "gain_min", "gain_max", "offset_min", "offset_max"}, "augment config");
  AugmentConfig a;
  a.flip_probability = j.value("flip_probability", a.flip_probability);
  a.gain_min = j.value("gain_min", a.gain_min);
  a.gain_max = j.value("gain_max", a.gain_max);
  a.offset_min = j.value("offset_min", a.offset_min);
  a.offset_max = j.value("offset_max", a.offset_max);
  return a;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  reject_unknown_keys(j, {"seed", "synth", "cnn", "cnn_train", "augment", "rnn", "rnn_train"}, "run config");
  RunConfig c;
  try {
    if (j.contains("synth")) c.synth = synth_from_json(j.at("synth"));
    if (j.contains("cnn")) c.cnn = j.at("cnn").get<CnnSpec>();
    if (j.contains("cnn_train")) {
      const auto& t = j.at("cnn_train");
      c.cnn_train = sgd_from_json(t, c.cnn_train, true);
      if (t.contains("flags")) {
        const AugmentConfig keep = c.cnn_flags.augment_config;
        c.cnn_flags = parse_cnn_flags(t.at("flags").get<std::string>());
        c.cnn_flags.augment_config = keep;
      }
    }
    if (j.contains("augment")) c.cnn_flags.augment_config = augment_from_json(j.at("augment"));
    if (j.contains("rnn")) c.rnn = j.at("rnn").get<RnnSpec>();
    if (j.contains("rnn_train")) c.rnn_train = sgd_from_json(j.at("rnn_train"), c.rnn_train);
    if (j.contains("seed")) c.set_seed(j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("config not found: " + path.string());
  try {
    return parse_run_config(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["synth"] = synth_to_json(cfg.synth);
  j["cnn"] = cfg.cnn;
  j["cnn_train"] = to_json(cfg.cnn_train);
  j["cnn_train"]["flags"] = format_cnn_flags(cfg.cnn_flags);
  const auto& a = cfg.cnn_flags.augment_config;
  j["augment"] = {{"flip_probability", a.flip_probability}, {"gain_min", a.gain_min}, {"gain_max", a.gain_max},
                  {"offset_min", a.offset_min},             {"offset_max", a.offset_max}};
  j["rnn"] = cfg.rnn;
  j["rnn_train"] = to_json(cfg.rnn_train);
  return j;
}

}  // namespace afe
