#pragma once

// Hyperparameter sweeps. A grid is a list of axes; the runs are the cartesian
// product of the axis values, first axis varying slowest. RNN axes (hidden,
// window, layers, activation) retrain the RNN on fixed features; the
// cnn_flags axis retrains the single-frame CNN. The two kinds cannot be mixed.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "afe/config.hpp"

namespace afe {

struct SweepAxis {
  std::string name;
  std::vector<nlohmann::json> values;
};

struct SweepGrid {
  std::vector<SweepAxis> axes;
};

/// Built-in value lists: hidden {50,100,150,200}; window {25,50,75,100,150};
/// layers {[100],[100,100],[100,100,50]}; activation {tanh,relu};
/// cnn_flags {"", "D", "A", "AD"}.
SweepAxis default_axis(const std::string& name);
SweepGrid parse_grid(const nlohmann::json& j);
SweepGrid load_grid(const std::filesystem::path& path);

struct SweepInputs {
  // RNN sweeps
  std::optional<std::filesystem::path> features;
  std::optional<std::filesystem::path> dev_features;
  // CNN sweeps
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> dev_manifest;
  std::optional<std::filesystem::path> template_file;
};

struct SweepSummary {
  std::size_t trained = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

inline constexpr const char* kSweepHeader =
    "config_hash,model,cnn_filters,kernel_size,fc_units,cnn_flags,input_dim,hidden_sizes,window,activation,"
    "learning_rate,momentum,weight_decay,batch_size,epochs,seed,status,rmse,cc,ccc,seconds";

/// Runs every grid point whose config hash is not already in `results_csv`,
/// appending one row per run in grid order. `jobs` > 1 trains several
/// configs concurrently; rows are still written in grid order.
SweepSummary run_sweep(const SweepGrid& grid, const RunConfig& base, const SweepInputs& inputs,
                       const std::filesystem::path& results_csv, int jobs = 1);

/// The expanded configurations of a grid, in run order.
std::vector<RunConfig> expand_grid(const SweepGrid& grid, const RunConfig& base);
bool is_cnn_grid(const SweepGrid& grid);

/// 16 hex digits of FNV-1a over the canonical JSON of the run's settings.
std::string config_hash(const RunConfig& cfg, bool cnn_run);

}  // namespace afe
