#include "afe/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "afe/error.hpp"
#include "afe/frames.hpp"
#include "afe/inference.hpp"
#include "afe/json_io.hpp"
#include "afe/model_io.hpp"
#include "afe/timeline.hpp"

namespace afe {

namespace {

const std::set<std::string> kRnnAxes = {"hidden", "window", "layers", "activation"};

}  // namespace

SweepAxis default_axis(const std::string& name) {
  using nlohmann::json;
  if (name == "hidden") return {name, {50, 100, 150, 200}};
  if (name == "window") return {name, {25, 50, 75, 100, 150}};
  if (name == "layers") return {name, {json::array({100}), json::array({100, 100}), json::array({100, 100, 50})}};
  if (name == "activation") return {name, {"tanh", "relu"}};
  if (name == "cnn_flags") return {name, {"", "D", "A", "AD"}};
  throw InputError("unknown sweep axis '" + name + "' (expected hidden, window, layers, activation or cnn_flags)");
}

SweepGrid parse_grid(const nlohmann::json& j) {
  SweepGrid grid;
  const nlohmann::json& axes = j.is_object() ? j.at("axes") : j;
  if (!axes.is_array() || axes.empty()) throw InputError("sweep grid: expected a non-empty list of axes");
  for (const auto& a : axes) {
    if (a.is_string()) {
      grid.axes.push_back(default_axis(a.get<std::string>()));
      continue;
    }
    SweepAxis axis = default_axis(a.at("name").get<std::string>());
    if (a.contains("values")) axis.values = a.at("values").get<std::vector<nlohmann::json>>();
    if (axis.values.empty()) throw InputError("sweep grid: axis '" + axis.name + "' has no values");
    grid.axes.push_back(std::move(axis));
  }
  return grid;
}

SweepGrid load_grid(const std::filesystem::path& path) {
  try {
    return parse_grid(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

bool is_cnn_grid(const SweepGrid& grid) {
  bool cnn = false, rnn = false;
  for (const auto& a : grid.axes) {
    (kRnnAxes.count(a.name) ? rnn : cnn) = true;
  }
  if (cnn && rnn) throw InputError("sweep grid: cnn_flags cannot be combined with RNN axes");
  return cnn;
}

std::vector<RunConfig> expand_grid(const SweepGrid& grid, const RunConfig& base) {
  if (grid.axes.empty()) throw InputError("sweep grid: no axes");
  std::vector<RunConfig> out{base};
  for (const auto& axis : grid.axes) {
    std::vector<RunConfig> next;
    for (const auto& cfg : out) {
      for (const auto& v : axis.values) {
        RunConfig c = cfg;
        try {
          if (axis.name == "hidden") {
            c.rnn.hidden_sizes = {v.get<std::size_t>()};
          } else if (axis.name == "window") {
            c.rnn.window = v.get<std::size_t>();
          } else if (axis.name == "layers") {
            c.rnn.hidden_sizes = v.get<std::vector<std::size_t>>();
          } else if (axis.name == "activation") {
            c.rnn.activation = parse_activation(v.get<std::string>());
          } else if (axis.name == "cnn_flags") {
            const AugmentConfig keep = c.cnn_flags.augment_config;
            c.cnn_flags = parse_cnn_flags(v.get<std::string>());
            c.cnn_flags.augment_config = keep;
          }
        } catch (const nlohmann::json::exception& e) {
          throw InputError("sweep grid: bad value " + v.dump() + " for axis '" + axis.name + "': " + e.what());
        }
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string config_hash(const RunConfig& cfg, bool cnn_run) {
  nlohmann::json j;
  if (cnn_run) {
    j["cnn"] = cfg.cnn;
    j["train"] = to_json(cfg.cnn_train);
    j["flags"] = format_cnn_flags(cfg.cnn_flags);
  } else {
    j["rnn"] = cfg.rnn;
    j["train"] = to_json(cfg.rnn_train);
  }
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct RunOutcome {
  bool ok = false;
  MetricRow pooled;
  double seconds = 0.0;
  std::string error;
};

std::string join(const std::vector<std::size_t>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string row(const RunConfig& c, bool cnn_run, const std::string& hash, const RunOutcome& r) {
  const SgdConfig& t = cnn_run ? c.cnn_train : c.rnn_train;
  std::ostringstream os;
  os << hash << ',' << (cnn_run ? "cnn" : "cnn_rnn") << ',';
  if (cnn_run) {
    os << c.cnn.conv_filters[0] << '-' << c.cnn.conv_filters[1] << '-' << c.cnn.conv_filters[2] << ','
       << c.cnn.kernel_size << ',' << c.cnn.fc_units << ',' << format_cnn_flags(c.cnn_flags) << ",,,,"
       << to_string(c.cnn.activation) << ',';
  } else {
    os << ",,,," << c.rnn.input_dim << ',' << join(c.rnn.hidden_sizes, '-') << ',' << c.rnn.window << ','
       << to_string(c.rnn.activation) << ',';
  }
  os << num(t.learning_rate) << ',' << num(t.momentum) << ',' << num(t.weight_decay) << ',' << t.batch_size << ','
     << t.epochs << ',' << t.seed << ',';
  if (r.ok) {
    os << "OK," << num(r.pooled.rmse) << ',' << num(r.pooled.cc) << ',' << num(r.pooled.ccc) << ',' << num(r.seconds);
  } else {
    os << "FAILED,,,," << num(r.seconds);
  }
  return os.str();
}

std::set<std::string> completed_hashes(const std::filesystem::path& csv) {
  std::set<std::string> done;
  if (!std::filesystem::exists(csv)) return done;
  std::istringstream in(read_file(csv));
  std::string line;
  std::getline(in, line);
  if (line != kSweepHeader) throw InputError(csv.string() + ": not a sweep results file (header differs)");
  while (std::getline(in, line)) {
    if (!line.empty()) done.insert(line.substr(0, line.find(',')));
  }
  return done;
}

}  // namespace

SweepSummary run_sweep(const SweepGrid& grid, const RunConfig& base, const SweepInputs& inputs,
                       const std::filesystem::path& results_csv, int jobs) {
  const bool cnn_run = is_cnn_grid(grid);
  std::vector<RunConfig> configs = expand_grid(grid, base);

  std::vector<PreparedSequence> train_seq, dev_seq;
  std::vector<FeatureTimeline> train_tl, dev_tl;
  if (cnn_run) {
    if (!inputs.manifest || !inputs.dev_manifest || !inputs.template_file) {
      throw InputError("cnn_flags sweep needs --manifest, --dev and --template");
    }
  } else {
    if (!inputs.features || !inputs.dev_features) {
      throw InputError("RNN sweep needs --features and --dev-features");
    }
  }

  const std::set<std::string> done = completed_hashes(results_csv);
  std::vector<std::string> hashes;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (cnn_run) {
      configs[i].cnn.input_channels = 1;
    }
    hashes.push_back("");
  }

  // Inputs are loaded lazily so that a fully cached sweep touches no data.
  std::size_t input_dim = 0;
  std::size_t crop = 0;
  auto load_inputs = [&] {
    if (cnn_run) {
      const FaceTemplate tmpl = load_template(*inputs.template_file);
      crop = tmpl.out_size;
      train_seq = prepare_dataset(load_manifest(*inputs.manifest), tmpl);
      dev_seq = prepare_dataset(load_manifest(*inputs.dev_manifest), tmpl);
    } else {
      train_tl = load_timelines(*inputs.features);
      dev_tl = load_timelines(*inputs.dev_features);
      input_dim = train_tl.front().dim();
    }
  };
  // Hashes depend on the data-derived extents, which are read from file
  // headers cheaply: feature dim from the first timeline, crop from the template.
  if (cnn_run) {
    crop = load_template(*inputs.template_file).out_size;
  } else {
    input_dim = load_timelines(*inputs.features).front().dim();
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (cnn_run) {
      configs[i].cnn.input_height = configs[i].cnn.input_width = crop;
    } else {
      configs[i].rnn.input_dim = input_dim;
    }
    hashes[i] = config_hash(configs[i], cnn_run);
    if (!done.count(hashes[i])) pending.push_back(i);
  }

  SweepSummary summary;
  summary.skipped = configs.size() - pending.size();
  if (pending.empty()) return summary;
  load_inputs();

  const bool fresh = !std::filesystem::exists(results_csv);
  std::FILE* out = std::fopen(results_csv.string().c_str(), "a");
  if (out == nullptr) throw Error("cannot open " + results_csv.string() + " for appending");
  if (fresh) std::fprintf(out, "%s\n", kSweepHeader);
  std::fflush(out);

  const auto n = static_cast<std::int64_t>(pending.size());
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const RunConfig& cfg = configs[pending[k]];
    RunOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (cnn_run) {
        auto result = train_cnn(train_seq, {}, cfg.cnn, cfg.cnn_train, cfg.cnn_flags);
        outcome.pooled = evaluate_cnn(result.model, dev_seq, MetricPolicy::lenient).pooled;
      } else {
        auto result = train_rnn(train_tl, {}, cfg.rnn, cfg.rnn_train);
        outcome.pooled = evaluate_rnn(result.model, dev_tl, MetricPolicy::lenient).pooled;
      }
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
#pragma omp ordered
    {
      if (!outcome.ok) std::cerr << "sweep: run " << hashes[pending[k]] << " failed: " << outcome.error << '\n';
      std::fprintf(out, "%s\n", row(cfg, cnn_run, hashes[pending[k]], outcome).c_str());
      std::fflush(out);
      if (outcome.ok) {
        ++summary.trained;
      } else {
        ++summary.failed;
      }
    }
  }
  std::fclose(out);
  return summary;
}

}  // namespace afe
