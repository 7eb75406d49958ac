#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "afe/commands.hpp"
#include "afe/error.hpp"
#include "afe/image.hpp"
#include "afe/model_io.hpp"
#include "afe/sweep.hpp"
#include "afe/timeline.hpp"
#include "support.hpp"

using namespace afe;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / (std::string("afe_harness_") +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

RunConfig tiny_config() {
  RunConfig c;
  c.synth.train_sequences = 2;
  c.synth.dev_sequences = 1;
  c.synth.length = 40;
  c.cnn.conv_filters = {2, 2, 2};
  c.cnn.fc_units = 6;
  c.cnn_train.epochs = 1;
  c.rnn.hidden_sizes = {4};
  c.rnn.window = 5;
  c.rnn_train.epochs = 2;
  return c;
}

void write_random_features(const fs::path& dir, std::size_t count, std::size_t T, std::uint64_t seed) {
  fs::create_directories(dir);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    FeatureTimeline tl{"s" + std::to_string(i), test::random_tensor({T, 3}, rng), {}, std::vector<std::uint8_t>(T)};
    for (std::size_t t = 0; t < T; ++t) tl.labels.push_back(0.5 * std::tanh(tl.features.at(t, 0)));
    save_timeline(dir / (tl.sequence_id + ".afft"), tl);
  }
}

RunConfig sweep_base() {
  RunConfig c;
  c.rnn.hidden_sizes = {3};
  c.rnn.window = 5;
  c.rnn_train.epochs = 1;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AFE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Synth, ValenceStaysInRange) {
  Rng rng(1);
  const auto v = synth_valence(5000, 0.2, 0.5, rng);
  ASSERT_EQ(v.size(), 5000u);
  for (double x : v) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(Synth, BrightnessIncreasesWithValence) {
  Rng rng(2);
  auto mean = [](const Image& img) {
    double s = 0;
    for (auto p : img.pixels) s += p;
    return s / static_cast<double>(img.pixels.size());
  };
  EXPECT_GT(mean(render_frame(1.0, 32, 0.0, rng)), mean(render_frame(-1.0, 32, 0.0, rng)));
  double prev = -1.0;
  for (double v = -1.0; v <= 1.0; v += 0.25) {
    const double m = mean(render_frame(v, 32, 0.0, rng));
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(Synth, GapCountIsExact) {
  Rng rng(3);
  const auto gaps = synth_gap_frames(200, 0.1, rng);
  EXPECT_EQ(gaps.size(), 20u);
  EXPECT_EQ(std::set<std::size_t>(gaps.begin(), gaps.end()).size(), 20u);

  TempDir dir;
  RunConfig c = tiny_config();
  c.synth.train_sequences = 1;
  c.synth.length = 200;
  c.synth.gap_fraction = 0.1;
  const auto out = cmd_synth(c, dir.path);
  const auto ds = load_manifest(out.train_manifest);
  std::size_t misses = 0;
  for (const auto& f : ds.sequences[0].frames) misses += !f.face_found;
  EXPECT_EQ(misses, 20u);
}

TEST(Synth, RegenerationIsBitwiseIdentical) {
  TempDir a, b;
  RunConfig c = tiny_config();
  c.synth.length = 100;
  c.synth.noise_sigma = 0.0;
  cmd_synth(c, a.path);
  cmd_synth(c, b.path);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a.path)) {
    if (!e.is_regular_file()) continue;
    ++files;
    EXPECT_EQ(read_file(e.path()), read_file(b.path / fs::relative(e.path(), a.path))) << e.path();
  }
  EXPECT_EQ(files, 3u + 3u * 100u);
}

TEST(Synth, UnwritableDestinationFails) {
  TempDir dir;
  write_file(dir.path / "file", "x");
  EXPECT_THROW(cmd_synth(tiny_config(), dir.path / "file" / "sub"), Error);
}

TEST(Config, ParsesSectionsAndRejectsTypos) {
  const RunConfig c = parse_run_config(nlohmann::json::parse(R"({
    "seed": 11,
    "cnn": {"conv_filters": [8, 16, 32], "fc_units": 64},
    "cnn_train": {"epochs": 3, "flags": "AD"},
    "augment": {"gain_min": 0.8},
    "rnn": {"hidden_sizes": [100, 100, 50], "window": 100, "activation": "tanh"}
  })"));
  EXPECT_EQ(c.cnn.fc_units, 64u);
  EXPECT_EQ(c.cnn_train.epochs, 3u);
  EXPECT_TRUE(c.cnn_flags.dropout && c.cnn_flags.augment);
  EXPECT_EQ(c.cnn_flags.augment_config.gain_min, 0.8);
  EXPECT_EQ(c.rnn.hidden_sizes, (std::vector<std::size_t>{100, 100, 50}));
  EXPECT_EQ(c.rnn.activation, Activation::tanh);
  EXPECT_EQ(c.rnn_train.weight_decay, 0.0);
  EXPECT_EQ(c.synth.seed, 11u);
  EXPECT_EQ(c.rnn_train.seed, 11u);
  EXPECT_EQ(parse_run_config(to_json(c)).rnn, c.rnn);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"cnn": {"filters": [1, 2, 3]}})")), InputError);
  EXPECT_THROW(parse_run_config(nlohmann::json::parse(R"({"rnn_train": {"momentum": 1.5}})")), InputError);
}

TEST(Config, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.cnn.conv_filters, (std::array<std::size_t, 3>{64, 128, 256}));
  EXPECT_EQ(c.cnn.fc_units, 300u);
  EXPECT_EQ(c.rnn.hidden_sizes, (std::vector<std::size_t>{100}));
  EXPECT_EQ(c.rnn.window, 100u);
  EXPECT_EQ(c.rnn.activation, Activation::relu);
  EXPECT_EQ(c.cnn_train.batch_size, 128u);
  EXPECT_EQ(c.cnn_train.weight_decay, 1e-5);
}

TEST(Workflow, TrainExtractEval) {
  TempDir dir;
  const RunConfig c = tiny_config();
  const auto data = cmd_synth(c, dir.path / "data");
  const auto cnn = cmd_train_cnn(data.train_manifest, data.dev_manifest, data.template_file, c, dir.path / "run");
  EXPECT_TRUE(fs::exists(cnn.model));
  EXPECT_EQ(lines(cnn.history).size(), 2u);

  const auto feats = cmd_extract(cnn.model, data.train_manifest, data.template_file, dir.path / "ft");
  const auto again = cmd_extract(cnn.model, data.train_manifest, data.template_file, dir.path / "ft2");
  const auto dev = cmd_extract(cnn.model, data.dev_manifest, data.template_file, dir.path / "fd");
  ASSERT_EQ(feats.size(), 2u);
  for (std::size_t i = 0; i < feats.size(); ++i) EXPECT_EQ(read_file(feats[i]), read_file(again[i]));
  const FeatureTimeline tl = load_timeline(feats[0]);
  EXPECT_EQ(tl.length(), 40u);
  EXPECT_EQ(tl.dim(), 6u);
  EXPECT_TRUE(tl.has_labels());

  const auto rnn = cmd_train_rnn(dir.path / "ft", dir.path / "fd", c, dir.path / "run");
  EXPECT_EQ(load_rnn(rnn.model).spec().input_dim, 6u);

  const auto ev = cmd_eval(cnn.model, rnn.model, data.dev_manifest, data.template_file, dir.path / "eval");
  const auto rows = lines(ev.timeline_csv);
  EXPECT_EQ(rows.front(), "sequence_id,frame_index,gold,pred_cnn,pred_cnn_rnn,interpolated");
  EXPECT_EQ(rows.size(), 1u + 40u);
  EXPECT_EQ(ev.cnn.pooled.n, 40u);
  ASSERT_TRUE(ev.cnn_rnn.has_value());
  for (const char* f : {"eval_cnn.csv", "eval_cnn_rnn.csv", "eval.json"}) EXPECT_TRUE(fs::exists(dir.path / "eval" / f));
  const auto j = nlohmann::json::parse(read_file(dir.path / "eval" / "eval.json"));
  EXPECT_EQ(j["reference_best_dev"]["ccc"], 0.507);

  RunConfig long_window = c;
  long_window.rnn.window = 41;
  try {
    cmd_train_rnn(dir.path / "ft", std::nullopt, long_window, dir.path / "run2");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("train_00"), std::string::npos);
  }
}

TEST(Workflow, DefaultSpecFeaturesAre300Wide) {
  TempDir dir;
  RunConfig c = tiny_config();
  c.synth.train_sequences = 1;
  c.synth.length = 3;
  c.synth.crop_size = 96;
  c.cnn = CnnSpec{};
  c.cnn.conv_filters = {2, 2, 2};  // fc width left at its default
  c.cnn_train.epochs = 1;
  const auto data = cmd_synth(c, dir.path / "data");
  const auto cnn = cmd_train_cnn(data.train_manifest, std::nullopt, data.template_file, c, dir.path / "run");
  const auto feats = cmd_extract(cnn.model, data.train_manifest, data.template_file, dir.path / "ft");
  EXPECT_EQ(load_timeline(feats[0]).dim(), 300u);
}

TEST(Sweep, GridExpansion) {
  const RunConfig base = sweep_base();
  EXPECT_EQ(expand_grid({{default_axis("window")}}, base).size(), 5u);
  EXPECT_EQ(expand_grid({{default_axis("hidden")}}, base).size(), 4u);
  const auto layered = expand_grid({{default_axis("layers"), default_axis("activation")}}, base);
  ASSERT_EQ(layered.size(), 6u);
  EXPECT_EQ(layered[4].rnn.hidden_sizes, (std::vector<std::size_t>{100, 100, 50}));
  EXPECT_EQ(layered[4].rnn.activation, Activation::tanh);
  EXPECT_EQ(layered[5].rnn.activation, Activation::relu);
  const auto flags = expand_grid({{default_axis("cnn_flags")}}, base);
  EXPECT_EQ(format_cnn_flags(flags[3].cnn_flags), "AD");
  EXPECT_TRUE(is_cnn_grid({{default_axis("cnn_flags")}}));
  EXPECT_THROW(is_cnn_grid({{default_axis("cnn_flags"), default_axis("window")}}), InputError);
  EXPECT_THROW(default_axis("depth"), InputError);
  EXPECT_THROW(parse_grid(nlohmann::json::array()), InputError);

  std::set<std::string> hashes;
  for (const auto& c : expand_grid({{default_axis("window"), default_axis("hidden")}}, base)) {
    hashes.insert(config_hash(c, false));
  }
  EXPECT_EQ(hashes.size(), 20u);
}

TEST(Sweep, RowsResumeAndFailures) {
  TempDir dir;
  write_random_features(dir.path / "train", 2, 160, 4);
  write_random_features(dir.path / "dev", 1, 160, 5);
  const SweepInputs in{dir.path / "train", dir.path / "dev", {}, {}, {}};
  const fs::path csv = dir.path / "sweep.csv";

  const SweepSummary first = run_sweep({{default_axis("window")}}, sweep_base(), in, csv);
  EXPECT_EQ(first.trained, 5u);
  auto rows = lines(csv);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], kSweepHeader);
  const auto header = split(rows[0]);
  const std::vector<std::string> windows{"25", "50", "75", "100", "150"};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), header.size());
    EXPECT_EQ(cells[8], windows[i - 1]);
    EXPECT_EQ(cells[16], "OK");
    for (std::size_t k = 17; k <= 20; ++k) EXPECT_FALSE(cells[k].empty()) << header[k];
  }

  const SweepSummary again = run_sweep({{default_axis("window")}}, sweep_base(), in, csv);
  EXPECT_EQ(again.trained, 0u);
  EXPECT_EQ(again.skipped, 5u);
  EXPECT_EQ(lines(csv).size(), 6u);

  const SweepSummary hidden = run_sweep({{default_axis("hidden")}}, sweep_base(), in, csv);
  EXPECT_EQ(hidden.trained, 4u);
  EXPECT_EQ(lines(csv).size(), 10u);

  const SweepGrid bad = parse_grid(nlohmann::json::parse(R"({"axes": [{"name": "window", "values": [500, 6]}]})"));
  const SweepSummary mixed = run_sweep(bad, sweep_base(), in, csv);
  EXPECT_EQ(mixed.failed, 1u);
  EXPECT_EQ(mixed.trained, 1u);
  rows = lines(csv);
  EXPECT_EQ(split(rows[10])[16], "FAILED");
  EXPECT_EQ(split(rows[11])[16], "OK");
}

TEST(Sweep, ParallelJobsKeepGridOrder) {
  TempDir dir;
  write_random_features(dir.path / "train", 2, 40, 6);
  write_random_features(dir.path / "dev", 1, 40, 7);
  const SweepInputs in{dir.path / "train", dir.path / "dev", {}, {}, {}};
  run_sweep({{default_axis("hidden")}}, sweep_base(), in, dir.path / "serial.csv", 1);
  run_sweep({{default_axis("hidden")}}, sweep_base(), in, dir.path / "parallel.csv", 3);
  const auto a = lines(dir.path / "serial.csv"), b = lines(dir.path / "parallel.csv");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 1; i < a.size(); ++i) {
    auto ca = split(a[i]), cb = split(b[i]);
    ca.pop_back();  // runtime column
    cb.pop_back();
    EXPECT_EQ(ca, cb);
  }
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const std::string out = " --out " + (dir.path / "o").string();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(out + " train-cnn --manifest /nonexistent.csv --template /nonexistent.json"), 2);
  EXPECT_EQ(run_cli(out + " train-cnn --template x.json"), 2);
  EXPECT_EQ(run_cli("--config /nonexistent.json" + out + " synth"), 2);
  EXPECT_EQ(run_cli(out + " sweep --axis depth"), 2);

  write_file(dir.path / "tiny.json", R"({"synth": {"train_sequences": 1, "dev_sequences": 1, "length": 30}})");
  const std::string cfg = " --config " + (dir.path / "tiny.json").string();
  EXPECT_EQ(run_cli("--seed 3" + cfg + " --out " + (dir.path / "d1").string() + " synth"), 0);
  EXPECT_EQ(run_cli("synth --seed 3" + cfg + " --out " + (dir.path / "d2").string()), 0);
  EXPECT_EQ(read_file(dir.path / "d1" / "train.csv"), read_file(dir.path / "d2" / "train.csv"));

  write_file(dir.path / "broken.afen", "AFEN1garbage");
  EXPECT_EQ(run_cli(out + " extract --model " + (dir.path / "broken.afen").string() + " --manifest " +
                    (dir.path / "d1" / "train.csv").string() + " --template " +
                    (dir.path / "d1" / "template.json").string()),
            2);
}
