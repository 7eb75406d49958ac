#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "afe/align.hpp"
#include "afe/error.hpp"
#include "afe/frames.hpp"
#include "afe/image.hpp"
#include "afe/model_io.hpp"
#include "afe/preprocess.hpp"
#include "afe/timeline.hpp"
#include "support.hpp"

using namespace afe;
namespace fs = std::filesystem;

namespace {

const std::string kHeader(kManifestHeader);

std::string face_row(const std::string& seq, int frame, const std::string& valence = "0.5") {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%.2f,f%d.pgm,1,10,12,22,12,16,20,%s", seq.c_str(), frame, frame / 25.0, frame,
                valence.c_str());
  return buf;
}

std::string miss_row(const std::string& seq, int frame, const std::string& valence = "") {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%.2f,,0,,,,,,,%s", seq.c_str(), frame, frame / 25.0, valence.c_str());
  return buf;
}

std::string manifest(std::initializer_list<std::string> rows) {
  std::string s = kHeader + "\n";
  for (const auto& r : rows) s += r + "\n";
  return s;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("afe_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Image gradient_image(std::size_t w, std::size_t h) {
  Image img{w, h, 1, std::vector<std::uint8_t>(w * h)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) img.pixels[y * w + x] = static_cast<std::uint8_t>(x + 2 * y);
  }
  return img;
}

Landmarks transformed(const Landmarks& pts, const Similarity& s) {
  Landmarks out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = s.apply(pts[i]);
  return out;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

TEST(Manifest, ParsesValidRows) {
  const auto ds = parse_manifest(manifest({face_row("a", 0), miss_row("a", 1, "0.25"), face_row("b", 0, "")}), "/d");
  EXPECT_EQ(ds.frame_count(), 3u);
  ASSERT_EQ(ds.sequences.size(), 2u);
  const auto& a = ds.sequence("a").frames;
  EXPECT_TRUE(a[0].face_found);
  EXPECT_EQ(a[0].landmarks->at(2).y, 20.0);
  EXPECT_FALSE(a[1].face_found);
  EXPECT_FALSE(a[1].landmarks.has_value());
  EXPECT_EQ(*a[1].valence, 0.25);
  EXPECT_FALSE(ds.sequence("b").frames[0].valence.has_value());
  EXPECT_EQ(parse_manifest(format_manifest(ds), "/d").frame_count(), 3u);
}

TEST(Manifest, RejectsInvalidInput) {
  EXPECT_NE(error_of([] { parse_manifest(kHeader + "\n", "."); }).find("no frames"), std::string::npos);
  const std::string breach = "a,0,0.00,f.pgm,0,10,12,22,12,16,20,0.1";
  EXPECT_NE(error_of([&] { parse_manifest(manifest({breach}), "."); }).find("row 1"), std::string::npos);
  EXPECT_NE(error_of([] { parse_manifest(manifest({face_row("a", 0), face_row("a", 1, "1.5")}), "."); })
                .find("row 2"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_manifest(manifest({face_row("a", 1), face_row("a", 0)}), "."); })
                .find("increasing"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_manifest("sequence_id,frame_index\na,0\n", "."); }).find("missing column"),
            std::string::npos);
  EXPECT_THROW(parse_manifest(manifest({"a,0,0.01,f.pgm,1,1,1,2,1,1,2,0"}), "."), InputError);  // off the grid
  EXPECT_THROW(parse_manifest(manifest({"a,0,0.00,f.pgm,2,1,1,2,1,1,2,0"}), "."), InputError);
  EXPECT_THROW(parse_manifest(manifest({"a,0,0.00,f.pgm,1,1,1,2,1,1,,0"}), "."), InputError);
  EXPECT_THROW(load_manifest("/nonexistent/manifest.csv"), InputError);
}

TEST(Template, RoundTrip) {
  const FaceTemplate t = parse_template(R"({"eye_l": [30, 35], "eye_r": [66, 35], "nose": [48, 60], "out_size": 96})");
  EXPECT_EQ(t.points[1].x, 66.0);
  EXPECT_EQ(t.out_size, 96u);
  const FaceTemplate back = parse_template(format_template(t));
  EXPECT_EQ(back.points[2].y, 60.0);
  EXPECT_THROW(parse_template(R"({"eye_l": [1], "eye_r": [2, 2], "nose": [3, 3], "out_size": 9})"), InputError);
  EXPECT_THROW(parse_template("{"), InputError);
}

TEST(Pnm, RoundTripAndLuminance) {
  const Image g = gradient_image(5, 3);
  const Image back = decode_pnm(encode_pnm(g));
  EXPECT_EQ(back.pixels, g.pixels);
  EXPECT_EQ(back.width, 5u);

  const Image rgb{1, 1, 3, {255, 0, 0}};
  EXPECT_EQ(decode_pnm(encode_pnm(rgb)).channels, 3u);
  EXPECT_NEAR(luminance(rgb)[0], 0.299, 1e-15);
  EXPECT_EQ(luminance(g)[1], 1.0 / 255.0);

  const Image c = decode_pnm(std::string("P5\n# comment\n2 1\n255\n") + std::string("\x10\x20", 2));
  EXPECT_EQ(c.at(1, 0), 0x20);
  EXPECT_THROW(decode_pnm("P2\n1 1\n255\n0"), InputError);
  EXPECT_THROW(decode_pnm("P5\n2 2\n255\nab"), InputError);
  EXPECT_THROW(decode_pnm("P5\n1 1\n65535\nab"), InputError);
}

TEST(Align, IdentityPreservesPixels) {
  const Image img = gradient_image(40, 40);
  FaceTemplate t;
  t.points = {Point{12, 14}, Point{28, 14}, Point{20, 26}};
  t.out_size = 40;
  const Tensor out = align_face(img, t.points, t);
  const auto gray = luminance(img);
  for (std::size_t y = 5; y < 35; ++y) {
    for (std::size_t x = 5; x < 35; ++x) EXPECT_NEAR(out.at(0, y, x), gray[y * 40 + x], 1e-9);
  }
}

TEST(Align, RecoversTranslation) {
  const Landmarks tmpl{Point{30, 35}, Point{66, 35}, Point{48, 60}};
  const Landmarks lm = transformed(tmpl, Similarity{1, 0, 5, 5});
  const Similarity s = fit_similarity(lm, tmpl);
  EXPECT_NEAR(s.tx, -5.0, 1e-9);
  EXPECT_NEAR(s.ty, -5.0, 1e-9);
  EXPECT_NEAR(s.rotation(), 0.0, 1e-9);
  EXPECT_NEAR(s.scale(), 1.0, 1e-9);
}

TEST(Align, RecoversQuarterTurn) {
  const Landmarks tmpl{Point{30, 35}, Point{66, 35}, Point{48, 60}};
  const double cx = (30 + 66 + 48) / 3.0, cy = (35 + 35 + 60) / 3.0;
  Landmarks lm;
  for (std::size_t i = 0; i < 3; ++i) lm[i] = {cx - (tmpl[i].y - cy), cy + (tmpl[i].x - cx)};  // +90 degrees
  const Similarity s = fit_similarity(lm, tmpl);
  EXPECT_NEAR(s.rotation(), -std::numbers::pi / 2, 1e-9);
  EXPECT_NEAR(s.scale(), 1.0, 1e-9);
}

TEST(Align, RecoversRandomSimilarities) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = rng.uniform(0.3, 3.0), theta = rng.uniform(-3.0, 3.0);
    const Similarity truth{scale * std::cos(theta), scale * std::sin(theta), rng.uniform(-50, 50),
                           rng.uniform(-50, 50)};
    std::vector<Point> from(3 + trial % 4), to;
    for (auto& p : from) p = {rng.uniform(0, 100), rng.uniform(0, 100)};
    for (const auto& p : from) to.push_back(truth.apply(p));
    const Similarity s = fit_similarity(from, to);
    EXPECT_NEAR(s.scale(), scale, 1e-9);
    EXPECT_NEAR(wrap_angle(s.rotation() - theta), 0.0, 1e-9);
    EXPECT_NEAR(s.tx, truth.tx, 1e-9);
    EXPECT_NEAR(s.ty, truth.ty, 1e-9);
    for (std::size_t i = 0; i < from.size(); ++i) {
      const Point q = s.apply(from[i]);
      EXPECT_NEAR(q.x, to[i].x, 1e-9);
      EXPECT_NEAR(q.y, to[i].y, 1e-9);
      const Point back = s.invert(q);
      EXPECT_NEAR(back.x, from[i].x, 1e-9);
    }
  }
}

TEST(Align, WarpSamplesThroughTheInverseMap) {
  // Bilinear interpolation reproduces a linear ramp exactly, so the aligned
  // crop must equal the ramp evaluated at the inverse-mapped coordinates.
  const Image img = gradient_image(64, 64);
  const Landmarks src{Point{20, 22}, Point{40, 20}, Point{31, 38}};
  const Similarity to_crop{0.8 * std::cos(0.3), 0.8 * std::sin(0.3), -4.0, 3.0};
  FaceTemplate t;
  t.points = transformed(src, to_crop);
  t.out_size = 36;
  const Tensor out = align_face(img, src, t);
  std::size_t inside = 0;
  for (std::size_t v = 0; v < 36; ++v) {
    for (std::size_t u = 0; u < 36; ++u) {
      const Point p = to_crop.invert({double(u), double(v)});
      if (p.x < 0 || p.y < 0 || p.x > 63 || p.y > 63) {
        if (p.x < -1 || p.y < -1 || p.x > 64 || p.y > 64) EXPECT_EQ(out.at(0, v, u), 0.0);
        continue;
      }
      ++inside;
      EXPECT_NEAR(out.at(0, v, u), (p.x + 2 * p.y) / 255.0, 1e-9);
    }
  }
  EXPECT_GT(inside, 500u);
}

TEST(Align, RejectsDegenerateLandmarks) {
  const Landmarks tmpl{Point{30, 35}, Point{66, 35}, Point{48, 60}};
  const Landmarks line{Point{0, 0}, Point{1, 1}, Point{2, 2}};
  EXPECT_THROW(fit_similarity(line, tmpl), InputError);
  const std::vector<Point> two{Point{0, 0}, Point{1, 0}};
  EXPECT_THROW(fit_similarity(two, two), InputError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize(Tensor({2, 3}, 4.2)), Tensor({2, 3}, 0.0));
  EXPECT_EQ(normalize(Tensor::vector({0, 2})).values(), (std::vector<double>{-1, 1}));
  Rng rng(2);
  const Tensor x = test::random_tensor({1, 9, 9}, rng, 0, 5);
  const Tensor n = normalize(x);
  EXPECT_NEAR(n.sum() / 81.0, 0.0, 1e-12);
  double var = 0.0;
  for (double v : n.values()) var += v * v;
  EXPECT_NEAR(var / 81.0, 1.0, 1e-12);
  const Tensor nn = normalize(n);
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_NEAR(nn[i], n[i], 1e-9);
}

TEST(FillGaps, Examples) {
  using O = std::optional<double>;
  const std::vector<O> mid{1.0, std::nullopt, 3.0};
  const auto a = fill_gaps(mid);
  EXPECT_EQ(a.values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(a.mask, (std::vector<std::uint8_t>{0, 1, 0}));
  const std::vector<O> lead{std::nullopt, std::nullopt, 5.0};
  const auto b = fill_gaps(lead);
  EXPECT_EQ(b.values, (std::vector<double>{5, 5, 5}));
  EXPECT_EQ(b.mask, (std::vector<std::uint8_t>{1, 1, 0}));
  const std::vector<O> ramp{0.0, std::nullopt, std::nullopt, std::nullopt, 4.0};
  EXPECT_EQ(fill_gaps(ramp).values, (std::vector<double>{0, 1, 2, 3, 4}));
  const std::vector<O> none{std::nullopt, std::nullopt};
  EXPECT_THROW(fill_gaps(none), InputError);
}

TEST(FillGaps, PresentValuesUntouched) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 30;
    std::vector<double> v(n);
    std::vector<std::uint8_t> miss(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.uniform(-1, 1);
      miss[i] = rng.bernoulli(0.4);
    }
    miss[rng.engine()() % n] = 0;
    const auto f = fill_gaps(v, miss);
    for (std::size_t i = 0; i < n; ++i) {
      if (!miss[i]) EXPECT_EQ(f.values[i], v[i]);
      EXPECT_EQ(f.mask[i], miss[i]);
    }
    const std::vector<std::uint8_t> nothing(n, 0);
    EXPECT_EQ(fill_gaps(v, nothing).values, v);
  }
}

TEST(Windows, Examples) {
  Rng rng(4);
  FeatureTimeline tl{"s", test::random_tensor({5, 2}, rng), {0.1, 0.2, 0.3, 0.4, 0.5}, {0, 0, 1, 0, 0}};
  const auto w = make_windows(tl, 2);
  ASSERT_EQ(w.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(w[i].end, i + 1);
    EXPECT_EQ(w[i].labels.values(), (std::vector<double>{tl.labels[i], tl.labels[i + 1]}));
    EXPECT_EQ(w[i].features.at(1, 1), tl.features.at(i + 1, 1));
  }
  FeatureTimeline three{"t", Tensor({3, 2}), {0, 0, 0}, {0, 0, 0}};
  const auto one = make_windows(three, 3);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].end, 2u);
  EXPECT_THROW(make_windows(three, 4), InputError);
}

TEST(Windows, CountProperty) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng.engine()() % 60, W = 1 + rng.engine()() % T;
    FeatureTimeline tl{"p", Tensor({T, 1}), std::vector<double>(T, 0.0), std::vector<std::uint8_t>(T, 0)};
    const auto w = make_windows(tl, W);
    ASSERT_EQ(w.size(), T - W + 1);
    EXPECT_EQ(window_count(T, W), T - W + 1);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i].end, W - 1 + i);
  }
}

TEST(FeatureGaps, InterpolatesFlaggedRows) {
  Tensor f({4, 2}, {0, 10, 99, 99, 99, 99, 3, 40});
  const auto mask = fill_feature_gaps(f, {0, 1, 1, 0});
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(f.values(), (std::vector<double>{0, 10, 1, 20, 2, 30, 3, 40}));
}

TEST(FeatureFile, RoundTripIsExact) {
  TempDir dir;
  Rng rng(6);
  FeatureTimeline tl{"seq_b", test::random_tensor({7, 3}, rng), {}, std::vector<std::uint8_t>{0, 1, 0, 0, 0, 1, 0}};
  for (int i = 0; i < 7; ++i) tl.labels.push_back(rng.uniform(-1, 1));
  const std::string bytes = encode_timeline(tl);
  EXPECT_EQ(bytes.substr(0, 5), "AFFT1");
  const FeatureTimeline back = decode_timeline(bytes);
  EXPECT_EQ(back.sequence_id, "seq_b");
  EXPECT_EQ(back.features, tl.features);
  EXPECT_EQ(back.labels, tl.labels);
  EXPECT_EQ(back.mask, tl.mask);

  FeatureTimeline unlabeled = tl;
  unlabeled.sequence_id = "seq_a";
  unlabeled.labels.clear();
  save_timeline(dir.path / "b.afft", tl);
  save_timeline(dir.path / "a.afft", unlabeled);
  const auto all = load_timelines(dir.path);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].sequence_id, "seq_a");
  EXPECT_FALSE(all[0].has_labels());
  EXPECT_THROW(decode_timeline(bytes.substr(0, bytes.size() - 1)), InputError);
  EXPECT_THROW(decode_timeline("AFFT0" + bytes.substr(5)), InputError);
  FeatureTimeline bad = tl;
  bad.mask.pop_back();
  EXPECT_THROW(bad.validate(), ShapeError);
}

TEST(PrepareDataset, AlignsNormalizesAndFillsGold) {
  TempDir dir;
  const Image img = gradient_image(32, 32);
  write_pnm(dir.path / "f0.pgm", img);
  write_pnm(dir.path / "f2.pgm", img);
  const std::string text = manifest({"a,0,0.00,f0.pgm,1,10,12,22,12,16,20,0.2", miss_row("a", 1),
                                     "a,2,0.08,f2.pgm,1,10,12,22,12,16,20,0.6"});
  write_file(dir.path / "m.csv", text);
  FaceTemplate t;
  t.points = {Point{10, 12}, Point{22, 12}, Point{16, 20}};
  t.out_size = 32;
  const auto a = prepare_dataset(load_manifest(dir.path / "m.csv"), t);
  const auto b = prepare_dataset(load_manifest(dir.path / "m.csv"), t);
  ASSERT_EQ(a.size(), 1u);
  const auto& s = a[0];
  EXPECT_EQ(s.face_found, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_TRUE(s.images[1].empty());
  EXPECT_EQ(s.images[0].shape(), (Shape{1, 32, 32}));
  EXPECT_NEAR(s.images[0].sum(), 0.0, 1e-9);
  EXPECT_NEAR(s.gold[1], 0.4, 1e-15);
  EXPECT_EQ(s.gold_mask, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(b[0].images[2], s.images[2]);
}
