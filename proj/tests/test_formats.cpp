#include <doctest.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "faceval/error.hpp"
#include "faceval/formats.hpp"
#include "support.hpp"

using namespace faceval;
using namespace faceval::testing;

namespace {

const std::filesystem::path kFixtures = FACEVAL_FIXTURES;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::UsageError;
}

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Hand-rolled generator of valid landmark files (independent of the writer).
std::string random_landmark_file(Rng& rng) {
  const std::size_t n = 1 + rng() % 80;
  std::string s = "{\"points\": [";
  for (std::size_t i = 0; i < n; ++i) {
    s += (i ? ", [" : "[") + g9(uniform(rng, -50.0, 600.0)) + "," + g9(uniform(rng, -50.0, 600.0)) + "]";
  }
  s += "], \"version\": 1, \"groups\": {";
  const int groups = static_cast<int>(rng() % 4);
  for (int g = 0; g < groups; ++g) {
    s += (g ? ", \"" : "\"") + std::string("g") + std::to_string(rng() % 1000) + "_" + std::to_string(g) + "\": [";
    const std::size_t m = rng() % (n + 1);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < m; ++i) s += (i ? "," : "") + std::to_string(idx[i]);
    s += "]";
  }
  s += "}";
  if (rng() % 2) s += ", \"image_size\": [" + std::to_string(1 + rng() % 2048) + ", " + std::to_string(1 + rng() % 2048) + "]";
  s += "}";
  return s;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

std::vector<float> random_floats(Rng& rng, std::size_t n, float lo, float hi) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(uniform(rng, lo, hi));
  return v;
}

}  // namespace

TEST_CASE("parse_landmarks: minimal file and warnings") {
  Warnings warnings;
  const auto set = parse_landmarks(R"({"version":1,"points":[[0,0],[1,0],[0,1]],"groups":{"all":[0,1,2]},"note":"x"})",
                                   &warnings);
  CHECK(set.size() == 3);
  CHECK(set.groups.at("all") == IndexList{0, 1, 2});
  CHECK(!set.image_size);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("note") != std::string::npos);

  try {
    parse_landmarks(R"({"version":1,"points":[[0,0],[1,0],[0,1]],"groups":{"eyes":[0,99]}})");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(std::string(e.what()).find("groups.eyes") != std::string::npos);
  }

  try {
    parse_landmarks("{\n  \"version\": 1,\n  \"points\": [[0, 0],,]\n}");
    FAIL("expected JsonSyntax");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JsonSyntax);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("write_landmarks: canonical form") {
  LandmarkSet set = make_landmarks({{1.5, 2}, {0.123456789012, -3}});
  set.groups["b"] = {1};
  set.groups["a"] = {0};
  const std::string text = write_landmarks(set);
  CHECK(text ==
        "{\n  \"version\": 1,\n  \"points\": [\n    [1.5, 2],\n    [0.123456789, -3]\n  ],\n"
        "  \"groups\": {\n    \"a\": [0],\n    \"all\": [0, 1],\n    \"b\": [1]\n  }\n}\n");
  CHECK(write_landmarks(set) == text);

  LandmarkSet bare;
  bare.points = {{0, 0}};
  bare.image_size = ImageSize{640, 480};
  const std::string t2 = write_landmarks(bare);
  CHECK(t2.find("\"groups\": {}") != std::string::npos);
  CHECK(t2.find("\"image_size\": [640, 480]") != std::string::npos);
  bare.image_size.reset();
  CHECK(write_landmarks(bare).find("image_size") == std::string::npos);
}

TEST_CASE("landmark files round-trip through the canonical writer") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string file = random_landmark_file(rng);
    const LandmarkSet first = parse_landmarks(file);
    const std::string canonical = write_landmarks(first);
    const LandmarkSet second = parse_landmarks(canonical);
    CHECK(second == first);
    CHECK(write_landmarks(second) == canonical);
  }
}

TEST_CASE("weights") {
  CHECK(parse_weights("[1, 2.5]") == WeightVector({1.0, 2.5}));
  CHECK(parse_weights(R"({"weights": [3]})") == WeightVector({3.0}));
  CHECK(code_of([] { parse_weights("[]"); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([] { parse_weights("[0]"); }) == ErrorCode::InvalidWeights);
}

TEST_CASE("embeddings") {
  const auto bundle = parse_embeddings(R"([{"extractor":"arc","vector":[1,0]}])");
  REQUIRE(bundle.entries.size() == 1);
  CHECK(bundle.entries[0].vector == std::vector<double>{1.0, 0.0});
  CHECK(code_of([] { parse_embeddings(R"([{"extractor":"arc","vector":[1]},{"extractor":"arc","vector":[2]}])"); }) ==
        ErrorCode::DuplicateExtractor);

  Rng rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingBundle b;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < count; ++i) {
      Embedding e{"net" + std::to_string(i), std::vector<double>(1 + rng() % 600)};
      for (double& v : e.vector) v = n(rng) * std::pow(10.0, uniform(rng, -30, 30));
      b.entries.push_back(std::move(e));
    }
    const std::string text = write_embeddings(b);
    CHECK(parse_embeddings(text) == b);
    CHECK(write_embeddings(parse_embeddings(text)) == text);
  }
}

TEST_CASE("HMF1 heatmaps") {
  std::string one = "HMF1 1 1 1\n";
  const float half = 0.5f;
  const auto bits = std::bit_cast<std::uint32_t>(half);
  for (int i = 0; i < 4; ++i) one.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  const Heatmap hm = read_heatmap(one);
  CHECK(hm.channels == 1);
  CHECK(hm.width == 1);
  CHECK(hm.height == 1);
  CHECK(hm.values == std::vector<float>{0.5f});
  CHECK(write_heatmap(hm) == one);

  CHECK(code_of([&] { read_heatmap("HMF1 2 1 1\n" + one.substr(11)); }) == ErrorCode::TruncatedPayload);

  Rng rng(77);
  Heatmap big{68, 64, 64, random_floats(rng, 68 * 64 * 64, -1.0f, 5.0f)};
  const Heatmap back = read_heatmap(write_heatmap(big));
  CHECK(back.channels == 68);
  CHECK(back.width == 64);
  CHECK(back.height == 64);
  CHECK(bit_equal(back.values, big.values));

  // Grayscale PFM is accepted as a single channel.
  ScalarField f(3, 2, std::vector<float>{0, 1, 2, 3, 4, 5});
  const Heatmap from_pfm = read_heatmap(write_field(f));
  CHECK(from_pfm.channels == 1);
  CHECK(from_pfm.values == f.values);
}

TEST_CASE("netpbm images") {
  const std::string red = std::string("P6\n1 1\n255\n") + '\xff' + '\0' + '\0';
  const Image img = read_image(red);
  CHECK(img.channels == 3);
  CHECK(img.values == std::vector<float>{1.0f, 0.0f, 0.0f});
  CHECK(write_image(img, ImageFormat::ppm) == red);

  // P5 with a comment in the header.
  std::string gray = "P5\n# comment\n3 2\n255\n";
  for (int i = 0; i < 6; ++i) gray.push_back(static_cast<char>(i * 50));
  const Image g = read_image(gray);
  CHECK(g.width == 3);
  CHECK(g.height == 2);
  CHECK(g.values[1] == static_cast<float>(50 / 255.0));

  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    std::string p5 = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (int i = 0; i < w * h; ++i) p5.push_back(static_cast<char>(rng() % 256));
    CHECK(write_image(read_image(p5), ImageFormat::pgm) == p5);
  }

  CHECK(code_of([&] { write_image(img, ImageFormat::pgm); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { read_image(red + "x"); }) == ErrorCode::TrailingBytes);
}

TEST_CASE("PFM fields, masks and images round-trip bit-exactly") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 50), h = 1 + static_cast<int>(rng() % 50);
    const ScalarField f(w, h, random_floats(rng, static_cast<std::size_t>(w) * h, 0.0f, 1.0f));
    const Mask m(f);
    const Mask back = read_mask(write_field(m.field()));
    CHECK(bit_equal(back.field().values, f.values));
    CHECK(back.width() == w);

    Image img = Image::constant(3, w, h, 0.0f);
    img.values = random_floats(rng, img.values.size(), 0.0f, 1.0f);
    CHECK(read_image(write_image(img, ImageFormat::pfm)) == img);
  }
  // PFM rows are stored bottom-up.
  const std::string text = write_field(ScalarField(1, 2, std::vector<float>{1.0f, 2.0f}));
  float first = 0;
  std::memcpy(&first, text.data() + text.size() - 8, 4);
  CHECK(first == 2.0f);
}

TEST_CASE("big-endian PFM is honoured") {
  std::string be = "Pf\n2 1\n1.0\n";
  for (float v : {0.25f, 0.75f}) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 3; i >= 0; --i) be.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  CHECK(read_field(be).values == std::vector<float>{0.25f, 0.75f});
}

TEST_CASE("malformed corpus produces the declared error classes") {
  std::ifstream manifest(kFixtures / "malformed" / "manifest.txt");
  REQUIRE(manifest);
  std::string name, kind, code;
  int checked = 0;
  while (manifest >> name >> kind >> code) {
    const std::string bytes = read_file(kFixtures / "malformed" / name);
    std::string got = "none";
    try {
      if (kind == "landmarks") parse_landmarks(bytes);
      else if (kind == "embeddings") parse_embeddings(bytes);
      else if (kind == "heatmap") read_heatmap(bytes);
      else if (kind == "image") read_image(bytes);
      else if (kind == "weights") parse_weights(bytes);
    } catch (const Error& e) {
      got = std::string(e.name());
    }
    INFO(name);
    CHECK(got == code);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("distance report JSON round-trips") {
  DistanceReport r;
  r.objective = 0.25;
  r.rms = 0.1 + 0.2;
  r.mean_dist = 1.0 / 3.0;
  r.per_point = {0.25, 1e-300, 7.0};
  r.group = "eyes_region";
  AffineFit fit;
  fit.matrix = AffineMatrix::from_rows(1.0 / 7.0, 2, 3, 4, 5, -6.5);
  fit.residuals = r.per_point;
  fit.objective = r.objective;
  r.transform = fit;

  const DistanceReport back = parse_distance_report(write_distance_report(r));
  CHECK(back.objective == r.objective);
  CHECK(back.rms == r.rms);
  CHECK(back.mean_dist == r.mean_dist);
  CHECK(back.per_point == r.per_point);
  CHECK(back.group == r.group);
  REQUIRE(back.transform);
  CHECK(back.transform->matrix == fit.matrix);

  r.transform.reset();
  CHECK(!parse_distance_report(write_distance_report(r)).transform);
}

TEST_CASE("write_report") {
  EvalSummary empty = summarize({});
  CHECK(write_report(empty, ReportFormat::csv) ==
        "item_id,status,ald_all,ald_eyes,ald_mouth,l2ld,id_loss,deg\nMEAN,,,,,,,\n");

  EvalRecord one{"x", {{Metric::ald_all, 1.25}, {Metric::l2ld, 2.0}}, {}};
  const std::string csv = write_report(summarize({one}), ReportFormat::csv);
  CHECK(csv.find("x,ok,1.250000,,,2.000000,,\nMEAN,,1.250000,,,2.000000,,\n") != std::string::npos);

  std::vector<EvalRecord> records;
  records.push_back({"a", {{Metric::ald_all, 0.25}, {Metric::ald_eyes, 0.1}, {Metric::l2ld, 1.5}}, {}});
  records.push_back(
      {"b,x", {{Metric::ald_all, 0.75}, {Metric::l2ld, 0.5}, {Metric::id_loss, 0.2}, {Metric::deg, 12.5}}, {}});
  records.push_back({"c", {}, {false, "IoError", "cannot open 'c.json'"}});
  const EvalSummary summary = summarize(records);
  CHECK(write_report(summary, ReportFormat::csv) == read_file(kFixtures / "report_golden.csv"));

  const std::string json = write_report(summary, ReportFormat::json);
  CHECK(parse_report_json(json) == summary);
  CHECK(write_report(parse_report_json(json), ReportFormat::json) == json);
}
