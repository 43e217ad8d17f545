#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "faceval/formats.hpp"
#include "support.hpp"

using namespace faceval;
using namespace faceval::testing;

namespace {

const std::filesystem::path kFixtures = FACEVAL_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("ald and l2ld") {
  const auto sq = fixture("sq_pred.json"), gt = fixture("sq_gt.json");

  auto r = run({"ald", "--pred", sq, "--gt", sq});
  CHECK(r.code == 0);
  CHECK(r.out == "0.000000\n");

  r = run({"ald", "--pred", sq, "--gt", gt, "--stat", "objective"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.250000\n");

  r = run({"ald", "--pred", sq, "--gt", gt, "--stat", "mean"});
  CHECK(r.out == "0.250000\n");

  r = run({"l2ld", "--pred", sq, "--gt", gt, "--stat", "objective"});
  CHECK(r.out == "1.000000\n");

  r = run({"ald", "--pred", sq, "--gt", gt, "--json"});
  REQUIRE(r.code == 0);
  const DistanceReport report = parse_distance_report(r.out);
  CHECK(report.objective == doctest::Approx(0.25).epsilon(1e-12));
  REQUIRE(report.per_point.size() == 4);
  for (double d : report.per_point) CHECK(d == doctest::Approx(0.25).epsilon(1e-9));
  REQUIRE(report.transform);

  r = run({"ald", "--pred", sq, "--gt", gt, "--oracle"});
  CHECK(r.code == 0);
  CHECK(r.out == "closed_form 0.250000\noracle 0.250000\n");

  r = run({"ald", "--pred", sq, "--gt", gt, "--oracle", "--json"});
  CHECK(nlohmann::json::parse(r.out).contains("oracle"));

  r = run({"ald", "--pred", sq, "--gt", gt, "--group", "all", "--stat", "rms"});
  CHECK(r.out == "0.250000\n");
}

TEST_CASE("exit codes and error reporting") {
  const auto sq = fixture("sq_pred.json");
  TempDir dir("cli_codes");

  auto r = run({});
  CHECK(r.code == 1);
  r = run({"ald", "--pred", sq});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("UsageError:", 0) == 0);
  r = run({"ald", "--pred", sq, "--gt", sq, "--stat", "median"});
  CHECK(r.code == 1);
  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("select-ref") != std::string::npos);

  r = run({"ald", "--pred", fixture("malformed/lm_syntax.json"), "--gt", sq});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("JsonSyntax:", 0) == 0);
  r = run({"ald", "--pred", (dir / "missing.json").string(), "--gt", sq});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("IoError:", 0) == 0);

  write_file(dir / "line.json", R"({"version":1,"points":[[0,0],[1,1],[2,2],[3,3]]})");
  r = run({"ald", "--pred", (dir / "line.json").string(), "--gt", sq});
  CHECK(r.code == 3);
  CHECK(r.err.rfind("DegenerateGeometry:", 0) == 0);

  r = run({"ald", "--pred", sq, "--gt", sq, "--group", "nose"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("UnknownGroup:", 0) == 0);

  r = run({"mask", "--heatmap", fixture("constant.hmf"), "--resize", "0x4", "-o", (dir / "m.pfm").string()});
  CHECK(r.code == 1);
}

TEST_CASE("mask, blend and sobel") {
  TempDir dir("cli_image");
  const auto mask_path = (dir / "mask.pfm").string();

  auto r = run({"mask", "--heatmap", fixture("constant.hmf"), "-o", mask_path});
  REQUIRE(r.code == 0);
  const ScalarField zeros = read_field(read_file(mask_path));
  CHECK(zeros.width == 4);
  CHECK(zeros.height == 4);
  for (float v : zeros.values) CHECK(v == 0.0f);

  r = run({"mask", "--heatmap", fixture("constant.hmf"), "--resize", "8x6", "-o", mask_path});
  REQUIRE(r.code == 0);
  CHECK(read_field(read_file(mask_path)).width == 8);

  // Zero mask keeps the background, so the blend is uniform gray.
  const Image red = Image::constant(3, 4, 6, 0.0f);
  write_file(dir / "in.pfm", write_image(red, ImageFormat::pfm));
  write_file(dir / "mask.pfm", write_field(ScalarField(8, 6, std::vector<float>(48, 0.0f))));
  r = run({"blend", "--image", (dir / "in.pfm").string(), "--mask", mask_path, "-o", (dir / "out.pfm").string()});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("DimensionMismatch:", 0) == 0);

  write_file(dir / "mask.pfm", write_field(ScalarField(4, 6, std::vector<float>(24, 0.0f))));
  r = run({"blend", "--image", (dir / "in.pfm").string(), "--mask", mask_path, "--background", "0.25", "-o",
           (dir / "out.pfm").string()});
  REQUIRE(r.code == 0);
  const Image out = read_image(read_file(dir / "out.pfm"));
  for (float v : out.values) CHECK(v == 0.25f);

  r = run({"blend", "--image", (dir / "in.pfm").string(), "--mask", mask_path, "--background", "1.5", "-o",
           (dir / "out.pfm").string()});
  CHECK(r.code == 1);

  std::vector<float> step(5 * 5, 0.0f);
  for (int y = 0; y < 5; ++y)
    for (int x = 3; x < 5; ++x) step[static_cast<std::size_t>(y * 5 + x)] = 1.0f;
  write_file(dir / "step.pfm", write_field(ScalarField(5, 5, step)));
  r = run({"sobel", "--image", (dir / "step.pfm").string(), "-o", (dir / "edges.pfm").string()});
  REQUIRE(r.code == 0);
  const ScalarField edges = read_field(read_file(dir / "edges.pfm"));
  CHECK(edges.at(2, 2) == doctest::Approx(4.0));
  CHECK(edges.at(0, 2) == 0.0f);
}

TEST_CASE("id") {
  auto r = run({"id", "--a", fixture("emb_a.json"), "--b", fixture("emb_b.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "1.000000\n");
  r = run({"id", "--a", fixture("emb_a.json"), "--b", fixture("emb_b.json"), "--degrees"});
  CHECK(r.out == "45.000000\n");
  r = run({"id", "--a", fixture("emb_a.json"), "--b", fixture("malformed/emb_dup.json")});
  CHECK(r.err.rfind("DuplicateExtractor:", 0) == 0);
}

TEST_CASE("select-ref") {
  TempDir dir("cli_select");
  Rng rng(3);
  const LandmarkSet lq = with_default_groups(random_landmarks(rng, 68));
  write_file(dir / "lq.json", write_landmarks(lq));
  write_file(dir / "r0.json", write_landmarks(random_landmarks(rng, 68)));
  write_file(dir / "r1.json", write_landmarks(noisy_affine_copy(rng, lq, 0.5)));
  write_file(dir / "r2.json", write_landmarks(random_landmarks(rng, 68)));
  const auto r1 = (dir / "r1.json").string();
  auto r = run({"select-ref", "--lq", (dir / "lq.json").string(), "--refs", (dir / "r0.json").string(), r1,
                (dir / "r2.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "1\t" + r1 + "\n");
}

TEST_CASE("report") {
  TempDir dir("cli_report");
  Rng rng(4);
  write_file(dir / "pairs.csv", write_batch_fixture(dir.path(), rng, 30, 10));
  const auto pairs = (dir / "pairs.csv").string();

  auto r = run({"report", "--pairs", pairs, "--threads", "1", "-o", (dir / "a.csv").string()});
  CHECK(r.code == 4);
  CHECK(r.err.find("item9 skipped: IoError") != std::string::npos);
  r = run({"-q", "report", "--pairs", pairs, "--threads", "8", "-o", (dir / "b.csv").string()});
  CHECK(r.code == 4);
  CHECK(r.err.empty());
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));

  r = run({"report", "--pairs", pairs, "--format", "json", "-o", (dir / "a.json").string()});
  CHECK(r.code == 4);
  const EvalSummary summary = parse_report_json(read_file(dir / "a.json"));
  CHECK(summary.records.size() == 30);
  CHECK(summary.skipped_count() == 3);

  ::setenv("FACEVAL_THREADS", "3", 1);
  r = run({"report", "--pairs", pairs, "-o", (dir / "c.csv").string()});
  ::unsetenv("FACEVAL_THREADS");
  CHECK(read_file(dir / "c.csv") == read_file(dir / "a.csv"));

  write_file(dir / "empty.csv", "item_id,pred,gt\n");
  r = run({"report", "--pairs", (dir / "empty.csv").string(), "-o", (dir / "e.csv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("EmptyBatch:", 0) == 0);
}

TEST_CASE("render") {
  TempDir dir("cli_render");
  const auto out = (dir / "a.svg").string();
  auto r = run({"render", "--landmarks", fixture("sq_pred.json"), "--gt", fixture("sq_gt.json"), "-o", out});
  REQUIRE(r.code == 0);
  const std::string svg = read_file(out);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("class=\"pred\"") != std::string::npos);
  CHECK(svg.find("class=\"gt\"") != std::string::npos);
  run({"render", "--landmarks", fixture("sq_pred.json"), "--gt", fixture("sq_gt.json"), "-o", (dir / "b.svg").string()});
  CHECK(read_file(dir / "b.svg") == svg);
}
