#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "faceval/affine.hpp"
#include "faceval/evaluator.hpp"
#include "faceval/formats.hpp"
#include "faceval/identity.hpp"
#include "faceval/mask.hpp"
#include "faceval/oracle.hpp"
#include "faceval/svg.hpp"

namespace faceval::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UsageError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::NonPositiveParam:
      return kUsage;
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::GroupTooSmall:
    case ErrorCode::AllDegenerate:
    case ErrorCode::NoConvergence:
      return kDegenerate;
    default:
      return kFormat;
  }
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool quiet = false;
  int verbosity = 0;

  void warn(const std::string& msg) const {
    if (!quiet) err << "warning: " << msg << "\n";
  }
  void info(const std::string& msg) const {
    if (verbosity > 0) err << msg << "\n";
  }
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

LandmarkSet load_landmarks(const Context& ctx, const std::string& path) {
  Warnings warnings;
  LandmarkSet set = parse_landmarks(read_file(path), &warnings);
  for (const auto& w : warnings) ctx.warn(path + ": " + w);
  return with_default_groups(std::move(set));
}

WeightVector load_weights(const std::string& path, std::size_t n) {
  if (path.empty()) return WeightVector::uniform(n);
  WeightVector w = parse_weights(read_file(path));
  if (w.size() != n) {
    throw Error(ErrorCode::CountMismatch, "weights file has " + std::to_string(w.size()) + " entries for " +
                                              std::to_string(n) + " landmarks");
  }
  return w;
}

// "all" names the whole set unless the files define such a group.
std::optional<std::string_view> resolve_group(const std::string& group, const LandmarkSet& a,
                                              const LandmarkSet& b) {
  if (group.empty()) return std::nullopt;
  if (group == kAllGroup && (a.find_group(group) == nullptr || b.find_group(group) == nullptr)) {
    return std::nullopt;
  }
  return group;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  int w = 0, h = 0;
  bool ok = x != std::string::npos;
  if (ok) {
    auto r1 = std::from_chars(text.data(), text.data() + x, w);
    auto r2 = std::from_chars(text.data() + x + 1, text.data() + text.size(), h);
    ok = r1.ec == std::errc() && r1.ptr == text.data() + x && r2.ec == std::errc() &&
         r2.ptr == text.data() + text.size() && w > 0 && h > 0;
  }
  if (!ok) throw Error(ErrorCode::UsageError, "--resize expects WxH with positive integers, got '" + text + "'");
  return {w, h};
}

// ---------------------------------------------------------------------------

struct DistanceArgs {
  std::string pred, gt, group, weights;
  std::string stat = "mean";
  bool json = false;
  bool oracle = false;
};

DistanceReport report_from_fit(const AffineFit& fit, const WeightVector& w, std::string group) {
  DistanceReport r;
  double sw = 0.0, wr = 0.0;
  for (std::size_t k = 0; k < fit.residuals.size(); ++k) {
    sw += w[k];
    wr += w[k] * fit.residuals[k];
  }
  r.objective = fit.objective;
  r.rms = std::sqrt(fit.objective / sw);
  r.mean_dist = wr / sw;
  r.per_point = fit.residuals;
  r.transform = fit;
  r.group = std::move(group);
  return r;
}

int run_distance(const Context& ctx, const DistanceArgs& a, bool affine) {
  const Statistic stat = *parse_statistic(a.stat);
  const LandmarkSet pred = load_landmarks(ctx, a.pred);
  const LandmarkSet gt = load_landmarks(ctx, a.gt);
  const WeightVector w = load_weights(a.weights, pred.size());
  const auto group = resolve_group(a.group, pred, gt);

  const DistanceReport report =
      affine ? affine_landmark_distance(pred, gt, w, group) : l2_landmark_distance(pred, gt, w, group);

  std::optional<DistanceReport> oracle_report;
  if (a.oracle) {
    const LandmarkSet p = group ? subset_by_group(pred, *group) : pred;
    const LandmarkSet g = group ? subset_by_group(gt, *group) : gt;
    const WeightVector ws = group ? w.subset(*pred.find_group(*group)) : w;
    oracle_report = report_from_fit(oracle::fit_affine_iterative(p, g, ws), ws, report.group);
  }

  if (a.json) {
    if (!oracle_report) {
      ctx.out << write_distance_report(report);
    } else {
      auto doc = nlohmann::json::parse(write_distance_report(report));
      doc["oracle"] = nlohmann::json::parse(write_distance_report(*oracle_report));
      ctx.out << doc.dump(2) << "\n";
    }
  } else if (oracle_report) {
    ctx.out << "closed_form " << fixed6(select_statistic(report, stat)) << "\n";
    ctx.out << "oracle " << fixed6(select_statistic(*oracle_report, stat)) << "\n";
  } else {
    ctx.out << fixed6(select_statistic(report, stat)) << "\n";
  }
  return kOk;
}

struct SelectArgs {
  std::string lq, group{kEyesRegion}, weights;
  std::vector<std::string> refs;
};

int run_select(const Context& ctx, const SelectArgs& a) {
  const LandmarkSet lq = load_landmarks(ctx, a.lq);
  std::vector<LandmarkSet> refs;
  for (const auto& path : a.refs) refs.push_back(load_landmarks(ctx, path));
  const WeightVector w = load_weights(a.weights, lq.size());
  const auto group = refs.empty() ? std::nullopt : resolve_group(a.group, lq, refs.front());

  const ReferenceSelection sel = select_reference(lq, refs, w, group);
  for (const auto& msg : sel.warnings) ctx.warn(msg);
  ctx.out << sel.index << "\t" << a.refs[sel.index] << "\n";
  ctx.info("objective " + fixed6(sel.objective));
  return kOk;
}

struct MaskArgs {
  std::string heatmap, output, resize;
  double k = kDefaultSharpness;
  double eps = kDefaultEpsilon;
};

int run_mask(const Context& ctx, const MaskArgs& a) {
  std::optional<std::pair<int, int>> size;
  if (!a.resize.empty()) size = parse_size(a.resize);

  ScalarField raw = aggregate_heatmap(read_heatmap(read_file(a.heatmap)));
  if (size) raw = resize_bilinear(raw, size->first, size->second);
  const Mask mask = normalize_mask(raw, a.k, a.eps);
  write_file(a.output, write_field(mask.field()));
  ctx.info("wrote " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) + " mask to " + a.output);
  return kOk;
}

struct BlendArgs {
  std::string image, mask, output, background_image;
  double background = kNeutralGray;
};

int run_blend(const Context& ctx, const BlendArgs& a) {
  const ImageFormat format = image_format_for(a.output);
  const Image image = read_image(read_file(a.image));
  const Mask mask = read_mask(read_file(a.mask));
  const Image bg = a.background_image.empty()
                       ? Image::constant(image.channels, image.width, image.height, static_cast<float>(a.background))
                       : read_image(read_file(a.background_image));
  write_file(a.output, write_image(blend(image, mask, bg), format));
  ctx.info("wrote " + a.output);
  return kOk;
}

int run_sobel(const Context& ctx, const std::string& image, const std::string& output) {
  write_file(output, write_field(sobel_edges(read_image(read_file(image)))));
  ctx.info("wrote " + output);
  return kOk;
}

int run_identity(const Context& ctx, const std::string& a, const std::string& b, bool degrees) {
  const EmbeddingBundle gt = parse_embeddings(read_file(a));
  const EmbeddingBundle restored = parse_embeddings(read_file(b));
  ctx.out << fixed6(degrees ? mean_embedding_degrees(gt, restored) : identity_loss(gt, restored)) << "\n";
  return kOk;
}

struct ReportArgs {
  std::string pairs, weights, emb_dir, output;
  std::string format = "csv";
  std::string stat = "mean";
  unsigned threads = 0;
};

int run_report(const Context& ctx, const ReportArgs& a) {
  const fs::path pairs_path(a.pairs);
  std::optional<fs::path> emb_dir;
  if (!a.emb_dir.empty()) emb_dir = fs::path(a.emb_dir);
  const auto items = parse_pairs_csv(read_file(pairs_path), pairs_path.parent_path(), emb_dir);

  EvalConfig config;
  config.threads = a.threads;
  config.stat = *parse_statistic(a.stat);
  if (!a.weights.empty()) config.weights = parse_weights(read_file(a.weights));

  const EvalSummary summary = batch_evaluate(items, config);
  write_file(a.output, write_report(summary, a.format == "json" ? ReportFormat::json : ReportFormat::csv));

  for (const auto& rec : summary.records) {
    if (!rec.status.ok) ctx.warn(rec.item_id + " skipped: " + rec.status.reason + ": " + rec.status.detail);
  }
  ctx.info(std::to_string(summary.ok_count()) + " ok, " + std::to_string(summary.skipped_count()) + " skipped");
  return summary.skipped_count() > 0 ? kPartialBatch : kOk;
}

struct RenderArgs {
  std::string landmarks, gt, output;
  int size = 512;
};

int run_render(const Context& ctx, const RenderArgs& a) {
  const LandmarkSet pred = load_landmarks(ctx, a.landmarks);
  std::optional<LandmarkSet> gt;
  if (!a.gt.empty()) gt = load_landmarks(ctx, a.gt);
  write_file(a.output, render_landmarks_svg(pred, gt, a.size));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};

  CLI::App app{"faceval: landmark, mask and identity metrics for face restoration evaluation", "faceval"};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", ctx.quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", ctx.verbosity, "Print progress information to stderr");

  const std::vector<std::string> stats{"mean", "rms", "objective"};

  DistanceArgs ald_args;
  auto* ald = app.add_subcommand("ald", "Affine landmark distance between a prediction and ground truth");
  ald->add_option("--pred", ald_args.pred, "Predicted landmark JSON")->required();
  ald->add_option("--gt", ald_args.gt, "Ground-truth landmark JSON")->required();
  ald->add_option("--group", ald_args.group, "Restrict to a landmark group");
  ald->add_option("--weights", ald_args.weights, "Per-landmark weights JSON");
  ald->add_option("--stat", ald_args.stat, "Statistic to print")->check(CLI::IsMember(stats));
  ald->add_flag("--json", ald_args.json, "Print the full distance report as JSON");
  ald->add_flag("--oracle", ald_args.oracle, "Also run the iterative fit")->group("");

  DistanceArgs l2_args;
  auto* l2 = app.add_subcommand("l2ld", "Pixel-wise L2 landmark distance");
  l2->add_option("--pred", l2_args.pred, "Predicted landmark JSON")->required();
  l2->add_option("--gt", l2_args.gt, "Ground-truth landmark JSON")->required();
  l2->add_option("--group", l2_args.group, "Restrict to a landmark group");
  l2->add_option("--weights", l2_args.weights, "Per-landmark weights JSON");
  l2->add_option("--stat", l2_args.stat, "Statistic to print")->check(CLI::IsMember(stats));
  l2->add_flag("--json", l2_args.json, "Print the full distance report as JSON");

  SelectArgs sel_args;
  auto* sel = app.add_subcommand("select-ref", "Pick the reference closest to the LQ landmarks");
  sel->add_option("--lq", sel_args.lq, "Landmarks of the low-quality input")->required();
  sel->add_option("--refs", sel_args.refs, "Reference landmark files")->required()->expected(1, -1);
  sel->add_option("--group", sel_args.group, "Landmark group driving the comparison")->capture_default_str();
  sel->add_option("--weights", sel_args.weights, "Per-landmark weights JSON");

  MaskArgs mask_args;
  auto* mask = app.add_subcommand("mask", "Build a normalised attention mask from a heatmap");
  mask->add_option("--heatmap", mask_args.heatmap, "HMF1 or grayscale PFM heatmap")->required();
  mask->add_option("--k", mask_args.k, "Sharpening strength")->capture_default_str()->check(CLI::PositiveNumber);
  mask->add_option("--eps", mask_args.eps, "Normalisation epsilon")->capture_default_str()->check(CLI::PositiveNumber);
  mask->add_option("--resize", mask_args.resize, "Resample the attention map to WxH before normalising");
  mask->add_option("-o,--output", mask_args.output, "Output PFM")->required();

  BlendArgs blend_args;
  auto* blend_cmd = app.add_subcommand("blend", "Blend an image against a neutral background through a mask");
  blend_cmd->add_option("--image", blend_args.image, "Input PPM/PGM/PFM")->required();
  blend_cmd->add_option("--mask", blend_args.mask, "Mask PFM or PGM")->required();
  auto* bg_level = blend_cmd->add_option("--background", blend_args.background, "Constant background level")->capture_default_str()
                       ->check(CLI::Range(0.0, 1.0));
  auto* bg_image = blend_cmd->add_option("--background-image", blend_args.background_image, "Background image");
  bg_level->excludes(bg_image);
  blend_cmd->add_option("-o,--output", blend_args.output, "Output image (.ppm, .pgm or .pfm)")->required();

  std::string sobel_image, sobel_output;
  auto* sobel = app.add_subcommand("sobel", "Sobel edge magnitude");
  sobel->add_option("--image", sobel_image, "Input PPM/PGM/PFM")->required();
  sobel->add_option("-o,--output", sobel_output, "Output PFM")->required();

  std::string id_a, id_b;
  bool id_degrees = false;
  auto* id = app.add_subcommand("id", "Identity loss or angular difference between embedding files");
  id->add_option("--a", id_a, "Ground-truth embeddings JSON")->required();
  id->add_option("--b", id_b, "Restored embeddings JSON")->required();
  id->add_flag("--degrees", id_degrees, "Print the mean angle in degrees instead");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Batch evaluation over a pairs CSV");
  report->add_option("--pairs", report_args.pairs, "CSV: item_id,pred,gt[,emb_pred,emb_gt]")->required();
  report->add_option("--weights", report_args.weights, "Per-landmark weights JSON");
  report->add_option("--emb-dir", report_args.emb_dir, "Base directory for embedding paths");
  report->add_option("-o,--output", report_args.output, "Report file")->required();
  report->add_option("--format", report_args.format, "Report format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--stat", report_args.stat, "Statistic for distance metrics")->capture_default_str()->check(CLI::IsMember(stats));
  report->add_option("--threads", report_args.threads, "Worker threads (0 = auto)")->envname("FACEVAL_THREADS");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "SVG overlay of landmark sets");
  render->add_option("--landmarks", render_args.landmarks, "Predicted landmark JSON")->required();
  render->add_option("--gt", render_args.gt, "Ground-truth landmark JSON");
  render->add_option("--size", render_args.size, "Output size in px")->capture_default_str()->check(CLI::PositiveNumber);
  render->add_option("-o,--output", render_args.output, "Output SVG")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "UsageError: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (ald->parsed()) return run_distance(ctx, ald_args, true);
    if (l2->parsed()) return run_distance(ctx, l2_args, false);
    if (sel->parsed()) return run_select(ctx, sel_args);
    if (mask->parsed()) return run_mask(ctx, mask_args);
    if (blend_cmd->parsed()) return run_blend(ctx, blend_args);
    if (sobel->parsed()) return run_sobel(ctx, sobel_image, sobel_output);
    if (id->parsed()) return run_identity(ctx, id_a, id_b, id_degrees);
    if (report->parsed()) return run_report(ctx, report_args);
    if (render->parsed()) return run_render(ctx, render_args);
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << "\n";
    return kFormat;
  }
  err << "UsageError: no subcommand given\n";
  return kUsage;
}

}  // namespace faceval::cli
