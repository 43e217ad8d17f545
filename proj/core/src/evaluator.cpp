#include "faceval/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "faceval/error.hpp"
#include "faceval/formats.hpp"
#include "faceval/identity.hpp"

namespace faceval {

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::ald_all: return "ald_all";
    case Metric::ald_eyes: return "ald_eyes";
    case Metric::ald_mouth: return "ald_mouth";
    case Metric::l2ld: return "l2ld";
    case Metric::id_loss: return "id_loss";
    case Metric::deg: return "deg";
  }
  return "";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  for (Metric m : kMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string ItemStatus::label() const { return ok ? "ok" : "skipped:" + reason; }

std::size_t EvalSummary::ok_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const EvalRecord& r) { return r.status.ok; }));
}

EvalSummary summarize(std::vector<EvalRecord> records) {
  EvalSummary summary;
  std::map<Metric, double> sums;
  for (Metric m : kMetrics) {
    summary.per_metric[m] = {};
    sums[m] = 0.0;
  }
  for (const auto& rec : records) {
    if (!rec.status.ok) continue;
    for (const auto& [metric, value] : rec.metrics) {
      sums[metric] += value;
      ++summary.per_metric[metric].count;
    }
  }
  for (auto& [metric, s] : summary.per_metric) {
    if (s.count > 0) s.mean = sums[metric] / static_cast<double>(s.count);
  }
  summary.records = std::move(records);
  return summary;
}

ReferenceSelection select_reference(const LandmarkSet& lq, std::span<const LandmarkSet> refs,
                                    const WeightVector& weights, std::optional<std::string_view> group) {
  if (refs.empty()) throw Error(ErrorCode::EmptyReferenceList, "no reference landmark sets given");

  ReferenceSelection best;
  bool found = false;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    double objective = 0.0;
    try {
      objective = affine_landmark_distance(refs[i], lq, weights, group).objective;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGeometry && e.code() != ErrorCode::GroupTooSmall) throw;
      best.warnings.push_back("reference " + std::to_string(i) + " skipped: " + std::string(e.name()) + ": " +
                              e.what());
      continue;
    }
    if (!found || objective < best.objective) {
      best.index = i;
      best.objective = objective;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::AllDegenerate, "every reference is degenerate");
  return best;
}

namespace {

LandmarkSet load_landmarks(const std::filesystem::path& path) {
  return with_default_groups(parse_landmarks(read_file(path)));
}

bool has_group_in_both(const LandmarkSet& a, const LandmarkSet& b, const std::string& name) {
  return a.find_group(name) != nullptr && b.find_group(name) != nullptr;
}

}  // namespace

EvalRecord evaluate_item(const PairingItem& item, const EvalConfig& config) {
  EvalRecord rec;
  rec.item_id = item.item_id.empty() ? item.pred.stem().string() : item.item_id;
  try {
    const LandmarkSet pred = load_landmarks(item.pred);
    const LandmarkSet gt = load_landmarks(item.gt);
    const WeightVector weights = config.weights ? *config.weights : WeightVector::uniform(pred.size());

    auto ald = [&](std::optional<std::string_view> group) {
      return select_statistic(affine_landmark_distance(pred, gt, weights, group), config.stat);
    };
    rec.metrics[Metric::ald_all] = ald(std::nullopt);
    if (has_group_in_both(pred, gt, config.eyes_group)) rec.metrics[Metric::ald_eyes] = ald(config.eyes_group);
    if (has_group_in_both(pred, gt, config.mouth_group)) rec.metrics[Metric::ald_mouth] = ald(config.mouth_group);
    rec.metrics[Metric::l2ld] = select_statistic(l2_landmark_distance(pred, gt, weights), config.stat);

    if (item.emb_pred && item.emb_gt) {
      const EmbeddingBundle a = parse_embeddings(read_file(*item.emb_pred));
      const EmbeddingBundle b = parse_embeddings(read_file(*item.emb_gt));
      rec.metrics[Metric::id_loss] = identity_loss(b, a);
      rec.metrics[Metric::deg] = mean_embedding_degrees(b, a);
    }
  } catch (const Error& e) {
    rec.metrics.clear();
    rec.status = {false, std::string(e.name()), e.what()};
  } catch (const std::exception& e) {
    rec.metrics.clear();
    rec.status = {false, "InternalError", e.what()};
  }
  return rec;
}

EvalSummary batch_evaluate(std::span<const PairingItem> items, const EvalConfig& config) {
  if (items.empty()) throw Error(ErrorCode::EmptyBatch, "batch has no items");

  std::vector<EvalRecord> records(items.size());
  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, items.size()));

  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) records[i] = evaluate_item(items[i], config);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items.size(); i = next++) records[i] = evaluate_item(items[i], config);
      });
    }
  }
  return summarize(std::move(records));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::vector<PairingItem> parse_pairs_csv(std::string_view text, const std::filesystem::path& base_dir,
                                         const std::optional<std::filesystem::path>& emb_dir) {
  std::vector<PairingItem> items;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;

    const auto fields = split_csv_line(line);
    if (items.empty() && fields[0] == "item_id") continue;
    if (fields.size() != 3 && fields.size() != 5) {
      throw Error(ErrorCode::SchemaViolation, "pairs line " + std::to_string(line_no) +
                                                  ": expected 3 or 5 columns, got " + std::to_string(fields.size()));
    }
    if (fields[1].empty() || fields[2].empty()) {
      throw Error(ErrorCode::SchemaViolation, "pairs line " + std::to_string(line_no) + ": empty landmark path");
    }
    PairingItem item;
    item.pred = resolve(base_dir, fields[1]);
    item.gt = resolve(base_dir, fields[2]);
    item.item_id = fields[0].empty() ? item.pred.stem().string() : fields[0];
    if (fields.size() == 5 && !fields[3].empty() && !fields[4].empty()) {
      const auto& eb = emb_dir ? *emb_dir : base_dir;
      item.emb_pred = resolve(eb, fields[3]);
      item.emb_gt = resolve(eb, fields[4]);
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace faceval
