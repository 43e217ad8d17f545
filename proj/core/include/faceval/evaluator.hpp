#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faceval/affine.hpp"
#include "faceval/landmarks.hpp"

namespace faceval {

/// Registered metrics, in report column order.
enum class Metric { ald_all, ald_eyes, ald_mouth, l2ld, id_loss, deg };

inline constexpr std::array kMetrics = {Metric::ald_all, Metric::ald_eyes, Metric::ald_mouth,
                                        Metric::l2ld,    Metric::id_loss,  Metric::deg};

std::string_view metric_name(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view name) noexcept;

struct ItemStatus {
  bool ok = true;
  std::string reason;  // error class name when skipped
  std::string detail;  // human-readable message when skipped

  /// "ok" or "skipped:<reason>".
  std::string label() const;

  friend bool operator==(const ItemStatus&, const ItemStatus&) = default;
};

struct EvalRecord {
  std::string item_id;
  std::map<Metric, double> metrics;
  ItemStatus status;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct MetricSummary {
  double mean = 0.0;
  std::size_t count = 0;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct EvalSummary {
  std::map<Metric, MetricSummary> per_metric;
  std::vector<EvalRecord> records;

  std::size_t ok_count() const noexcept;
  std::size_t skipped_count() const noexcept { return records.size() - ok_count(); }

  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

/// Per-metric means over ok records, accumulated in record order.
EvalSummary summarize(std::vector<EvalRecord> records);

struct ReferenceSelection {
  std::size_t index = 0;
  double objective = 0.0;
  std::vector<std::string> warnings;  // one per skipped degenerate reference
};

/// Index of the reference with the smallest affine landmark distance
/// objective d(ref_i, lq); ties go to the smallest index. Degenerate
/// references are skipped with a warning.
///
/// Throws EmptyReferenceList, AllDegenerate, and non-geometric input errors.
ReferenceSelection select_reference(const LandmarkSet& lq, std::span<const LandmarkSet> refs,
                                    const WeightVector& weights,
                                    std::optional<std::string_view> group = std::nullopt);

struct PairingItem {
  std::string item_id;
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::optional<std::filesystem::path> emb_pred;
  std::optional<std::filesystem::path> emb_gt;
};

struct EvalConfig {
  unsigned threads = 1;  // 0 = hardware concurrency
  Statistic stat = Statistic::mean;
  std::string eyes_group{kEyesRegion};
  std::string mouth_group{kMouthOuter};
  std::optional<WeightVector> weights;  // uniform when empty
};

/// Evaluates one pairing. Never throws for per-item problems: the record
/// is marked skipped with the error class as its reason.
EvalRecord evaluate_item(const PairingItem& item, const EvalConfig& config);

/// One record per item, in input order regardless of worker count.
/// Throws EmptyBatch.
EvalSummary batch_evaluate(std::span<const PairingItem> items, const EvalConfig& config);

/// Reads "item_id,pred,gt[,emb_pred,emb_gt]" rows. An optional header row
/// starting with "item_id" is skipped, as are blank lines and '#' comments.
/// Relative landmark paths resolve against `base_dir`; relative embedding
/// paths against `emb_dir` when given, else `base_dir`. An empty item_id
/// becomes the prediction file stem.
std::vector<PairingItem> parse_pairs_csv(std::string_view text, const std::filesystem::path& base_dir,
                                         const std::optional<std::filesystem::path>& emb_dir = std::nullopt);

}  // namespace faceval
