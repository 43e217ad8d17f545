#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "faceval/error.hpp"
#include "faceval/formats.hpp"

namespace faceval {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string write_csv(const EvalSummary& summary) {
  std::string out = "item_id,status";
  for (Metric m : kMetrics) {
    out += ',';
    out += metric_name(m);
  }
  out += '\n';

  for (const auto& rec : summary.records) {
    out += csv_field(rec.item_id);
    out += ',';
    out += csv_field(rec.status.label());
    for (Metric m : kMetrics) {
      out += ',';
      if (auto it = rec.metrics.find(m); it != rec.metrics.end()) out += fixed6(it->second);
    }
    out += '\n';
  }

  out += "MEAN,";
  for (Metric m : kMetrics) {
    out += ',';
    if (auto it = summary.per_metric.find(m); it != summary.per_metric.end() && it->second.count > 0) {
      out += fixed6(it->second.mean);
    }
  }
  out += '\n';
  return out;
}

std::string write_json(const EvalSummary& summary) {
  ordered_json per_metric = ordered_json::object();
  for (Metric m : kMetrics) {
    MetricSummary s;
    if (auto it = summary.per_metric.find(m); it != summary.per_metric.end()) s = it->second;
    per_metric[std::string(metric_name(m))] = {{"mean", s.count > 0 ? ordered_json(s.mean) : ordered_json(nullptr)},
                                               {"count", s.count}};
  }
  ordered_json records = ordered_json::array();
  for (const auto& rec : summary.records) {
    ordered_json metrics = ordered_json::object();
    for (Metric m : kMetrics) {
      if (auto it = rec.metrics.find(m); it != rec.metrics.end()) metrics[std::string(metric_name(m))] = it->second;
    }
    ordered_json r = {{"item_id", rec.item_id}, {"status", rec.status.label()}};
    if (!rec.status.ok) r["detail"] = rec.status.detail;
    r["metrics"] = std::move(metrics);
    records.push_back(std::move(r));
  }
  ordered_json doc = {{"per_metric", std::move(per_metric)}, {"records", std::move(records)}};
  return doc.dump(2) + "\n";
}

[[noreturn]] void report_error(const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "report: " + what);
}

}  // namespace

std::string write_report(const EvalSummary& summary, ReportFormat format) {
  return format == ReportFormat::csv ? write_csv(summary) : write_json(summary);
}

EvalSummary parse_report_json(std::string_view bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::JsonSyntax, e.what());
  }
  if (!doc.is_object() || !doc.contains("per_metric") || !doc.contains("records")) {
    report_error("expected per_metric and records");
  }

  EvalSummary summary;
  for (const auto& [name, entry] : doc["per_metric"].items()) {
    auto metric = parse_metric(name);
    if (!metric) report_error("unknown metric '" + name + "'");
    if (!entry.is_object() || !entry.contains("count")) report_error("bad per_metric entry '" + name + "'");
    MetricSummary s;
    s.count = entry["count"].get<std::size_t>();
    if (entry.contains("mean") && !entry["mean"].is_null()) s.mean = entry["mean"].get<double>();
    summary.per_metric[*metric] = s;
  }
  for (const auto& r : doc["records"]) {
    if (!r.is_object() || !r.contains("item_id") || !r.contains("status")) report_error("bad record");
    EvalRecord rec;
    rec.item_id = r["item_id"].get<std::string>();
    const std::string label = r["status"].get<std::string>();
    if (label == "ok") {
      rec.status.ok = true;
    } else if (label.rfind("skipped:", 0) == 0) {
      rec.status.ok = false;
      rec.status.reason = label.substr(8);
      if (r.contains("detail")) rec.status.detail = r["detail"].get<std::string>();
    } else {
      report_error("bad status '" + label + "'");
    }
    if (r.contains("metrics")) {
      for (const auto& [name, value] : r["metrics"].items()) {
        auto metric = parse_metric(name);
        if (!metric) report_error("unknown metric '" + name + "'");
        rec.metrics[*metric] = value.get<double>();
      }
    }
    summary.records.push_back(std::move(rec));
  }
  return summary;
}

}  // namespace faceval
