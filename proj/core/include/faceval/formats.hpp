#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "faceval/affine.hpp"
#include "faceval/evaluator.hpp"
#include "faceval/identity.hpp"
#include "faceval/landmarks.hpp"
#include "faceval/mask.hpp"

namespace faceval {

/// Non-fatal parser findings (e.g. ignored keys).
using Warnings = std::vector<std::string>;

// Files. Both throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Landmark JSON, version 1.
LandmarkSet parse_landmarks(std::string_view bytes, Warnings* warnings = nullptr);
/// Canonical form: fixed key order, groups sorted by name, numbers with at
/// most 9 significant digits, trailing newline.
std::string write_landmarks(const LandmarkSet& set);

/// JSON array of positive numbers, or {"weights": [...]}.
WeightVector parse_weights(std::string_view bytes);

// Embedding JSON: [{"extractor": name, "vector": [...]}, ...].
EmbeddingBundle parse_embeddings(std::string_view bytes);
std::string write_embeddings(const EmbeddingBundle& bundle);

// HMF1 heatmap container. read_heatmap also accepts grayscale PFM as C = 1.
Heatmap read_heatmap(std::string_view bytes);
std::string write_heatmap(const Heatmap& heatmap);

enum class ImageFormat { pgm, ppm, pfm };

/// Picks a format from a file extension (.pgm, .ppm, .pfm); throws UsageError.
ImageFormat image_format_for(const std::filesystem::path& path);

/// P5, P6 (maxval 255) or PFM (Pf / PF). 8-bit samples map to v / 255.
Image read_image(std::string_view bytes);
/// P5/P6 quantise by round(v * 255); PFM is lossless.
std::string write_image(const Image& image, ImageFormat format);

/// Grayscale PFM, unrestricted finite values.
ScalarField read_field(std::string_view bytes);
std::string write_field(const ScalarField& field);

/// Grayscale PFM or P5, values must lie in [0, 1].
Mask read_mask(std::string_view bytes);

// DistanceReport JSON (the CLI's --json output).
std::string write_distance_report(const DistanceReport& report);
DistanceReport parse_distance_report(std::string_view bytes);

enum class ReportFormat { csv, json };

/// CSV: item_id, status, metric columns in registry order, then a MEAN row.
/// Numbers use 6 decimals; missing values are empty cells.
std::string write_report(const EvalSummary& summary, ReportFormat format);
EvalSummary parse_report_json(std::string_view bytes);

}  // namespace faceval
