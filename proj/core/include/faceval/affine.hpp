#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faceval/landmarks.hpp"

namespace faceval {

/// Weighted least-squares affine fit of a predicted set onto a reference set.
struct AffineFit {
  AffineMatrix matrix;
  std::vector<double> residuals;  // px, one per landmark
  double objective = 0.0;         // sum_k w_k * residuals[k]^2, px^2
};

/// Statistics for one landmark comparison. `transform` is set for the
/// affine-aligned distance and empty for the plain L2 distance.
struct DistanceReport {
  double objective = 0.0;  // px^2
  double rms = 0.0;        // sqrt(objective / sum(w)), px
  double mean_dist = 0.0;  // sum(w * r) / sum(w), px
  std::vector<double> per_point;
  std::optional<AffineFit> transform;
  std::string group = "all";
};

enum class Statistic { mean, rms, objective };

std::string_view to_string(Statistic stat) noexcept;
std::optional<Statistic> parse_statistic(std::string_view text) noexcept;
double select_statistic(const DistanceReport& report, Statistic stat) noexcept;

enum class Degeneracy { ok, too_few, collinear };

std::string_view to_string(Degeneracy d) noexcept;

/// Relative singular-value threshold on the normal matrix below which the
/// landmark configuration is treated as collinear.
inline constexpr double kCollinearTolerance = 1e-9;

/// Classifies L for affine fitting. The 3x3 normal matrix sum_k w_k l'_k l'_k^T
/// is formed on coordinates centred at the weighted centroid and scaled to
/// unit RMS, which makes the test invariant to translation and scale.
Degeneracy check_degenerate(const LandmarkSet& points, const WeightVector& weights);

/// Closed-form minimiser of sum_k w_k ||A [x_k, y_k, 1]^T - h_k||^2 over 2x3 A:
///   A = (H W L'^T)(L' W L'^T)^-1
/// evaluated on normalised coordinates and mapped back to pixels.
///
/// Throws CountMismatch, DegenerateGeometry, NonFinite.
AffineFit fit_affine(const LandmarkSet& pred, const LandmarkSet& gt, const WeightVector& weights);

/// Affine landmark distance: the residual error that remains after the best
/// affine alignment of `pred` onto `gt`. Not symmetric in its arguments.
///
/// When `group` is given it must exist in both sets with identical index
/// lists; the weights are subset alongside the points.
DistanceReport affine_landmark_distance(const LandmarkSet& pred, const LandmarkSet& gt,
                                        const WeightVector& weights,
                                        std::optional<std::string_view> group = std::nullopt);

/// Pixel-wise L2 landmark distance with no alignment step.
DistanceReport l2_landmark_distance(const LandmarkSet& pred, const LandmarkSet& gt,
                                    const WeightVector& weights,
                                    std::optional<std::string_view> group = std::nullopt);

LandmarkSet apply_affine(const AffineMatrix& matrix, const LandmarkSet& set);

/// Points reordered per the group's index list; the result carries a single
/// "all" group. An empty group yields an empty set.
LandmarkSet subset_by_group(const LandmarkSet& set, std::string_view group);

}  // namespace faceval
