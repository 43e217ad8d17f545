#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace faceval {

/// Pixel coordinate, origin top-left, x = column, y = row.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

using IndexList = std::vector<std::size_t>;
using GroupMap = std::map<std::string, IndexList, std::less<>>;

inline constexpr std::string_view kAllGroup = "all";
inline constexpr std::string_view kEyesRegion = "eyes_region";
inline constexpr std::string_view kMouthOuter = "mouth_outer";

/// Ordered 2-D facial landmarks with named index groups.
///
/// Group indices are 0-based positions into `points`. A set produced by
/// subset_by_group may be empty; everything read from disk has N >= 1.
struct LandmarkSet {
  std::vector<Point2> points;
  GroupMap groups;
  std::optional<ImageSize> image_size;

  std::size_t size() const noexcept { return points.size(); }
  const IndexList* find_group(std::string_view name) const;

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

/// Builds a set with a single "all" group covering every point.
LandmarkSet make_landmarks(std::vector<Point2> points);

/// Throws SchemaViolation (empty set, bad group index, duplicate index) or
/// NonFinite (NaN/Inf coordinate).
void validate(const LandmarkSet& set);

/// Throws NonFinite if any coordinate is NaN or infinite.
void require_finite(const LandmarkSet& set, std::string_view what);

/// 0-based iBUG 68-point groups: eyes_region = 17..26 and 36..47 (brows and
/// eyes), mouth_outer = 48..59.
GroupMap ibug68_groups();

/// For 68-point sets, adds the iBUG preset groups the file does not already
/// define. Other sets are returned unchanged.
LandmarkSet with_default_groups(LandmarkSet set);

/// Strictly positive finite per-landmark weights.
class WeightVector {
 public:
  WeightVector() = default;
  /// Throws InvalidWeights on non-positive or non-finite entries.
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t n);

  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }
  double sum() const noexcept;

  WeightVector scaled(double factor) const;
  WeightVector subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

/// Row-major 2x3 affine matrix [[a, b, tx], [c, d, ty]].
struct AffineMatrix {
  std::array<double, 6> m{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

  static AffineMatrix identity() { return {}; }
  static AffineMatrix from_rows(double a, double b, double tx, double c, double d, double ty) {
    return AffineMatrix{{a, b, tx, c, d, ty}};
  }

  double operator()(int row, int col) const { return m[static_cast<std::size_t>(row * 3 + col)]; }
  double& operator()(int row, int col) { return m[static_cast<std::size_t>(row * 3 + col)]; }

  Point2 apply(Point2 p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }

  double determinant() const noexcept { return m[0] * m[4] - m[1] * m[3]; }
  bool is_finite() const noexcept;

  friend bool operator==(const AffineMatrix&, const AffineMatrix&) = default;
};

/// outer o inner: the map p -> outer(inner(p)).
AffineMatrix compose(const AffineMatrix& outer, const AffineMatrix& inner);

}  // namespace faceval
