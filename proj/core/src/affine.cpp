#include "faceval/affine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "faceval/error.hpp"

namespace faceval {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations.
std::array<double, 3> symmetric_eigenvalues(Mat3 a) {
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
    if (off <= 1e-300 || off <= 1e-32 * diag) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  return {a[0][0], a[1][1], a[2][2]};
}

// Inverse via the adjugate. Caller guarantees non-singularity.
Mat3 inverse3(const Mat3& m) {
  Mat3 adj{};
  adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
  for (auto& row : adj) {
    for (double& v : row) v /= det;
  }
  return adj;
}

struct Normalization {
  double cx = 0.0;
  double cy = 0.0;
  double scale = 1.0;  // divide centred coordinates by this
};

Point2 weighted_centroid(const LandmarkSet& set, const WeightVector& w) {
  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    sx += w[k] * set.points[k].x;
    sy += w[k] * set.points[k].y;
    sw += w[k];
  }
  return {sx / sw, sy / sw};
}

// Centre at the weighted centroid, scale so the weighted per-axis RMS is 1.
// A zero spread leaves scale at 0, which callers treat as collinear.
Normalization normalization_for(const LandmarkSet& set, const WeightVector& w) {
  const Point2 c = weighted_centroid(set, w);
  double ss = 0.0, sw = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double dx = set.points[k].x - c.x;
    const double dy = set.points[k].y - c.y;
    ss += w[k] * (dx * dx + dy * dy);
    sw += w[k];
  }
  return {c.x, c.y, std::sqrt(ss / (2.0 * sw))};
}

Mat3 normal_matrix(const LandmarkSet& set, const WeightVector& w, const Normalization& n) {
  Mat3 m{};
  for (std::size_t k = 0; k < set.size(); ++k) {
    const std::array<double, 3> v{(set.points[k].x - n.cx) / n.scale,
                                  (set.points[k].y - n.cy) / n.scale, 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += w[k] * v[r] * v[c];
    }
  }
  return m;
}

void require_same_count(const LandmarkSet& pred, const LandmarkSet& gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::CountMismatch, "landmark counts differ: " + std::to_string(pred.size()) +
                                              " vs " + std::to_string(gt.size()));
  }
}

void require_weights(const LandmarkSet& set, const WeightVector& w) {
  if (w.size() != set.size()) {
    throw Error(ErrorCode::CountMismatch, "weight count " + std::to_string(w.size()) +
                                              " does not match landmark count " +
                                              std::to_string(set.size()));
  }
}

struct Subsets {
  LandmarkSet pred;
  LandmarkSet gt;
  WeightVector weights;
  std::string group;
};

Subsets restrict_to_group(const LandmarkSet& pred, const LandmarkSet& gt,
                          const WeightVector& weights, std::optional<std::string_view> group) {
  require_same_count(pred, gt);
  require_weights(pred, weights);
  if (!group) return {pred, gt, weights, std::string(kAllGroup)};

  const IndexList* a = pred.find_group(*group);
  const IndexList* b = gt.find_group(*group);
  if (a == nullptr || b == nullptr) {
    throw Error(ErrorCode::UnknownGroup, "group '" + std::string(*group) + "' not present in " +
                                             (a == nullptr ? "prediction" : "ground truth"));
  }
  if (*a != *b) {
    throw Error(ErrorCode::GroupMismatch,
                "group '" + std::string(*group) + "' has different index lists in the two sets");
  }
  return {subset_by_group(pred, *group), subset_by_group(gt, *group), weights.subset(*a),
          std::string(*group)};
}

DistanceReport summarize(std::vector<double> residuals, const WeightVector& w, std::string group) {
  DistanceReport report;
  double objective = 0.0, weighted_sum = 0.0;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    objective += w[k] * residuals[k] * residuals[k];
    weighted_sum += w[k] * residuals[k];
  }
  const double sw = w.sum();
  report.objective = objective;
  report.rms = std::sqrt(objective / sw);
  report.mean_dist = weighted_sum / sw;
  report.per_point = std::move(residuals);
  report.group = std::move(group);
  return report;
}

}  // namespace

std::string_view to_string(Statistic stat) noexcept {
  switch (stat) {
    case Statistic::mean: return "mean";
    case Statistic::rms: return "rms";
    case Statistic::objective: return "objective";
  }
  return "mean";
}

std::optional<Statistic> parse_statistic(std::string_view text) noexcept {
  if (text == "mean") return Statistic::mean;
  if (text == "rms") return Statistic::rms;
  if (text == "objective") return Statistic::objective;
  return std::nullopt;
}

double select_statistic(const DistanceReport& report, Statistic stat) noexcept {
  switch (stat) {
    case Statistic::mean: return report.mean_dist;
    case Statistic::rms: return report.rms;
    case Statistic::objective: return report.objective;
  }
  return report.mean_dist;
}

std::string_view to_string(Degeneracy d) noexcept {
  switch (d) {
    case Degeneracy::ok: return "ok";
    case Degeneracy::too_few: return "too_few";
    case Degeneracy::collinear: return "collinear";
  }
  return "ok";
}

Degeneracy check_degenerate(const LandmarkSet& points, const WeightVector& weights) {
  require_finite(points, "landmarks");
  require_weights(points, weights);
  if (points.size() < 3) return Degeneracy::too_few;

  const Normalization n = normalization_for(points, weights);
  if (!(n.scale > 0.0) || !std::isfinite(n.scale)) return Degeneracy::collinear;

  const auto eig = symmetric_eigenvalues(normal_matrix(points, weights, n));
  double lo = std::abs(eig[0]), hi = std::abs(eig[0]);
  for (double e : eig) {
    lo = std::min(lo, std::abs(e));
    hi = std::max(hi, std::abs(e));
  }
  return lo < kCollinearTolerance * hi ? Degeneracy::collinear : Degeneracy::ok;
}

AffineFit fit_affine(const LandmarkSet& pred, const LandmarkSet& gt, const WeightVector& weights) {
  require_finite(pred, "prediction");
  require_finite(gt, "ground truth");
  require_same_count(pred, gt);
  require_weights(pred, weights);

  switch (check_degenerate(pred, weights)) {
    case Degeneracy::too_few:
      throw Error(ErrorCode::DegenerateGeometry,
                  "affine fit needs at least 3 landmarks, got " + std::to_string(pred.size()));
    case Degeneracy::collinear:
      throw Error(ErrorCode::DegenerateGeometry, "landmarks are collinear");
    case Degeneracy::ok:
      break;
  }

  const Normalization n = normalization_for(pred, weights);
  const Point2 hc = weighted_centroid(gt, weights);

  // rhs = H W L'^T on normalised L and centred H.
  std::array<std::array<double, 3>, 2> rhs{};
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const std::array<double, 3> v{(pred.points[k].x - n.cx) / n.scale,
                                  (pred.points[k].y - n.cy) / n.scale, 1.0};
    const double hx = gt.points[k].x - hc.x;
    const double hy = gt.points[k].y - hc.y;
    for (int c = 0; c < 3; ++c) {
      rhs[0][c] += weights[k] * hx * v[c];
      rhs[1][c] += weights[k] * hy * v[c];
    }
  }
  const Mat3 inv = inverse3(normal_matrix(pred, weights, n));

  std::array<std::array<double, 3>, 2> an{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      an[r][c] = rhs[r][0] * inv[0][c] + rhs[r][1] * inv[1][c] + rhs[r][2] * inv[2][c];
    }
  }

  // Undo the normalisation: A = T_h * An * N_l.
  AffineFit fit;
  const double centroid[2] = {hc.x, hc.y};
  for (int r = 0; r < 2; ++r) {
    const double a = an[r][0] / n.scale;
    const double b = an[r][1] / n.scale;
    fit.matrix(r, 0) = a;
    fit.matrix(r, 1) = b;
    fit.matrix(r, 2) = an[r][2] - a * n.cx - b * n.cy + centroid[r];
  }

  fit.residuals.resize(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const Point2 p = fit.matrix.apply(pred.points[k]);
    const double r = std::hypot(p.x - gt.points[k].x, p.y - gt.points[k].y);
    fit.residuals[k] = r;
    fit.objective += weights[k] * r * r;
  }
  return fit;
}

DistanceReport affine_landmark_distance(const LandmarkSet& pred, const LandmarkSet& gt,
                                        const WeightVector& weights,
                                        std::optional<std::string_view> group) {
  require_finite(pred, "prediction");
  require_finite(gt, "ground truth");
  Subsets s = restrict_to_group(pred, gt, weights, group);
  if (group && s.pred.size() < 3) {
    throw Error(ErrorCode::GroupTooSmall, "group '" + s.group + "' has " +
                                              std::to_string(s.pred.size()) +
                                              " landmarks; affine distance needs at least 3");
  }
  AffineFit fit = fit_affine(s.pred, s.gt, s.weights);
  DistanceReport report = summarize(fit.residuals, s.weights, std::move(s.group));
  report.objective = fit.objective;
  report.transform = std::move(fit);
  return report;
}

DistanceReport l2_landmark_distance(const LandmarkSet& pred, const LandmarkSet& gt,
                                    const WeightVector& weights,
                                    std::optional<std::string_view> group) {
  require_finite(pred, "prediction");
  require_finite(gt, "ground truth");
  Subsets s = restrict_to_group(pred, gt, weights, group);
  if (s.pred.size() == 0) {
    throw Error(ErrorCode::GroupTooSmall, "group '" + s.group + "' is empty");
  }
  std::vector<double> residuals(s.pred.size());
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    residuals[k] = std::hypot(s.pred.points[k].x - s.gt.points[k].x,
                              s.pred.points[k].y - s.gt.points[k].y);
  }
  return summarize(std::move(residuals), s.weights, std::move(s.group));
}

LandmarkSet apply_affine(const AffineMatrix& matrix, const LandmarkSet& set) {
  if (!matrix.is_finite()) throw Error(ErrorCode::NonFinite, "affine matrix is not finite");
  require_finite(set, "landmarks");
  LandmarkSet out = set;
  for (auto& p : out.points) p = matrix.apply(p);
  return out;
}

LandmarkSet subset_by_group(const LandmarkSet& set, std::string_view group) {
  const IndexList* indices = set.find_group(group);
  if (indices == nullptr) {
    throw Error(ErrorCode::UnknownGroup, "group '" + std::string(group) + "' not found");
  }
  std::vector<Point2> points;
  points.reserve(indices->size());
  for (std::size_t idx : *indices) {
    if (idx >= set.size()) {
      throw Error(ErrorCode::SchemaViolation, "group '" + std::string(group) + "' index " +
                                                  std::to_string(idx) + " out of range");
    }
    points.push_back(set.points[idx]);
  }
  LandmarkSet out = make_landmarks(std::move(points));
  out.image_size = set.image_size;
  return out;
}

}  // namespace faceval
