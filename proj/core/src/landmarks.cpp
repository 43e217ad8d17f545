#include "faceval/landmarks.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "faceval/error.hpp"

namespace faceval {

const IndexList* LandmarkSet::find_group(std::string_view name) const {
  auto it = groups.find(name);
  return it == groups.end() ? nullptr : &it->second;
}

LandmarkSet make_landmarks(std::vector<Point2> points) {
  LandmarkSet set;
  IndexList all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  set.points = std::move(points);
  set.groups.emplace(std::string(kAllGroup), std::move(all));
  return set;
}

void require_finite(const LandmarkSet& set, std::string_view what) {
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const auto& p = set.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::NonFinite,
                  std::string(what) + ": point " + std::to_string(i) + " is not finite");
    }
  }
}

void validate(const LandmarkSet& set) {
  if (set.points.empty()) {
    throw Error(ErrorCode::SchemaViolation, "points: landmark set is empty");
  }
  require_finite(set, "points");
  for (const auto& [name, indices] : set.groups) {
    std::set<std::size_t> seen;
    for (std::size_t idx : indices) {
      if (idx >= set.points.size()) {
        throw Error(ErrorCode::SchemaViolation,
                    "groups." + name + ": index " + std::to_string(idx) + " out of range for " +
                        std::to_string(set.points.size()) + " points");
      }
      if (!seen.insert(idx).second) {
        throw Error(ErrorCode::SchemaViolation,
                    "groups." + name + ": duplicate index " + std::to_string(idx));
      }
    }
  }
  if (set.image_size && (set.image_size->width <= 0 || set.image_size->height <= 0)) {
    throw Error(ErrorCode::SchemaViolation, "image_size: dimensions must be positive");
  }
}

GroupMap ibug68_groups() {
  IndexList eyes;
  for (std::size_t i = 17; i <= 26; ++i) eyes.push_back(i);
  for (std::size_t i = 36; i <= 47; ++i) eyes.push_back(i);
  IndexList mouth;
  for (std::size_t i = 48; i <= 59; ++i) mouth.push_back(i);

  GroupMap groups;
  groups.emplace(std::string(kEyesRegion), std::move(eyes));
  groups.emplace(std::string(kMouthOuter), std::move(mouth));
  return groups;
}

LandmarkSet with_default_groups(LandmarkSet set) {
  if (set.points.size() != 68) return set;
  for (auto& [name, indices] : ibug68_groups()) {
    set.groups.try_emplace(name, indices);
  }
  return set;
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || !(weights_[i] > 0.0)) {
      throw Error(ErrorCode::InvalidWeights,
                  "weight " + std::to_string(i) + " must be positive and finite");
    }
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0));
}

double WeightVector::sum() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

WeightVector WeightVector::scaled(double factor) const {
  std::vector<double> out(weights_);
  for (double& w : out) w *= factor;
  return WeightVector(std::move(out));
}

WeightVector WeightVector::subset(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= weights_.size()) {
      throw Error(ErrorCode::CountMismatch, "weight index " + std::to_string(idx) + " out of range");
    }
    out.push_back(weights_[idx]);
  }
  return WeightVector(std::move(out));
}

bool AffineMatrix::is_finite() const noexcept {
  for (double v : m) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

AffineMatrix compose(const AffineMatrix& outer, const AffineMatrix& inner) {
  AffineMatrix out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      double v = outer(r, 0) * inner(0, c) + outer(r, 1) * inner(1, c);
      if (c == 2) v += outer(r, 2);
      out(r, c) = v;
    }
  }
  return out;
}

}  // namespace faceval
