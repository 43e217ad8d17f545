#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "faceval/formats.hpp"
#include "faceval/landmarks.hpp"

namespace faceval::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline LandmarkSet random_landmarks(Rng& rng, std::size_t n, double lo = 0.0, double hi = 512.0) {
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {uniform(rng, lo, hi), uniform(rng, lo, hi)};
  return make_landmarks(std::move(pts));
}

/// Twice the signed triangle area, used to reject near-collinear triples.
inline double triangle_area2(const LandmarkSet& s) {
  const auto& a = s.points[0];
  const auto& b = s.points[1];
  const auto& c = s.points[2];
  return std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

inline WeightVector random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (double& v : w) v = uniform(rng, 0.2, 3.0);
  return WeightVector(std::move(w));
}

/// Random invertible affine map with 2x2 condition number <= max_cond,
/// built as R(theta) * diag(s1, s2) * R(phi) plus a translation.
inline AffineMatrix random_affine(Rng& rng, double max_cond = 100.0, double max_shift = 200.0) {
  const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double s1 = uniform(rng, 0.2, 3.0);
  const double s2 = s1 / uniform(rng, 1.0, max_cond);
  const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;  // allow reflections
  const double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
  // [ct -st; st ct] * diag(s1, sign*s2) * [cp -sp; sp cp]
  const double m00 = ct * s1, m01 = -st * sign * s2, m10 = st * s1, m11 = ct * sign * s2;
  return AffineMatrix::from_rows(m00 * cp + m01 * sp, -m00 * sp + m01 * cp, uniform(rng, -max_shift, max_shift),
                                 m10 * cp + m11 * sp, -m10 * sp + m11 * cp, uniform(rng, -max_shift, max_shift));
}

inline AffineMatrix random_isometry(Rng& rng, double max_shift = 200.0) {
  const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double c = std::cos(theta), s = std::sin(theta);
  return AffineMatrix::from_rows(c, -s, uniform(rng, -max_shift, max_shift), s, c, uniform(rng, -max_shift, max_shift));
}

/// `base` mapped through a random affine plus Gaussian noise.
inline LandmarkSet noisy_affine_copy(Rng& rng, const LandmarkSet& base, double sigma) {
  const AffineMatrix t = random_affine(rng, 10.0, 50.0);
  std::normal_distribution<double> noise(0.0, sigma);
  LandmarkSet out = base;
  for (auto& p : out.points) {
    p = t.apply(p);
    p.x += noise(rng);
    p.y += noise(rng);
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("faceval_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Writes `n` pairings of 68-point sets plus embeddings under `dir` and
/// returns the pairs CSV text. Every `missing_every`-th item (if nonzero)
/// points at a prediction file that does not exist.
inline std::string write_batch_fixture(const std::filesystem::path& dir, Rng& rng, std::size_t n,
                                       std::size_t missing_every = 0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::string csv = "item_id,pred,gt,emb_pred,emb_gt\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "item" + std::to_string(i);
    const LandmarkSet gt = with_default_groups(random_landmarks(rng, 68));
    const LandmarkSet pred = noisy_affine_copy(rng, gt, 2.0);
    EmbeddingBundle eg, ep;
    for (const char* name : {"arcface", "adaface"}) {
      Embedding a{name, std::vector<double>(16)}, b{name, std::vector<double>(16)};
      for (std::size_t k = 0; k < 16; ++k) {
        a.vector[k] = g(rng);
        b.vector[k] = a.vector[k] + 0.5 * g(rng);
      }
      eg.entries.push_back(std::move(a));
      ep.entries.push_back(std::move(b));
    }
    write_file(dir / (id + "_gt.json"), write_landmarks(gt));
    write_file(dir / (id + "_eg.json"), write_embeddings(eg));
    write_file(dir / (id + "_ep.json"), write_embeddings(ep));
    const bool missing = missing_every != 0 && i % missing_every == missing_every - 1;
    if (!missing) write_file(dir / (id + "_pred.json"), write_landmarks(pred));
    csv += id + "," + id + "_pred.json," + id + "_gt.json," + id + "_ep.json," + id + "_eg.json\n";
  }
  return csv;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace faceval::testing
