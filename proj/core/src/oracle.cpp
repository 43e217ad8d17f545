#include "faceval/oracle.hpp"

#include <array>
#include <cmath>

#include "faceval/error.hpp"

namespace faceval::oracle {

namespace {

constexpr double kShrink = 0.5;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-30;

using Params = std::array<double, 6>;

struct Frame {
  double cx = 0.0, cy = 0.0, scale = 1.0;
};

Frame frame_of(const LandmarkSet& set, const WeightVector& w) {
  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    sx += w[k] * set.points[k].x;
    sy += w[k] * set.points[k].y;
    sw += w[k];
  }
  Frame f{sx / sw, sy / sw, 1.0};
  double ss = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double dx = set.points[k].x - f.cx;
    const double dy = set.points[k].y - f.cy;
    ss += w[k] * (dx * dx + dy * dy);
  }
  f.scale = std::sqrt(ss / (2.0 * sw));
  if (!(f.scale > 0.0)) f.scale = 1.0;
  return f;
}

struct Problem {
  std::vector<Point2> src;
  std::vector<Point2> dst;
  std::vector<double> w;  // normalised to sum 1

  double value(const Params& p) const {
    double total = 0.0;
    for (std::size_t k = 0; k < src.size(); ++k) {
      const double ex = p[0] * src[k].x + p[1] * src[k].y + p[2] - dst[k].x;
      const double ey = p[3] * src[k].x + p[4] * src[k].y + p[5] - dst[k].y;
      total += w[k] * (ex * ex + ey * ey);
    }
    return total;
  }

  Params gradient(const Params& p) const {
    Params g{};
    for (std::size_t k = 0; k < src.size(); ++k) {
      const double ex = p[0] * src[k].x + p[1] * src[k].y + p[2] - dst[k].x;
      const double ey = p[3] * src[k].x + p[4] * src[k].y + p[5] - dst[k].y;
      const double s = 2.0 * w[k];
      g[0] += s * ex * src[k].x;
      g[1] += s * ex * src[k].y;
      g[2] += s * ex;
      g[3] += s * ey * src[k].x;
      g[4] += s * ey * src[k].y;
      g[5] += s * ey;
    }
    return g;
  }
};

}  // namespace

void OracleConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be > 0");
  if (!(step_init > 0.0)) throw Error(ErrorCode::InvalidConfig, "step_init must be > 0");
}

double objective_value(const AffineMatrix& matrix, const LandmarkSet& pred, const LandmarkSet& gt,
                       const WeightVector& weights) {
  if (pred.size() != gt.size() || weights.size() != pred.size()) {
    throw Error(ErrorCode::CountMismatch, "landmark and weight counts must agree");
  }
  if (!matrix.is_finite()) throw Error(ErrorCode::NonFinite, "affine matrix is not finite");
  require_finite(pred, "prediction");
  require_finite(gt, "ground truth");

  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const Point2 p = matrix.apply(pred.points[k]);
    const double dx = p.x - gt.points[k].x;
    const double dy = p.y - gt.points[k].y;
    total += weights[k] * (dx * dx + dy * dy);
  }
  return total;
}

AffineFit fit_affine_iterative(const LandmarkSet& pred, const LandmarkSet& gt,
                               const WeightVector& weights, const OracleConfig& config,
                               std::vector<double>* trace) {
  config.validate();
  if (pred.size() != gt.size() || weights.size() != pred.size()) {
    throw Error(ErrorCode::CountMismatch, "landmark and weight counts must agree");
  }
  require_finite(pred, "prediction");
  require_finite(gt, "ground truth");
  if (check_degenerate(pred, weights) != Degeneracy::ok) {
    throw Error(ErrorCode::DegenerateGeometry, "landmarks are degenerate for affine fitting");
  }

  const Frame fs = frame_of(pred, weights);
  const Frame fd = frame_of(gt, weights);
  const double sw = weights.sum();

  Problem problem;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    problem.src.push_back({(pred.points[k].x - fs.cx) / fs.scale, (pred.points[k].y - fs.cy) / fs.scale});
    problem.dst.push_back({(gt.points[k].x - fd.cx) / fd.scale, (gt.points[k].y - fd.cy) / fd.scale});
    problem.w.push_back(weights[k] / sw);
  }

  Params p{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  double f = problem.value(p);
  if (trace) trace->assign(1, f);

  bool converged = false;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const Params g = problem.gradient(p);
    double g2 = 0.0;
    for (double v : g) g2 += v * v;
    if (g2 == 0.0) {
      converged = true;
      break;
    }

    double step = config.step_init;
    Params trial{};
    double f_trial = f;
    bool accepted = false;
    while (step >= kMinStep) {
      for (std::size_t i = 0; i < 6; ++i) trial[i] = p[i] - step * g[i];
      f_trial = problem.value(trial);
      if (f_trial <= f - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= kShrink;
    }
    if (!accepted) {
      // No representable descent step left: stationary to rounding.
      converged = true;
      break;
    }

    const double decrease = f - f_trial;
    p = trial;
    f = f_trial;
    if (trace) trace->push_back(f);
    if (decrease < config.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence, "gradient descent did not converge within " +
                                              std::to_string(config.max_iterations) +
                                              " iterations");
  }

  // Map back: h = fd.scale * G * ((l - cs) / fs.scale) + cd.
  AffineFit fit;
  const double ratio = fd.scale / fs.scale;
  const double cd[2] = {fd.cx, fd.cy};
  for (int r = 0; r < 2; ++r) {
    const double a = p[static_cast<std::size_t>(r * 3)] * ratio;
    const double b = p[static_cast<std::size_t>(r * 3 + 1)] * ratio;
    fit.matrix(r, 0) = a;
    fit.matrix(r, 1) = b;
    fit.matrix(r, 2) = fd.scale * p[static_cast<std::size_t>(r * 3 + 2)] - a * fs.cx - b * fs.cy + cd[r];
  }
  fit.residuals.resize(pred.size());
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const Point2 q = fit.matrix.apply(pred.points[k]);
    fit.residuals[k] = std::hypot(q.x - gt.points[k].x, q.y - gt.points[k].y);
  }
  fit.objective = objective_value(fit.matrix, pred, gt, weights);
  return fit;
}

}  // namespace faceval::oracle
