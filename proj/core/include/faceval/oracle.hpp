#pragma once

#include <vector>

#include "faceval/affine.hpp"
#include "faceval/landmarks.hpp"

namespace faceval::oracle {

// Iterative cross-check for the closed-form affine fit. Slow on purpose:
// every objective evaluation is a direct sum over the landmarks.

struct OracleConfig {
  int max_iterations = 10000;
  /// Stop once an accepted step lowers the objective by less than this.
  /// Measured on the normalised problem (objective / sum(w) in unit-RMS
  /// coordinates), so the threshold does not depend on pixel scale.
  double tolerance = 1e-12;
  double step_init = 1.0;

  /// Throws InvalidConfig.
  void validate() const;
};

/// sum_k w_k ||A [x_k, y_k, 1]^T - h_k||^2 at a fixed matrix. px^2.
double objective_value(const AffineMatrix& matrix, const LandmarkSet& pred, const LandmarkSet& gt,
                       const WeightVector& weights);

/// Gradient descent with Armijo backtracking (factor 0.5, constant 1e-4) on
/// the six affine parameters, starting from the identity in normalised
/// coordinates. `trace`, when non-null, receives the normalised objective
/// after every accepted step (first entry is the starting value).
///
/// Throws DegenerateGeometry, NoConvergence, plus input validation errors.
AffineFit fit_affine_iterative(const LandmarkSet& pred, const LandmarkSet& gt,
                               const WeightVector& weights, const OracleConfig& config = {},
                               std::vector<double>* trace = nullptr);

}  // namespace faceval::oracle
