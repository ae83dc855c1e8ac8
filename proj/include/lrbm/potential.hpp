#pragma once

#include <span>

namespace lrbm {

// Parameters a leaf contributes to the lifted RBM: output-bias difference d =
// d1 - d0, hidden bias c, visible->hidden weight W on the path feature, and the
// hidden->output weights U0 (y = 0) and U1 (y = 1).
struct LeafParams {
  double d = 0.0;
  double c = 0.0;
  double w = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;

  friend bool operator==(const LeafParams&, const LeafParams&) = default;
};

inline constexpr double kDefaultPsiClamp = 20.0;

// log(1 + e^z), overflow-safe.
double softplus(double z);
double sigmoid(double z);

// Potential of a hidden node whose path feature is active:
//   d + softplus(c + U1 + W) - softplus(c + U0 + W)
double leaf_potential(const LeafParams& theta);

// P(y = 1) = e^psi / (1 + e^psi), psi first clamped to [-clamp, clamp].
double probability(double psi, double clamp = kDefaultPsiClamp);

// Partial derivatives of leaf_potential, in (d, c, W, U0, U1) order.
LeafParams potential_gradient(const LeafParams& theta);

struct CoordinateDescentConfig {
  double learning_rate = 0.05;
  int max_iters = 500;
  double tolerance = 1e-8;
  // Per-example updates instead of the batch mean gradient.
  bool online = false;
};

// Cyclic coordinate descent over (d, c, W, U0, U1) on the mean squared error
// (1/n) sum_i (v(theta) - target_i)^2. Each coordinate moves by
// learning_rate * (negative partial derivative). Stops after max_iters sweeps
// or when a sweep improves the objective by less than `tolerance`.
// Empty targets return theta0 unchanged.
LeafParams coordinate_descent(std::span<const double> targets, const LeafParams& theta0,
                              const CoordinateDescentConfig& config = {});

}  // namespace lrbm
