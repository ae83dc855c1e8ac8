#include "lrbm/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace lrbm {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double leaf_potential(const LeafParams& theta) {
  const double base = theta.c + theta.w;
  return theta.d + softplus(base + theta.u1) - softplus(base + theta.u0);
}

double probability(double psi, double clamp) { return sigmoid(std::clamp(psi, -clamp, clamp)); }

LeafParams potential_gradient(const LeafParams& theta) {
  const double s1 = sigmoid(theta.c + theta.w + theta.u1);
  const double s0 = sigmoid(theta.c + theta.w + theta.u0);
  return LeafParams{1.0, s1 - s0, s1 - s0, -s0, s1};
}

namespace {

using Coordinate = double LeafParams::*;
constexpr std::array<Coordinate, 5> kCoordinates = {&LeafParams::d, &LeafParams::c, &LeafParams::w,
                                                     &LeafParams::u0, &LeafParams::u1};

// (v - mean)^2 + variance, kept in that form so small improvements are not
// lost to cancellation.
double mse(const LeafParams& theta, double mean, double variance) {
  const double e = leaf_potential(theta) - mean;
  return e * e + variance;
}

}  // namespace

LeafParams coordinate_descent(std::span<const double> targets, const LeafParams& theta0,
                              const CoordinateDescentConfig& config) {
  LeafParams theta = theta0;
  if (targets.empty()) return theta;
  const double n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double variance = 0.0;
  for (double t : targets) variance += (t - mean) * (t - mean);
  variance /= n;

  const double lr = config.learning_rate;
  double objective = mse(theta, mean, variance);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (config.online) {
      for (double target : targets) {
        for (Coordinate coord : kCoordinates) {
          const double residual = leaf_potential(theta) - target;
          theta.*coord -= lr * 2.0 * residual * (potential_gradient(theta).*coord);
        }
      }
    } else {
      // The objective depends on the targets only through their mean.
      for (Coordinate coord : kCoordinates) {
        const double residual = leaf_potential(theta) - mean;
        theta.*coord -= lr * 2.0 * residual * (potential_gradient(theta).*coord);
      }
    }
    const double next = mse(theta, mean, variance);
    const double improvement = objective - next;
    objective = next;
    if (improvement < config.tolerance) break;
  }
  return theta;
}

}  // namespace lrbm
