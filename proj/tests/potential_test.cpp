#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lrbm/boosting.hpp"
#include "lrbm/potential.hpp"

using namespace lrbm;

namespace {

// Direct evaluation of log((1 + e^(c+U1+W)) / (1 + e^(c+U0+W))) + d.
double naive_potential(const LeafParams& t) {
  return t.d + std::log((1 + std::exp(t.c + t.u1 + t.w)) / (1 + std::exp(t.c + t.u0 + t.w)));
}

double log_likelihood(int label, double psi) {
  const double p = 1.0 / (1.0 + std::exp(-psi));
  return label == 1 ? std::log(p) : std::log(1 - p);
}

}  // namespace

TEST_CASE("leaf potential values") {
  CHECK(leaf_potential({}) == 0.0);
  CHECK(leaf_potential({0.5, 0, 0, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  const LeafParams t{0, 0, 1, 0, 1};
  CHECK(leaf_potential(t) == doctest::Approx(std::log((1 + std::exp(2.0)) / (1 + std::exp(1.0)))).epsilon(1e-14));
  CHECK(leaf_potential(t) == doctest::Approx(0.8137).epsilon(1e-4));
  // Overflow-safe where the direct formula is not.
  CHECK(std::isfinite(leaf_potential({0, 800, 0, 0, 1})));
  CHECK(leaf_potential({0, 800, 0, 0, 1}) == doctest::Approx(1.0));
  CHECK(leaf_potential({0, -800, 0, 0, 1}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("probability") {
  CHECK(probability(0) == 0.5);
  // Saturation: psi is clamped to 20 first, so this sits 2.06e-9 below 1.
  CHECK(probability(30) == probability(20));
  CHECK(std::abs(probability(30) - 1) < 3e-9);
  CHECK(std::abs(probability(30, 40.0) - 1) < 1e-9);
  CHECK(probability(leaf_potential({0, 0, 1, 0, 1})) == doctest::Approx(0.6929).epsilon(1e-4));
  for (double psi : {-1e6, -50.0, -20.0, 0.0, 20.0, 50.0, 1e6}) {
    const double p = probability(psi);
    CHECK(p > 0);
    CHECK(p < 1);
  }
}

TEST_CASE("pointwise gradients") {
  CHECK(pointwise_gradient(1, 0) == 0.5);
  CHECK(pointwise_gradient(0, 0) == -0.5);
  CHECK(pointwise_gradient(1, leaf_potential({0, 0, 1, 0, 1})) == doctest::Approx(0.3071).epsilon(1e-4));
}

TEST_CASE("gradient equals the derivative of the log-likelihood") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> psi_dist(-8, 8);
  for (int i = 0; i < 300; ++i) {
    const double psi = psi_dist(rng);
    const int label = static_cast<int>(rng() % 2);
    const double h = 1e-5;
    const double fd = (log_likelihood(label, psi + h) - log_likelihood(label, psi - h)) / (2 * h);
    CHECK(std::abs(pointwise_gradient(label, psi) - fd) < 1e-6);
  }
}

TEST_CASE("potential matches naive formula and analytic partials") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 300; ++i) {
    const LeafParams t{u(rng), u(rng), u(rng), u(rng), u(rng)};
    CHECK(leaf_potential(t) == doctest::Approx(naive_potential(t)).epsilon(1e-12));
    const LeafParams g = potential_gradient(t);
    const double h = 1e-6;
    for (double LeafParams::*c : {&LeafParams::d, &LeafParams::c, &LeafParams::w, &LeafParams::u0, &LeafParams::u1}) {
      LeafParams lo = t, hi = t;
      lo.*c -= h;
      hi.*c += h;
      const double fd = (leaf_potential(hi) - leaf_potential(lo)) / (2 * h);
      CHECK(std::abs(fd - g.*c) < 1e-7);
    }
    // Strictly increasing in U1 and d, strictly decreasing in U0.
    CHECK(g.u1 > 0);
    CHECK(g.d > 0);
    CHECK(g.u0 < 0);
    LeafParams up = t;
    up.u1 += 0.1;
    CHECK(leaf_potential(up) > leaf_potential(t));
    up = t;
    up.u0 += 0.1;
    CHECK(leaf_potential(up) < leaf_potential(t));
  }
}

TEST_CASE("coordinate descent fits the mean") {
  const double half[] = {0.5, 0.5, 0.5, 0.5};
  CHECK(std::abs(leaf_potential(coordinate_descent(half, {})) - 0.5) < 1e-3);
  const double pair[] = {0.2, 0.4};
  CHECK(std::abs(leaf_potential(coordinate_descent(pair, {})) - 0.3) < 1e-3);
  const LeafParams start{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(coordinate_descent(std::span<const double>{}, start) == start);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> delta(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(1 + rng() % 40);
    for (auto& x : d) x = delta(rng);
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    CHECK(std::abs(leaf_potential(coordinate_descent(d, {})) - mean) < 1e-3);
    CoordinateDescentConfig online;
    online.online = true;
    online.learning_rate = 0.01;
    CHECK(std::abs(leaf_potential(coordinate_descent(d, {}, online)) - mean) < 0.1);
  }
}
