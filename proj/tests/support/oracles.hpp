#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "augcl/mining.hpp"
#include "augcl/rng.hpp"
#include "augcl/tensor.hpp"

namespace augcl::testing {

// Exhaustive search over every 2-partition with both sides non-empty.
inline double brute_force_sse(const Tensor& pts) {
  const std::size_t m = pts.rows(), d = pts.cols();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 2; mask + 1 < (std::size_t{1} << m); mask += 2) {  // point 0 always on side 0
    double sse = 0.0;
    for (std::size_t side = 0; side < 2; ++side) {
      std::vector<double> mean(d, 0.0);
      double count = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (((mask >> i) & 1) == side) {
          ++count;
          for (std::size_t k = 0; k < d; ++k) mean[k] += pts(i, k);
        }
      for (double& v : mean) v /= count;
      for (std::size_t i = 0; i < m; ++i)
        if (((mask >> i) & 1) == side)
          for (std::size_t k = 0; k < d; ++k) sse += (pts(i, k) - mean[k]) * (pts(i, k) - mean[k]);
    }
    best = std::min(best, sse);
  }
  return best;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Unit-circle point at `deg` degrees with Gaussian angular noise.
inline std::vector<double> at_angle(double deg, double noise, Rng& rng) {
  std::normal_distribution<double> n(0.0, noise);
  const double r = (deg + n(rng)) * std::numbers::pi / 180.0;
  return {std::cos(r), std::sin(r)};
}

struct BoundaryOutcome {
  double band_u = 0.0;  // candidates on the midline between the clusters
  double core_u = 0.0;  // candidates at the cluster centres
};

// Two clusters of 2-D candidates (30 and 150 degrees), anchors in the first.
// Labels come from partition_negatives; the extra-class estimator is trained
// on them and then queried on midline (90 degrees) and core points.
inline BoundaryOutcome boundary_experiment(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AffinitySamples> samples;
  for (std::size_t a = 0; a < 16; ++a) {
    AffinitySamples s;
    s.anchor = at_angle(30, 8, rng);
    s.candidates = Tensor({24, 2});
    for (std::size_t j = 0; j < 24; ++j) {
      const auto p = at_angle(j < 12 ? 30 : 150, 25, rng);
      s.candidates(j, 0) = p[0];
      s.candidates(j, 1) = p[1];
    }
    KMeansConfig kc;
    kc.seed = seed * 100 + a;
    s.labels = partition_negatives(s.anchor, s.candidates, kc).labels;
    samples.push_back(std::move(s));
  }
  GamblerConfig cfg;
  cfg.hidden_dim = 32;
  cfg.epochs = 30;
  const GamblerParams g = train_gambler(samples, cfg, seed);
  BoundaryOutcome out;
  const int queries = 200;
  for (int k = 0; k < queries; ++k) {
    const auto anchor = at_angle(30, 8, rng);
    out.band_u += gambler_infer(g, anchor, at_angle(90, 5, rng)).u;
    out.core_u += gambler_infer(g, anchor, at_angle(k % 2 ? 30 : 150, 5, rng)).u;
  }
  out.band_u /= queries;
  out.core_u /= queries;
  return out;
}

}  // namespace augcl::testing
