#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "augcl/error.hpp"
#include "augcl/mining.hpp"
#include "augcl/rng.hpp"

namespace augcl {

namespace detail {
thread_local std::uint64_t g_partition_calls = 0;
thread_local std::uint64_t g_estimator_trainings = 0;
}  // namespace detail

MiningCounters mining_counters() {
  return {detail::g_partition_calls, detail::g_estimator_trainings};
}

void reset_mining_counters() {
  detail::g_partition_calls = 0;
  detail::g_estimator_trainings = 0;
}

void KMeansConfig::validate() const {
  if (restarts < 1 || max_iterations < 1) throw ConfigError("k-means restarts and iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("k-means tolerance must be non-negative");
}

double partition_sse(const Tensor& points, const std::vector<int>& assignments) {
  const std::size_t d = points.cols();
  double sse = 0.0;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> mean(d, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (assignments[i] != c) continue;
      ++count;
      for (std::size_t k = 0; k < d; ++k) mean[k] += points(i, k);
    }
    if (count == 0) continue;
    for (double& m : mean) m /= static_cast<double>(count);
    for (std::size_t i = 0; i < points.rows(); ++i)
      if (assignments[i] == c) sse += squared_distance(points.row(i), mean);
  }
  return sse;
}

namespace {

struct Run {
  std::vector<int> assignments;
  Tensor centroids;
  double sse = 0.0;
};

void recompute_centroids(const Tensor& points, const std::vector<int>& assign, Tensor& centroids) {
  const std::size_t d = points.cols();
  Tensor sums({2, d});
  std::size_t counts[2] = {0, 0};
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const int c = assign[i];
    ++counts[c];
    for (std::size_t k = 0; k < d; ++k) sums(c, k) += points(i, k);
  }
  for (int c = 0; c < 2; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t k = 0; k < d; ++k) centroids(c, k) = sums(c, k) / static_cast<double>(counts[c]);
  }
}

int nearest(std::span<const double> p, const Tensor& centroids) {
  const double d0 = squared_distance(p, centroids.row(0));
  const double d1 = squared_distance(p, centroids.row(1));
  return d1 < d0 ? 1 : 0;
}

// Single-point moves: x leaves cluster a for b when
//   n_b / (n_b + 1) |x - c_b|^2 < n_a / (n_a - 1) |x - c_a|^2,
// which strictly lowers the SSE. Lloyd fixed points are not always stable
// under such moves.
void hartigan_refine(const Tensor& points, std::vector<int>& assign, Tensor& centroids, std::size_t max_passes) {
  const std::size_t m = points.rows();
  std::size_t counts[2] = {0, 0};
  for (int a : assign) ++counts[a];
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t a = static_cast<std::size_t>(assign[i]), b = 1 - a;
      if (counts[a] < 2) continue;
      const double na = static_cast<double>(counts[a]), nb = static_cast<double>(counts[b]);
      const double leave = na / (na - 1.0) * squared_distance(points.row(i), centroids.row(a));
      const double join = nb / (nb + 1.0) * squared_distance(points.row(i), centroids.row(b));
      if (join < leave * (1.0 - 1e-12)) {
        assign[i] = static_cast<int>(b);
        --counts[a];
        ++counts[b];
        recompute_centroids(points, assign, centroids);
        moved = true;
      }
    }
    if (!moved) break;
  }
}

struct Seeds {
  std::size_t c0 = 0, c1 = 0;
};

// Greedy k-means++: uniform first centre; the second is the best of
// kSeedTrials D^2-weighted draws by the resulting potential.
Seeds kmeanspp_seeds(const Tensor& points, Rng& rng) {
  constexpr std::size_t kSeedTrials = 2;  // 2 + floor(ln k)
  const std::size_t m = points.rows();
  std::uniform_int_distribution<std::size_t> first(0, m - 1);
  Seeds s;
  s.c0 = first(rng);
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) weights[i] = squared_distance(points.row(i), points.row(s.c0));
  std::discrete_distribution<std::size_t> second(weights.begin(), weights.end());
  double best_potential = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < kSeedTrials; ++t) {
    const std::size_t cand = second(rng);
    double potential = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      potential += std::min(weights[i], squared_distance(points.row(i), points.row(cand)));
    if (potential < best_potential) {
      best_potential = potential;
      s.c1 = cand;
    }
  }
  return s;
}

Tensor seed_centroids(const Tensor& points, Seeds seeds) {
  const std::size_t d = points.cols();
  Tensor c({2, d});
  std::copy_n(points.row(seeds.c0).begin(), d, c.row(0).begin());
  std::copy_n(points.row(seeds.c1).begin(), d, c.row(1).begin());
  return c;
}

// Centres of the best threshold split along the leading principal axis.
Tensor principal_split(const Tensor& points) {
  const std::size_t m = points.rows(), d = points.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < d; ++k) mean[k] += points(i, k) / static_cast<double>(m);
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += (points(i, a) - mean[a]) * (points(i, b) - mean[b]);
  std::vector<double> axis(d, 1.0);
  for (std::size_t k = 0; k < d; ++k) axis[k] += 0.1 * static_cast<double>(k);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> next(d, 0.0);
    double norm = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) next[a] += cov[a * d + b] * axis[b];
      norm += next[a] * next[a];
    }
    if (norm == 0.0) break;
    for (std::size_t a = 0; a < d; ++a) axis[a] = next[a] / std::sqrt(norm);
  }
  std::vector<std::size_t> order(m);
  std::vector<double> proj(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    order[i] = i;
    for (std::size_t k = 0; k < d; ++k) proj[i] += (points(i, k) - mean[k]) * axis[k];
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });
  // SSE of a prefix/suffix split from running sums: sum|x|^2 - |sum x|^2 / n
  std::vector<double> total(d, 0.0);
  double total_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      total[k] += points(i, k);
      total_sq += points(i, k) * points(i, k);
    }
  std::vector<double> left(d, 0.0);
  double left_sq = 0.0, best = std::numeric_limits<double>::infinity();
  std::size_t cut = 1;
  for (std::size_t n = 1; n < m; ++n) {
    const std::size_t i = order[n - 1];
    for (std::size_t k = 0; k < d; ++k) {
      left[k] += points(i, k);
      left_sq += points(i, k) * points(i, k);
    }
    double l2 = 0.0, r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      l2 += left[k] * left[k];
      r2 += (total[k] - left[k]) * (total[k] - left[k]);
    }
    const double sse = left_sq - l2 / static_cast<double>(n) + (total_sq - left_sq) - r2 / static_cast<double>(m - n);
    if (sse < best) {
      best = sse;
      cut = n;
    }
  }
  std::vector<int> assign(m, 1);
  for (std::size_t n = 0; n < cut; ++n) assign[order[n]] = 0;
  Tensor c({2, d});
  recompute_centroids(points, assign, c);
  return c;
}

Run lloyd(const Tensor& points, const KMeansConfig& cfg, Tensor init) {
  const std::size_t m = points.rows();
  Run run;
  run.centroids = std::move(init);

  std::vector<int> assign(m, -1);
  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    std::vector<int> next(m);
    for (std::size_t i = 0; i < m; ++i) next[i] = nearest(points.row(i), run.centroids);

    for (int c = 0; c < 2; ++c) {
      if (std::find(next.begin(), next.end(), c) != next.end()) continue;
      std::size_t far = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double dist = squared_distance(points.row(i), run.centroids.row(static_cast<std::size_t>(next[i])));
        if (dist > best) {
          best = dist;
          far = i;
        }
      }
      next[far] = c;
    }

    const bool stable = next == assign;
    assign = std::move(next);
    Tensor previous = run.centroids;
    recompute_centroids(points, assign, run.centroids);
    double shift = 0.0;
    for (int c = 0; c < 2; ++c)
      shift = std::max(shift, squared_distance(previous.row(static_cast<std::size_t>(c)),
                                               run.centroids.row(static_cast<std::size_t>(c))));
    if (stable || shift < cfg.tolerance * cfg.tolerance) break;
  }
  hartigan_refine(points, assign, run.centroids, cfg.max_iterations);
  run.assignments = std::move(assign);
  run.sse = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    run.sse += squared_distance(points.row(i), run.centroids.row(static_cast<std::size_t>(run.assignments[i])));
  return run;
}

}  // namespace

KMeansResult kmeans2(const Tensor& points, const KMeansConfig& cfg) {
  cfg.validate();
  const std::size_t m = points.rows();
  if (m == 0 || points.size() == 0) throw ContractError("kmeans2: no points");

  bool identical = true;
  for (std::size_t i = 1; i < m && identical; ++i) identical = squared_distance(points.row(i), points.row(0)) == 0.0;
  if (identical) {
    KMeansResult r;
    r.assignments.assign(m, 0);
    r.centroids = Tensor({2, points.cols()});
    for (std::size_t c = 0; c < 2; ++c) std::copy_n(points.row(0).begin(), points.cols(), r.centroids.row(c).begin());
    r.degenerate = true;
    return r;
  }

  Run best;
  best.sse = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, {r}));
    Tensor init = r == 0 ? principal_split(points) : seed_centroids(points, kmeanspp_seeds(points, rng));
    Run run = lloyd(points, cfg, std::move(init));
    if (run.sse < best.sse) best = std::move(run);
  }
  return KMeansResult{std::move(best.assignments), std::move(best.centroids), best.sse, false};
}

PartitionResult partition_negatives(std::span<const double> anchor, const Tensor& candidates,
                                    const KMeansConfig& cfg) {
  if (candidates.rows() < 2) throw ContractError("partition_negatives: need at least 2 candidates");
  if (anchor.size() != candidates.cols()) throw ShapeError("partition_negatives: anchor width mismatch");
  ++detail::g_partition_calls;

  Tensor normalized = candidates;
  normalize_rows(normalized);
  Tensor a = Tensor::row_vector(std::vector<double>(anchor.begin(), anchor.end()));
  normalize_rows(a);

  KMeansResult km = kmeans2(normalized, cfg);
  PartitionResult out;
  out.centroids = std::move(km.centroids);
  out.degenerate = km.degenerate;
  if (km.degenerate) {
    out.anchor_cluster = 0;
    out.labels.assign(candidates.rows(), 1);
    return out;
  }
  out.anchor_cluster = static_cast<std::size_t>(nearest(a.row(0), out.centroids));
  out.labels.resize(candidates.rows());
  for (std::size_t j = 0; j < candidates.rows(); ++j)
    out.labels[j] = static_cast<std::size_t>(km.assignments[j]) == out.anchor_cluster ? 1 : 0;
  return out;
}

}  // namespace augcl
