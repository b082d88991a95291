#include "rtann/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rtann/rng.hpp"

namespace rtann {

namespace {

double sq_dist(const Eigen::Ref<const Matrix>& points, Eigen::Index i,
               const Matrix& centroids, Eigen::Index j) {
  return (points.row(i) - centroids.row(j)).squaredNorm();
}

int count_distinct_rows(const Eigen::Ref<const Matrix>& points) {
  std::vector<int> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
    }
    return false;
  });
  int distinct = points.rows() > 0 ? 1 : 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!(points.row(order[i]) - points.row(order[i - 1])).isZero(0.0)) ++distinct;
  }
  return distinct;
}

Matrix kmeanspp_init(const Eigen::Ref<const Matrix>& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.below(n)));

  Vector best(n);
  for (Eigen::Index i = 0; i < n; ++i) best[i] = sq_dist(points, i, centroids, 0);

  for (int c = 1; c < k; ++c) {
    const double total = best.sum();
    Eigen::Index pick = 0;
    if (total <= 0.0) {
      // All remaining mass at distance zero; any point works.
      pick = static_cast<Eigen::Index>(rng.below(n));
    } else {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += best[i];
        if (r < cum) {
          pick = i;
          break;
        }
        pick = i;
      }
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(points, i, centroids, c));
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans_fit(const Eigen::Ref<const Matrix>& points, int k,
                        const KMeansConfig& cfg, FixedFormat fmt) {
  fmt.require_valid();
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (k < 1) throw std::invalid_argument("kmeans_fit: k must be >= 1");
  if (n < k) {
    std::ostringstream os;
    os << "kmeans_fit: " << n << " points cannot support k=" << k;
    throw std::invalid_argument(os.str());
  }
  if (const int distinct = count_distinct_rows(points); distinct < k) {
    std::ostringstream os;
    os << "kmeans_fit: k=" << k << " exceeds the " << distinct
       << " distinct points (" << (n - distinct)
       << " duplicate rows make the requested partition degenerate)";
    throw std::invalid_argument(os.str());
  }

  Rng rng(cfg.seed);
  KMeansResult out;
  Matrix centroids = kmeanspp_init(points, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    // Assignment step; ties break to the lowest centroid index.
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best_j = 0;
      double best_d = sq_dist(points, i, centroids, 0);
      for (int j = 1; j < k; ++j) {
        const double dj = sq_dist(points, i, centroids, j);
        if (dj < best_d) {
          best_d = dj;
          best_j = j;
        }
      }
      inertia += best_d;
      if (labels[static_cast<std::size_t>(i)] != best_j) {
        labels[static_cast<std::size_t>(i)] = best_j;
        changed = true;
      }
    }
    out.inertia_history.push_back(inertia);
    out.iterations = iter + 1;

    if (!changed) {
      // Lloyd fixed point: centroids are already the member means.
      out.converged = true;
      break;
    }

    // Update step.
    Matrix sums = Matrix::Zero(k, d);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    Matrix next(k, d);
    std::vector<int> empties;
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        next.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      } else {
        next.row(j) = centroids.row(j);
        empties.push_back(j);
      }
    }
    // Re-seed each empty cluster to the point farthest from its
    // nearest centroid, in ascending cluster order.
    for (const int j : empties) {
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::max();
        for (int c = 0; c < k; ++c) {
          nearest = std::min(nearest, sq_dist(points, i, next, c));
        }
        if (nearest > far_d) {
          far_d = nearest;
          far = i;
        }
      }
      next.row(j) = points.row(far);
    }

    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (shift < cfg.tol) {
      out.converged = true;
      break;
    }
  }

  {
    // Final assignment so labels and inertia always match the returned
    // centroids, whatever path ended the loop.
    double inertia_f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best_j = 0;
      double best_d = sq_dist(points, i, centroids, 0);
      for (int j = 1; j < k; ++j) {
        const double dj = sq_dist(points, i, centroids, j);
        if (dj < best_d) {
          best_d = dj;
          best_j = j;
        }
      }
      labels[static_cast<std::size_t>(i)] = best_j;
      inertia_f += best_d;
    }
    if (out.inertia_history.empty() || inertia_f != out.inertia_history.back()) {
      out.inertia_history.push_back(inertia_f);
    }
  }

  out.centroids = centroids;
  out.labels = labels;
  out.table.fmt = fmt;
  out.table.centroids = quantize_matrix(centroids, fmt).raw;
  return out;
}

int128 squared_distance_raw(const Eigen::Ref<const RawVector>& x,
                            const Eigen::Ref<const RawVector>& c) {
  if (x.size() != c.size()) {
    std::ostringstream os;
    os << "squared_distance: dimension mismatch (" << x.size() << " vs " << c.size() << ")";
    throw std::invalid_argument(os.str());
  }
  int128 acc = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const std::int64_t diff =
        static_cast<std::int64_t>(x[i]) - static_cast<std::int64_t>(c[i]);
    acc += static_cast<int128>(diff * diff);
  }
  return acc;
}

double squared_distance(const Eigen::Ref<const RawVector>& x,
                        const Eigen::Ref<const RawVector>& c, FixedFormat fmt) {
  const double scale = static_cast<double>(fmt.scale());
  return static_cast<double>(squared_distance_raw(x, c)) / (scale * scale);
}

int nearest_centroid(const Eigen::Ref<const RawVector>& x, const CentroidTable& table) {
  if (x.size() != table.n_features()) {
    std::ostringstream os;
    os << "nearest_centroid: instance has " << x.size() << " features, table expects "
       << table.n_features();
    throw std::invalid_argument(os.str());
  }
  int best = 0;
  int128 best_d = squared_distance_raw(x, table.centroids.row(0).transpose());
  for (int j = 1; j < table.k(); ++j) {
    const int128 dj = squared_distance_raw(x, table.centroids.row(j).transpose());
    if (dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  return best;
}

Selection select_model(const Eigen::Ref<const RawVector>& x, const CentroidTable& table,
                       const ClusterModelMap& map) {
  if (map.k() != table.k()) {
    std::ostringstream os;
    os << "select_model: map covers " << map.k() << " clusters, table has " << table.k();
    throw std::invalid_argument(os.str());
  }
  Selection s;
  s.centroid_index = nearest_centroid(x, table);
  s.model_id = map.model_ids[static_cast<std::size_t>(s.centroid_index)];
  return s;
}

SchedulePlan schedule_rounds(int k, int num_dm, int n_features, int pipeline_latency) {
  if (k < 1) throw std::invalid_argument("schedule_rounds: k must be >= 1");
  if (num_dm < 1) throw std::invalid_argument("schedule_rounds: num_dm must be >= 1");
  if (n_features < 1) throw std::invalid_argument("schedule_rounds: n_features must be >= 1");
  SchedulePlan plan;
  plan.cycle_cost = static_cast<std::int64_t>(n_features) + pipeline_latency;
  const int n_rounds = (k + num_dm - 1) / num_dm;
  plan.rounds.reserve(static_cast<std::size_t>(n_rounds));
  for (int r = 0; r < n_rounds; ++r) {
    std::vector<int> round;
    for (int j = r * num_dm; j < std::min((r + 1) * num_dm, k); ++j) {
      round.push_back(j);
    }
    plan.rounds.push_back(std::move(round));
  }
  return plan;
}

}  // namespace rtann
