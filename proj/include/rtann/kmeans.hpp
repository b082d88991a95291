#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtann/fixed_point.hpp"
#include "rtann/types.hpp"

namespace rtann {

// Fitted centroids, quantized to the active format. Mirrors the
// centroid ROM: row j holds centroid j, indices stable from 0.
struct CentroidTable {
  RawMatrix centroids;  // k x n_features, raw fixed-point
  FixedFormat fmt{};

  int k() const { return static_cast<int>(centroids.rows()); }
  int n_features() const { return static_cast<int>(centroids.cols()); }
};

// Cluster j is served by the model named in entry j.
struct ClusterModelMap {
  std::vector<std::string> model_ids;

  int k() const { return static_cast<int>(model_ids.size()); }
};

struct KMeansConfig {
  int max_iter = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  CentroidTable table;     // quantized, what the selector uses
  Matrix centroids;        // float centroids at training precision
  std::vector<int> labels; // final assignment of the training points
  std::vector<double> inertia_history;  // one entry per assignment step
  int iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm with seeded k-means++ initialization. Training runs
// in real arithmetic; centroids are quantized once at the end. Empty
// clusters are re-seeded to the point farthest from its nearest
// centroid, keeping k constant.
KMeansResult kmeans_fit(const Eigen::Ref<const Matrix>& points, int k,
                        const KMeansConfig& cfg, FixedFormat fmt);

// Squared Euclidean distance in exact raw-units arithmetic (scale is
// 2^(2*frac_bits)). The square root is omitted: monotone, so argmin is
// unaffected.
int128 squared_distance_raw(const Eigen::Ref<const RawVector>& x,
                            const Eigen::Ref<const RawVector>& c);

// Same distance in dequantized units.
double squared_distance(const Eigen::Ref<const RawVector>& x,
                        const Eigen::Ref<const RawVector>& c, FixedFormat fmt);

// Index of the closest centroid; ties break to the lowest index, the
// way a comparator scanning the distances buffer in order would.
int nearest_centroid(const Eigen::Ref<const RawVector>& x, const CentroidTable& table);

struct Selection {
  int centroid_index = -1;
  std::string model_id;
};

Selection select_model(const Eigen::Ref<const RawVector>& x, const CentroidTable& table,
                       const ClusterModelMap& map);

// Time-multiplexing plan for num_dm distance modules over k centroids:
// ceil(k/num_dm) rounds of consecutive indices. Each round costs
// n_features cycles of accumulation plus a fixed pipeline latency.
struct SchedulePlan {
  std::vector<std::vector<int>> rounds;
  std::int64_t cycle_cost = 0;  // per round

  std::int64_t total_cycles() const {
    return cycle_cost * static_cast<std::int64_t>(rounds.size());
  }
};

inline constexpr int kDefaultPipelineLatency = 4;

SchedulePlan schedule_rounds(int k, int num_dm, int n_features,
                             int pipeline_latency = kDefaultPipelineLatency);

}  // namespace rtann
