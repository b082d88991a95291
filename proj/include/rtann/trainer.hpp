#pragma once

#include <cstdint>
#include <vector>

#include "rtann/kmeans.hpp"
#include "rtann/mlp.hpp"
#include "rtann/types.hpp"

namespace rtann {

// Stratified train/test partition. Disjoint, covering,
// |train| = round(ratio * N), per-class proportions within one sample
// of the global ratio.
struct SplitPlan {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  std::uint64_t seed = 0;
  double ratio = 0.85;
};

SplitPlan split_dataset(const Eigen::Ref<const IntVector>& labels, double ratio,
                        std::uint64_t seed);

// Stratified 50/50 partition of the training fold. Set A trains the
// first three ensemble members, set B the remaining two; odd counts
// favor A.
struct DiversitySplit {
  std::vector<int> set_a_indices;
  std::vector<int> set_b_indices;
};

DiversitySplit diversity_split(const SplitPlan& plan,
                               const Eigen::Ref<const IntVector>& labels,
                               std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int epochs = 300;
  int batch_size = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

// z-score transform fitted on training statistics. Constant columns
// get unit scale so they pass through centered.
struct Standardizer {
  Vector mean;
  Vector stddev;

  Matrix apply(const Eigen::Ref<const Matrix>& x) const;
  Vector apply_row(const Eigen::Ref<const Vector>& x) const;
};

Standardizer fit_standardizer(const Eigen::Ref<const Matrix>& x);

// Float weights straight out of training, before quantization.
struct FloatModel {
  ModelSpec spec;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// He-style scaled uniform initialization from the seeded stream.
FloatModel init_model(const ModelSpec& spec, std::uint64_t seed);

// Mini-batch SGD with momentum minimizing cross-entropy over a softmax
// head (training only; inference never sees the softmax). Deterministic
// for a seed. Features must already be standardized.
FloatModel train_model(const ModelSpec& spec, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const IntVector>& y, const TrainConfig& cfg);

// Float-path label prediction (training-side reference for the
// quantization agreement metric).
int float_predict(const FloatModel& m, const Eigen::Ref<const Vector>& x);

struct QuantizedModelResult {
  QuantizedModel model;
  int saturation_count = 0;
  // Fraction of calibration rows where float and quantized inference
  // pick the same label.
  double calibration_agreement = 1.0;
};

QuantizedModelResult quantize_model(const FloatModel& fm, FixedFormat fmt,
                                    const Eigen::Ref<const Matrix>& calibration_x);

// Per-cluster competence table: cluster j goes to the model with the
// best accuracy on the training points whose nearest centroid is j.
// Ties break to the model with fewer neurons, then the lower index;
// clusters with no training points get the globally best model.
struct CompetenceResult {
  ClusterModelMap map;
  std::vector<int> assigned_model_index;      // per cluster
  Matrix cluster_accuracy;                    // k x n_models
  std::vector<int> cluster_sizes;
  int global_best_index = 0;
};

CompetenceResult assign_competence(const Ensemble& ensemble, const CentroidTable& table,
                                   const Eigen::Ref<const RawMatrix>& x_raw,
                                   const Eigen::Ref<const IntVector>& y);

}  // namespace rtann
