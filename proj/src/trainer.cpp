#include "rtann/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rtann/rng.hpp"

namespace rtann {

namespace {

int n_classes_of(const Eigen::Ref<const IntVector>& labels) {
  int c = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) c = std::max(c, labels[i] + 1);
  return c;
}

// Largest-remainder allocation: each class contributes floor(ratio*n_c)
// or one more, and the grand total hits `target` exactly.
std::vector<int> stratified_quota(const std::vector<std::vector<int>>& by_class,
                                  double ratio, int target) {
  const int n_classes = static_cast<int>(by_class.size());
  std::vector<int> quota(by_class.size());
  std::vector<std::pair<double, int>> remainder;  // (-frac, class) for stable sort
  int allocated = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double exact = ratio * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<int>(std::floor(exact));
    allocated += quota[c];
    remainder.emplace_back(-(exact - std::floor(exact)), c);
  }
  std::sort(remainder.begin(), remainder.end());
  for (int i = 0; allocated < target && i < n_classes; ++i) {
    const int c = remainder[static_cast<std::size_t>(i)].second;
    if (quota[c] < static_cast<int>(by_class[c].size())) {
      ++quota[c];
      ++allocated;
    }
  }
  // Rounding edge: if floors alone overshoot (cannot happen for ratio
  // in (0,1), kept as a guard), trim from the smallest remainders.
  for (int i = n_classes - 1; allocated > target && i >= 0; --i) {
    const int c = remainder[static_cast<std::size_t>(i)].second;
    if (quota[c] > 0) {
      --quota[c];
      --allocated;
    }
  }
  return quota;
}

std::vector<std::vector<int>> group_by_class(const Eigen::Ref<const IntVector>& labels,
                                             const std::vector<int>& subset) {
  const int n_classes = n_classes_of(labels);
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(n_classes));
  for (const int i : subset) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

SplitPlan split_dataset(const Eigen::Ref<const IntVector>& labels, double ratio,
                        std::uint64_t seed) {
  const Eigen::Index n = labels.size();
  if (n < 20) {
    std::ostringstream os;
    os << "split_dataset: need at least 20 samples, got " << n;
    throw std::invalid_argument(os.str());
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    std::ostringstream os;
    os << "split_dataset: ratio " << ratio
       << " leaves an empty train or test fold; need 0 < ratio < 1";
    throw std::invalid_argument(os.str());
  }

  std::vector<int> all(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = static_cast<int>(i);
  std::vector<std::vector<int>> by_class = group_by_class(labels, all);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < 2) {
      std::ostringstream os;
      os << "split_dataset: class " << c << " has " << by_class[c].size()
         << " sample(s); stratification needs at least 2 per class";
      throw std::invalid_argument(os.str());
    }
  }

  const int target = static_cast<int>(std::llround(ratio * static_cast<double>(n)));
  const std::vector<int> quota = stratified_quota(by_class, ratio, target);

  Rng rng(seed);
  SplitPlan plan;
  plan.seed = seed;
  plan.ratio = ratio;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    rng.shuffle(by_class[c]);
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      if (i < static_cast<std::size_t>(quota[c])) {
        plan.train_indices.push_back(by_class[c][i]);
      } else {
        plan.test_indices.push_back(by_class[c][i]);
      }
    }
  }
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

DiversitySplit diversity_split(const SplitPlan& plan,
                               const Eigen::Ref<const IntVector>& labels,
                               std::uint64_t seed) {
  if (plan.train_indices.size() < 10) {
    std::ostringstream os;
    os << "diversity_split: need at least 10 training samples, got "
       << plan.train_indices.size();
    throw std::invalid_argument(os.str());
  }
  std::vector<std::vector<int>> by_class = group_by_class(labels, plan.train_indices);
  const int target =
      static_cast<int>((plan.train_indices.size() + 1) / 2);  // odd count favors A
  const std::vector<int> quota = stratified_quota(by_class, 0.5, target);

  Rng rng(Rng::splitmix(seed ^ 0x6469766572736974ULL));  // distinct stream from the 85/15 split
  DiversitySplit split;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    rng.shuffle(by_class[c]);
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      if (i < static_cast<std::size_t>(quota[c])) {
        split.set_a_indices.push_back(by_class[c][i]);
      } else {
        split.set_b_indices.push_back(by_class[c][i]);
      }
    }
  }
  std::sort(split.set_a_indices.begin(), split.set_a_indices.end());
  std::sort(split.set_b_indices.begin(), split.set_b_indices.end());
  return split;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
  }
}

Matrix Standardizer::apply(const Eigen::Ref<const Matrix>& x) const {
  return ((x.rowwise() - mean.transpose()).array().rowwise() /
          stddev.transpose().array())
      .matrix();
}

Vector Standardizer::apply_row(const Eigen::Ref<const Vector>& x) const {
  return ((x - mean).array() / stddev.array()).matrix();
}

Standardizer fit_standardizer(const Eigen::Ref<const Matrix>& x) {
  if (x.rows() < 1) throw std::invalid_argument("fit_standardizer: empty matrix");
  Standardizer s;
  s.mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - s.mean.transpose();
  s.stddev = (centered.array().square().colwise().sum() / static_cast<double>(x.rows()))
                 .sqrt()
                 .transpose()
                 .matrix();
  for (Eigen::Index j = 0; j < s.stddev.size(); ++j) {
    if (s.stddev[j] <= 0.0) s.stddev[j] = 1.0;  // constant column
  }
  return s;
}

FloatModel init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  FloatModel m;
  m.spec = spec;
  const std::vector<int> sizes = spec.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int width = sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    Matrix w(fan_in, width);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        w(r, c) = rng.uniform(-limit, limit);
      }
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(width));
  }
  return m;
}

namespace {

// Forward pass on a batch; returns per-layer activations (a[0] is the
// input batch). ReLU on hidden layers, identity logits at the top.
std::vector<Matrix> batch_forward(const FloatModel& m, const Matrix& batch) {
  std::vector<Matrix> act;
  act.reserve(m.weights.size() + 1);
  act.push_back(batch);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Matrix z = (act.back() * m.weights[l]).rowwise() + m.biases[l].transpose();
    if (l + 1 < m.weights.size()) z = z.cwiseMax(0.0);
    act.push_back(std::move(z));
  }
  return act;
}

// Stable softmax rows in place; returns mean cross-entropy given labels.
double softmax_rows(Matrix& z, const std::vector<int>& batch_labels) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double zmax = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - zmax).exp().matrix();
    const double total = z.row(r).sum();
    z.row(r) /= total;
    loss -= std::log(std::max(z(r, batch_labels[static_cast<std::size_t>(r)]), 1e-300));
  }
  return loss / static_cast<double>(z.rows());
}

}  // namespace

FloatModel train_model(const ModelSpec& spec, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const IntVector>& y, const TrainConfig& cfg) {
  spec.validate();
  if (x.rows() != y.size()) {
    throw std::invalid_argument("train_model: feature rows and labels disagree");
  }
  if (x.cols() != spec.n_inputs) {
    std::ostringstream os;
    os << "train_model: model '" << spec.model_id << "' expects " << spec.n_inputs
       << " inputs, data has " << x.cols();
    throw std::invalid_argument(os.str());
  }
  if (cfg.epochs < 0) throw std::invalid_argument("train_model: epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train_model: learning_rate must be > 0");

  FloatModel m = init_model(spec, cfg.seed);
  if (cfg.epochs == 0) return m;

  Rng rng(Rng::splitmix(cfg.seed ^ 0x747261696e696e67ULL));  // batch-order stream
  std::vector<Matrix> vel_w;
  std::vector<Vector> vel_b;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    vel_w.push_back(Matrix::Zero(m.weights[l].rows(), m.weights[l].cols()));
    vel_b.push_back(Vector::Zero(m.biases[l].size()));
  }

  const Eigen::Index n = x.rows();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Matrix batch(b, x.cols());
      std::vector<int> batch_labels(static_cast<std::size_t>(b));
      for (Eigen::Index r = 0; r < b; ++r) {
        const int src = order[static_cast<std::size_t>(start + r)];
        batch.row(r) = x.row(src);
        batch_labels[static_cast<std::size_t>(r)] = y[src];
      }

      std::vector<Matrix> act = batch_forward(m, batch);
      Matrix probs = act.back();
      epoch_loss += softmax_rows(probs, batch_labels);
      ++batches;

      // delta at the softmax head: (p - onehot) / batch
      Matrix delta = probs;
      for (Eigen::Index r = 0; r < b; ++r) {
        delta(r, batch_labels[static_cast<std::size_t>(r)]) -= 1.0;
      }
      delta /= static_cast<double>(b);

      for (int l = static_cast<int>(m.weights.size()) - 1; l >= 0; --l) {
        const Matrix grad_w = act[static_cast<std::size_t>(l)].transpose() * delta;
        const Vector grad_b = delta.colwise().sum().transpose();
        if (l > 0) {
          Matrix back = delta * m.weights[static_cast<std::size_t>(l)].transpose();
          // ReLU gate; post-activation > 0 iff pre-activation > 0
          back.array() *= (act[static_cast<std::size_t>(l)].array() > 0.0).cast<double>();
          delta = std::move(back);
        }
        vel_w[static_cast<std::size_t>(l)] =
            cfg.momentum * vel_w[static_cast<std::size_t>(l)] - cfg.learning_rate * grad_w;
        vel_b[static_cast<std::size_t>(l)] =
            cfg.momentum * vel_b[static_cast<std::size_t>(l)] - cfg.learning_rate * grad_b;
        m.weights[static_cast<std::size_t>(l)] += vel_w[static_cast<std::size_t>(l)];
        m.biases[static_cast<std::size_t>(l)] += vel_b[static_cast<std::size_t>(l)];
      }
    }
    if (!std::isfinite(epoch_loss / std::max(batches, 1))) {
      std::ostringstream os;
      os << "train_model: model '" << spec.model_id << "' diverged at epoch " << epoch
         << " (learning_rate " << cfg.learning_rate << ")";
      throw std::runtime_error(os.str());
    }
  }
  return m;
}

int float_predict(const FloatModel& m, const Eigen::Ref<const Vector>& x) {
  Matrix row = x.transpose();
  const std::vector<Matrix> act = batch_forward(m, row);
  Eigen::Index best;
  act.back().row(0).maxCoeff(&best);
  // maxCoeff picks the first maximum, matching the argmax tie-break.
  return static_cast<int>(best);
}

QuantizedModelResult quantize_model(const FloatModel& fm, FixedFormat fmt,
                                    const Eigen::Ref<const Matrix>& calibration_x) {
  fmt.require_valid();
  QuantizedModelResult out;
  out.model.spec = fm.spec;
  out.model.fmt = fmt;
  for (std::size_t l = 0; l < fm.weights.size(); ++l) {
    if (!fm.weights[l].allFinite() || !fm.biases[l].allFinite()) {
      throw std::invalid_argument("quantize_model: non-finite weight in layer " +
                                  std::to_string(l));
    }
    MatrixQuantizeResult wq = quantize_matrix(fm.weights[l], fmt);
    VectorQuantizeResult bq = quantize_vector(fm.biases[l], fmt);
    out.saturation_count += wq.saturations + bq.saturations;
    out.model.weights.push_back(std::move(wq.raw));
    out.model.biases.push_back(std::move(bq.raw));
  }
  out.model.validate();

  if (calibration_x.rows() > 0) {
    int agree = 0;
    for (Eigen::Index i = 0; i < calibration_x.rows(); ++i) {
      const int fl = float_predict(fm, calibration_x.row(i).transpose());
      const RawVector xq = quantize_vector(calibration_x.row(i).transpose(), fmt).raw;
      const int qu = model_forward(xq, out.model).class_index;
      agree += fl == qu ? 1 : 0;
    }
    out.calibration_agreement =
        static_cast<double>(agree) / static_cast<double>(calibration_x.rows());
  }
  return out;
}

CompetenceResult assign_competence(const Ensemble& ensemble, const CentroidTable& table,
                                   const Eigen::Ref<const RawMatrix>& x_raw,
                                   const Eigen::Ref<const IntVector>& y) {
  if (ensemble.size() < 1) throw std::invalid_argument("assign_competence: empty ensemble");
  if (x_raw.rows() != y.size()) {
    throw std::invalid_argument("assign_competence: feature rows and labels disagree");
  }
  if (x_raw.cols() != table.n_features()) {
    throw std::invalid_argument("assign_competence: feature width does not match the centroid table");
  }

  const int k = table.k();
  const int n_models = ensemble.size();
  const Eigen::Index n = x_raw.rows();

  // correct[k][m] / sizes[k], plus global tallies, all exact counts.
  std::vector<std::vector<int>> correct(static_cast<std::size_t>(k),
                                        std::vector<int>(static_cast<std::size_t>(n_models), 0));
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  std::vector<int> global_correct(static_cast<std::size_t>(n_models), 0);

  for (Eigen::Index i = 0; i < n; ++i) {
    const RawVector xi = x_raw.row(i).transpose();
    const int cluster = nearest_centroid(xi, table);
    ++sizes[static_cast<std::size_t>(cluster)];
    for (int mdl = 0; mdl < n_models; ++mdl) {
      const int pred = model_forward(xi, ensemble.at(mdl)).class_index;
      if (pred == y[i]) {
        ++correct[static_cast<std::size_t>(cluster)][static_cast<std::size_t>(mdl)];
        ++global_correct[static_cast<std::size_t>(mdl)];
      }
    }
  }

  const auto better = [&](int challenger, int incumbent, const std::vector<int>& score) {
    if (score[static_cast<std::size_t>(challenger)] != score[static_cast<std::size_t>(incumbent)]) {
      return score[static_cast<std::size_t>(challenger)] > score[static_cast<std::size_t>(incumbent)];
    }
    const int nc = ensemble.at(challenger).spec.total_neurons();
    const int ni = ensemble.at(incumbent).spec.total_neurons();
    if (nc != ni) return nc < ni;
    return false;  // lower index wins, incumbent scanned first
  };

  CompetenceResult out;
  out.global_best_index = 0;
  for (int mdl = 1; mdl < n_models; ++mdl) {
    if (better(mdl, out.global_best_index, global_correct)) out.global_best_index = mdl;
  }

  out.cluster_accuracy = Matrix::Zero(k, n_models);
  out.cluster_sizes = sizes;
  for (int j = 0; j < k; ++j) {
    int pick;
    if (sizes[static_cast<std::size_t>(j)] == 0) {
      pick = out.global_best_index;
    } else {
      pick = 0;
      for (int mdl = 1; mdl < n_models; ++mdl) {
        if (better(mdl, pick, correct[static_cast<std::size_t>(j)])) pick = mdl;
      }
      for (int mdl = 0; mdl < n_models; ++mdl) {
        out.cluster_accuracy(j, mdl) =
            static_cast<double>(correct[static_cast<std::size_t>(j)][static_cast<std::size_t>(mdl)]) /
            static_cast<double>(sizes[static_cast<std::size_t>(j)]);
      }
    }
    out.assigned_model_index.push_back(pick);
    out.map.model_ids.push_back(ensemble.at(pick).spec.model_id);
  }
  return out;
}

}  // namespace rtann
