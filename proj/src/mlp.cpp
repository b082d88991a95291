#include "rtann/mlp.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rtann {

int ModelSpec::total_neurons() const {
  return std::accumulate(hidden_layers.begin(), hidden_layers.end(), 0) + n_classes;
}

std::vector<int> ModelSpec::layer_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(hidden_layers.size() + 2);
  sizes.push_back(n_inputs);
  sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
  sizes.push_back(n_classes);
  return sizes;
}

void ModelSpec::validate() const {
  if (model_id.empty()) throw std::invalid_argument("ModelSpec: model_id must be non-empty");
  if (n_inputs < 1) throw std::invalid_argument("ModelSpec '" + model_id + "': n_inputs must be >= 1");
  if (n_classes < 2) throw std::invalid_argument("ModelSpec '" + model_id + "': n_classes must be >= 2");
  for (std::size_t i = 0; i < hidden_layers.size(); ++i) {
    if (hidden_layers[i] < 1) {
      std::ostringstream os;
      os << "ModelSpec '" << model_id << "': hidden layer " << i << " has width "
         << hidden_layers[i] << ", must be >= 1";
      throw std::invalid_argument(os.str());
    }
  }
}

void QuantizedModel::validate() const {
  spec.validate();
  fmt.require_valid();
  const std::vector<int> sizes = spec.layer_sizes();
  const std::size_t n_layers = sizes.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers) {
    std::ostringstream os;
    os << "model '" << spec.model_id << "': expected " << n_layers
       << " weight/bias layers, got " << weights.size() << "/" << biases.size();
    throw std::invalid_argument(os.str());
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = sizes[l];
    const int width = sizes[l + 1];
    if (weights[l].rows() != fan_in || weights[l].cols() != width) {
      std::ostringstream os;
      os << "model '" << spec.model_id << "': layer " << l << " weights are "
         << weights[l].rows() << "x" << weights[l].cols() << ", expected fan-in "
         << fan_in << " x width " << width;
      throw std::invalid_argument(os.str());
    }
    if (biases[l].size() != width) {
      std::ostringstream os;
      os << "model '" << spec.model_id << "': layer " << l << " biases have length "
         << biases[l].size() << ", expected " << width;
      throw std::invalid_argument(os.str());
    }
  }
}

Fixed neuron_forward(std::span<const Fixed> x, std::span<const Fixed> w, Fixed bias) {
  return relu(narrow(fixed_mac(x, w, bias)));
}

namespace {

// One layer over raw storage. Exact integer MAC per neuron, then
// narrow; ReLU only on hidden layers.
RawVector layer_forward(const Eigen::Ref<const RawVector>& x, const RawMatrix& w,
                        const RawVector& b, FixedFormat fmt, bool relu_after) {
  const Eigen::Index width = w.cols();
  RawVector out(width);
  for (Eigen::Index j = 0; j < width; ++j) {
    const Accumulator acc = mac_raw(x, w.col(j), b[j], fmt);
    Fixed s = narrow(acc);
    if (relu_after) s = relu(s);
    out[j] = s.raw;
  }
  return out;
}

}  // namespace

OneHotResult model_forward(const Eigen::Ref<const RawVector>& x_raw,
                           const QuantizedModel& m) {
  if (x_raw.size() != m.spec.n_inputs) {
    std::ostringstream os;
    os << "model '" << m.spec.model_id << "': input has " << x_raw.size()
       << " features, expected " << m.spec.n_inputs;
    throw std::invalid_argument(os.str());
  }
  RawVector activ = x_raw;
  const std::size_t n_layers = m.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const bool hidden = l + 1 < n_layers;
    activ = layer_forward(activ, m.weights[l], m.biases[l], m.fmt, hidden);
  }

  OneHotResult out;
  out.logits = activ;
  out.class_index = 0;
  for (Eigen::Index j = 1; j < activ.size(); ++j) {
    if (activ[j] > activ[out.class_index]) out.class_index = static_cast<int>(j);
  }
  out.one_hot.assign(static_cast<std::size_t>(activ.size()), 0);
  out.one_hot[static_cast<std::size_t>(out.class_index)] = 1;
  return out;
}

std::int64_t inference_latency(const ModelSpec& spec) {
  return static_cast<std::int64_t>(spec.total_neurons());
}

int Ensemble::index_of(std::string_view model_id) const {
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].spec.model_id == model_id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace rtann
