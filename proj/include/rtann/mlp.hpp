#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtann/fixed_point.hpp"
#include "rtann/types.hpp"

namespace rtann {

// Layer parameterization of one ensemble member.
struct ModelSpec {
  std::string model_id;
  std::vector<int> hidden_layers;
  int n_inputs = 0;
  int n_classes = 0;

  int total_neurons() const;  // sum of hidden widths + n_classes
  // {n_inputs, hidden..., n_classes}
  std::vector<int> layer_sizes() const;
  void validate() const;
};

// Fixed-point weights and biases, layer by layer. Weight matrix of
// layer l has shape fan_in(l) x width(l); the output layer maps the
// last hidden width to n_classes.
struct QuantizedModel {
  ModelSpec spec;
  std::vector<RawMatrix> weights;
  std::vector<RawVector> biases;
  FixedFormat fmt{};

  void validate() const;
};

struct OneHotResult {
  int class_index = -1;
  std::vector<std::uint8_t> one_hot;
  RawVector logits;  // raw fixed-point, model format
};

// One MAC neuron: narrow(mac(x, w) + b) through the compare-and-select
// ReLU. Hidden-layer semantics; output neurons skip the ReLU.
Fixed neuron_forward(std::span<const Fixed> x, std::span<const Fixed> w, Fixed bias);

// Full quantized inference: ReLU on hidden layers, identity on the
// output layer, argmax with lowest-index tie-break.
OneHotResult model_forward(const Eigen::Ref<const RawVector>& x_raw,
                           const QuantizedModel& m);

// Neurons visited by one inference pass; the cycle model's latency unit.
std::int64_t inference_latency(const ModelSpec& spec);

// The loaded set of models the selector chooses from.
struct Ensemble {
  std::vector<QuantizedModel> models;

  int index_of(std::string_view model_id) const;  // -1 if absent
  const QuantizedModel& at(int index) const { return models.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(models.size()); }
};

}  // namespace rtann
