#pragma once

#include <cstdint>
#include <vector>

#include "rtann/kmeans.hpp"
#include "rtann/mlp.hpp"
#include "rtann/types.hpp"

namespace rtann {

// Cycle-cost knobs of the behavioral model. The reconfiguration cost is
// a labeled free parameter standing in for bitstream load time.
struct ReconfigCosts {
  std::int64_t reconfig_cycles = 100000;
  int num_distance_modules = 2;
  int pipeline_latency = kDefaultPipelineLatency;
};

// Gate isolating the reconfigurable partition from the static region.
// The partition may only be written while decoupled.
class DfxDecoupler {
 public:
  void decouple();
  void recouple();
  bool coupled() const { return coupled_; }
  std::int64_t toggles() const { return toggles_; }

 private:
  bool coupled_ = true;
  std::int64_t toggles_ = 0;
};

struct ReconfigEvent {
  int instance = 0;
  int cluster = 0;
  int model_index = 0;
  bool reconfigured = false;
};

struct ReconfigTrace {
  std::vector<ReconfigEvent> events;
  std::int64_t total_instances = 0;
  std::int64_t total_reconfigurations = 0;
  std::int64_t selection_cycles = 0;
  std::int64_t reconfiguration_cycles = 0;
  std::int64_t inference_cycles = 0;
  std::int64_t decoupler_toggles = 0;

  std::int64_t total_cycles() const {
    return selection_cycles + reconfiguration_cycles + inference_cycles;
  }
};

struct SimulationResult {
  ReconfigTrace trace;
  std::vector<int> predictions;  // class per instance
};

// Streams instances through the modeled architecture: competence
// selection, partial reconfiguration when the selected model is not the
// resident one (first instance always loads from the empty partition),
// then inference. Predictions are bit-identical to calling
// select_model + model_forward directly; the simulation only adds
// accounting. Map entries are validated against the ensemble before
// any instance is processed.
SimulationResult simulate_run(const Eigen::Ref<const RawMatrix>& instances,
                              const CentroidTable& table, const ClusterModelMap& map,
                              const Ensemble& ensemble, const ReconfigCosts& costs);

}  // namespace rtann
