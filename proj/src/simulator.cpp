#include "rtann/simulator.hpp"

#include <sstream>
#include <stdexcept>

namespace rtann {

void DfxDecoupler::decouple() {
  if (!coupled_) throw std::logic_error("DFX decoupler: already decoupled");
  coupled_ = false;
  ++toggles_;
}

void DfxDecoupler::recouple() {
  if (coupled_) throw std::logic_error("DFX decoupler: already coupled");
  coupled_ = true;
  ++toggles_;
}

SimulationResult simulate_run(const Eigen::Ref<const RawMatrix>& instances,
                              const CentroidTable& table, const ClusterModelMap& map,
                              const Ensemble& ensemble, const ReconfigCosts& costs) {
  if (map.k() != table.k()) {
    std::ostringstream os;
    os << "simulate_run: map covers " << map.k() << " clusters, table has " << table.k();
    throw std::invalid_argument(os.str());
  }
  // Resolve the map once; unknown ids fail before any instance runs.
  std::vector<int> cluster_to_model(static_cast<std::size_t>(map.k()));
  for (int j = 0; j < map.k(); ++j) {
    const int idx = ensemble.index_of(map.model_ids[static_cast<std::size_t>(j)]);
    if (idx < 0) {
      std::ostringstream os;
      os << "simulate_run: cluster " << j << " names model '"
         << map.model_ids[static_cast<std::size_t>(j)] << "' which is not in the ensemble";
      throw std::invalid_argument(os.str());
    }
    cluster_to_model[static_cast<std::size_t>(j)] = idx;
  }

  const SchedulePlan plan = schedule_rounds(table.k(), costs.num_distance_modules,
                                            table.n_features(), costs.pipeline_latency);

  SimulationResult out;
  DfxDecoupler decoupler;
  int resident = -1;  // partition starts empty
  for (Eigen::Index i = 0; i < instances.rows(); ++i) {
    const RawVector xi = instances.row(i).transpose();

    // Competence evaluation: all rounds of the distance schedule.
    const int cluster = nearest_centroid(xi, table);
    out.trace.selection_cycles += plan.total_cycles();

    const int model = cluster_to_model[static_cast<std::size_t>(cluster)];
    const bool reconfigure = model != resident;
    if (reconfigure) {
      decoupler.decouple();
      resident = model;
      out.trace.reconfiguration_cycles += costs.reconfig_cycles;
      decoupler.recouple();
      ++out.trace.total_reconfigurations;
    }

    const OneHotResult r = model_forward(xi, ensemble.at(model));
    out.trace.inference_cycles += inference_latency(ensemble.at(model).spec);

    out.trace.events.push_back(
        {static_cast<int>(i), cluster, model, reconfigure});
    out.predictions.push_back(r.class_index);
  }
  out.trace.total_instances = instances.rows();
  out.trace.decoupler_toggles = decoupler.toggles();
  return out;
}

}  // namespace rtann
