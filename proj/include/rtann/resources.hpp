#pragma once

#include <cstdint>
#include <vector>

#include "rtann/mlp.hpp"

namespace rtann {

// Post-synthesis resource counts for one block.
struct ResourceVector {
  std::int64_t luts = 0;
  std::int64_t ffs = 0;
  std::int64_t dsps = 0;
  std::int64_t brams = 0;

  ResourceVector operator+(const ResourceVector& o) const {
    return {luts + o.luts, ffs + o.ffs, dsps + o.dsps, brams + o.brams};
  }
  ResourceVector& operator+=(const ResourceVector& o) { return *this = *this + o; }

  static ResourceVector cwise_max(const ResourceVector& a, const ResourceVector& b) {
    return {std::max(a.luts, b.luts), std::max(a.ffs, b.ffs), std::max(a.dsps, b.dsps),
            std::max(a.brams, b.brams)};
  }
  bool all_leq(const ResourceVector& o) const {
    return luts <= o.luts && ffs <= o.ffs && dsps <= o.dsps && brams <= o.brams;
  }
  friend bool operator==(const ResourceVector& a, const ResourceVector& b) {
    return a.luts == b.luts && a.ffs == b.ffs && a.dsps == b.dsps && a.brams == b.brams;
  }
};

// Signed adjustment; infrastructure calibration can come out negative
// on some components and is reported as-is.
struct ResourceDelta {
  std::int64_t luts = 0;
  std::int64_t ffs = 0;
  std::int64_t dsps = 0;
  std::int64_t brams = 0;

  friend bool operator==(const ResourceDelta& a, const ResourceDelta& b) {
    return a.luts == b.luts && a.ffs == b.ffs && a.dsps == b.dsps && a.brams == b.brams;
  }
};

// Throws if any component would go negative.
ResourceVector apply_delta(const ResourceVector& r, const ResourceDelta& d);

// Device capacities. Defaults are the Ultra96-V2 fabric.
struct DeviceBudget {
  std::int64_t luts = 70560;
  std::int64_t ffs = 141120;
  std::int64_t dsps = 360;
  std::int64_t brams = 216;

  static DeviceBudget ultra96_v2() { return DeviceBudget{}; }
};

// Synthesis-cost model for one MLP accelerator:
//   dsps  = 2 * neurons                      (exact)
//   luts  = round(73.7 * neurons + 473)      (~1%)
//   ffs   = round(72.9 * neurons + 1013)     (~1%)
//   brams = 0
// Linear fit to the five reference model builds; degrades gracefully
// for unseen shapes.
ResourceVector estimate_resources(const ModelSpec& spec);

// Competence estimator block, taken from the reference build rather
// than modeled (a single calibration point cannot support a formula).
ResourceVector competence_estimator_resources();

// Percent of device capacity, rounded to two decimals. Values over
// 100% are legal and mark an infeasible design.
struct Utilization {
  double luts_pct = 0.0;
  double ffs_pct = 0.0;
  double dsps_pct = 0.0;
  double brams_pct = 0.0;
  bool feasible = true;
};

Utilization utilization(const ResourceVector& r, const DeviceBudget& d);

// Infrastructure not attributable to any one block (DMA, interconnect,
// decoupler fabric). Calibrated per architecture from the reference
// totals minus the parts we can compute; the dynamic DSP delta comes
// out negative there, which is kept, not hidden.
struct OverheadModel {
  ResourceDelta static_extra;
  ResourceDelta dynamic_extra;

  // Both architectures share one infrastructure vector.
  static OverheadModel uniform(const ResourceDelta& d) { return {d, d}; }
  // Calibration constants back-solved from the reference Ultra96-V2
  // build of the five-model vehicle ensemble.
  static OverheadModel calibrated_default();
};

struct ComponentSaving {
  std::int64_t absolute = 0;   // static - dynamic
  double percent_of_static = 0.0;
};

struct ArchitectureComparison {
  ResourceVector static_total;   // all models resident: sum + CE + overhead
  ResourceVector dynamic_total;  // one resident model: max + CE + overhead
  Utilization static_util;
  Utilization dynamic_util;
  ComponentSaving luts, ffs, dsps, brams;
};

ArchitectureComparison compare_static_dynamic(const std::vector<ResourceVector>& models,
                                              const ResourceVector& ce,
                                              const OverheadModel& overhead,
                                              const DeviceBudget& budget);

}  // namespace rtann
