#include "rtann/resources.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rtann {

namespace {

constexpr double kLutSlope = 73.7;
constexpr double kLutIntercept = 473.0;
constexpr double kFfSlope = 72.9;
constexpr double kFfIntercept = 1013.0;

std::int64_t checked(std::int64_t v, const char* component) {
  if (v < 0) {
    std::ostringstream os;
    os << "resource total for " << component << " would be negative (" << v
       << "); overhead calibration does not fit this ensemble";
    throw std::invalid_argument(os.str());
  }
  return v;
}

double pct_2dp(std::int64_t used, std::int64_t capacity) {
  const double pct = 100.0 * static_cast<double>(used) / static_cast<double>(capacity);
  return static_cast<double>(std::llround(pct * 100.0)) / 100.0;
}

}  // namespace

ResourceVector apply_delta(const ResourceVector& r, const ResourceDelta& d) {
  return {checked(r.luts + d.luts, "LUTs"), checked(r.ffs + d.ffs, "FFs"),
          checked(r.dsps + d.dsps, "DSPs"), checked(r.brams + d.brams, "BRAMs")};
}

ResourceVector estimate_resources(const ModelSpec& spec) {
  spec.validate();
  const std::int64_t neurons = spec.total_neurons();
  ResourceVector r;
  r.dsps = 2 * neurons;  // one multiplier pair per MAC neuron
  r.luts = std::llround(kLutSlope * static_cast<double>(neurons) + kLutIntercept);
  r.ffs = std::llround(kFfSlope * static_cast<double>(neurons) + kFfIntercept);
  r.brams = 0;
  return r;
}

ResourceVector competence_estimator_resources() { return {2958, 6335, 50, 7}; }

Utilization utilization(const ResourceVector& r, const DeviceBudget& d) {
  if (d.luts <= 0 || d.ffs <= 0 || d.dsps <= 0 || d.brams <= 0) {
    throw std::invalid_argument("utilization: device capacities must be positive");
  }
  Utilization u;
  u.luts_pct = pct_2dp(r.luts, d.luts);
  u.ffs_pct = pct_2dp(r.ffs, d.ffs);
  u.dsps_pct = pct_2dp(r.dsps, d.dsps);
  u.brams_pct = pct_2dp(r.brams, d.brams);
  u.feasible = u.luts_pct <= 100.0 && u.ffs_pct <= 100.0 && u.dsps_pct <= 100.0 &&
               u.brams_pct <= 100.0;
  return u;
}

OverheadModel OverheadModel::calibrated_default() {
  OverheadModel oh;
  oh.static_extra = {15517, 13337, 0, 6};
  oh.dynamic_extra = {4600, 3785, -8, 1};
  return oh;
}

namespace {

ComponentSaving saving(std::int64_t stat, std::int64_t dyn) {
  ComponentSaving s;
  s.absolute = stat - dyn;
  s.percent_of_static =
      stat == 0 ? 0.0 : 100.0 * static_cast<double>(stat - dyn) / static_cast<double>(stat);
  return s;
}

}  // namespace

ArchitectureComparison compare_static_dynamic(const std::vector<ResourceVector>& models,
                                              const ResourceVector& ce,
                                              const OverheadModel& overhead,
                                              const DeviceBudget& budget) {
  if (models.empty()) {
    throw std::invalid_argument("compare_static_dynamic: need at least one model");
  }
  ResourceVector sum;
  ResourceVector peak = models.front();
  for (const ResourceVector& m : models) {
    sum += m;
    peak = ResourceVector::cwise_max(peak, m);
  }

  ArchitectureComparison cmp;
  cmp.static_total = apply_delta(sum + ce, overhead.static_extra);
  cmp.dynamic_total = apply_delta(peak + ce, overhead.dynamic_extra);
  cmp.static_util = utilization(cmp.static_total, budget);
  cmp.dynamic_util = utilization(cmp.dynamic_total, budget);
  cmp.luts = saving(cmp.static_total.luts, cmp.dynamic_total.luts);
  cmp.ffs = saving(cmp.static_total.ffs, cmp.dynamic_total.ffs);
  cmp.dsps = saving(cmp.static_total.dsps, cmp.dynamic_total.dsps);
  cmp.brams = saving(cmp.static_total.brams, cmp.dynamic_total.brams);
  return cmp;
}

}  // namespace rtann
