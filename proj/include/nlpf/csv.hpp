#pragma once

// CSV writers for trajectories, estimate records, and rate reports.
// Deterministic output: %.17g floats, '.' decimal separator, LF endings.

#include <string>
#include <vector>

#include "nlpf/diagnostics.hpp"
#include "nlpf/rate.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

std::string fmt_g17(double v);

// One row per node per saved level; levels 0, stride, 2*stride, ... and the
// final level always. z is written as nan at level 0 where it is undefined.
void write_trajectory_csv(const std::string& path, const DiscreteTrajectory& traj,
                          int stride = 1);

void write_estimates_csv(const std::string& path,
                         const std::vector<EstimateRecord>& recs);

// Data rows plus a trailing '# p = ..., M = ..., envelope = ...' summary.
void write_rates_csv(const std::string& path, const RateReport& rep);

}  // namespace nlpf
