#pragma once

#include <cstddef>
#include <vector>

#include "invctl/model.hpp"

namespace invctl {

/// Per-location stationary base-stock levels.
struct StationaryLevels {
    std::vector<double> S;
};

/// Steady-state cost split: ordering constant plus holding/backlog per location.
struct StationaryCost {
    double ordering = 0.0;
    std::vector<double> holding;

    double total() const;
};

/// Long-run average cost of a stationary base-stock policy. In steady state each
/// period re-orders the previous period's demand, so the average is
/// E[c(sum_i w_i)] + sum_i E[r^i(S^i - w_i)], independent of transients.
StationaryCost stationary_cost_breakdown(const StationaryLevels& levels, const Problem& p);
double stationary_cost(const StationaryLevels& levels, const Problem& p);

/// Per-location argmin of E[r^i(S - w)] over the state grid; ties to the smaller S.
StationaryLevels optimize_individual(const Problem& p);

/// Exhaustive search over the joint grid of stationary_cost; ties to the
/// lexicographically smallest level vector.
StationaryLevels optimize_joint(const Problem& p, int threads = 0);

/// Largest joint candidate count optimize_joint will enumerate.
inline constexpr double kMaxJointCandidates = 5e7;

} // namespace invctl
