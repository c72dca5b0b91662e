#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invctl/dp.hpp"
#include "invctl/model.hpp"

namespace invctl {

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::vector<std::string> lines;  // one per check, prefixed PASS/FAIL/INFO
};

/// Exhaustive scenario tree: every order vector at every node, every demand
/// outcome below it. Returns un-normalized V_0 for every grid state.
std::vector<double> scenario_tree_values(const Problem& p);

/// Small random DP-solvable instance (M <= 2, N <= 2, <= 6 grid points).
Problem random_small_instance(std::uint64_t seed);

/// Random i.i.d. discrete-demand instance for the stationary suite.
Problem random_stationary_instance(std::uint64_t seed);

/// Deterministic tabular policy with uniformly random feasible orders.
TabularPolicy random_tabular_policy(const Problem& p, std::uint64_t seed);

SuiteResult verify_theorem1(int threads = 0);
SuiteResult verify_transform(int threads = 0);
SuiteResult verify_oracle(int threads = 0);
SuiteResult verify_balancing_monotone();

std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, int threads = 0);

} // namespace invctl
