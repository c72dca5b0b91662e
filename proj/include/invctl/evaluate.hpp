#pragma once

#include <vector>

#include "invctl/model.hpp"
#include "invctl/policies.hpp"

namespace invctl {

/// Per-initial-state expectations from exact forward propagation, all
/// divided by N (per-period averages).
struct ExactEvaluation {
    std::vector<double> cost;             // J_pi(x0 | P)
    std::vector<double> order_total;      // E[(1/N) sum_k sum_i u_k^i]
    std::vector<double> demand_total;     // E[(1/N) sum_k sum_i w_k^i]
    std::vector<double> terminal_shift;   // E[(1/N) sum_i (x_N^i - x_0^i)]
    std::vector<double> clamp_residual;   // E[(1/N) sum_k sum_i (pre-clamp - clamped next level)]
};

/// Exact expected average cost of a deterministic grid policy from every grid
/// state, by propagating the state distribution forward stage by stage.
/// Balancing (online) policies are rejected; orders must stay on the grid.
std::vector<double> evaluate_policy_exact(const Problem& p, const Policy& pi, int threads = 0);

ExactEvaluation evaluate_policy_exact_detailed(const Problem& p, const Policy& pi, int threads = 0);

namespace reference {

/// Backward policy-evaluation recursion; independent of the forward kernel.
std::vector<double> evaluate_policy_backward(const Problem& p, const Policy& pi);

} // namespace reference

} // namespace invctl
