#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invctl/model.hpp"

namespace invctl {

/// Joint grid over all locations. State indices are mixed-radix with
/// location 0 as the most significant digit, so index order is lexicographic.
class StateSpace {
public:
    StateSpace(const Grid& grid, std::size_t dims);

    const Grid& grid() const { return grid_; }
    std::size_t dims() const { return dims_; }
    std::size_t per_dim() const { return per_dim_; }
    std::size_t size() const { return size_; }

    void decode(std::size_t state, std::span<std::size_t> idx) const;
    std::size_t encode(std::span<const std::size_t> idx) const;
    void coords(std::size_t state, std::span<double> x) const;
    /// State index of an on-grid point, or throws DomainError.
    std::size_t index_of(std::span<const double> x) const;

private:
    Grid grid_;
    std::size_t dims_;
    std::size_t per_dim_;
    std::size_t size_;
};

/// Stage-indexed cost-to-go, un-normalized (sum of stage costs). stages[N] is 0.
struct ValueFunction {
    std::vector<std::vector<double>> stages;

    /// V_k(x) / N, the per-period average reported to users.
    double average(std::size_t k, std::size_t state) const;
};

/// Stage-indexed joint order table; orders[k][state * locations + i].
struct TabularPolicy {
    Grid grid;
    std::size_t locations = 1;
    double max_order_per_location = 0.0;
    std::vector<std::vector<double>> orders;
    std::string tie_break = "lexicographic-min";

    std::size_t stages() const { return orders.size(); }
    std::span<const double> order(std::size_t k, std::size_t state) const {
        return {orders[k].data() + state * locations, locations};
    }
};

struct DpSolution {
    ValueFunction values;
    TabularPolicy policy;
};

/// Joint demand outcome on the grid lattice.
struct JointOutcome {
    std::vector<long long> steps;  // demand per location in grid steps
    std::vector<double> values;    // demand per location
    double prob = 0.0;
};

std::vector<JointOutcome> joint_outcomes(const Problem& p);

/// Backward induction over the joint grid. Next states clamp to the grid box;
/// holding/backlog is charged on the pre-clamp level. Ties go to the
/// lexicographically smallest order vector. `threads` <= 0 uses the OpenMP default.
DpSolution solve_joint_dp(const Problem& p, int threads = 0);

/// Same recursion for a one-location problem.
DpSolution solve_single_dp(const Problem& p, int threads = 0);

struct BaseStockExtraction {
    double S = 0.0;
    std::vector<double> boundary_exceptions;  // grid states at the box edge that break the pattern
};

struct SSExtraction {
    double s = 0.0;
    double S = 0.0;
    std::vector<double> boundary_exceptions;
};

/// Structural scan of a one-location stage table for max{S - x, 0}
/// (truncated to the action box). Throws StructureError at the first
/// interior violation.
BaseStockExtraction extract_base_stock(const TabularPolicy& pi, std::size_t k);

/// Structural scan for an (s, S) rule: order up to S below s, nothing at or above s.
SSExtraction extract_sS(const TabularPolicy& pi, std::size_t k);

/// Levels S with u^i(x) = max{S^i - x^i, 0} (truncated to the action box)
/// at every joint state of stage k, or empty if the stage is not a
/// decoupled base-stock rule. Exact check, no boundary exceptions.
std::optional<std::vector<double>> decoupled_base_stock_levels(const TabularPolicy& pi, std::size_t k);

/// Largest joint state count the solvers will enumerate.
inline constexpr std::size_t kMaxJointStates = 2'000'000;

namespace reference {

/// Serial Bellman recursion evaluating every (state, order) pair directly,
/// without the post-decision decomposition. Kept as a test reference.
DpSolution solve_joint_dp(const Problem& p);

} // namespace reference

} // namespace invctl
