#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invctl/model.hpp"
#include "invctl/policies.hpp"
#include "invctl/rng.hpp"

namespace invctl {

struct SimConfig {
    int runs = 1000;
    std::uint64_t seed = 0;
    /// Explicit initial states; the full joint grid when empty.
    std::vector<std::vector<double>> initial_states;
    std::optional<int> horizon_override;
    bool crn = false;
    int threads = 0;
};

/// Problem with the horizon length replaced (N for finite, sim_periods otherwise).
Problem with_horizon(const Problem& p, std::optional<int> periods);

/// Demand and policy stream seeds for one (state, run). Without CRN the policy
/// tag also enters the demand seed.
std::uint64_t demand_stream_seed(const SimConfig& cfg, std::size_t state, std::size_t run, const Policy& pi);
std::uint64_t policy_stream_seed(const SimConfig& cfg, std::size_t state, std::size_t run, const Policy& pi);

struct PeriodRecord {
    int period = 0;
    std::vector<double> state;
    std::vector<double> order;
    std::vector<double> demand;
    double ordering_cost = 0.0;
    double holding_cost = 0.0;
};

/// Average cost of one trajectory from x0. Holding/backlog is charged on the
/// pre-clamp level x + u - w; the next state is clamped into [grid.min, grid.max].
double simulate_run(const Problem& p, const Policy& pi, std::span<const double> x0, RandomStream& demand,
                    RandomStream& policy, std::vector<PeriodRecord>* trace = nullptr);

struct CostEstimate {
    double mean = 0.0;
    /// Sample std / sqrt(runs); empty when runs == 1.
    std::optional<double> se;
};

/// Mean of simulate_run over cfg.runs derived streams. `state` is the index
/// entering the seed derivation.
CostEstimate estimate_cost(const Problem& p, const Policy& pi, std::span<const double> x0, std::size_t state,
                           const SimConfig& cfg);

enum class EvalMode { Auto, Exact, MonteCarlo };

struct RatioRow {
    std::vector<double> state;
    CostEstimate num;
    CostEstimate den;
    double ratio = 0.0;
};

struct RatioReport {
    std::string num_policy;
    std::string den_policy;
    bool num_exact = false;
    bool den_exact = false;
    std::vector<RatioRow> rows;
    double mean_ratio = 0.0;
    double max_ratio = 0.0;
    std::size_t argmax = 0;
    int runs = 0;
    std::uint64_t seed = 0;
    bool crn = true;
    double runtime_seconds = 0.0;
};

/// Per-initial-state ratio of mean costs. Auto mode evaluates a side exactly
/// iff its policy is named "optimal".
RatioReport ratio_heatmap(const Problem& p, const Policy& num, const Policy& den, const SimConfig& cfg,
                          EvalMode num_mode = EvalMode::Auto, EvalMode den_mode = EvalMode::Auto);

/// Initial states used by cfg (explicit list or the full joint grid).
std::vector<std::vector<double>> initial_states(const Problem& p, const SimConfig& cfg);

struct TransformRow {
    std::vector<double> state;
    double cost = 0.0;            // J(x0 | P)
    double transformed = 0.0;     // J(x0 | P^)
    double demand_term = 0.0;     // m E[(1/N) sum w]
    double order_term = 0.0;      // m E[(1/N) sum u]
    double printed_gap = 0.0;     // J - (J^ + demand_term)
    double corrected_gap = 0.0;   // J - (J^ + order_term)
    double tolerance = 0.0;
};

struct TransformReport {
    double slope = 0.0;
    bool exact = true;
    std::vector<TransformRow> rows;
    double max_printed_gap = 0.0;
    double max_corrected_gap = 0.0;
    bool printed_holds = false;
    bool corrected_holds = false;
};

/// Checks J(P) = J(P^) + m E[(1/N) sum_k sum_i w] with P^ = (c - m z, r, W).
/// Since sum_k u_k = sum_k w_k + x_N - x_0 + (clamp residual), the corrected
/// form with the order total holds exactly; both are reported. Deterministic
/// grid policies use exact evaluation (1e-9); online policies use Monte Carlo
/// under CRN (3 combined standard errors).
TransformReport verify_cost_transformation(const Problem& p, const Policy& pi, double m, const SimConfig& cfg);

namespace reference {

/// Serial loop over runs in order, no OpenMP.
CostEstimate estimate_cost(const Problem& p, const Policy& pi, std::span<const double> x0, std::size_t state,
                           const SimConfig& cfg);

} // namespace reference

} // namespace invctl
