#pragma once

#include <cstddef>
#include <vector>

#include "invctl/model.hpp"
#include "invctl/rng.hpp"

namespace invctl {

/// Which demand term enters the holding proxy H_k.
enum class HoldingProxyVariant {
    /// a * max{0, u - max{0, w_n - x}} summed over the periods n = k..N-1 left
    /// in the horizon, one period's demand per term.
    Printed,
    /// Same sum with the cumulative demand w_k + ... + w_n in place of w_n.
    Cumulative,
};

struct BalancingOptions {
    HoldingProxyVariant variant = HoldingProxyVariant::Printed;
    double tolerance = 1e-9;   // cost units
    int max_iterations = 200;
    int quadrature_points = 256;  // midpoint atoms for uniform demand
};

/// Immutable per-location data for the randomized cost-balancing rule.
/// Expected proxies are exact sums over demand atoms; uniform demand is
/// replaced by a midpoint quadrature rule.
class BalancingState {
public:
    BalancingState(const Problem& p, std::size_t location, double fixed_charge, BalancingOptions opts = {});

    std::size_t location() const { return location_; }
    double fixed_charge() const { return fixed_charge_; }
    double holding_rate() const { return a_; }
    double backlog_rate() const { return b_; }
    int horizon() const { return horizon_; }
    const BalancingOptions& options() const { return opts_; }

    /// E[H_k(u)] at inventory x.
    double expected_holding(int k, double x, double u) const;
    /// E[B_k(u)] = b E[max{0, w_k - max{0, x + u}}].
    double expected_backlog(int k, double x, double u) const;
    /// Largest feasible order at x (action box).
    double max_order(double x) const;

private:
    std::size_t location_;
    double fixed_charge_;
    double a_;
    double b_;
    int horizon_;
    double max_order_per_location_;
    double grid_max_;
    BalancingOptions opts_;
    std::vector<Atom> demand_;
    std::vector<std::vector<Atom>> holding_terms_;  // per stage, weights already summed over n
};

struct BalancingOrder {
    double order = 0.0;
    double theta = 0.0;
    bool saturated = false;
};

struct HoldingKOrder {
    double order = 0.0;
    bool saturated = false;
};

/// Balancing quantity: solves E[H_k(u)] = E[B_k(u)] by bisection on [0, u_max].
BalancingOrder balancing_order(const BalancingState& s, int k, double x);

/// Solves E[H_k(u)] = K. Saturates at u_max when K exceeds E[H_k(u_max)].
HoldingKOrder holding_cost_K_order(const BalancingState& s, int k, double x);

/// p with p K = p E[B(u~)] + (1 - p) E[B(0)], clamped to [0, 1].
double balancing_probability(const BalancingState& s, int k, double x, double u_tilde);

struct BalancingStep {
    double theta = 0.0;
    double u_hat = 0.0;
    double u_tilde = 0.0;
    double p = 0.0;
    double order = 0.0;
};

/// One decision of the randomized rule; draws from `stream` only when theta < K.
BalancingStep act_balancing(const BalancingState& s, int k, double x, RandomStream& stream);

} // namespace invctl
