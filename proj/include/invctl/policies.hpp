#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "invctl/balancing.hpp"
#include "invctl/dp.hpp"
#include "invctl/model.hpp"
#include "invctl/rng.hpp"

namespace invctl {

/// Order-up-to levels, levels[k][i]. A single stage row is used for every period.
struct BaseStockPolicy {
    std::vector<std::vector<double>> levels;
};

struct SSLevels {
    double s = 0.0;
    double S = 0.0;
};

/// (s, S) pairs, levels[k][i]. A single stage row is used for every period.
struct SSPolicy {
    std::vector<std::vector<SSLevels>> levels;
};

/// Randomized cost-balancing rule for one location.
struct BalancingPolicy {
    std::shared_ptr<const BalancingState> state;
};

/// Parameters of the order-splitting construction on the set-valued
/// discount instance: V = {M, M(1 + delta)}.
struct TightnessParams {
    std::size_t locations = 2;
    double epsilon = 0.1;
    double l = 1.0;
    double h = 4.0;
    double backlog = 100.0;

    double delta() const { return epsilon / (l + 2.0); }
};

/// Orders the smallest v in V that lifts the total inventory to M(1 + delta),
/// split so the lowest levels end up equal.
struct ExplicitVPolicy {
    std::size_t locations = 2;
    double delta = 0.0;
    std::vector<double> V;  // ascending {M, M(1 + delta)}
    double threshold = 0.0;
};

struct Policy;

/// Componentwise composition of single-location policies.
struct DecoupledPolicy {
    std::vector<Policy> components;
};

struct Policy {
    using Kind = std::variant<TabularPolicy, BaseStockPolicy, SSPolicy, DecoupledPolicy, BalancingPolicy, ExplicitVPolicy>;

    Kind kind;
    std::string name;

    std::size_t locations() const;
    /// True when no component draws randomness or adapts online.
    bool exact_evaluable() const;
};

/// Joint order for state `x` at stage `k`, written to `out`, always inside the
/// feasible action box. `stream` is only touched by balancing components.
void act(const Problem& p, const Policy& pi, int k, std::span<const double> x, std::span<double> out,
         RandomStream& stream);

/// Convenience overload for deterministic policies.
std::vector<double> act(const Problem& p, const Policy& pi, int k, std::span<const double> x);

Policy make_tabular(TabularPolicy table, std::string name = "tabular");
Policy make_base_stock(std::vector<double> levels, std::string name = "base_stock");
Policy make_sS(std::vector<SSLevels> levels, std::string name = "sS");
Policy make_decoupled(std::vector<Policy> components, std::string name = "decoupled");

/// Decoupled base-stock policy that is optimal for (l z, r, W): one
/// single-location DP per location, levels read off every stage.
Policy make_pi_square(const Problem& p, double l, int threads = 0);

/// Decoupled (s, S) policy optimal for each (K_h 1(z) + h z, r^i, W^i).
Policy make_pi_diamond(const Problem& p, double fixed_charge, double slope, int threads = 0);

/// Randomized cost-balancing rule applied to each location independently.
Policy make_balancing(const Problem& p, double fixed_charge, BalancingOptions opts = {});

Policy make_pi_v(const TightnessParams& params);

} // namespace invctl
