#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "invctl/errors.hpp"
#include "invctl/rng.hpp"

namespace invctl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform one-dimensional discretization. Coordinates are always computed
/// from the integer index, never by accumulating `step`.
struct Grid {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::size_t count() const;
    double point(std::size_t i) const { return min + static_cast<double>(i) * step; }
    /// Index of `x` if it lies on the grid within `tol`.
    std::optional<std::size_t> index_of(double x, double tol = 1e-9) const;
    /// Number of grid steps in `x` if it is an integer multiple of `step`.
    std::optional<long long> steps_in(double x, double tol = 1e-9) const;
};

struct Atom {
    double value;
    double prob;
};

struct DiscreteDemand {
    std::vector<double> values;
    std::vector<double> probs;
};

struct UniformDemand {
    double lo = 0.0;
    double hi = 1.0;
};

using LocationDemand = std::variant<DiscreteDemand, UniformDemand>;

struct DemandModel {
    std::vector<LocationDemand> locations;
    bool iid_across_periods = true;

    std::size_t num_locations() const { return locations.size(); }
    bool is_discrete() const;
    double mean(std::size_t i) const;
    double max_value(std::size_t i) const;
};

/// One affine piece of the ordering cost on the half-open interval (lower, upper]:
/// c(z) = fixed + slope * z.
struct CostPiece {
    double lower = 0.0;
    double upper = kInf;
    double fixed = 0.0;
    double slope = 0.0;
};

/// Isolated order total at which c(z) = slope * z overrides the covering piece.
struct DiscountPoint {
    double z = 0.0;
    double slope = 0.0;
};

/// Piecewise-affine cost of the total order across all locations.
struct OrderingCost {
    std::vector<CostPiece> pieces;
    std::vector<DiscountPoint> discount_set;

    static OrderingCost linear(double slope);
    static OrderingCost affine(double fixed, double slope);
    /// Same cost with `m * z` removed from every piece and discount point.
    OrderingCost without_linear_term(double m) const;
};

struct HoldingRates {
    double holding = 0.0;  // a
    double backlog = 0.0;  // b
};

/// r^i(x) = a_i max{0, x} + b_i max{0, -x}, additively separable over locations.
struct HoldingBacklogCost {
    std::vector<HoldingRates> rates;

    static HoldingBacklogCost uniform(std::size_t locations, double holding, double backlog);
};

struct FiniteHorizon {
    int periods = 1;
};

/// Long simulation standing in for the lim-sup average; the first `burn_in`
/// periods are excluded from the average.
struct InfiniteAveraged {
    int sim_periods = 1000;
    int burn_in = 0;
};

using Horizon = std::variant<FiniteHorizon, InfiniteAveraged>;

struct Problem {
    std::size_t locations = 1;
    Horizon horizon = FiniteHorizon{1};
    OrderingCost ordering;
    HoldingBacklogCost holding;
    DemandModel demand;
    Grid grid;
    double max_order_per_location = 0.0;

    bool is_finite() const { return std::holds_alternative<FiniteHorizon>(horizon); }
    /// Periods simulated (N for finite horizons, sim_periods otherwise).
    int periods() const;
    /// Periods whose cost enters the average.
    int averaged_periods() const;
    int burn_in() const;
};

double eval_ordering_cost(const OrderingCost& c, double z);
double eval_holding_cost(const HoldingBacklogCost& r, std::size_t i, double x);

/// Ascending (value, probability) list for a discrete location demand.
std::vector<Atom> demand_pmf(const DemandModel& d, std::size_t i);

/// Fills `out` with one independent draw per location. Consumes exactly one
/// uniform per location, so streams stay aligned across policies.
void sample_demand(const DemandModel& d, int period, RandomStream& stream, std::span<double> out);

/// All invariant violations; empty when valid. `for_dp` adds the constraints
/// exact dynamic programming needs (discrete demand aligned to the grid).
std::vector<Issue> validate_problem(const Problem& p, bool for_dp = false);

/// Throws ValidationError carrying every issue when the problem is invalid.
void require_valid(const Problem& p, bool for_dp = false);

/// Single-location problem (c, r^i, W^i) for location `i` with ordering cost `c`.
Problem restrict_to_location(const Problem& p, std::size_t i, OrderingCost c);

} // namespace invctl
