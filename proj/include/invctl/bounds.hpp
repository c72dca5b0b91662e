#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "invctl/model.hpp"

namespace invctl {

/// l z <= c(z) <= h z for all z > 0. A witness of nullopt means the bound is
/// a limit (z -> 0+, z -> infinity, or a one-sided limit at a breakpoint).
struct SectorFit {
    double l = 0.0;
    double h = 0.0;
    std::optional<double> l_witness;
    std::optional<double> h_witness;

    double ratio() const { return h / l; }
};

/// K_l 1(z) + l z <= c(z) <= K_h 1(z) + h z for all z > 0.
struct AffineFit {
    double K_l = 0.0;
    double l = 0.0;
    double K_h = 0.0;
    double h = 0.0;
    std::size_t locations = 1;
    /// M max{K_h / K_l, h / l}
    double objective = 0.0;

    double spread() const;
};

using CostFit = std::variant<SectorFit, AffineFit>;

enum class PolicyFamily { BaseStock, SS, Online };

/// Optional upper end of the fit domain; unbounded (all z > 0) by default.
struct FitDomain {
    std::optional<double> z_max;
};

/// Tightest sector: extremes of c(z)/z, which on each affine piece are
/// monotone, so only breakpoints, one-sided limits, z -> infinity and
/// discount points are candidates.
SectorFit fit_sector(const OrderingCost& c, FitDomain domain = {});

/// Affine envelopes minimizing M max{K_h/K_l, h/l}. For a fixed lower envelope
/// the best upper one is a common multiple of it, so the fit maximizes
/// t = 1/rho subject to lower feasibility and c <= rho * lower, a
/// three-variable linear program solved exactly by vertex enumeration.
AffineFit fit_affine(const OrderingCost& c, std::size_t locations, FitDomain domain = {});

/// h/l, M max{.}, 2h/l or 3M max{.} depending on fit kind and family.
double theoretical_ratio(const CostFit& fit, std::size_t locations, PolicyFamily family);

std::string to_string(PolicyFamily family);

/// Exact envelope check at every breakpoint, one-sided limit, discount point
/// and the asymptotic slope. Returns the worst violation (<= 0 when feasible).
double sector_violation(const OrderingCost& c, const SectorFit& fit, FitDomain domain = {});
double affine_violation(const OrderingCost& c, const AffineFit& fit, FitDomain domain = {});

} // namespace invctl
