#include "invctl/balancing.hpp"

#include <algorithm>
#include <cmath>

namespace invctl {

namespace {

std::vector<Atom> location_atoms(const Problem& p, std::size_t i, int quadrature_points) {
    if (std::holds_alternative<DiscreteDemand>(p.demand.locations.at(i)))
        return demand_pmf(p.demand, i);
    const auto& u = std::get<UniformDemand>(p.demand.locations[i]);
    std::vector<Atom> atoms;
    const double width = (u.hi - u.lo) / quadrature_points;
    for (int j = 0; j < quadrature_points; ++j)
        atoms.push_back({u.lo + (j + 0.5) * width, 1.0 / quadrature_points});
    return atoms;
}

// Sorts and merges atoms whose values agree to 1e-9.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> out;
    for (const auto& a : atoms) {
        if (!out.empty() && std::abs(out.back().value - a.value) <= 1e-9)
            out.back().prob += a.prob;
        else
            out.push_back(a);
    }
    return out;
}

std::vector<Atom> convolve(const std::vector<Atom>& lhs, const std::vector<Atom>& rhs) {
    std::vector<Atom> out;
    out.reserve(lhs.size() * rhs.size());
    for (const auto& a : lhs)
        for (const auto& b : rhs)
            out.push_back({a.value + b.value, a.prob * b.prob});
    return merge_atoms(std::move(out));
}

constexpr std::size_t kMaxCumulativeAtoms = 200'000;

} // namespace

BalancingState::BalancingState(const Problem& p, std::size_t location, double fixed_charge, BalancingOptions opts)
    : location_(location), fixed_charge_(fixed_charge), opts_(opts) {
    if (location >= p.locations)
        throw DomainError("balancing: location " + std::to_string(location) + " out of range");
    if (fixed_charge < 0.0)
        throw DomainError("balancing: fixed charge must be nonnegative");
    a_ = p.holding.rates.at(location).holding;
    b_ = p.holding.rates.at(location).backlog;
    horizon_ = p.periods();
    max_order_per_location_ = p.max_order_per_location;
    grid_max_ = p.grid.max;
    demand_ = location_atoms(p, location, opts.quadrature_points);

    // holding_terms_[k] collects the demand terms of the periods n = k..N-1 left
    // in the horizon, with their multiplicity.
    const auto N = static_cast<std::size_t>(horizon_);
    holding_terms_.resize(N + 1);
    if (opts.variant == HoldingProxyVariant::Printed) {
        for (std::size_t k = 0; k < N; ++k) {
            auto terms = demand_;
            const double count = static_cast<double>(N - k);
            for (auto& t : terms)
                t.prob *= count;
            holding_terms_[k] = std::move(terms);
        }
    } else {
        // sums[j - 1]: cumulative demand over j periods
        std::vector<std::vector<Atom>> sums;
        sums.push_back(demand_);
        for (std::size_t j = 2; j <= N; ++j) {
            sums.push_back(convolve(sums.back(), demand_));
            if (sums.back().size() > kMaxCumulativeAtoms)
                throw UnsupportedError("cumulative holding proxy: demand-sum support too large for this horizon");
        }
        std::vector<Atom> acc;
        for (std::size_t k = N; k-- > 0;) {
            const auto& s = sums[N - k - 1];
            acc.insert(acc.end(), s.begin(), s.end());
            acc = merge_atoms(std::move(acc));
            holding_terms_[k] = acc;
        }
    }
}

double BalancingState::expected_holding(int k, double x, double u) const {
    if (u <= 0.0)
        return 0.0;
    const auto& terms = holding_terms_.at(static_cast<std::size_t>(std::clamp(k, 0, horizon_)));
    double acc = 0.0;
    for (const auto& t : terms)
        acc += t.prob * std::max(0.0, u - std::max(0.0, t.value - x));
    return a_ * acc;
}

double BalancingState::expected_backlog(int /*k*/, double x, double u) const {
    const double level = std::max(0.0, x + u);
    double acc = 0.0;
    for (const auto& d : demand_)
        acc += d.prob * std::max(0.0, d.value - level);
    return b_ * acc;
}

double BalancingState::max_order(double x) const { return std::max(0.0, std::min(max_order_per_location_, grid_max_ - x)); }

BalancingOrder balancing_order(const BalancingState& s, int k, double x) {
    const double backlog0 = s.expected_backlog(k, x, 0.0);
    if (backlog0 <= 0.0)
        return {0.0, 0.0, false};
    const double hi_u = s.max_order(x);
    auto gap = [&](double u) { return s.expected_holding(k, x, u) - s.expected_backlog(k, x, u); };
    if (gap(hi_u) < 0.0)
        return {hi_u, s.expected_backlog(k, x, hi_u), true};

    double lo = 0.0;
    double hi = hi_u;
    double mid = hi;
    for (int it = 0; it < s.options().max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= s.options().tolerance)
            break;
        if (g < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 0.0)
            break;
    }
    return {mid, s.expected_holding(k, x, mid), false};
}

HoldingKOrder holding_cost_K_order(const BalancingState& s, int k, double x) {
    const double K = s.fixed_charge();
    if (!(K > 0.0))
        throw DomainError("holding-cost-K quantity needs a positive fixed charge");
    const double hi_u = s.max_order(x);
    if (s.expected_holding(k, x, hi_u) < K)
        return {hi_u, true};
    double lo = 0.0;
    double hi = hi_u;
    double mid = hi;
    for (int it = 0; it < s.options().max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = s.expected_holding(k, x, mid) - K;
        if (std::abs(g) <= s.options().tolerance)
            break;
        if (g < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 0.0)
            break;
    }
    return {mid, false};
}

double balancing_probability(const BalancingState& s, int k, double x, double u_tilde) {
    const double K = s.fixed_charge();
    if (!(K > 0.0))
        throw DomainError("balancing probability needs a positive fixed charge");
    const double backlog0 = s.expected_backlog(k, x, 0.0);
    if (backlog0 <= 0.0)
        return 0.0;
    const double denom = K - s.expected_backlog(k, x, u_tilde) + backlog0;
    if (denom <= 0.0)
        return 1.0;  // degenerate: ordering u~ never beats waiting
    return std::clamp(backlog0 / denom, 0.0, 1.0);
}

BalancingStep act_balancing(const BalancingState& s, int k, double x, RandomStream& stream) {
    BalancingStep step;
    const auto bal = balancing_order(s, k, x);
    step.theta = bal.theta;
    step.u_hat = bal.order;
    if (bal.theta >= s.fixed_charge()) {
        step.order = bal.order;
        step.p = 1.0;
        return step;
    }
    step.u_tilde = holding_cost_K_order(s, k, x).order;
    step.p = balancing_probability(s, k, x, step.u_tilde);
    step.order = stream.uniform01() < step.p ? step.u_tilde : 0.0;
    return step;
}

} // namespace invctl
