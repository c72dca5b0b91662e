#include "invctl/stationary.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "invctl/dp.hpp"
#include "invctl/parallel.hpp"

namespace invctl {

namespace {

void check(const Problem& p) {
    require_valid(p, false);
    if (!p.demand.iid_across_periods)
        throw UnsupportedError("stationary cost needs demand i.i.d. across periods");
    if (!p.demand.is_discrete())
        throw UnsupportedError("stationary cost needs discrete demand for exact expectations");
}

double expected_holding(const Problem& p, std::size_t i, double S, const std::vector<Atom>& pmf) {
    double acc = 0.0;
    for (const auto& a : pmf)
        acc += a.prob * eval_holding_cost(p.holding, i, S - a.value);
    return acc;
}

double expected_order_cost(const Problem& p) {
    // enumerate the joint demand outcomes directly (no grid alignment needed)
    std::vector<std::pair<double, double>> totals{{0.0, 1.0}};
    for (std::size_t i = 0; i < p.locations; ++i) {
        const auto pmf = demand_pmf(p.demand, i);
        std::vector<std::pair<double, double>> next;
        for (const auto& [z, q] : totals)
            for (const auto& a : pmf)
                next.emplace_back(z + a.value, q * a.prob);
        totals = std::move(next);
    }
    double acc = 0.0;
    for (const auto& [z, q] : totals)
        acc += q * eval_ordering_cost(p.ordering, z);
    return acc;
}

// Ties within 1e-12 keep the earlier (smaller) candidate.
bool improves(double candidate, double best) { return std::isinf(best) ? candidate < best : candidate < best - 1e-12 * std::max(1.0, std::abs(best)); }

} // namespace

double StationaryCost::total() const { return ordering + std::accumulate(holding.begin(), holding.end(), 0.0); }

StationaryCost stationary_cost_breakdown(const StationaryLevels& levels, const Problem& p) {
    check(p);
    if (levels.S.size() != p.locations)
        throw DomainError("stationary levels have wrong length");
    StationaryCost out;
    out.ordering = expected_order_cost(p);
    for (std::size_t i = 0; i < p.locations; ++i)
        out.holding.push_back(expected_holding(p, i, levels.S[i], demand_pmf(p.demand, i)));
    return out;
}

double stationary_cost(const StationaryLevels& levels, const Problem& p) {
    return stationary_cost_breakdown(levels, p).total();
}

StationaryLevels optimize_individual(const Problem& p) {
    check(p);
    StationaryLevels out;
    const auto n = p.grid.count();
    for (std::size_t i = 0; i < p.locations; ++i) {
        const auto pmf = demand_pmf(p.demand, i);
        double best = kInf;
        double best_S = p.grid.min;
        for (std::size_t g = 0; g < n; ++g) {
            const double S = p.grid.point(g);
            const double v = expected_holding(p, i, S, pmf);
            if (improves(v, best)) {
                best = v;
                best_S = S;
            }
        }
        out.S.push_back(best_S);
    }
    return out;
}

StationaryLevels optimize_joint(const Problem& p, int threads) {
    check(p);
    const std::size_t n = p.grid.count();
    const double candidates = std::pow(static_cast<double>(n), static_cast<double>(p.locations));
    if (candidates > kMaxJointCandidates) {
        std::ostringstream os;
        os << "joint stationary search too large: M = " << p.locations << ", grid count product " << n << "^"
           << p.locations << " = " << candidates;
        throw SizeError(os.str());
    }
    const StateSpace space(p.grid, p.locations);
    const std::size_t total = space.size();
    const int nt = resolve_threads(threads);

    const double ordering = expected_order_cost(p);
    std::vector<std::vector<double>> per_location(p.locations, std::vector<double>(n));
    for (std::size_t i = 0; i < p.locations; ++i) {
        const auto pmf = demand_pmf(p.demand, i);
        for (std::size_t g = 0; g < n; ++g)
            per_location[i][g] = expected_holding(p, i, p.grid.point(g), pmf);
    }

    // per-thread best, then an ordered reduction by (cost, index)
    std::vector<double> best_cost(static_cast<std::size_t>(nt), kInf);
    std::vector<std::size_t> best_idx(static_cast<std::size_t>(nt), total);
#pragma omp parallel num_threads(nt)
    {
        const auto t = static_cast<std::size_t>(omp_get_thread_num());
        std::vector<std::size_t> idx(p.locations);
#pragma omp for schedule(static)
        for (std::size_t c = 0; c < total; ++c) {
            space.decode(c, idx);
            double v = ordering;
            for (std::size_t i = 0; i < p.locations; ++i)
                v += per_location[i][idx[i]];
            if (improves(v, best_cost[t]) || (best_idx[t] == total)) {
                best_cost[t] = v;
                best_idx[t] = c;
            }
        }
    }
    double best = kInf;
    std::size_t arg = total;
    for (std::size_t t = 0; t < best_cost.size(); ++t) {
        if (best_idx[t] == total)
            continue;
        if (improves(best_cost[t], best) ||
            (!improves(best, best_cost[t]) && !improves(best_cost[t], best) && best_idx[t] < arg)) {
            best = best_cost[t];
            arg = best_idx[t];
        }
    }
    StationaryLevels out;
    out.S.resize(p.locations);
    space.coords(arg, out.S);
    return out;
}

} // namespace invctl
