#include "invctl/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "invctl/parallel.hpp"

namespace invctl {

namespace {

// Orders of a deterministic policy for every (stage, state), in grid steps.
struct ActionTable {
    std::vector<std::vector<long long>> steps;  // [k][state * M + i]
};

ActionTable tabulate(const Problem& p, const Policy& pi, const StateSpace& space) {
    if (!pi.exact_evaluable())
        throw UnsupportedError("exact evaluation does not support randomized or online policies (" + pi.name +
                               "); use Monte Carlo estimation");
    if (pi.locations() != p.locations)
        throw DomainError("policy covers " + std::to_string(pi.locations()) + " locations, problem has " +
                          std::to_string(p.locations));
    const std::size_t M = p.locations;
    const int N = p.periods();
    ActionTable table;
    table.steps.assign(static_cast<std::size_t>(N), std::vector<long long>(space.size() * M));
    std::vector<double> x(M);
    for (int k = 0; k < N; ++k) {
        for (std::size_t s = 0; s < space.size(); ++s) {
            space.coords(s, x);
            const auto u = act(p, pi, k, x);
            for (std::size_t i = 0; i < M; ++i) {
                auto st = p.grid.steps_in(u[i]);
                if (!st)
                    throw UnsupportedError("exact evaluation: policy " + pi.name + " orders off the grid lattice");
                table.steps[static_cast<std::size_t>(k)][s * M + i] = *st;
            }
        }
    }
    return table;
}

void check(const Problem& p) {
    require_valid(p, true);
    if (!p.is_finite())
        throw UnsupportedError("exact evaluation requires a finite horizon");
    const double states = std::pow(static_cast<double>(p.grid.count()), static_cast<double>(p.locations));
    if (states > static_cast<double>(kMaxJointStates))
        throw SizeError("joint grid too large for exact evaluation: M = " + std::to_string(p.locations));
}

} // namespace

ExactEvaluation evaluate_policy_exact_detailed(const Problem& p, const Policy& pi, int threads) {
    check(p);
    const StateSpace space(p.grid, p.locations);
    const auto actions = tabulate(p, pi, space);
    const auto outcomes = joint_outcomes(p);
    const std::size_t M = p.locations;
    const std::size_t S = space.size();
    const int N = p.periods();
    const long long top = static_cast<long long>(space.per_dim()) - 1;
    const int nt = resolve_threads(threads);

    // expected holding/backlog at each post-order state
    std::vector<double> stage_cost(S);
    std::vector<double> mean_clamp(S);
    for (std::size_t y = 0; y < S; ++y) {
        std::vector<std::size_t> iy(M);
        space.decode(y, iy);
        double acc = 0.0;
        double clamp_acc = 0.0;
        for (const auto& o : outcomes) {
            double c = 0.0;
            double cl = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                const double pre = p.grid.point(iy[i]) - o.values[i];
                c += eval_holding_cost(p.holding, i, pre);
                const long long raw = static_cast<long long>(iy[i]) - o.steps[i];
                cl += static_cast<double>(raw - std::clamp(raw, 0LL, top)) * p.grid.step;
            }
            acc += o.prob * c;
            clamp_acc += o.prob * cl;
        }
        stage_cost[y] = acc;
        mean_clamp[y] = clamp_acc;
    }
    double mean_demand = 0.0;
    for (std::size_t i = 0; i < M; ++i)
        mean_demand += p.demand.mean(i);

    ExactEvaluation out;
    out.cost.resize(S);
    out.order_total.resize(S);
    out.demand_total.assign(S, mean_demand);
    out.terminal_shift.resize(S);
    out.clamp_residual.resize(S);

#pragma omp parallel for num_threads(nt) schedule(dynamic, 4)
    for (std::size_t x0 = 0; x0 < S; ++x0) {
        std::vector<double> dist(S, 0.0), next(S, 0.0);
        std::vector<std::size_t> active{x0}, next_active;
        std::vector<std::size_t> ix(M), iy(M), in(M);
        dist[x0] = 1.0;
        double cost = 0.0, orders = 0.0, clamp_total = 0.0;
        for (int k = 0; k < N; ++k) {
            const auto& act_k = actions.steps[static_cast<std::size_t>(k)];
            next_active.clear();
            std::sort(active.begin(), active.end());
            for (std::size_t s : active) {
                const double q = dist[s];
                dist[s] = 0.0;
                if (q == 0.0)
                    continue;
                space.decode(s, ix);
                long long total = 0;
                for (std::size_t i = 0; i < M; ++i) {
                    const long long u = act_k[s * M + i];
                    total += u;
                    iy[i] = ix[i] + static_cast<std::size_t>(u);
                }
                const std::size_t y = space.encode(iy);
                const double order_units = static_cast<double>(total) * p.grid.step;
                cost += q * (eval_ordering_cost(p.ordering, order_units) + stage_cost[y]);
                orders += q * order_units;
                clamp_total += q * mean_clamp[y];
                for (const auto& o : outcomes) {
                    for (std::size_t i = 0; i < M; ++i)
                        in[i] = static_cast<std::size_t>(std::clamp(static_cast<long long>(iy[i]) - o.steps[i], 0LL, top));
                    const std::size_t n = space.encode(in);
                    if (next[n] == 0.0)
                        next_active.push_back(n);
                    next[n] += q * o.prob;
                }
            }
            std::swap(dist, next);
            std::swap(active, next_active);
        }
        // terminal inventory shift
        double terminal = 0.0;
        std::vector<double> x0c(M), xc(M);
        space.coords(x0, x0c);
        for (std::size_t s : active) {
            if (dist[s] == 0.0)
                continue;
            space.coords(s, xc);
            for (std::size_t i = 0; i < M; ++i)
                terminal += dist[s] * (xc[i] - x0c[i]);
        }
        const double n = static_cast<double>(N);
        out.cost[x0] = cost / n;
        out.order_total[x0] = orders / n;
        out.terminal_shift[x0] = terminal / n;
        out.clamp_residual[x0] = clamp_total / n;
    }
    return out;
}

std::vector<double> evaluate_policy_exact(const Problem& p, const Policy& pi, int threads) {
    return evaluate_policy_exact_detailed(p, pi, threads).cost;
}

namespace reference {

std::vector<double> evaluate_policy_backward(const Problem& p, const Policy& pi) {
    check(p);
    const StateSpace space(p.grid, p.locations);
    const auto actions = tabulate(p, pi, space);
    const auto outcomes = joint_outcomes(p);
    const std::size_t M = p.locations;
    const std::size_t S = space.size();
    const int N = p.periods();
    const long long top = static_cast<long long>(space.per_dim()) - 1;

    std::vector<double> value(S, 0.0), prev(S, 0.0);
    std::vector<std::size_t> ix(M), in(M);
    for (int k = N - 1; k >= 0; --k) {
        for (std::size_t s = 0; s < S; ++s) {
            space.decode(s, ix);
            double total = 0.0;
            for (std::size_t i = 0; i < M; ++i)
                total += static_cast<double>(actions.steps[static_cast<std::size_t>(k)][s * M + i]) * p.grid.step;
            double v = eval_ordering_cost(p.ordering, total);
            for (const auto& o : outcomes) {
                double stage = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    const long long post = static_cast<long long>(ix[i]) + actions.steps[static_cast<std::size_t>(k)][s * M + i];
                    stage += eval_holding_cost(p.holding, i, p.grid.point(static_cast<std::size_t>(post)) - o.values[i]);
                    in[i] = static_cast<std::size_t>(std::clamp(post - o.steps[i], 0LL, top));
                }
                v += o.prob * (stage + value[space.encode(in)]);
            }
            prev[s] = v;
        }
        std::swap(value, prev);
    }
    for (auto& v : value)
        v /= static_cast<double>(N);
    return value;
}

} // namespace reference

} // namespace invctl
