#include "invctl/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "invctl/dp.hpp"
#include "invctl/evaluate.hpp"
#include "invctl/parallel.hpp"

namespace invctl {

namespace {

constexpr std::uint64_t kDemandPurpose = 0x64656d616e64ULL;  // "demand"
constexpr std::uint64_t kPolicyPurpose = 0x706f6c696379ULL;  // "policy"

std::uint64_t base_seed(const SimConfig& cfg, std::size_t state, std::size_t run) {
    std::uint64_t acc = splitmix64(cfg.seed);
    acc = mix_seed(acc, state);
    return mix_seed(acc, run);
}

// Mean and standard error from values shifted by the first one, so constant
// samples give an exact mean and a zero error.
CostEstimate summarize(const std::vector<double>& v) {
    CostEstimate out;
    if (v.empty())
        return out;
    const double v0 = v.front();
    double s = 0.0, s2 = 0.0;
    for (double x : v) {
        s += x - v0;
        s2 += (x - v0) * (x - v0);
    }
    const double n = static_cast<double>(v.size());
    out.mean = v0 + s / n;
    if (v.size() > 1) {
        const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
        out.se = std::sqrt(var / n);
    }
    return out;
}

double run_one(const Problem& p, const Policy& pi, std::span<const double> x0, std::size_t state, std::size_t run,
               const SimConfig& cfg) {
    RandomStream demand(demand_stream_seed(cfg, state, run, pi));
    RandomStream policy(policy_stream_seed(cfg, state, run, pi));
    return simulate_run(p, pi, x0, demand, policy);
}

bool use_exact(const Policy& pi, EvalMode mode) {
    if (mode == EvalMode::Auto)
        return pi.name == "optimal";
    return mode == EvalMode::Exact;
}

// Per-state estimates of one side of the ratio, in initial-state order.
std::vector<CostEstimate> evaluate_side(const Problem& p, const Policy& pi, bool exact,
                                        const std::vector<std::vector<double>>& states, const SimConfig& cfg) {
    std::vector<CostEstimate> out(states.size());
    if (exact) {
        const auto values = evaluate_policy_exact(p, pi, cfg.threads);
        const StateSpace space(p.grid, p.locations);
        for (std::size_t s = 0; s < states.size(); ++s) {
            out[s].mean = values[space.index_of(states[s])];
            out[s].se = 0.0;
        }
        return out;
    }
    const auto runs = static_cast<std::size_t>(cfg.runs);
    const std::size_t total = states.size() * runs;
    std::vector<double> results(total);
    const int nt = resolve_threads(cfg.threads);
#pragma omp parallel for num_threads(nt) schedule(dynamic, 8)
    for (std::size_t t = 0; t < total; ++t) {
        const std::size_t s = t / runs;
        results[t] = run_one(p, pi, states[s], s, t % runs, cfg);
    }
    std::vector<double> buf(runs);
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::copy(results.begin() + static_cast<std::ptrdiff_t>(s * runs),
                  results.begin() + static_cast<std::ptrdiff_t>((s + 1) * runs), buf.begin());
        out[s] = summarize(buf);
    }
    return out;
}

void check_config(const SimConfig& cfg) {
    if (cfg.runs < 1)
        throw DomainError("simulation runs must be at least 1");
}

} // namespace

Problem with_horizon(const Problem& p, std::optional<int> periods) {
    if (!periods)
        return p;
    Problem out = p;
    if (auto* f = std::get_if<FiniteHorizon>(&out.horizon))
        f->periods = *periods;
    else
        std::get<InfiniteAveraged>(out.horizon).sim_periods = *periods;
    require_valid(out, false);
    return out;
}

std::uint64_t demand_stream_seed(const SimConfig& cfg, std::size_t state, std::size_t run, const Policy& pi) {
    std::uint64_t acc = base_seed(cfg, state, run);
    if (!cfg.crn)
        acc = mix_seed(acc, tag_of(pi.name));
    return mix_seed(acc, kDemandPurpose);
}

std::uint64_t policy_stream_seed(const SimConfig& cfg, std::size_t state, std::size_t run, const Policy& pi) {
    std::uint64_t acc = base_seed(cfg, state, run);
    acc = mix_seed(acc, tag_of(pi.name));
    return mix_seed(acc, kPolicyPurpose);
}

double simulate_run(const Problem& p, const Policy& pi, std::span<const double> x0, RandomStream& demand,
                    RandomStream& policy, std::vector<PeriodRecord>* trace) {
    const std::size_t M = p.locations;
    if (x0.size() != M)
        throw DomainError("initial state has " + std::to_string(x0.size()) + " entries, problem has " +
                          std::to_string(M) + " locations");
    const int N = p.periods();
    const int burn = p.burn_in();
    std::vector<double> x(x0.begin(), x0.end()), u(M), w(M);
    double cost = 0.0;
    for (int k = 0; k < N; ++k) {
        act(p, pi, k, x, u, policy);
        const double total = std::accumulate(u.begin(), u.end(), 0.0);
        const double oc = eval_ordering_cost(p.ordering, total);
        sample_demand(p.demand, k, demand, w);
        double hc = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            hc += eval_holding_cost(p.holding, i, x[i] + u[i] - w[i]);
        if (trace)
            trace->push_back({k, x, u, w, oc, hc});
        if (k >= burn)
            cost += oc + hc;
        for (std::size_t i = 0; i < M; ++i)
            x[i] = std::clamp(x[i] + u[i] - w[i], p.grid.min, p.grid.max);
    }
    return cost / static_cast<double>(p.averaged_periods());
}

CostEstimate estimate_cost(const Problem& p, const Policy& pi, std::span<const double> x0, std::size_t state,
                           const SimConfig& cfg) {
    check_config(cfg);
    const Problem q = with_horizon(p, cfg.horizon_override);
    std::vector<double> results(static_cast<std::size_t>(cfg.runs));
    const int nt = resolve_threads(cfg.threads);
#pragma omp parallel for num_threads(nt) schedule(static)
    for (std::size_t r = 0; r < results.size(); ++r)
        results[r] = run_one(q, pi, x0, state, r, cfg);
    return summarize(results);
}

std::vector<std::vector<double>> initial_states(const Problem& p, const SimConfig& cfg) {
    if (!cfg.initial_states.empty())
        return cfg.initial_states;
    const StateSpace space(p.grid, p.locations);
    std::vector<std::vector<double>> out(space.size(), std::vector<double>(p.locations));
    for (std::size_t s = 0; s < space.size(); ++s)
        space.coords(s, out[s]);
    return out;
}

RatioReport ratio_heatmap(const Problem& p, const Policy& num, const Policy& den, const SimConfig& cfg,
                          EvalMode num_mode, EvalMode den_mode) {
    check_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const Problem q = with_horizon(p, cfg.horizon_override);
    const auto states = initial_states(q, cfg);
    if (states.empty())
        throw DomainError("ratio heatmap needs at least one initial state");

    RatioReport rep;
    rep.num_policy = num.name;
    rep.den_policy = den.name;
    rep.num_exact = use_exact(num, num_mode);
    rep.den_exact = use_exact(den, den_mode);
    rep.runs = cfg.runs;
    rep.seed = cfg.seed;
    rep.crn = cfg.crn;

    const auto n = evaluate_side(q, num, rep.num_exact, states, cfg);
    const auto d = evaluate_side(q, den, rep.den_exact, states, cfg);
    rep.rows.resize(states.size());
    double sum = 0.0;
    rep.max_ratio = -kInf;
    for (std::size_t s = 0; s < states.size(); ++s) {
        auto& row = rep.rows[s];
        row.state = states[s];
        row.num = n[s];
        row.den = d[s];
        row.ratio = n[s].mean / d[s].mean;
        sum += row.ratio;
        if (row.ratio > rep.max_ratio) {
            rep.max_ratio = row.ratio;
            rep.argmax = s;
        }
    }
    rep.mean_ratio = sum / static_cast<double>(states.size());
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

TransformReport verify_cost_transformation(const Problem& p, const Policy& pi, double m, const SimConfig& cfg) {
    Problem hat = p;
    hat.ordering = p.ordering.without_linear_term(m);

    TransformReport rep;
    rep.slope = m;
    rep.exact = pi.exact_evaluable() && p.is_finite();
    const auto states = initial_states(p, cfg);
    rep.rows.resize(states.size());

    if (rep.exact) {
        const auto full = evaluate_policy_exact_detailed(p, pi, cfg.threads);
        const auto reduced = evaluate_policy_exact(hat, pi, cfg.threads);
        const StateSpace space(p.grid, p.locations);
        for (std::size_t s = 0; s < states.size(); ++s) {
            const std::size_t idx = space.index_of(states[s]);
            auto& row = rep.rows[s];
            row.state = states[s];
            row.cost = full.cost[idx];
            row.transformed = reduced[idx];
            row.demand_term = m * full.demand_total[idx];
            row.order_term = m * full.order_total[idx];
            row.tolerance = 1e-9;
        }
    } else {
        check_config(cfg);
        SimConfig paired = cfg;
        paired.crn = true;
        double mean_demand = 0.0;
        for (std::size_t i = 0; i < p.locations; ++i)
            mean_demand += p.demand.mean(i);
        const auto runs = static_cast<std::size_t>(cfg.runs);
        const int burn = p.burn_in();
        const double periods = static_cast<double>(p.averaged_periods());
        for (std::size_t s = 0; s < states.size(); ++s) {
            std::vector<double> full(runs), reduced(runs), orders(runs);
            const int nt = resolve_threads(cfg.threads);
#pragma omp parallel for num_threads(nt) schedule(static)
            for (std::size_t r = 0; r < runs; ++r) {
                std::vector<PeriodRecord> trace;
                RandomStream d1(demand_stream_seed(paired, s, r, pi)), p1(policy_stream_seed(paired, s, r, pi));
                full[r] = simulate_run(p, pi, states[s], d1, p1, &trace);
                RandomStream d2(demand_stream_seed(paired, s, r, pi)), p2(policy_stream_seed(paired, s, r, pi));
                reduced[r] = simulate_run(hat, pi, states[s], d2, p2);
                double u = 0.0;
                for (const auto& rec : trace)
                    if (rec.period >= burn)
                        u += std::accumulate(rec.order.begin(), rec.order.end(), 0.0);
                orders[r] = u / periods;
            }
            const auto a = summarize(full), b = summarize(reduced), o = summarize(orders);
            auto& row = rep.rows[s];
            row.state = states[s];
            row.cost = a.mean;
            row.transformed = b.mean;
            row.demand_term = m * mean_demand;
            row.order_term = m * o.mean;
            const double sa = a.se.value_or(0.0), sb = b.se.value_or(0.0);
            row.tolerance = 1e-9 + 3.0 * std::sqrt(sa * sa + sb * sb);
        }
    }

    rep.printed_holds = rep.corrected_holds = true;
    for (auto& row : rep.rows) {
        row.printed_gap = row.cost - (row.transformed + row.demand_term);
        row.corrected_gap = row.cost - (row.transformed + row.order_term);
        rep.max_printed_gap = std::max(rep.max_printed_gap, std::abs(row.printed_gap));
        rep.max_corrected_gap = std::max(rep.max_corrected_gap, std::abs(row.corrected_gap));
        rep.printed_holds = rep.printed_holds && std::abs(row.printed_gap) <= row.tolerance;
        rep.corrected_holds = rep.corrected_holds && std::abs(row.corrected_gap) <= row.tolerance;
    }
    return rep;
}

namespace reference {

CostEstimate estimate_cost(const Problem& p, const Policy& pi, std::span<const double> x0, std::size_t state,
                           const SimConfig& cfg) {
    const Problem q = with_horizon(p, cfg.horizon_override);
    double sum = 0.0;
    std::vector<double> values;
    for (int r = 0; r < cfg.runs; ++r) {
        RandomStream demand(demand_stream_seed(cfg, state, static_cast<std::size_t>(r), pi));
        RandomStream policy(policy_stream_seed(cfg, state, static_cast<std::size_t>(r), pi));
        const double v = simulate_run(q, pi, x0, demand, policy);
        values.push_back(v);
        sum += v;
    }
    CostEstimate out;
    const double n = static_cast<double>(cfg.runs);
    out.mean = sum / n;
    if (cfg.runs > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

} // namespace reference

} // namespace invctl
