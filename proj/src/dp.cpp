#include "invctl/dp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "invctl/parallel.hpp"

namespace invctl {

namespace {

bool improves(double candidate, double best) {
    return std::isinf(best) ? candidate < best : candidate < best - 1e-12 * std::max(1.0, std::abs(best));
}

std::string describe_size(const Problem& p, std::size_t per_dim) {
    std::ostringstream os;
    os << "joint grid too large: M = " << p.locations << ", " << per_dim << "^" << p.locations << " states exceeds "
       << kMaxJointStates;
    return os.str();
}

void check_dp_problem(const Problem& p) {
    require_valid(p, /*for_dp=*/true);
    if (!p.is_finite())
        throw UnsupportedError("dynamic programming requires a finite horizon");
    const double states = std::pow(static_cast<double>(p.grid.count()), static_cast<double>(p.locations));
    if (states > static_cast<double>(kMaxJointStates))
        throw SizeError(describe_size(p, p.grid.count()));
}

// Shared per-problem tables used by both the parallel kernel and the reference.
struct DpContext {
    StateSpace space;
    std::vector<JointOutcome> outcomes;
    long long max_order_steps;
    std::vector<double> cost_by_total_steps;  // c(total * step)

    explicit DpContext(const Problem& p)
        : space(p.grid, p.locations), outcomes(joint_outcomes(p)),
          max_order_steps(*p.grid.steps_in(p.max_order_per_location)) {
        const long long max_total = max_order_steps * static_cast<long long>(p.locations);
        cost_by_total_steps.resize(static_cast<std::size_t>(max_total + 1));
        for (long long t = 0; t <= max_total; ++t)
            cost_by_total_steps[static_cast<std::size_t>(t)] =
                eval_ordering_cost(p.ordering, static_cast<double>(t) * p.grid.step);
    }
};

// Enumerates feasible order vectors at grid index `ix` in lexicographic order.
template <class Fn>
void for_each_order(const DpContext& ctx, std::span<const std::size_t> ix, std::vector<long long>& u, Fn&& fn) {
    const std::size_t M = ix.size();
    const long long top = static_cast<long long>(ctx.space.per_dim()) - 1;
    std::vector<long long> limit(M);
    for (std::size_t i = 0; i < M; ++i)
        limit[i] = std::min(ctx.max_order_steps, top - static_cast<long long>(ix[i]));
    std::fill(u.begin(), u.end(), 0);
    while (true) {
        fn(u);
        std::size_t d = M;
        while (d > 0) {
            --d;
            if (u[d] < limit[d]) {
                ++u[d];
                break;
            }
            u[d] = 0;
            if (d == 0)
                return;
        }
        if (M == 0)
            return;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(const Grid& grid, std::size_t dims) : grid_(grid), dims_(dims), per_dim_(grid.count()) {
    size_ = 1;
    for (std::size_t i = 0; i < dims_; ++i)
        size_ *= per_dim_;
}

void StateSpace::decode(std::size_t state, std::span<std::size_t> idx) const {
    for (std::size_t d = dims_; d > 0; --d) {
        idx[d - 1] = state % per_dim_;
        state /= per_dim_;
    }
}

std::size_t StateSpace::encode(std::span<const std::size_t> idx) const {
    std::size_t s = 0;
    for (std::size_t d = 0; d < dims_; ++d)
        s = s * per_dim_ + idx[d];
    return s;
}

void StateSpace::coords(std::size_t state, std::span<double> x) const {
    for (std::size_t d = dims_; d > 0; --d) {
        x[d - 1] = grid_.point(state % per_dim_);
        state /= per_dim_;
    }
}

std::size_t StateSpace::index_of(std::span<const double> x) const {
    std::size_t s = 0;
    for (std::size_t d = 0; d < dims_; ++d) {
        auto i = grid_.index_of(x[d]);
        if (!i) {
            std::ostringstream os;
            os << "state component " << x[d] << " is not on the grid";
            throw DomainError(os.str());
        }
        s = s * per_dim_ + *i;
    }
    return s;
}

double ValueFunction::average(std::size_t k, std::size_t state) const {
    const auto N = static_cast<double>(stages.size() - 1);
    return stages[k][state] / N;
}

std::vector<JointOutcome> joint_outcomes(const Problem& p) {
    std::vector<std::vector<Atom>> pmfs;
    for (std::size_t i = 0; i < p.locations; ++i)
        pmfs.push_back(demand_pmf(p.demand, i));
    std::vector<JointOutcome> out{JointOutcome{{}, {}, 1.0}};
    for (const auto& pmf : pmfs) {
        std::vector<JointOutcome> next;
        next.reserve(out.size() * pmf.size());
        for (const auto& o : out) {
            for (const auto& a : pmf) {
                if (a.prob == 0.0)
                    continue;
                JointOutcome n = o;
                auto st = p.grid.steps_in(a.value);
                n.steps.push_back(st ? *st : 0);
                n.values.push_back(a.value);
                n.prob *= a.prob;
                next.push_back(std::move(n));
            }
        }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel kernel: post-decision cost G_k(y), then per-state minimization.

DpSolution solve_joint_dp(const Problem& p, int threads) {
    check_dp_problem(p);
    const DpContext ctx(p);
    const std::size_t M = p.locations;
    const std::size_t S = ctx.space.size();
    const long long top = static_cast<long long>(ctx.space.per_dim()) - 1;
    const int N = p.periods();
    const int nt = resolve_threads(threads);

    DpSolution sol;
    sol.values.stages.assign(static_cast<std::size_t>(N) + 1, std::vector<double>(S, 0.0));
    sol.policy.grid = p.grid;
    sol.policy.locations = M;
    sol.policy.max_order_per_location = p.max_order_per_location;
    sol.policy.orders.assign(static_cast<std::size_t>(N), std::vector<double>(S * M, 0.0));

    std::vector<double> post(S);
    for (int k = N - 1; k >= 0; --k) {
        const auto& next_v = sol.values.stages[static_cast<std::size_t>(k) + 1];

#pragma omp parallel for num_threads(nt) schedule(static)
        for (std::size_t y = 0; y < S; ++y) {
            std::vector<std::size_t> iy(M), in(M);
            ctx.space.decode(y, iy);
            double acc = 0.0;
            for (const auto& o : ctx.outcomes) {
                double stage = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    const long long raw = static_cast<long long>(iy[i]) - o.steps[i];
                    stage += eval_holding_cost(p.holding, i, p.grid.point(iy[i]) - o.values[i]);
                    in[i] = static_cast<std::size_t>(std::clamp(raw, 0LL, top));
                }
                acc += o.prob * (stage + next_v[ctx.space.encode(in)]);
            }
            post[y] = acc;
        }

        auto& v = sol.values.stages[static_cast<std::size_t>(k)];
        auto& table = sol.policy.orders[static_cast<std::size_t>(k)];
#pragma omp parallel for num_threads(nt) schedule(static)
        for (std::size_t x = 0; x < S; ++x) {
            std::vector<std::size_t> ix(M), iy(M);
            std::vector<long long> u(M), best_u(M, 0);
            ctx.space.decode(x, ix);
            double best = kInf;
            for_each_order(ctx, ix, u, [&](const std::vector<long long>& order) {
                long long total = 0;
                for (std::size_t i = 0; i < M; ++i) {
                    iy[i] = ix[i] + static_cast<std::size_t>(order[i]);
                    total += order[i];
                }
                const double cost = ctx.cost_by_total_steps[static_cast<std::size_t>(total)] + post[ctx.space.encode(iy)];
                if (improves(cost, best)) {
                    best = cost;
                    best_u = order;
                }
            });
            v[x] = best;
            for (std::size_t i = 0; i < M; ++i)
                table[x * M + i] = static_cast<double>(best_u[i]) * p.grid.step;
        }
    }
    return sol;
}

DpSolution solve_single_dp(const Problem& p, int threads) {
    if (p.locations != 1)
        throw DomainError("solve_single_dp: problem has " + std::to_string(p.locations) + " locations");
    return solve_joint_dp(p, threads);
}

namespace reference {

DpSolution solve_joint_dp(const Problem& p) {
    check_dp_problem(p);
    const DpContext ctx(p);
    const std::size_t M = p.locations;
    const std::size_t S = ctx.space.size();
    const long long top = static_cast<long long>(ctx.space.per_dim()) - 1;
    const int N = p.periods();

    DpSolution sol;
    sol.values.stages.assign(static_cast<std::size_t>(N) + 1, std::vector<double>(S, 0.0));
    sol.policy.grid = p.grid;
    sol.policy.locations = M;
    sol.policy.max_order_per_location = p.max_order_per_location;
    sol.policy.orders.assign(static_cast<std::size_t>(N), std::vector<double>(S * M, 0.0));

    std::vector<std::size_t> ix(M), in(M);
    std::vector<long long> u(M), best_u(M);
    for (int k = N - 1; k >= 0; --k) {
        const auto& next_v = sol.values.stages[static_cast<std::size_t>(k) + 1];
        for (std::size_t x = 0; x < S; ++x) {
            ctx.space.decode(x, ix);
            double best = kInf;
            std::fill(best_u.begin(), best_u.end(), 0);
            for_each_order(ctx, ix, u, [&](const std::vector<long long>& order) {
                double total = 0.0;
                for (std::size_t i = 0; i < M; ++i)
                    total += static_cast<double>(order[i]) * p.grid.step;
                double expected = eval_ordering_cost(p.ordering, total);
                for (const auto& o : ctx.outcomes) {
                    double stage = 0.0;
                    for (std::size_t i = 0; i < M; ++i) {
                        const long long post = static_cast<long long>(ix[i]) + order[i];
                        stage += eval_holding_cost(p.holding, i, p.grid.point(static_cast<std::size_t>(post)) - o.values[i]);
                        in[i] = static_cast<std::size_t>(std::clamp(post - o.steps[i], 0LL, top));
                    }
                    expected += o.prob * (stage + next_v[ctx.space.encode(in)]);
                }
                if (improves(expected, best)) {
                    best = expected;
                    best_u = order;
                }
            });
            sol.values.stages[static_cast<std::size_t>(k)][x] = best;
            for (std::size_t i = 0; i < M; ++i)
                sol.policy.orders[static_cast<std::size_t>(k)][x * M + i] = static_cast<double>(best_u[i]) * p.grid.step;
        }
    }
    return sol;
}

} // namespace reference

// ---------------------------------------------------------------------------
// Structure extraction

namespace {

struct StageScan {
    std::vector<double> x;
    std::vector<double> mu;
};

StageScan scan_stage(const TabularPolicy& pi, std::size_t k) {
    if (pi.locations != 1)
        throw StructureError("structure extraction needs a single-location table");
    if (k >= pi.stages())
        throw DomainError("stage " + std::to_string(k) + " out of range");
    StageScan scan;
    const auto n = pi.grid.count();
    for (std::size_t i = 0; i < n; ++i) {
        scan.x.push_back(pi.grid.point(i));
        scan.mu.push_back(pi.orders[k][i]);
    }
    return scan;
}

double truncated(const TabularPolicy& pi, double x, double want) {
    return std::clamp(want, 0.0, std::min(pi.max_order_per_location, pi.grid.max - x));
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9; }

// Most frequent order-up-to level among ordering states whose order was not truncated.
std::optional<double> dominant_level(const TabularPolicy& pi, const StageScan& scan, bool interior_only) {
    std::map<long long, std::pair<int, double>> votes;
    const auto n = scan.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (interior_only && (i == 0 || i + 1 == n))
            continue;
        if (scan.mu[i] <= 0.0)
            continue;
        const double level = scan.x[i] + scan.mu[i];
        if (scan.mu[i] >= pi.max_order_per_location - 1e-9 || level >= pi.grid.max - 1e-9)
            continue;  // possibly truncated
        const long long key = std::llround(level / pi.grid.step);
        auto& slot = votes[key];
        ++slot.first;
        slot.second = level;
    }
    if (votes.empty()) {
        // every ordering state may be truncated; take the highest reachable level
        for (std::size_t i = 0; i < n; ++i)
            if (scan.mu[i] > 0.0 && !(interior_only && (i == 0 || i + 1 == n)))
                return scan.x[i] + scan.mu[i];
        return std::nullopt;
    }
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it)
        if (it->second.first > best->second.first)
            best = it;
    return best->second.second;
}

std::string state_msg(const char* what, double x, double got, double want) {
    std::ostringstream os;
    os << what << ": state x = " << x << " orders " << got << ", expected " << want;
    return os.str();
}

} // namespace

BaseStockExtraction extract_base_stock(const TabularPolicy& pi, std::size_t k) {
    const auto scan = scan_stage(pi, k);
    const auto n = scan.x.size();
    const bool has_interior = n >= 3;
    auto level = dominant_level(pi, scan, has_interior);
    if (!level && has_interior)
        level = dominant_level(pi, scan, false);

    BaseStockExtraction out;
    out.S = level ? *level : pi.grid.min;
    for (std::size_t i = 0; i < n; ++i) {
        const double want = truncated(pi, scan.x[i], std::max(out.S - scan.x[i], 0.0));
        if (same(scan.mu[i], want))
            continue;
        const bool boundary = i == 0 || i + 1 == n;
        if (boundary && has_interior) {
            out.boundary_exceptions.push_back(scan.x[i]);
            continue;
        }
        throw StructureError(state_msg("not a base-stock table", scan.x[i], scan.mu[i], want));
    }
    return out;
}

std::optional<std::vector<double>> decoupled_base_stock_levels(const TabularPolicy& pi, std::size_t k) {
    const std::size_t M = pi.locations;
    const StateSpace space(pi.grid, M);
    std::vector<double> x(M);
    std::vector<double> S(M, pi.grid.min);
    for (std::size_t s = 0; s < space.size(); ++s) {
        space.coords(s, x);
        const auto u = pi.order(k, s);
        for (std::size_t i = 0; i < M; ++i)
            if (u[i] > 0.0)
                S[i] = std::max(S[i], x[i] + u[i]);
    }
    for (std::size_t s = 0; s < space.size(); ++s) {
        space.coords(s, x);
        const auto u = pi.order(k, s);
        for (std::size_t i = 0; i < M; ++i) {
            const double cap = std::min(pi.max_order_per_location, pi.grid.max - x[i]);
            const double want = std::clamp(S[i] - x[i], 0.0, std::max(cap, 0.0));
            if (std::abs(u[i] - want) > 1e-9)
                return std::nullopt;
        }
    }
    return S;
}

SSExtraction extract_sS(const TabularPolicy& pi, std::size_t k) {
    const auto scan = scan_stage(pi, k);
    const auto n = scan.x.size();
    const bool has_interior = n >= 3;

    SSExtraction out;
    // s: one step above the highest interior ordering state
    std::optional<std::size_t> highest;
    for (std::size_t i = 0; i < n; ++i) {
        const bool boundary = i == 0 || i + 1 == n;
        if (scan.mu[i] > 0.0 && !(boundary && has_interior))
            highest = i;
    }
    if (!highest && has_interior && scan.mu[0] > 0.0)
        highest = 0;
    if (!highest) {
        out.s = pi.grid.min;
        out.S = pi.grid.min;
    } else {
        out.s = pi.grid.point(*highest) + pi.grid.step;
        auto level = dominant_level(pi, scan, has_interior);
        if (!level)
            level = dominant_level(pi, scan, false);
        out.S = *level;
    }
    if (out.s > out.S + 1e-9)
        throw StructureError("(s, S) scan found s > S");
    for (std::size_t i = 0; i < n; ++i) {
        const double x = scan.x[i];
        const double want = x < out.s - 1e-9 ? truncated(pi, x, out.S - x) : 0.0;
        if (same(scan.mu[i], want))
            continue;
        const bool boundary = i == 0 || i + 1 == n;
        if (boundary && has_interior) {
            out.boundary_exceptions.push_back(x);
            continue;
        }
        throw StructureError(state_msg("not an (s, S) table", x, scan.mu[i], want));
    }
    return out;
}

} // namespace invctl
