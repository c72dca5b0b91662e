#include "invctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "invctl/balancing.hpp"
#include "invctl/instances.hpp"
#include "invctl/policies.hpp"
#include "invctl/report.hpp"
#include "invctl/sim.hpp"
#include "invctl/stationary.hpp"

namespace invctl {

namespace {

double draw(RandomStream& r, double lo, double hi) { return lo + (hi - lo) * r.uniform01(); }
int draw_int(RandomStream& r, int lo, int hi) { return lo + static_cast<int>(r.uniform01() * (hi - lo + 1)); }

DiscreteDemand random_demand(RandomStream& r, double step, int max_steps) {
    std::vector<int> support;
    for (int s = 0; s <= max_steps; ++s)
        support.push_back(s);
    for (std::size_t i = support.size(); i > 1; --i)
        std::swap(support[i - 1], support[static_cast<std::size_t>(draw_int(r, 0, static_cast<int>(i) - 1))]);
    const auto n = static_cast<std::size_t>(draw_int(r, 1, static_cast<int>(support.size())));
    DiscreteDemand d;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        d.values.push_back(support[j] * step);
        w.push_back(draw(r, 0.2, 1.0));
        total += w.back();
    }
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        d.probs.push_back(w[j] / total);
        acc += d.probs.back();
    }
    d.probs.push_back(1.0 - acc);
    return d;
}

OrderingCost random_cost(RandomStream& r, double step) {
    OrderingCost c;
    const int pieces = draw_int(r, 1, 3);
    double lower = 0.0;
    for (int j = 0; j < pieces; ++j) {
        const double upper = j + 1 == pieces ? kInf : lower + step * draw_int(r, 1, 3);
        const double fixed = r.uniform01() < 0.5 ? draw(r, 0.0, 3.0) : 0.0;
        c.pieces.push_back({lower, upper, fixed, draw(r, 0.5, 4.0)});
        lower = upper;
    }
    if (r.uniform01() < 0.3)
        c.discount_set.push_back({step * draw_int(r, 1, 4), draw(r, 0.5, 4.0)});
    return c;
}

std::string state_text(const std::vector<double>& x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (i ? ", " : "") + format_number(x[i]);
    return s + ")";
}

std::string line(bool ok, const std::string& text) { return std::string(ok ? "PASS " : "FAIL ") + text; }

} // namespace

std::vector<double> scenario_tree_values(const Problem& p) {
    require_valid(p, true);
    const std::size_t M = p.locations;
    const auto top = static_cast<long long>(p.grid.count()) - 1;
    const long long max_steps = *p.grid.steps_in(p.max_order_per_location);

    // joint demand outcomes as a plain cartesian product of the marginals
    struct Outcome {
        std::vector<long long> steps;
        std::vector<double> values;
        double prob;
    };
    std::vector<Outcome> outcomes{{{}, {}, 1.0}};
    for (std::size_t i = 0; i < M; ++i) {
        std::vector<Outcome> next;
        for (const auto& o : outcomes)
            for (const auto& a : demand_pmf(p.demand, i)) {
                Outcome e = o;
                e.steps.push_back(*p.grid.steps_in(a.value));
                e.values.push_back(a.value);
                e.prob *= a.prob;
                next.push_back(std::move(e));
            }
        outcomes = std::move(next);
    }

    const int N = p.periods();
    std::function<double(int, std::vector<long long>&)> value = [&](int k, std::vector<long long>& x) -> double {
        if (k == N)
            return 0.0;
        double best = kInf;
        std::vector<long long> u(M, 0);
        std::function<void(std::size_t)> over_orders = [&](std::size_t i) {
            if (i == M) {
                long long total = 0;
                for (auto v : u)
                    total += v;
                double v = eval_ordering_cost(p.ordering, static_cast<double>(total) * p.grid.step);
                for (const auto& o : outcomes) {
                    double stage = 0.0;
                    std::vector<long long> next(M);
                    for (std::size_t j = 0; j < M; ++j) {
                        const long long post = x[j] + u[j];
                        stage += eval_holding_cost(p.holding, j, p.grid.point(static_cast<std::size_t>(post)) - o.values[j]);
                        next[j] = std::clamp(post - o.steps[j], 0LL, top);
                    }
                    v += o.prob * (stage + value(k + 1, next));
                }
                best = std::min(best, v);
                return;
            }
            const long long cap = std::min(max_steps, top - x[i]);
            for (long long a = 0; a <= cap; ++a) {
                u[i] = a;
                over_orders(i + 1);
            }
            u[i] = 0;
        };
        over_orders(0);
        return best;
    };

    const StateSpace space(p.grid, M);
    std::vector<double> out(space.size());
    std::vector<std::size_t> idx(M);
    for (std::size_t s = 0; s < space.size(); ++s) {
        space.decode(s, idx);
        std::vector<long long> x(idx.begin(), idx.end());
        out[s] = value(0, x);
    }
    return out;
}

Problem random_small_instance(std::uint64_t seed) {
    RandomStream r(mix_seed(seed, 0x6f7261636c65ULL));
    Problem p;
    p.locations = static_cast<std::size_t>(draw_int(r, 1, 2));
    p.horizon = FiniteHorizon{draw_int(r, 1, 2)};
    const double step = r.uniform01() < 0.5 ? 1.0 : 0.5;
    const int count = draw_int(r, 3, 6);
    const double min = -step * draw_int(r, 0, count - 1);
    p.grid = Grid{min, min + step * (count - 1), step};
    p.max_order_per_location = step * draw_int(r, 1, count - 1);
    for (std::size_t i = 0; i < p.locations; ++i) {
        p.demand.locations.push_back(random_demand(r, step, 2));
        p.holding.rates.push_back({draw(r, 0.1, 2.0), draw(r, 1.0, 10.0)});
    }
    p.ordering = random_cost(r, step);
    return p;
}

Problem random_stationary_instance(std::uint64_t seed) {
    RandomStream r(mix_seed(seed, 0x737461746eULL));
    Problem p;
    p.locations = static_cast<std::size_t>(draw_int(r, 2, 3));
    p.horizon = FiniteHorizon{1};
    const double step = r.uniform01() < 0.5 ? 1.0 : 0.5;
    const int count = draw_int(r, 5, 10);
    const double min = -step * draw_int(r, 1, 3);
    p.grid = Grid{min, min + step * (count - 1), step};
    p.max_order_per_location = step * (count - 1);
    for (std::size_t i = 0; i < p.locations; ++i) {
        p.demand.locations.push_back(random_demand(r, step, 4));
        p.holding.rates.push_back({draw(r, 0.1, 2.0), draw(r, 1.0, 10.0)});
    }
    p.ordering = random_cost(r, step);
    return p;
}

TabularPolicy random_tabular_policy(const Problem& p, std::uint64_t seed) {
    RandomStream r(mix_seed(seed, 0x7461626c65ULL));
    const StateSpace space(p.grid, p.locations);
    const auto top = static_cast<long long>(p.grid.count()) - 1;
    const long long max_steps = *p.grid.steps_in(p.max_order_per_location);
    TabularPolicy pi;
    pi.grid = p.grid;
    pi.locations = p.locations;
    pi.max_order_per_location = p.max_order_per_location;
    pi.tie_break = "random";
    std::vector<std::size_t> idx(p.locations);
    for (int k = 0; k < p.periods(); ++k) {
        std::vector<double> orders(space.size() * p.locations);
        for (std::size_t s = 0; s < space.size(); ++s) {
            space.decode(s, idx);
            for (std::size_t i = 0; i < p.locations; ++i) {
                const long long cap = std::min(max_steps, top - static_cast<long long>(idx[i]));
                orders[s * p.locations + i] = p.grid.step * draw_int(r, 0, static_cast<int>(cap));
            }
        }
        pi.orders.push_back(std::move(orders));
    }
    return pi;
}

SuiteResult verify_theorem1(int threads) {
    SuiteResult res{"theorem1", true, {}};
    std::vector<std::pair<std::string, Problem>> corpus{
        {"fig1_linear", build("fig1_linear")}, {"fig1_nonlinear", build("fig1_nonlinear")},
        {"sector_sim", build("sector_sim")},   {"affine_sim", build("affine_sim")}};
    for (std::uint64_t s = 1; s <= 5; ++s)
        corpus.emplace_back("random#" + std::to_string(s), random_stationary_instance(s));
    for (const auto& [name, p] : corpus) {
        const auto joint = optimize_joint(p, threads);
        const auto indiv = optimize_individual(p);
        const double cj = stationary_cost(joint, p);
        const double ci = stationary_cost(indiv, p);
        const bool same_cost = std::abs(cj - ci) <= 1e-12 * std::max(1.0, std::abs(cj));
        const bool same_levels = joint.S == indiv.S;
        const bool ok = same_cost && same_levels;
        res.passed = res.passed && ok;
        res.lines.push_back(line(ok, name + ": joint " + state_text(joint.S) + " cost " + format_number(cj) +
                                         ", individual " + state_text(indiv.S) + " cost " + format_number(ci)));
    }
    return res;
}

SuiteResult verify_transform(int threads) {
    SuiteResult res{"transform", true, {}};
    const Problem p = build("transform_check");
    const double m = kTransformSlope;
    std::vector<Policy> policies{make_pi_square(p, 2.0, threads), make_pi_diamond(p, 4.0, 2.0, threads),
                                 make_tabular(random_tabular_policy(p, 11), "random_tabular")};
    SimConfig cfg;
    cfg.threads = threads;
    for (const auto& pi : policies) {
        const auto rep = verify_cost_transformation(p, pi, m, cfg);
        std::size_t worst = 0;
        for (std::size_t s = 0; s < rep.rows.size(); ++s)
            if (std::abs(rep.rows[s].printed_gap) > std::abs(rep.rows[worst].printed_gap))
                worst = s;
        res.passed = res.passed && rep.printed_holds;
        res.lines.push_back(line(rep.printed_holds, pi.name + ": J(P) = J(P^) + m E[mean demand], max gap " +
                                                        format_number(rep.max_printed_gap) + " at " +
                                                        state_text(rep.rows[worst].state)));
        res.lines.push_back(std::string(rep.corrected_holds ? "INFO " : "FAIL ") + pi.name +
                            ": with terminal and clamp terms (m E[mean order]), max gap " +
                            format_number(rep.max_corrected_gap));
        res.passed = res.passed && rep.corrected_holds;
    }
    return res;
}

SuiteResult verify_oracle(int threads) {
    SuiteResult res{"oracle", true, {}};
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto p = random_small_instance(s);
        const auto sol = solve_joint_dp(p, threads);
        const auto brute = scenario_tree_values(p);
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < brute.size(); ++i) {
            const double gap = std::abs(sol.values.stages[0][i] - brute[i]);
            worst = std::max(worst, gap);
            ok = ok && gap <= 1e-12 * std::max(1.0, std::abs(brute[i]));
        }
        res.passed = res.passed && ok;
        std::ostringstream os;
        os << "random#" << s << " (M=" << p.locations << ", N=" << p.periods() << ", grid " << p.grid.count()
           << "): max |V0 - brute force| " << format_number(worst);
        res.lines.push_back(line(ok, os.str()));
    }
    return res;
}

SuiteResult verify_balancing_monotone() {
    SuiteResult res{"balancing-monotone", true, {}};
    for (const char* name : {"sector_sim", "affine_sim"}) {
        const Problem p = build(name);
        for (auto variant : {HoldingProxyVariant::Printed, HoldingProxyVariant::Cumulative}) {
            BalancingOptions opts;
            opts.variant = variant;
            const BalancingState st(p, 0, 4.0, opts);
            bool ok = true;
            std::string witness;
            const int N = p.periods();
            for (int k : {0, N / 2, N - 1})
                for (std::size_t g = 0; g < p.grid.count(); g += 2) {
                    const double x = p.grid.point(g);
                    double h_prev = -kInf, b_prev = kInf;
                    for (double u = 0.0; u <= st.max_order(x) + 1e-12; u += 0.25) {
                        const double h = st.expected_holding(k, x, u);
                        const double b = st.expected_backlog(k, x, u);
                        if (h < h_prev - 1e-12 || b > b_prev + 1e-12) {
                            ok = false;
                            witness = " at k=" + std::to_string(k) + ", x=" + format_number(x) + ", u=" + format_number(u);
                        }
                        h_prev = h;
                        b_prev = b;
                    }
                }
            res.passed = res.passed && ok;
            res.lines.push_back(line(ok, std::string(name) + " (" +
                                             (variant == HoldingProxyVariant::Printed ? "printed" : "cumulative") +
                                             "): E[H] nondecreasing and E[B] nonincreasing in u" + witness));
        }
    }
    return res;
}

std::vector<std::string> suite_names() { return {"theorem1", "transform", "oracle", "balancing-monotone"}; }

SuiteResult run_suite(const std::string& name, int threads) {
    if (name == "theorem1")
        return verify_theorem1(threads);
    if (name == "transform")
        return verify_transform(threads);
    if (name == "oracle")
        return verify_oracle(threads);
    if (name == "balancing-monotone")
        return verify_balancing_monotone();
    if (name == "all") {
        SuiteResult all{"all", true, {}};
        for (const auto& n : suite_names()) {
            auto r = run_suite(n, threads);
            all.passed = all.passed && r.passed;
            for (auto& l : r.lines)
                all.lines.push_back("[" + n + "] " + l);
        }
        return all;
    }
    throw DomainError("unknown verify suite '" + name + "' (theorem1, transform, oracle, balancing-monotone, all)");
}

} // namespace invctl
