#include <cmath>

#include "doctest.h"

#include "invctl/balancing.hpp"
#include "invctl/dp.hpp"
#include "invctl/instances.hpp"
#include "invctl/policies.hpp"
#include "invctl/sim.hpp"

using namespace invctl;

namespace {

Problem single(std::vector<double> values, std::vector<double> probs, double a, double b, int N) {
    Problem p;
    p.locations = 1;
    p.horizon = FiniteHorizon{N};
    p.ordering = OrderingCost::linear(1.0);
    p.holding = HoldingBacklogCost::uniform(1, a, b);
    p.demand.locations = {DiscreteDemand{std::move(values), std::move(probs)}};
    p.grid = Grid{-2, 8, 0.5};
    p.max_order_per_location = 10;
    return p;
}

Problem fig2_single(double a) {
    auto p = build("sector_sim");
    p = restrict_to_location(p, 0, p.ordering);
    p.holding.rates[0].holding = a;
    return p;
}

// One period of the proxies straight from the pmf.
double h_one(const std::vector<Atom>& pmf, double a, double x, double u) {
    double acc = 0.0;
    for (const auto& w : pmf)
        acc += w.prob * std::max(0.0, u - std::max(0.0, w.value - x));
    return a * acc;
}

double b_one(const std::vector<Atom>& pmf, double b, double x, double u) {
    double acc = 0.0;
    for (const auto& w : pmf)
        acc += w.prob * std::max(0.0, w.value - std::max(0.0, x + u));
    return b * acc;
}

} // namespace

TEST_CASE("holding proxy values") {
    for (auto variant : {HoldingProxyVariant::Printed, HoldingProxyVariant::Cumulative}) {
        BalancingOptions opts;
        opts.variant = variant;
        const auto p = fig2_single(0.1);
        const int N = p.periods();
        const BalancingState s(p, 0, 0.0, opts);
        CHECK(s.expected_holding(0, 0.0, 0.0) == 0.0);
        CHECK(s.expected_holding(N - 1, 0.0, 1.5) == doctest::Approx(0.075).epsilon(1e-12));

        const auto det = single({1.0}, {1.0}, 1.0, 10.0, 5);
        const BalancingState d(det, 0, 0.0, opts);
        CHECK(d.expected_holding(0, 0.0, 1.0) == 0.0);
        CHECK(d.expected_holding(0, 0.0, 0.5) == 0.0);
    }
}

TEST_CASE("printed proxy counts one term per remaining period") {
    const auto p = fig2_single(0.1);
    const auto pmf = demand_pmf(p.demand, 0);
    const BalancingState s(p, 0, 0.0);
    for (int k : {0, 5, 19})
        CHECK(s.expected_holding(k, 0.5, 1.0) ==
              doctest::Approx((p.periods() - k) * h_one(pmf, 0.1, 0.5, 1.0)).epsilon(1e-12));
}

TEST_CASE("cumulative proxy uses demand sums") {
    // two periods of deterministic demand 1: terms max{0, u - 1} and max{0, u - 2}
    BalancingOptions opts;
    opts.variant = HoldingProxyVariant::Cumulative;
    const auto p = single({1.0}, {1.0}, 1.0, 10.0, 2);
    const BalancingState s(p, 0, 0.0, opts);
    CHECK(s.expected_holding(0, 0.0, 2.5) == doctest::Approx(1.5 + 0.5));
    CHECK(s.expected_holding(1, 0.0, 2.5) == doctest::Approx(1.5));
}

TEST_CASE("backlog proxy values") {
    const auto fig1 = restrict_to_location(build("fig1_linear"), 0, OrderingCost::linear(2.0));
    const BalancingState s(fig1, 0, 0.0);
    CHECK(s.expected_backlog(0, 0.0, 0.0) == doctest::Approx(5.0));
    CHECK(s.expected_backlog(0, 0.0, 1.0) == 0.0);
    CHECK(s.expected_backlog(0, -1.0, 3.0) == 0.0);

    const auto det = single({1.5}, {1.0}, 1.0, 10.0, 3);
    const BalancingState d(det, 0, 0.0);
    CHECK(d.expected_backlog(0, 0.0, 1.5) == 0.0);
    // positive part: a large stock never yields a negative backlog cost
    CHECK(d.expected_backlog(0, 5.0, 0.0) == 0.0);
}

TEST_CASE("proxies are monotone in the order") {
    for (const char* name : {"sector_sim", "affine_sim", "fig1_linear"}) {
        const auto p = build(name);
        for (auto variant : {HoldingProxyVariant::Printed, HoldingProxyVariant::Cumulative}) {
            BalancingOptions opts;
            opts.variant = variant;
            const BalancingState s(p, 0, 1.0, opts);
            for (int k = 0; k < p.periods(); k += 3)
                for (double x : {-2.0, 0.0, 0.5, 3.0}) {
                    double h = -1.0, b = kInf;
                    for (double u = 0.0; u <= 6.0; u += 0.01) {
                        const double hu = s.expected_holding(k, x, u);
                        const double bu = s.expected_backlog(k, x, u);
                        CHECK(hu >= h - 1e-12);
                        CHECK(bu <= b + 1e-12);
                        h = hu;
                        b = bu;
                    }
                }
        }
    }
}

TEST_CASE("balancing quantity") {
    const auto det = single({1.0}, {1.0}, 1.0, 10.0, 4);
    const BalancingState d(det, 0, 0.0);
    auto bo = balancing_order(d, 0, 0.0);
    CHECK(bo.order == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bo.theta == doctest::Approx(0.0).epsilon(1e-8));
    bo = balancing_order(d, 0, 1.0);
    CHECK(bo.order == 0.0);
    CHECK(bo.theta == 0.0);

    // crossing found by a dense scan of the independently computed proxies
    const auto p = fig2_single(0.1);
    const auto pmf = demand_pmf(p.demand, 0);
    const BalancingState s(p, 0, 0.0);
    const int k = p.periods() - 1;
    const auto got = balancing_order(s, k, 0.0);
    double lo = 0.0;
    for (double u = 0.0; u <= 3.0; u += 1e-3)
        if (h_one(pmf, 0.1, 0.0, u) < b_one(pmf, 10.0, 0.0, u))
            lo = u;
    double a = lo, b = lo + 1e-3;
    for (double u = a; u <= b; u += 1e-8)
        if (h_one(pmf, 0.1, 0.0, u) < b_one(pmf, 10.0, 0.0, u))
            a = u;
    CHECK(std::abs(got.order - a) <= 1e-6);
    CHECK(std::abs(s.expected_holding(k, 0.0, got.order) - s.expected_backlog(k, 0.0, got.order)) <= 1e-9);
}

TEST_CASE("holding-cost-K quantity") {
    const double K = 3.0;
    const auto det = single({1.0}, {1.0}, 1.0, 10.0, 4);
    const BalancingState d(det, 0, K);
    for (int k = 0; k < 4; ++k) {
        const auto h = holding_cost_K_order(d, k, 0.0);
        CHECK_FALSE(h.saturated);
        CHECK(h.order == doctest::Approx(1.0 + K / (4 - k)).epsilon(1e-9));
    }
    const BalancingState big(det, 0, 1e6);
    const auto sat = holding_cost_K_order(big, 0, 0.0);
    CHECK(sat.saturated);
    CHECK(sat.order == big.max_order(0.0));

    const BalancingState tiny(det, 0, 1e-9);
    CHECK(holding_cost_K_order(tiny, 0, 0.0).order == doctest::Approx(1.0).epsilon(1e-6));

    const BalancingState zero(det, 0, 0.0);
    CHECK_THROWS_AS(holding_cost_K_order(zero, 0, 0.0), DomainError);
}

TEST_CASE("ordering probability") {
    const auto p = build("affine_sim");
    const BalancingState s(p, 0, 4.0);
    CHECK(balancing_probability(s, 0, 2.0, 1.0) == 0.0);

    // x + u~ clears every demand: p = B(0) / (K + B(0))
    const double b0 = s.expected_backlog(0, 0.0, 0.0);
    CHECK(balancing_probability(s, 0, 0.0, 1.5) == doctest::Approx(b0 / (4.0 + b0)));

    // interior state: p solves p K = p B(u~) + (1 - p) B(0)
    const int k = 18;
    const double x = 0.0;
    const auto bo = balancing_order(s, k, x);
    REQUIRE(bo.theta < 4.0);
    const double ut = holding_cost_K_order(s, k, x).order;
    const double prob = balancing_probability(s, k, x, ut);
    const auto pmf = demand_pmf(p.demand, 0);
    const double B0 = b_one(pmf, 10.0, x, 0.0), Bu = b_one(pmf, 10.0, x, ut);
    CHECK(prob > 0.0);
    CHECK(prob < 1.0);
    CHECK(prob * 4.0 == doctest::Approx(prob * Bu + (1 - prob) * B0).epsilon(1e-12));
}

TEST_CASE("randomized rule") {
    const auto p = build("affine_sim");
    RandomStream stream(9);

    const BalancingState linear(p, 0, 0.0);
    for (double x : {-2.0, 0.0, 1.0}) {
        const auto step = act_balancing(linear, 3, x, stream);
        CHECK(step.order == balancing_order(linear, 3, x).order);
    }

    const BalancingState s(p, 0, 4.0);
    const auto none = act_balancing(s, 0, 2.0, stream);
    CHECK(none.p == 0.0);
    CHECK(none.order == 0.0);

    const int k = 18;
    const auto first = act_balancing(s, k, 0.0, stream);
    REQUIRE(first.theta < 4.0);
    const int trials = 100000;
    int hits = 0;
    for (int t = 0; t < trials; ++t)
        hits += act_balancing(s, k, 0.0, stream).order > 0.0;
    const double sd = std::sqrt(trials * first.p * (1 - first.p));
    CHECK(std::abs(hits - trials * first.p) <= 3.0 * sd);
}

TEST_CASE("balance holds at states visited in simulation") {
    const auto p = build("sector_sim");
    const BalancingState s(p, 1, 0.0);
    RandomStream demand(1), rule(2);
    const auto pi = make_balancing(p, 0.0);
    std::vector<PeriodRecord> trace;
    const std::vector<double> x0{0.0, 0.0};
    simulate_run(p, pi, x0, demand, rule, &trace);
    for (const auto& r : trace) {
        const auto bo = balancing_order(s, r.period, r.state[1]);
        if (!bo.saturated && bo.order > 0.0)
            CHECK(std::abs(s.expected_holding(r.period, r.state[1], bo.order) -
                           s.expected_backlog(r.period, r.state[1], bo.order)) <= 1e-9);
    }
}

TEST_CASE("single-location competitive checks") {
    const auto base = fig2_single(0.1);
    SimConfig cfg;
    cfg.runs = 2000;
    cfg.seed = 21;
    struct Case {
        OrderingCost cost;
        double K;
        double factor;
    };
    for (const auto& c : {Case{OrderingCost::linear(2.0), 0.0, 2.0}, Case{OrderingCost::affine(4.0, 2.0), 4.0, 3.0}}) {
        auto p = base;
        p.ordering = c.cost;
        const auto opt = solve_single_dp(p);
        const auto pi = make_balancing(p, c.K);
        for (double x : {-2.0, 0.0, 1.5, 4.0}) {
            const std::vector<double> x0{x};
            const auto s = *p.grid.index_of(x);
            const auto est = estimate_cost(p, pi, x0, s, cfg);
            CHECK(est.mean <= c.factor * opt.values.average(0, s) + 3.0 * est.se.value());
        }
    }
}
