#include <cmath>
#include <sstream>

#include "doctest.h"

#include "invctl/dp.hpp"
#include "invctl/evaluate.hpp"
#include "invctl/instances.hpp"
#include "invctl/report.hpp"
#include "invctl/sim.hpp"

using namespace invctl;

namespace {

Problem with_demand(Problem p, std::vector<double> values, std::vector<double> probs) {
    for (auto& loc : p.demand.locations)
        loc = DiscreteDemand{values, probs};
    return p;
}

std::string csv(const RatioReport& rep) {
    std::ostringstream os;
    write_ratio_csv(os, rep);
    return os.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double sample_var(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

} // namespace

TEST_CASE("zero demand and no orders cost nothing") {
    const auto p = with_demand(build("fig1_linear"), {0.0}, {1.0});
    const auto pi = make_base_stock({-2.0, -2.0});
    RandomStream d(1), r(2);
    const std::vector<double> x0{0.0, 0.0};
    CHECK(simulate_run(p, pi, x0, d, r) == 0.0);
}

TEST_CASE("deterministic settings give identical runs and zero error") {
    const auto p = with_demand(build("fig1_nonlinear"), {1.0}, {1.0});
    const auto pi = make_pi_square(p, 2.0);
    SimConfig cfg;
    cfg.runs = 50;
    const std::vector<double> x0{-1.0, 2.0};
    const auto est = estimate_cost(p, pi, x0, 0, cfg);
    REQUIRE(est.se.has_value());
    CHECK(*est.se == 0.0);
    RandomStream a(1), b(99), c(5), d(7);
    CHECK(simulate_run(p, pi, x0, a, c) == simulate_run(p, pi, x0, b, d));
    CHECK(simulate_run(p, pi, x0, a, c) == est.mean);
}

TEST_CASE("a single run has no standard error") {
    const auto p = build("fig1_linear");
    SimConfig cfg;
    cfg.runs = 1;
    const std::vector<double> x0{0.0, 0.0};
    CHECK_FALSE(estimate_cost(p, make_pi_square(p, 2.0), x0, 0, cfg).se.has_value());
    cfg.initial_states = {x0};
    const auto rep = ratio_heatmap(p, make_pi_square(p, 2.0), make_pi_square(p, 2.0), cfg, EvalMode::MonteCarlo,
                                   EvalMode::MonteCarlo);
    CHECK(parse_csv(csv(rep)).at(1).at(3) == "NA");
    cfg.runs = 0;
    CHECK_THROWS_AS(estimate_cost(p, make_pi_square(p, 2.0), x0, 0, cfg), DomainError);
}

TEST_CASE("standard error shrinks with the square root of the run count") {
    const auto p = build("fig1_nonlinear");
    const auto pi = make_pi_square(p, 2.0);
    const std::vector<double> x0{0.0, 0.0};
    SimConfig cfg;
    cfg.seed = 4;
    cfg.runs = 2000;
    const double se1 = *estimate_cost(p, pi, x0, 0, cfg).se;
    cfg.runs = 8000;
    const double se4 = *estimate_cost(p, pi, x0, 0, cfg).se;
    CHECK(se1 / se4 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("Monte Carlo agrees with exact evaluation") {
    const auto p = build("fig1_linear");
    const auto pi = make_pi_square(p, 2.0);
    const auto exact = evaluate_policy_exact(p, pi);
    const std::vector<double> x0{0.0, 0.0};
    const auto s = StateSpace(p.grid, 2).index_of(x0);
    SimConfig cfg;
    cfg.runs = 100000;
    cfg.seed = 17;
    const auto est = estimate_cost(p, pi, x0, s, cfg);
    CHECK(std::abs(est.mean - exact[s]) <= 3.0 * *est.se);
}

TEST_CASE("parallel estimation matches the serial reference") {
    const auto p = build("affine_sim");
    const auto pi = make_balancing(p, 4.0);
    const std::vector<double> x0{0.5, -1.0};
    SimConfig cfg;
    cfg.runs = 300;
    cfg.seed = 8;
    const auto ser = reference::estimate_cost(p, pi, x0, 3, cfg);
    std::vector<CostEstimate> par;
    for (int threads : {1, 3}) {
        cfg.threads = threads;
        par.push_back(estimate_cost(p, pi, x0, 3, cfg));
        CHECK(par.back().mean == doctest::Approx(ser.mean).epsilon(1e-12));
        CHECK(*par.back().se == doctest::Approx(*ser.se).epsilon(1e-9));
    }
    CHECK(par[0].mean == par[1].mean);
    CHECK(*par[0].se == *par[1].se);
}

TEST_CASE("a policy against itself under common random numbers") {
    const auto p = build("sector_sim");
    const auto pi = make_balancing(p, 0.0);
    SimConfig cfg;
    cfg.runs = 20;
    cfg.crn = true;
    cfg.initial_states = {{0.0, 0.0}, {-2.0, 3.5}, {8.0, 8.0}};
    const auto rep = ratio_heatmap(p, pi, pi, cfg);
    for (const auto& row : rep.rows)
        CHECK(row.ratio == 1.0);
    CHECK(rep.max_ratio == 1.0);

    const auto opt = make_tabular(solve_joint_dp(build("fig1_nonlinear")).policy, "optimal");
    SimConfig all;
    all.runs = 5;
    all.crn = true;
    const auto self = ratio_heatmap(build("fig1_nonlinear"), opt, opt, all);
    CHECK(self.num_exact);
    CHECK(self.den_exact);
    for (const auto& row : self.rows)
        CHECK(row.ratio == 1.0);
}

TEST_CASE("ratio reports are identical across thread counts") {
    const auto p = build("fig1_nonlinear");
    const auto opt = make_tabular(solve_joint_dp(p).policy, "optimal");
    const auto bal = make_balancing(p, 0.0);
    SimConfig cfg;
    cfg.runs = 200;
    cfg.seed = 7;
    cfg.threads = 1;
    const auto one = csv(ratio_heatmap(p, bal, opt, cfg));
    cfg.threads = 3;
    const auto three = csv(ratio_heatmap(p, bal, opt, cfg));
    CHECK(one == three);
}

TEST_CASE("aggregates match the emitted table") {
    const auto p = build("fig1_nonlinear");
    const auto opt = make_tabular(solve_joint_dp(p).policy, "optimal");
    SimConfig cfg;
    cfg.runs = 300;
    cfg.seed = 2;
    const auto rep = ratio_heatmap(p, make_pi_square(p, 2.0), opt, cfg);
    const auto rows = parse_csv(csv(rep));
    REQUIRE(rows.size() == rep.rows.size() + 1);
    CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "mean_num", "se_num", "mean_den", "se_den", "ratio"});
    double sum = 0.0, mx = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double r = std::stod(rows[i][6]);
        CHECK(r == rep.rows[i - 1].ratio);
        CHECK(r == rep.rows[i - 1].num.mean / rep.rows[i - 1].den.mean);
        sum += r;
        if (r > mx) {
            mx = r;
            arg = i - 1;
        }
        // ratio lower bound against the exact optimum
        const auto& num = rep.rows[i - 1].num;
        CHECK(r >= 1.0 - 3.0 * *num.se / num.mean);
    }
    CHECK(rep.mean_ratio == doctest::Approx(sum / rep.rows.size()).epsilon(1e-14));
    CHECK(rep.max_ratio == mx);
    CHECK(rep.argmax == arg);
}

TEST_CASE("common random numbers reduce the variance of cost differences") {
    const auto p = build("affine_sim");
    const auto a = make_pi_diamond(p, 4.0, 1.0);
    const auto b = make_balancing(p, 4.0);
    const std::vector<double> x0{0.0, 0.0};
    auto differences = [&](bool crn) {
        SimConfig cfg;
        cfg.crn = crn;
        cfg.seed = 12;
        std::vector<double> d;
        for (std::size_t run = 0; run < 400; ++run) {
            RandomStream da(demand_stream_seed(cfg, 0, run, a)), pa(policy_stream_seed(cfg, 0, run, a));
            RandomStream db(demand_stream_seed(cfg, 0, run, b)), pb(policy_stream_seed(cfg, 0, run, b));
            d.push_back(simulate_run(p, a, x0, da, pa) - simulate_run(p, b, x0, db, pb));
        }
        return sample_var(d);
    };
    const double with = differences(true);
    const double without = differences(false);
    MESSAGE("difference variance with CRN " << with << ", without " << without);
    CHECK(with < without);
}

TEST_CASE("stream seeds") {
    const auto p = build("fig1_linear");
    const auto a = make_pi_square(p, 2.0);
    const auto b = make_balancing(p, 0.0);
    SimConfig cfg;
    cfg.crn = true;
    CHECK(demand_stream_seed(cfg, 3, 4, a) == demand_stream_seed(cfg, 3, 4, b));
    CHECK(policy_stream_seed(cfg, 3, 4, a) != policy_stream_seed(cfg, 3, 4, b));
    CHECK(demand_stream_seed(cfg, 3, 4, a) != demand_stream_seed(cfg, 4, 3, a));
    cfg.crn = false;
    CHECK(demand_stream_seed(cfg, 3, 4, a) != demand_stream_seed(cfg, 3, 4, b));
}

TEST_CASE("holding is charged before clamping") {
    auto p = with_demand(build("fig1_linear"), {3.0}, {1.0});
    p.horizon = FiniteHorizon{1};
    const auto pi = make_base_stock({-2.0, -2.0});
    RandomStream d(1), r(2);
    std::vector<PeriodRecord> trace;
    const std::vector<double> x0{-2.0, -2.0};
    // level -5 on both: backlog 10 * 5 each, ordering nothing
    CHECK(simulate_run(p, pi, x0, d, r, &trace) == 100.0);
    REQUIRE(trace.size() == 1);
    CHECK(trace[0].holding_cost == 100.0);
}

TEST_CASE("infinite-horizon averaging skips the burn-in") {
    auto p = with_demand(build("fig1_linear"), {1.0}, {1.0});
    p.horizon = InfiniteAveraged{10, 4};
    const auto pi = make_base_stock({1.0, 1.0});
    RandomStream d(1), r(2);
    const std::vector<double> x0{-2.0, -2.0};
    // steady state: order 2 units at slope 2, no holding cost
    CHECK(simulate_run(p, pi, x0, d, r) == doctest::Approx(4.0));
}

TEST_CASE("cost transformation") {
    const auto p = build("fig1_linear");
    SimConfig cfg;
    const auto rep = verify_cost_transformation(p, make_pi_square(p, 2.0), 2.0, cfg);
    CHECK(rep.exact);
    CHECK(rep.corrected_holds);
    CHECK(rep.max_corrected_gap <= 1e-9);
    // the printed identity drops m E[x_N - x_0] / N and the clamp residual
    const auto detail = evaluate_policy_exact_detailed(p, make_pi_square(p, 2.0));
    for (std::size_t s = 0; s < rep.rows.size(); ++s)
        CHECK(rep.rows[s].printed_gap ==
              doctest::Approx(2.0 * (detail.terminal_shift[s] + detail.clamp_residual[s])).epsilon(1e-9));

    const auto zero = verify_cost_transformation(p, make_pi_square(p, 2.0), 0.0, cfg);
    CHECK(zero.printed_holds);
    CHECK(zero.corrected_holds);

    CHECK_THROWS_AS(verify_cost_transformation(p, make_pi_square(p, 2.0), 3.0, cfg), DomainError);
}

TEST_CASE("fig2 demand term") {
    const auto p = build("sector_sim");
    SimConfig cfg;
    cfg.initial_states = {{0.0, 0.0}, {2.0, -1.0}};
    const auto rep = verify_cost_transformation(p, make_pi_square(p, 2.0), 2.0, cfg);
    for (const auto& row : rep.rows)
        CHECK(row.demand_term == doctest::Approx(2.0 * 1.5).epsilon(1e-12));
    CHECK(rep.corrected_holds);
}

TEST_CASE("cost transformation for an online policy") {
    const auto p = build("fig1_linear");
    SimConfig cfg;
    cfg.runs = 500;
    cfg.initial_states = {{0.0, 0.0}, {2.0, -1.0}};
    const auto rep = verify_cost_transformation(p, make_balancing(p, 0.0), 2.0, cfg);
    CHECK_FALSE(rep.exact);
    CHECK(rep.corrected_holds);
}
