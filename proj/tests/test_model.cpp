#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"

#include "invctl/config.hpp"
#include "invctl/instances.hpp"
#include "invctl/model.hpp"

using namespace invctl;

namespace {

bool has_issue(const std::vector<Issue>& issues, const std::string& needle) {
    for (const auto& i : issues)
        if (i.path.find(needle) != std::string::npos || i.message.find(needle) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST_CASE("grid indexing is exact") {
    Grid g{-2.0, 8.0, 0.5};
    CHECK(g.count() == 21);
    CHECK(g.point(20) == 8.0);
    CHECK(g.index_of(3.5) == 11);
    CHECK_FALSE(g.index_of(3.3).has_value());
    CHECK(g.steps_in(1.5) == 3);
    CHECK_FALSE(g.steps_in(0.3).has_value());
}

TEST_CASE("ordering cost pieces and discount points") {
    const auto fig1 = build("fig1_nonlinear");
    CHECK(eval_ordering_cost(fig1.ordering, 0.0) == 0.0);
    CHECK(eval_ordering_cost(fig1.ordering, 1.0) == 2.0);
    CHECK(eval_ordering_cost(fig1.ordering, 3.0) == 12.0);

    const auto affine = build("affine_sim");
    CHECK(eval_ordering_cost(affine.ordering, 6.0) == doctest::Approx(16.0));
    CHECK(eval_ordering_cost(affine.ordering, 7.0) == doctest::Approx(17.0));
    CHECK(eval_ordering_cost(affine.ordering, 0.5) == doctest::Approx(5.0));

    OrderingCost c = OrderingCost::linear(4.0);
    c.discount_set.push_back({2.0, 1.0});
    CHECK(eval_ordering_cost(c, 2.0) == 2.0);
    CHECK(eval_ordering_cost(c, 2.0 + 1e-6) == doctest::Approx(8.0));
    CHECK_THROWS_AS(eval_ordering_cost(c, -1.0), DomainError);
}

TEST_CASE("ordering cost is lower semicontinuous at piece boundaries") {
    for (const char* name : {"fig1_nonlinear", "sector_sim", "affine_sim"}) {
        const auto p = build(name);
        for (const auto& piece : p.ordering.pieces) {
            if (!std::isfinite(piece.upper))
                continue;
            const double at = eval_ordering_cost(p.ordering, piece.upper);
            const double left = eval_ordering_cost(p.ordering, piece.upper - 1e-9);
            const double right = eval_ordering_cost(p.ordering, piece.upper + 1e-9);
            CHECK(at <= std::min(left, right) + 1e-6);
        }
    }
}

TEST_CASE("holding cost is two-sided linear and convex") {
    const auto p = build("sector_sim");
    CHECK(eval_holding_cost(p.holding, 0, 2.0) == doctest::Approx(0.2));
    CHECK(eval_holding_cost(p.holding, 0, -1.5) == doctest::Approx(15.0));
    for (double x = -3.0; x <= 3.0; x += 0.37)
        for (double t : {0.1, 0.5, 0.9}) {
            const double y = x + 1.3;
            const double mid = t * x + (1 - t) * y;
            CHECK(eval_holding_cost(p.holding, 1, mid) <=
                  t * eval_holding_cost(p.holding, 1, x) + (1 - t) * eval_holding_cost(p.holding, 1, y) + 1e-12);
        }
}

TEST_CASE("demand pmf") {
    const auto s = build("sector_sim");
    const auto pmf = demand_pmf(s.demand, 0);
    REQUIRE(pmf.size() == 4);
    CHECK(pmf[1].value == 0.5);
    CHECK(pmf[1].prob == 0.375);
    double total = 0.0;
    for (const auto& a : pmf) {
        CHECK(a.prob >= 0.0);
        total += a.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);

    const auto f = build("fig1_linear");
    CHECK(demand_pmf(f.demand, 1)[0].value == 0.0);
    CHECK(demand_pmf(f.demand, 1)[0].prob == 0.5);

    const auto t = build("tightness");
    CHECK_THROWS_AS(demand_pmf(t.demand, 0), UnsupportedError);
}

TEST_CASE("sampling: support, degenerate atoms and frequencies") {
    DemandModel d;
    d.locations = {UniformDemand{1.0, 1.1}, DiscreteDemand{{2.0}, {1.0}}};
    RandomStream stream(3);
    std::vector<double> w(2);
    for (int i = 0; i < 1000; ++i) {
        sample_demand(d, i, stream, w);
        CHECK(w[0] >= 1.0);
        CHECK(w[0] <= 1.1);
        CHECK(w[1] == 2.0);
    }

    // chi-square goodness of fit against the exact pmf, 3 degrees of freedom
    const auto p = build("sector_sim");
    const auto pmf = demand_pmf(p.demand, 0);
    const int draws = 100000;
    std::vector<int> counts(pmf.size(), 0);
    RandomStream s2(11);
    std::vector<double> w2(2);
    for (int i = 0; i < draws; ++i) {
        sample_demand(p.demand, 0, s2, w2);
        for (std::size_t a = 0; a < pmf.size(); ++a)
            if (w2[0] == pmf[a].value)
                ++counts[a];
    }
    double chi2 = 0.0;
    for (std::size_t a = 0; a < pmf.size(); ++a) {
        const double e = draws * pmf[a].prob;
        chi2 += (counts[a] - e) * (counts[a] - e) / e;
    }
    CHECK(chi2 < 16.27);  // 0.999 quantile of chi-square(3)
}

TEST_CASE("validation reports every issue") {
    for (const auto& name : instance_names())
        CHECK(validate_problem(build(name)).empty());

    auto p = build("sector_sim");
    std::get<DiscreteDemand>(p.demand.locations[0]).values[1] = 0.3;
    CHECK(validate_problem(p, false).empty());
    CHECK_FALSE(validate_problem(p, true).empty());

    auto q = build("fig1_linear");
    std::get<DiscreteDemand>(q.demand.locations[0]).probs = {0.5, 0.4};
    q.holding.rates[1].holding = -1.0;
    const auto issues = validate_problem(q);
    CHECK(issues.size() >= 2);
    CHECK(has_issue(issues, "demand"));
    CHECK(has_issue(issues, "holding"));
    CHECK_THROWS_AS(require_valid(q), ValidationError);
}

TEST_CASE("restrict_to_location keeps one coordinate") {
    const auto p = build("affine_sim");
    const auto one = restrict_to_location(p, 1, OrderingCost::linear(2.0));
    CHECK(one.locations == 1);
    CHECK(one.demand.num_locations() == 1);
    CHECK(eval_ordering_cost(one.ordering, 3.0) == 6.0);
    CHECK(one.grid.count() == p.grid.count());
}

TEST_CASE("config round trip and errors") {
    for (const auto& name : instance_names()) {
        const auto p = build(name);
        const auto j = problem_to_json(p);
        const auto back = problem_from_json(j);
        CHECK(problem_to_json(back) == j);
    }

    auto j = problem_to_json(build("fig1_linear"));
    j["typo"] = 1;
    CHECK_THROWS_AS(problem_from_json(j), ConfigError);

    CHECK_THROWS_WITH_AS(load_problem("/nonexistent/problem.json"), doctest::Contains("not found"), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "invctl_bad.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_problem(path), ConfigError);
    std::filesystem::remove(path);
}
