#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "invctl/bounds.hpp"
#include "invctl/instances.hpp"

using namespace invctl;

namespace {

// Points where a piecewise-affine cost takes its extreme ratios: right ends
// and just past left ends of each piece, plus discount points.
std::vector<std::pair<double, double>> probe_points(const OrderingCost& c) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : c.pieces) {
        const double z0 = p.lower + 1e-12;
        pts.emplace_back(z0, p.fixed + p.slope * z0);
        if (std::isfinite(p.upper))
            pts.emplace_back(p.upper, p.fixed + p.slope * p.upper);
    }
    for (const auto& d : c.discount_set)
        pts.emplace_back(d.z, d.slope * d.z);
    return pts;
}

double tail_slope(const OrderingCost& c) { return c.pieces.back().slope; }

// For fixed l the best lower intercept is the largest feasible one; rho then
// follows from the probe points and the asymptote. Scan l, then zoom.
double affine_oracle(const OrderingCost& c, std::size_t M) {
    const auto pts = probe_points(c);
    const double m = tail_slope(c);
    auto rho = [&](double l) {
        double K = kInf;
        for (const auto& [z, v] : pts)
            K = std::min(K, v - l * z);
        if (!(K > 0.0))
            return kInf;
        double r = m / l;
        for (const auto& [z, v] : pts)
            r = std::max(r, v / (K + l * z));
        return r;
    };
    double lo = 1e-9, hi = m, best_l = hi, best = rho(hi);
    for (int round = 0; round < 12; ++round) {
        const int n = 2000;
        for (int i = 0; i <= n; ++i) {
            const double l = lo + (hi - lo) * i / n;
            const double r = rho(l);
            if (r < best) {
                best = r;
                best_l = l;
            }
        }
        const double w = (hi - lo) / n;
        lo = std::max(1e-9, best_l - 2 * w);
        hi = std::min(m, best_l + 2 * w);
    }
    return static_cast<double>(M) * best;
}

OrderingCost random_cost(std::uint64_t seed) {
    RandomStream rs(seed);
    OrderingCost c;
    const int pieces = 2 + static_cast<int>(rs.uniform01() * 3);
    double lower = 0.0;
    double fixed = 1.0 + 4.0 * rs.uniform01();
    double slope = 1.0 + 3.0 * rs.uniform01();
    for (int i = 0; i < pieces; ++i) {
        const bool last = i + 1 == pieces;
        const double upper = last ? kInf : lower + 1.0 + 5.0 * rs.uniform01();
        c.pieces.push_back({lower, upper, fixed, slope});
        if (!last) {
            // continuous or jumping up, with a smaller slope after the break
            const double at = fixed + slope * upper;
            const double next_slope = slope * (0.3 + 0.6 * rs.uniform01());
            fixed = at + 2.0 * rs.uniform01() - next_slope * upper;
            slope = next_slope;
            lower = upper;
        }
    }
    return c;
}

double lower_gap(const OrderingCost& c, const AffineFit& f, double z) {
    return f.K_l + f.l * z - eval_ordering_cost(c, z);
}

double upper_gap(const OrderingCost& c, const AffineFit& f, double z) {
    return eval_ordering_cost(c, z) - (f.K_h + f.h * z);
}

} // namespace

TEST_CASE("sector fits") {
    const auto eq13 = build("sector_sim").ordering;
    const auto s = fit_sector(eq13);
    CHECK(s.l == 2.0);
    CHECK(s.h == 4.0);
    CHECK_FALSE(s.l_witness.has_value());
    CHECK(s.h_witness == 6.0);

    const auto lin = fit_sector(OrderingCost::linear(2.0));
    CHECK(lin.l == 2.0);
    CHECK(lin.h == 2.0);

    CHECK_THROWS_AS(fit_sector(build("affine_sim").ordering), NotSectorBoundable);

    OrderingCost flat;
    flat.pieces = {{0.0, 1.0, 0.0, 1.0}, {1.0, kInf, 1.0, 0.0}};
    CHECK_THROWS_AS(fit_sector(flat), FitError);
}

TEST_CASE("sector fit is feasible and cannot be tightened") {
    const auto c = build("sector_sim").ordering;
    const auto s = fit_sector(c);
    CHECK(sector_violation(c, s) <= 0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double z = 0.005 * i;
        const double v = eval_ordering_cost(c, z);
        CHECK(s.l * z <= v + 1e-12);
        CHECK(v <= s.h * z + 1e-12);
    }
    // any feasible pair has ratio at least h / l
    for (double l2 = 0.5; l2 <= 4.0; l2 += 0.25)
        for (double h2 = l2; h2 <= 8.0; h2 += 0.25) {
            SectorFit other{l2, h2, std::nullopt, std::nullopt};
            if (sector_violation(c, other) <= 0.0)
                CHECK(h2 / l2 >= s.ratio() - 1e-12);
        }
}

TEST_CASE("affine fit of the fig2 affine cost") {
    const auto c = build("affine_sim").ordering;
    const auto f = fit_affine(c, 2);
    CHECK(f.K_l == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(f.l == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.objective == doctest::Approx(affine_oracle(c, 2)).epsilon(1e-6));
    CHECK(affine_violation(c, f) <= 1e-12);

    // the upper envelope (16/3, 4/3) paired with (4, 1) does not cover c at z = 6
    const AffineFit quoted{4.0, 1.0, 16.0 / 3.0, 4.0 / 3.0, 2, 8.0 / 3.0};
    CHECK(affine_violation(c, quoted) > 0.0);
    CHECK(upper_gap(c, quoted, 6.0) == doctest::Approx(16.0 - 40.0 / 3.0));
}

TEST_CASE("an affine cost fits itself") {
    for (std::size_t M : {1u, 2u, 5u}) {
        const auto f = fit_affine(OrderingCost::affine(3.0, 1.5), M);
        CHECK(f.K_l == doctest::Approx(3.0));
        CHECK(f.K_h == doctest::Approx(3.0));
        CHECK(f.l == doctest::Approx(1.5));
        CHECK(f.h == doctest::Approx(1.5));
        CHECK(f.objective == doctest::Approx(static_cast<double>(M)));
    }
}

TEST_CASE("affine fits match a search oracle on random costs") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto c = random_cost(seed);
        const auto f = fit_affine(c, 2);
        const double want = affine_oracle(c, 2);
        CHECK(f.objective == doctest::Approx(want).epsilon(1e-6));
        CHECK(affine_violation(c, f) <= 1e-9);
        CHECK(f.K_l > 0.0);
        CHECK(f.K_l <= f.K_h + 1e-12);
        CHECK(f.l <= f.h + 1e-12);
        for (int i = 1; i <= 10000; ++i) {
            const double z = 0.005 * i;
            CHECK(lower_gap(c, f, z) <= 1e-9);
            CHECK(upper_gap(c, f, z) <= 1e-9);
        }
    }
}

TEST_CASE("affine fit needs a positive intercept") {
    CHECK_THROWS_AS(fit_affine(OrderingCost::linear(2.0), 2), FitError);
}

TEST_CASE("bounded domain can only tighten") {
    const auto c = build("affine_sim").ordering;
    const auto unbounded = fit_affine(c, 2);
    const auto bounded = fit_affine(c, 2, FitDomain{20.0});
    CHECK(bounded.objective <= unbounded.objective + 1e-12);
    const auto s = fit_sector(build("sector_sim").ordering, FitDomain{5.0});
    CHECK(s.l == 4.0);
    CHECK(s.h == 4.0);
}

TEST_CASE("theoretical ratios") {
    const auto s = fit_sector(build("sector_sim").ordering);
    CHECK(theoretical_ratio(s, 2, PolicyFamily::BaseStock) == 2.0);
    CHECK(theoretical_ratio(s, 2, PolicyFamily::Online) == 4.0);
    CHECK_THROWS_AS(theoretical_ratio(s, 2, PolicyFamily::SS), MismatchError);

    const AffineFit quoted{4.0, 1.0, 16.0 / 3.0, 4.0 / 3.0, 2, 8.0 / 3.0};
    CHECK(theoretical_ratio(quoted, 2, PolicyFamily::SS) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(theoretical_ratio(quoted, 2, PolicyFamily::Online) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK_THROWS_AS(theoretical_ratio(quoted, 2, PolicyFamily::BaseStock), MismatchError);

    const auto f = fit_affine(build("affine_sim").ordering, 2);
    CHECK(theoretical_ratio(f, 2, PolicyFamily::Online) == 3.0 * theoretical_ratio(f, 2, PolicyFamily::SS));
    CHECK(theoretical_ratio(s, 2, PolicyFamily::Online) == 2.0 * theoretical_ratio(s, 2, PolicyFamily::BaseStock));
}
