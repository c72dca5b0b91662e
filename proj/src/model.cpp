#include "invctl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace invctl {

namespace {

// Discount-set membership is exact up to a few ulps of the stored value.
constexpr double kDiscountRelTol = 1e-12;

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string path_of(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

} // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error([&] {
          std::string msg = "invalid problem:";
          for (const auto& is : issues)
              msg += "\n  " + is.path + ": " + is.message;
          return msg;
      }()),
      issues_(std::move(issues)) {}

// ---------------------------------------------------------------------------
// Grid

std::size_t Grid::count() const {
    if (!(step > 0.0) || max < min)
        return 0;
    return static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
}

std::optional<long long> Grid::steps_in(double x, double tol) const {
    if (!(step > 0.0))
        return std::nullopt;
    const double q = x / step;
    const double r = std::round(q);
    if (std::abs(q - r) > tol)
        return std::nullopt;
    return static_cast<long long>(r);
}

std::optional<std::size_t> Grid::index_of(double x, double tol) const {
    const auto n = count();
    if (n == 0)
        return std::nullopt;
    const double q = (x - min) / step;
    const double r = std::round(q);
    if (std::abs(q - r) > tol || r < 0.0 || r > static_cast<double>(n - 1))
        return std::nullopt;
    return static_cast<std::size_t>(r);
}

// ---------------------------------------------------------------------------
// Demand

bool DemandModel::is_discrete() const {
    return std::all_of(locations.begin(), locations.end(),
                       [](const LocationDemand& l) { return std::holds_alternative<DiscreteDemand>(l); });
}

double DemandModel::mean(std::size_t i) const {
    const auto& loc = locations.at(i);
    if (const auto* d = std::get_if<DiscreteDemand>(&loc)) {
        double m = 0.0;
        for (std::size_t j = 0; j < d->values.size(); ++j)
            m += d->values[j] * d->probs[j];
        return m;
    }
    const auto& u = std::get<UniformDemand>(loc);
    return 0.5 * (u.lo + u.hi);
}

double DemandModel::max_value(std::size_t i) const {
    const auto& loc = locations.at(i);
    if (const auto* d = std::get_if<DiscreteDemand>(&loc))
        return d->values.empty() ? 0.0 : *std::max_element(d->values.begin(), d->values.end());
    return std::get<UniformDemand>(loc).hi;
}

std::vector<Atom> demand_pmf(const DemandModel& d, std::size_t i) {
    if (i >= d.num_locations())
        throw DomainError("demand_pmf: location " + std::to_string(i) + " out of range");
    const auto* disc = std::get_if<DiscreteDemand>(&d.locations[i]);
    if (!disc)
        throw UnsupportedError("demand_pmf: location " + std::to_string(i) + " has continuous demand");
    std::vector<Atom> atoms;
    atoms.reserve(disc->values.size());
    for (std::size_t j = 0; j < disc->values.size(); ++j)
        atoms.push_back({disc->values[j], disc->probs[j]});
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    // merge duplicate values
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().value == a.value)
            merged.back().prob += a.prob;
        else
            merged.push_back(a);
    }
    return merged;
}

void sample_demand(const DemandModel& d, int /*period*/, RandomStream& stream, std::span<double> out) {
    for (std::size_t i = 0; i < d.num_locations(); ++i) {
        const double u = stream.uniform01();
        if (const auto* disc = std::get_if<DiscreteDemand>(&d.locations[i])) {
            double acc = 0.0;
            double value = disc->values.back();
            for (std::size_t j = 0; j < disc->values.size(); ++j) {
                acc += disc->probs[j];
                if (u < acc) {
                    value = disc->values[j];
                    break;
                }
            }
            out[i] = value;
        } else {
            const auto& uni = std::get<UniformDemand>(d.locations[i]);
            out[i] = uni.lo + u * (uni.hi - uni.lo);
        }
    }
}

// ---------------------------------------------------------------------------
// Costs

OrderingCost OrderingCost::linear(double slope) { return affine(0.0, slope); }

OrderingCost OrderingCost::affine(double fixed, double slope) {
    OrderingCost c;
    c.pieces.push_back({0.0, kInf, fixed, slope});
    return c;
}

OrderingCost OrderingCost::without_linear_term(double m) const {
    OrderingCost out = *this;
    for (auto& piece : out.pieces) {
        if (piece.slope < m)
            throw DomainError("cost transformation: piece slope " + fmt_num(piece.slope) + " below m = " + fmt_num(m));
        piece.slope -= m;
    }
    for (auto& d : out.discount_set) {
        if (d.slope < m)
            throw DomainError("cost transformation: discount slope " + fmt_num(d.slope) + " below m = " + fmt_num(m));
        d.slope -= m;
    }
    return out;
}

double eval_ordering_cost(const OrderingCost& c, double z) {
    if (z < 0.0 || std::isnan(z))
        throw DomainError("eval_ordering_cost: negative order total " + fmt_num(z));
    if (z == 0.0)
        return 0.0;
    for (const auto& d : c.discount_set) {
        if (std::abs(z - d.z) <= kDiscountRelTol * std::max(1.0, std::abs(d.z)))
            return d.slope * z;
    }
    for (const auto& piece : c.pieces) {
        if (z > piece.lower && z <= piece.upper)
            return piece.fixed + piece.slope * z;
    }
    throw DomainError("eval_ordering_cost: no piece covers z = " + fmt_num(z));
}

HoldingBacklogCost HoldingBacklogCost::uniform(std::size_t locations, double holding, double backlog) {
    return HoldingBacklogCost{std::vector<HoldingRates>(locations, HoldingRates{holding, backlog})};
}

double eval_holding_cost(const HoldingBacklogCost& r, std::size_t i, double x) {
    if (i >= r.rates.size())
        throw DomainError("eval_holding_cost: location " + std::to_string(i) + " out of range");
    const auto& rate = r.rates[i];
    return rate.holding * std::max(0.0, x) + rate.backlog * std::max(0.0, -x);
}

// ---------------------------------------------------------------------------
// Problem

int Problem::periods() const {
    if (const auto* f = std::get_if<FiniteHorizon>(&horizon))
        return f->periods;
    return std::get<InfiniteAveraged>(horizon).sim_periods;
}

int Problem::burn_in() const {
    if (const auto* inf = std::get_if<InfiniteAveraged>(&horizon))
        return inf->burn_in;
    return 0;
}

int Problem::averaged_periods() const { return periods() - burn_in(); }

std::vector<Issue> validate_problem(const Problem& p, bool for_dp) {
    std::vector<Issue> issues;
    auto add = [&](std::string path, std::string msg) { issues.push_back({std::move(path), std::move(msg)}); };
    const std::size_t M = p.locations;

    if (M < 1)
        add("locations", "must be at least 1");

    // grid
    const auto& g = p.grid;
    if (!(g.step > 0.0) || !std::isfinite(g.step))
        add("grid.step", "must be positive and finite");
    if (!(g.min <= g.max) || !std::isfinite(g.min) || !std::isfinite(g.max))
        add("grid", "min must not exceed max");
    if (g.step > 0.0 && g.min <= g.max) {
        const double q = (g.max - g.min) / g.step;
        if (std::abs(q - std::round(q)) > 1e-9)
            add("grid", "(max - min)/step = " + fmt_num(q) + " is not integral");
    }

    // horizon
    if (const auto* f = std::get_if<FiniteHorizon>(&p.horizon)) {
        if (f->periods < 1)
            add("horizon.periods", "must be at least 1");
    } else {
        const auto& inf = std::get<InfiniteAveraged>(p.horizon);
        if (inf.sim_periods < 1)
            add("horizon.sim_periods", "must be at least 1");
        if (inf.burn_in < 0 || inf.burn_in >= inf.sim_periods)
            add("horizon.burn_in", "must lie in [0, sim_periods)");
    }

    // max order
    if (!(p.max_order_per_location >= 0.0) || !std::isfinite(p.max_order_per_location))
        add("max_order_per_location", "must be nonnegative and finite");
    else if (g.step > 0.0 && !g.steps_in(p.max_order_per_location))
        add("max_order_per_location", "must be a multiple of grid.step");

    // demand
    if (p.demand.num_locations() != M)
        add("demand.locations", "count " + std::to_string(p.demand.num_locations()) + " != locations " + std::to_string(M));
    for (std::size_t i = 0; i < p.demand.num_locations(); ++i) {
        const std::string base = path_of("demand.locations", i);
        if (const auto* d = std::get_if<DiscreteDemand>(&p.demand.locations[i])) {
            if (d->values.empty())
                add(base + ".values", "must not be empty");
            if (d->values.size() != d->probs.size())
                add(base, "values and probs differ in length");
            double total = 0.0;
            for (std::size_t j = 0; j < d->values.size(); ++j) {
                if (!(d->values[j] >= 0.0) || !std::isfinite(d->values[j]))
                    add(path_of(base + ".values", j), "demand must be nonnegative and finite");
                if (j < d->probs.size()) {
                    if (!(d->probs[j] >= 0.0))
                        add(path_of(base + ".probs", j), "probability must be nonnegative");
                    total += d->probs[j];
                }
            }
            if (std::abs(total - 1.0) > 1e-12)
                add(base + ".probs", "probabilities sum to " + fmt_num(total) + ", not 1 (normalization)");
            if (for_dp && g.step > 0.0) {
                for (std::size_t j = 0; j < d->values.size(); ++j) {
                    if (!g.steps_in(d->values[j]))
                        add(path_of(base + ".values", j), "off-grid demand " + fmt_num(d->values[j]) +
                                                              " is not a multiple of grid.step " + fmt_num(g.step));
                }
            }
        } else {
            const auto& u = std::get<UniformDemand>(p.demand.locations[i]);
            if (!(u.lo >= 0.0 && u.lo < u.hi && std::isfinite(u.hi)))
                add(base, "uniform demand requires 0 <= lo < hi < inf");
            if (for_dp)
                add(base, "continuous demand is unsupported by dynamic programming");
        }
    }
    if (for_dp && !p.demand.iid_across_periods)
        add("demand.iid", "dynamic programming requires i.i.d. demand");

    // holding / backlog
    if (p.holding.rates.size() != M)
        add("holding", "count " + std::to_string(p.holding.rates.size()) + " != locations " + std::to_string(M));
    for (std::size_t i = 0; i < p.holding.rates.size(); ++i) {
        const auto& r = p.holding.rates[i];
        if (!(r.holding >= 0.0) || !(r.backlog >= 0.0))
            add(path_of("holding", i), "rates must be nonnegative");
        else if (r.holding == 0.0 && r.backlog == 0.0)
            add(path_of("holding", i), "at least one rate must be positive (radial unboundedness)");
    }

    // ordering cost
    const auto& c = p.ordering;
    if (c.pieces.empty())
        add("ordering.pieces", "must not be empty");
    for (std::size_t j = 0; j < c.pieces.size(); ++j) {
        const auto& piece = c.pieces[j];
        const std::string base = path_of("ordering.pieces", j);
        if (!(piece.fixed >= 0.0) || !std::isfinite(piece.fixed))
            add(base + ".fixed", "must be nonnegative and finite");
        if (!(piece.slope >= 0.0) || !std::isfinite(piece.slope))
            add(base + ".slope", "must be nonnegative and finite");
        if (!(piece.lower < piece.upper))
            add(base, "lower must be below upper");
        if (j == 0 && piece.lower != 0.0)
            add(base + ".lower", "first piece must start at 0");
        if (j > 0 && piece.lower != c.pieces[j - 1].upper)
            add(base + ".lower", "gap or overlap with previous piece");
    }
    if (!c.pieces.empty() && c.pieces.back().upper != kInf)
        add("ordering.pieces", "last piece must extend to infinity");
    for (std::size_t j = 0; j < c.discount_set.size(); ++j) {
        const auto& d = c.discount_set[j];
        if (!(d.z > 0.0))
            add(path_of("ordering.discount_set", j), "z must be strictly positive");
        if (!(d.slope >= 0.0))
            add(path_of("ordering.discount_set", j), "slope must be nonnegative");
        for (std::size_t q = 0; q < j; ++q)
            if (c.discount_set[q].z == d.z)
                add(path_of("ordering.discount_set", j), "duplicate z value");
    }
    return issues;
}

void require_valid(const Problem& p, bool for_dp) {
    auto issues = validate_problem(p, for_dp);
    if (!issues.empty()) {
        // continuous demand in a DP request is an unsupported variant, not a malformed problem
        if (for_dp && p.demand.num_locations() == p.locations && !p.demand.is_discrete()) {
            bool only_continuity = std::all_of(issues.begin(), issues.end(), [](const Issue& is) {
                return is.message.find("continuous demand") != std::string::npos;
            });
            if (only_continuity)
                throw UnsupportedError("dynamic programming requires discrete demand; problem has continuous demand");
        }
        throw ValidationError(std::move(issues));
    }
}

Problem restrict_to_location(const Problem& p, std::size_t i, OrderingCost c) {
    if (i >= p.locations)
        throw DomainError("restrict_to_location: location " + std::to_string(i) + " out of range");
    Problem single = p;
    single.locations = 1;
    single.ordering = std::move(c);
    single.holding.rates = {p.holding.rates.at(i)};
    single.demand.locations = {p.demand.locations.at(i)};
    return single;
}

} // namespace invctl
