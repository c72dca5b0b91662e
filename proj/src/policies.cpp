#include "invctl/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class Row>
const Row& stage_row(const std::vector<Row>& rows, int k, const char* what) {
    if (rows.empty())
        throw DomainError(std::string(what) + ": no stages");
    if (rows.size() == 1)
        return rows.front();
    if (k < 0 || static_cast<std::size_t>(k) >= rows.size())
        throw DomainError(std::string(what) + ": stage " + std::to_string(k) + " out of range");
    return rows[static_cast<std::size_t>(k)];
}

double box(const Problem& p, double x, double u) {
    return std::clamp(u, 0.0, std::max(0.0, std::min(p.max_order_per_location, p.grid.max - x)));
}

// Raises the smallest levels to a common value using exactly `amount`.
void waterfill(std::span<const double> x, double amount, std::span<double> out) {
    const std::size_t M = x.size();
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    double level = 0.0;
    double raised = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < M; ++j) {
        raised += x[order[j]];
        count = j + 1;
        level = (amount + raised) / static_cast<double>(count);
        if (j + 1 == M || level <= x[order[j + 1]])
            break;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < count; ++j)
        out[order[j]] = std::max(0.0, level - x[order[j]]);
    // put the rounding residue on the last raised location so the parts sum to `amount`
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < count; ++j)
        sum += out[order[j]];
    out[order[count - 1]] = std::max(0.0, amount - sum);
}

void act_impl(const Problem& p, const Policy& pi, int k, std::span<const double> x, std::span<double> out,
              std::size_t first_location, RandomStream& stream) {
    std::visit(
        overloaded{
            [&](const TabularPolicy& t) {
                if (k < 0 || static_cast<std::size_t>(k) >= t.stages())
                    throw DomainError("tabular policy: stage " + std::to_string(k) + " out of range");
                const StateSpace space(t.grid, t.locations);
                const auto u = t.order(static_cast<std::size_t>(k), space.index_of(x));
                std::copy(u.begin(), u.end(), out.begin());
            },
            [&](const BaseStockPolicy& b) {
                const auto& row = stage_row(b.levels, k, "base-stock policy");
                for (std::size_t i = 0; i < x.size(); ++i)
                    out[i] = box(p, x[i], std::max(row.at(i) - x[i], 0.0));
            },
            [&](const SSPolicy& ss) {
                const auto& row = stage_row(ss.levels, k, "(s,S) policy");
                for (std::size_t i = 0; i < x.size(); ++i) {
                    const auto& lv = row.at(i);
                    out[i] = x[i] < lv.s ? box(p, x[i], lv.S - x[i]) : 0.0;
                }
            },
            [&](const DecoupledPolicy& d) {
                std::size_t offset = 0;
                for (const auto& c : d.components) {
                    const std::size_t n = c.locations();
                    act_impl(p, c, k, x.subspan(offset, n), out.subspan(offset, n), first_location + offset, stream);
                    offset += n;
                }
            },
            [&](const BalancingPolicy& b) {
                const auto step = act_balancing(*b.state, k, x[0], stream);
                out[0] = box(p, x[0], step.order);
            },
            [&](const ExplicitVPolicy& v) {
                if (p.locations != v.locations || x.size() != v.locations)
                    throw DomainError("pi_v: problem has " + std::to_string(p.locations) + " locations, policy expects " +
                                      std::to_string(v.locations));
                const double total = std::accumulate(x.begin(), x.end(), 0.0);
                if (total >= v.threshold) {
                    std::fill(out.begin(), out.end(), 0.0);
                    return;
                }
                double amount = v.V.back();
                for (double cand : v.V) {
                    if (cand + total >= v.threshold) {
                        amount = cand;
                        break;
                    }
                }
                waterfill(x, amount, out);
            },
        },
        pi.kind);
}

} // namespace

std::size_t Policy::locations() const {
    return std::visit(overloaded{
                          [](const TabularPolicy& t) { return t.locations; },
                          [](const BaseStockPolicy& b) { return b.levels.empty() ? std::size_t{0} : b.levels.front().size(); },
                          [](const SSPolicy& s) { return s.levels.empty() ? std::size_t{0} : s.levels.front().size(); },
                          [](const DecoupledPolicy& d) {
                              std::size_t n = 0;
                              for (const auto& c : d.components)
                                  n += c.locations();
                              return n;
                          },
                          [](const BalancingPolicy&) { return std::size_t{1}; },
                          [](const ExplicitVPolicy& v) { return v.locations; },
                      },
                      kind);
}

bool Policy::exact_evaluable() const {
    if (std::holds_alternative<BalancingPolicy>(kind))
        return false;
    if (const auto* d = std::get_if<DecoupledPolicy>(&kind))
        return std::all_of(d->components.begin(), d->components.end(), [](const Policy& c) { return c.exact_evaluable(); });
    return true;
}

void act(const Problem& p, const Policy& pi, int k, std::span<const double> x, std::span<double> out,
         RandomStream& stream) {
    if (x.size() != pi.locations() || out.size() != x.size())
        throw DomainError("act: state has " + std::to_string(x.size()) + " components, policy covers " +
                          std::to_string(pi.locations()));
    act_impl(p, pi, k, x, out, 0, stream);
}

std::vector<double> act(const Problem& p, const Policy& pi, int k, std::span<const double> x) {
    RandomStream unused(0);
    std::vector<double> out(x.size());
    act(p, pi, k, x, out, unused);
    return out;
}

Policy make_tabular(TabularPolicy table, std::string name) { return Policy{std::move(table), std::move(name)}; }

Policy make_base_stock(std::vector<double> levels, std::string name) {
    return Policy{BaseStockPolicy{{std::move(levels)}}, std::move(name)};
}

Policy make_sS(std::vector<SSLevels> levels, std::string name) {
    for (const auto& lv : levels)
        if (lv.s > lv.S)
            throw DomainError("(s,S) policy requires s <= S");
    return Policy{SSPolicy{{std::move(levels)}}, std::move(name)};
}

Policy make_decoupled(std::vector<Policy> components, std::string name) {
    return Policy{DecoupledPolicy{std::move(components)}, std::move(name)};
}

Policy make_pi_square(const Problem& p, double l, int threads) {
    require_valid(p, true);
    std::vector<Policy> parts;
    for (std::size_t i = 0; i < p.locations; ++i) {
        const auto single = restrict_to_location(p, i, OrderingCost::linear(l));
        const auto sol = solve_single_dp(single, threads);
        BaseStockPolicy b;
        for (std::size_t k = 0; k < sol.policy.stages(); ++k)
            b.levels.push_back({extract_base_stock(sol.policy, k).S});
        parts.push_back(Policy{std::move(b), "pi_square[" + std::to_string(i) + "]"});
    }
    return make_decoupled(std::move(parts), "pi_square");
}

Policy make_pi_diamond(const Problem& p, double fixed_charge, double slope, int threads) {
    require_valid(p, true);
    std::vector<Policy> parts;
    for (std::size_t i = 0; i < p.locations; ++i) {
        const auto single = restrict_to_location(p, i, OrderingCost::affine(fixed_charge, slope));
        const auto sol = solve_single_dp(single, threads);
        SSPolicy ss;
        for (std::size_t k = 0; k < sol.policy.stages(); ++k) {
            const auto ext = extract_sS(sol.policy, k);
            ss.levels.push_back({SSLevels{ext.s, ext.S}});
        }
        parts.push_back(Policy{std::move(ss), "pi_diamond[" + std::to_string(i) + "]"});
    }
    return make_decoupled(std::move(parts), "pi_diamond");
}

Policy make_balancing(const Problem& p, double fixed_charge, BalancingOptions opts) {
    require_valid(p, false);
    std::vector<Policy> parts;
    for (std::size_t i = 0; i < p.locations; ++i) {
        auto state = std::make_shared<const BalancingState>(p, i, fixed_charge, opts);
        parts.push_back(Policy{BalancingPolicy{std::move(state)}, "balancing[" + std::to_string(i) + "]"});
    }
    return make_decoupled(std::move(parts), "balancing");
}

Policy make_pi_v(const TightnessParams& params) {
    ExplicitVPolicy v;
    v.locations = params.locations;
    v.delta = params.delta();
    const double M = static_cast<double>(params.locations);
    v.V = {M, M * (1.0 + v.delta)};
    v.threshold = v.V.back();
    return Policy{std::move(v), "pi_v"};
}

} // namespace invctl
