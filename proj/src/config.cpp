#include "invctl/config.hpp"

#include <fstream>
#include <set>

namespace invctl {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

const json& need(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing key '" + std::string(key) + "'");
    return j.at(key);
}

template <class T>
T get(const json& j, const std::string& where, const char* key) {
    try {
        return need(j, where, key).get<T>();
    } catch (const json::type_error& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

json upper_to_json(double u) { return u == kInf ? json(nullptr) : json(u); }

} // namespace

json problem_to_json(const Problem& p) {
    json j;
    j["locations"] = p.locations;
    if (const auto* f = std::get_if<FiniteHorizon>(&p.horizon)) {
        j["horizon"] = {{"kind", "finite"}, {"periods", f->periods}};
    } else {
        const auto& inf = std::get<InfiniteAveraged>(p.horizon);
        j["horizon"] = {{"kind", "infinite_averaged"}, {"sim_periods", inf.sim_periods}, {"burn_in", inf.burn_in}};
    }
    j["grid"] = {{"min", p.grid.min}, {"max", p.grid.max}, {"step", p.grid.step}};
    j["max_order_per_location"] = p.max_order_per_location;

    json pieces = json::array();
    for (const auto& piece : p.ordering.pieces)
        pieces.push_back({{"lower", piece.lower}, {"upper", upper_to_json(piece.upper)}, {"fixed", piece.fixed},
                          {"slope", piece.slope}});
    json discounts = json::array();
    for (const auto& d : p.ordering.discount_set)
        discounts.push_back({{"z", d.z}, {"slope", d.slope}});
    j["ordering_cost"] = {{"pieces", pieces}, {"discount_set", discounts}};

    json holding = json::array();
    for (const auto& r : p.holding.rates)
        holding.push_back({{"holding", r.holding}, {"backlog", r.backlog}});
    j["holding"] = holding;

    json demand = json::array();
    for (const auto& loc : p.demand.locations) {
        if (const auto* d = std::get_if<DiscreteDemand>(&loc))
            demand.push_back({{"kind", "discrete"}, {"values", d->values}, {"probs", d->probs}});
        else {
            const auto& u = std::get<UniformDemand>(loc);
            demand.push_back({{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}});
        }
    }
    j["demand"] = {{"iid", p.demand.iid_across_periods}, {"locations", demand}};
    return j;
}

Problem problem_from_json(const json& j) {
    only_keys(j, "problem", {"locations", "horizon", "grid", "max_order_per_location", "ordering_cost", "holding", "demand"});
    Problem p;
    p.locations = get<std::size_t>(j, "problem", "locations");

    const auto& h = need(j, "problem", "horizon");
    const auto kind = get<std::string>(h, "horizon", "kind");
    if (kind == "finite") {
        only_keys(h, "horizon", {"kind", "periods"});
        p.horizon = FiniteHorizon{get<int>(h, "horizon", "periods")};
    } else if (kind == "infinite_averaged") {
        only_keys(h, "horizon", {"kind", "sim_periods", "burn_in"});
        p.horizon = InfiniteAveraged{get<int>(h, "horizon", "sim_periods"),
                                     h.contains("burn_in") ? get<int>(h, "horizon", "burn_in") : 0};
    } else {
        throw ConfigError("horizon.kind: expected 'finite' or 'infinite_averaged', got '" + kind + "'");
    }

    const auto& g = need(j, "problem", "grid");
    only_keys(g, "grid", {"min", "max", "step"});
    p.grid = Grid{get<double>(g, "grid", "min"), get<double>(g, "grid", "max"), get<double>(g, "grid", "step")};
    p.max_order_per_location = get<double>(j, "problem", "max_order_per_location");

    const auto& c = need(j, "problem", "ordering_cost");
    only_keys(c, "ordering_cost", {"pieces", "discount_set"});
    for (const auto& piece : need(c, "ordering_cost", "pieces")) {
        only_keys(piece, "ordering_cost.pieces[]", {"lower", "upper", "fixed", "slope"});
        CostPiece cp;
        cp.lower = piece.contains("lower") ? get<double>(piece, "piece", "lower") : 0.0;
        cp.upper = (!piece.contains("upper") || piece.at("upper").is_null()) ? kInf : get<double>(piece, "piece", "upper");
        cp.fixed = piece.contains("fixed") ? get<double>(piece, "piece", "fixed") : 0.0;
        cp.slope = get<double>(piece, "piece", "slope");
        p.ordering.pieces.push_back(cp);
    }
    if (c.contains("discount_set"))
        for (const auto& d : c.at("discount_set")) {
            only_keys(d, "ordering_cost.discount_set[]", {"z", "slope"});
            p.ordering.discount_set.push_back({get<double>(d, "discount", "z"), get<double>(d, "discount", "slope")});
        }

    for (const auto& r : need(j, "problem", "holding")) {
        only_keys(r, "holding[]", {"holding", "backlog"});
        p.holding.rates.push_back({get<double>(r, "holding", "holding"), get<double>(r, "holding", "backlog")});
    }

    const auto& d = need(j, "problem", "demand");
    only_keys(d, "demand", {"iid", "locations"});
    p.demand.iid_across_periods = d.contains("iid") ? get<bool>(d, "demand", "iid") : true;
    for (const auto& loc : need(d, "demand", "locations")) {
        const auto k = get<std::string>(loc, "demand.locations[]", "kind");
        if (k == "discrete") {
            only_keys(loc, "demand.locations[]", {"kind", "values", "probs"});
            p.demand.locations.push_back(DiscreteDemand{get<std::vector<double>>(loc, "demand", "values"),
                                                        get<std::vector<double>>(loc, "demand", "probs")});
        } else if (k == "uniform") {
            only_keys(loc, "demand.locations[]", {"kind", "lo", "hi"});
            p.demand.locations.push_back(UniformDemand{get<double>(loc, "demand", "lo"), get<double>(loc, "demand", "hi")});
        } else {
            throw ConfigError("demand.locations[].kind: expected 'discrete' or 'uniform', got '" + k + "'");
        }
    }
    return p;
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    auto p = problem_from_json(j);
    require_valid(p, false);
    return p;
}

} // namespace invctl
