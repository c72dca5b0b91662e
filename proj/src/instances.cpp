#include "invctl/instances.hpp"

#include <cmath>
#include <sstream>

namespace invctl {

namespace {

struct NamedKind {
    const char* name;
    InstanceKind kind;
};

constexpr NamedKind kNames[] = {
    {"fig1_linear", InstanceKind::Fig1Linear},     {"fig1_nonlinear", InstanceKind::Fig1Nonlinear},
    {"sector_sim", InstanceKind::SectorSim},       {"affine_sim", InstanceKind::AffineSim},
    {"tightness", InstanceKind::Tightness},        {"transform_check", InstanceKind::TransformCheck},
};

double parse_number(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty())
        throw DomainError("instance parameter " + key + ": '" + value + "' is not a number");
    return v;
}

DemandModel iid_demand(std::size_t M, LocationDemand d) {
    DemandModel out;
    out.locations.assign(M, d);
    out.iid_across_periods = true;
    return out;
}

Problem fig1(bool nonlinear) {
    Problem p;
    p.locations = 2;
    p.horizon = FiniteHorizon{2};
    p.grid = Grid{-2.0, 4.0, 1.0};
    p.max_order_per_location = 4.0;
    p.holding = HoldingBacklogCost::uniform(2, 1.0, 10.0);
    p.demand = iid_demand(2, DiscreteDemand{{0.0, 1.0}, {0.5, 0.5}});
    if (nonlinear)
        p.ordering.pieces = {CostPiece{0.0, 1.0, 0.0, 2.0}, CostPiece{1.0, kInf, 0.0, 4.0}};
    else
        p.ordering = OrderingCost::linear(2.0);
    return p;
}

Problem fig2(double holding, OrderingCost c) {
    Problem p;
    p.locations = 2;
    p.horizon = FiniteHorizon{20};
    p.grid = Grid{-2.0, 8.0, 0.5};
    p.max_order_per_location = 10.0;
    p.holding = HoldingBacklogCost::uniform(2, holding, 10.0);
    p.demand = iid_demand(2, DiscreteDemand{{0.0, 0.5, 1.0, 1.5}, {0.125, 0.375, 0.375, 0.125}});
    p.ordering = std::move(c);
    return p;
}

Problem tightness(const TightnessParams& t) {
    const double delta = t.delta();
    const double M = static_cast<double>(t.locations);
    Problem p;
    p.locations = t.locations;
    p.horizon = InfiniteAveraged{2000, 0};
    p.grid = Grid{-10.0, 10.0, 0.5};
    p.max_order_per_location = 10.0;
    p.holding = HoldingBacklogCost::uniform(t.locations, delta, t.backlog);
    p.demand = iid_demand(t.locations, UniformDemand{1.0, 1.0 + delta});
    p.ordering = OrderingCost::linear(t.h);
    p.ordering.discount_set = {DiscountPoint{M, t.l}, DiscountPoint{M * (1.0 + delta), t.l}};
    return p;
}

} // namespace

InstanceId parse_instance(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    InstanceId id;
    bool found = false;
    for (const auto& n : kNames)
        if (name == n.name) {
            id.kind = n.kind;
            found = true;
        }
    if (!found) {
        std::string known;
        for (const auto& n : kNames)
            known += std::string(known.empty() ? "" : ", ") + n.name;
        throw DomainError("unknown instance '" + name + "' (known: " + known + ")");
    }
    if (colon == std::string::npos)
        return id;
    if (id.kind != InstanceKind::Tightness)
        throw DomainError("instance '" + name + "' takes no parameters");
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DomainError("tightness parameter '" + item + "' must be key=value");
        const std::string key = item.substr(0, eq);
        const double v = parse_number(key, item.substr(eq + 1));
        if (key == "M") {
            if (v < 1.0 || v != std::floor(v))
                throw DomainError("tightness parameter M must be a positive integer");
            id.tightness.locations = static_cast<std::size_t>(v);
        } else if (key == "eps") {
            id.tightness.epsilon = v;
        } else if (key == "l") {
            id.tightness.l = v;
        } else if (key == "h") {
            id.tightness.h = v;
        } else if (key == "p") {
            id.tightness.backlog = v;
        } else {
            throw DomainError("unknown tightness parameter '" + key + "' (expected M, eps, l, h, p)");
        }
    }
    validate_instance(id);
    return id;
}

std::string to_string(const InstanceId& id) {
    for (const auto& n : kNames)
        if (n.kind == id.kind) {
            if (id.kind != InstanceKind::Tightness)
                return n.name;
            std::ostringstream os;
            const auto& t = id.tightness;
            os << n.name << ":M=" << t.locations << ",eps=" << t.epsilon << ",l=" << t.l << ",h=" << t.h
               << ",p=" << t.backlog;
            return os.str();
        }
    return "?";
}

std::vector<std::string> instance_names() {
    std::vector<std::string> out;
    for (const auto& n : kNames)
        out.emplace_back(n.name);
    return out;
}

void validate_instance(const InstanceId& id) {
    if (id.kind != InstanceKind::Tightness)
        return;
    const auto& t = id.tightness;
    if (t.locations < 2)
        throw DomainError("tightness requires M >= 2");
    if (!(t.epsilon > 0.0))
        throw DomainError("tightness requires eps > 0");
    if (!(t.l > 0.0) || !(t.h >= t.l))
        throw DomainError("tightness requires h >= l > 0");
    if (!(t.backlog >= 10.0 * t.h))
        throw DomainError("tightness requires p >= 10 h");
}

Problem build(const InstanceId& id) {
    validate_instance(id);
    switch (id.kind) {
    case InstanceKind::Fig1Linear:
    case InstanceKind::TransformCheck:
        return fig1(false);
    case InstanceKind::Fig1Nonlinear:
        return fig1(true);
    case InstanceKind::SectorSim:
        return fig2(0.1, OrderingCost{{CostPiece{0.0, 6.0, 0.0, 4.0}, CostPiece{6.0, kInf, 12.0, 2.0}}, {}});
    case InstanceKind::AffineSim:
        return fig2(0.2, OrderingCost{{CostPiece{0.0, 6.0, 4.0, 2.0}, CostPiece{6.0, kInf, 10.0, 1.0}}, {}});
    case InstanceKind::Tightness:
        return tightness(id.tightness);
    }
    throw DomainError("unknown instance kind");
}

Problem build(const std::string& text) { return build(parse_instance(text)); }

double tightness_auto_level(const TightnessParams& params) { return 1.0 + params.delta(); }

} // namespace invctl
