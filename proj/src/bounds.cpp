#include "invctl/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace invctl {

namespace {

// Value of c at z, or its one-sided limit from the right at a breakpoint.
struct EnvelopePoint {
    double z;
    double value;
    bool attained;
};

struct CostShape {
    std::vector<EnvelopePoint> points;
    bool unbounded = true;
    double tail_fixed = 0.0;
    double tail_slope = 0.0;
    double head_fixed = 0.0;  // c(0+) intercept of the first piece
    double head_slope = 0.0;
};

CostShape shape_of(const OrderingCost& c, FitDomain domain) {
    if (c.pieces.empty())
        throw FitError("ordering cost has no pieces");
    const double zmax = domain.z_max.value_or(kInf);
    if (!(zmax > 0.0))
        throw FitError("fit domain must contain positive z");
    CostShape s;
    s.head_fixed = c.pieces.front().fixed;
    s.head_slope = c.pieces.front().slope;
    for (const auto& piece : c.pieces) {
        if (piece.lower >= zmax)
            break;
        s.points.push_back({piece.lower, piece.fixed + piece.slope * piece.lower, false});
        const double right = std::min(piece.upper, zmax);
        if (std::isfinite(right)) {
            s.points.push_back({right, piece.fixed + piece.slope * right, true});
        } else {
            s.unbounded = true;
            s.tail_fixed = piece.fixed;
            s.tail_slope = piece.slope;
        }
    }
    s.unbounded = !std::isfinite(zmax) && !std::isfinite(c.pieces.back().upper);
    for (const auto& d : c.discount_set)
        if (d.z <= zmax)
            s.points.push_back({d.z, d.slope * d.z, true});
    return s;
}

struct RatioCandidate {
    double ratio;
    std::optional<double> witness;
};

bool better_witness(const RatioCandidate& a, const RatioCandidate& b) {
    // equal ratios: an attained witness beats a limit
    return a.witness.has_value() && !b.witness.has_value();
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

double AffineFit::spread() const {
    if (l == 0.0 && h == 0.0)
        return K_h / K_l;
    return std::max(K_h / K_l, h / l);
}

SectorFit fit_sector(const OrderingCost& c, FitDomain domain) {
    const auto s = shape_of(c, domain);
    if (s.head_fixed > 0.0)
        throw NotSectorBoundable("ordering cost has fixed charge " + num(s.head_fixed) +
                                 " at 0+, so c(z)/z diverges; use an affine fit");
    std::vector<RatioCandidate> cands;
    cands.push_back({s.head_slope, std::nullopt});  // z -> 0+
    for (const auto& pt : s.points) {
        if (pt.z <= 0.0)
            continue;
        cands.push_back({pt.value / pt.z, pt.attained ? std::optional<double>(pt.z) : std::nullopt});
    }
    if (s.unbounded)
        cands.push_back({s.tail_slope, std::nullopt});

    SectorFit fit;
    fit.l = kInf;
    fit.h = -kInf;
    for (const auto& cand : cands) {
        if (cand.ratio < fit.l || (cand.ratio == fit.l && better_witness(cand, {fit.l, fit.l_witness}))) {
            fit.l = cand.ratio;
            fit.l_witness = cand.witness;
        }
        if (cand.ratio > fit.h || (cand.ratio == fit.h && better_witness(cand, {fit.h, fit.h_witness}))) {
            fit.h = cand.ratio;
            fit.h_witness = cand.witness;
        }
    }
    if (!(fit.l > 0.0))
        throw FitError("c(z)/z reaches 0 on z > 0, so no positive lower slope l exists");
    return fit;
}

AffineFit fit_affine(const OrderingCost& c, std::size_t locations, FitDomain domain) {
    if (locations < 1)
        throw FitError("affine fit needs at least one location");
    const auto s = shape_of(c, domain);
    if (!(s.head_fixed > 0.0))
        throw FitError("no lower affine envelope with K_l > 0 exists (c(0+) = 0); use a sector fit");

    // rows: a . (K, l, t) <= b
    struct Row {
        std::array<double, 3> a;
        double b;
    };
    std::vector<Row> rows;
    for (const auto& pt : s.points) {
        rows.push_back({{1.0, pt.z, 0.0}, pt.value});
        rows.push_back({{-1.0, -pt.z, pt.value}, 0.0});
    }
    if (s.unbounded) {
        rows.push_back({{0.0, 1.0, 0.0}, s.tail_slope});
        rows.push_back({{0.0, -1.0, s.tail_slope}, 0.0});
    }
    rows.push_back({{-1.0, 0.0, 0.0}, 0.0});
    rows.push_back({{0.0, -1.0, 0.0}, 0.0});
    rows.push_back({{0.0, 0.0, -1.0}, 0.0});
    rows.push_back({{0.0, 0.0, 1.0}, 1.0});

    auto feasible = [&](const std::array<double, 3>& v) {
        for (const auto& r : rows) {
            const double lhs = r.a[0] * v[0] + r.a[1] * v[1] + r.a[2] * v[2];
            if (lhs > r.b + 1e-10 * (1.0 + std::abs(r.b)))
                return false;
        }
        return true;
    };

    std::optional<std::array<double, 3>> best;
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const auto& A = rows[i].a;
                const auto& B = rows[j].a;
                const auto& C = rows[k].a;
                const double det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                                   A[2] * (B[0] * C[1] - B[1] * C[0]);
                if (std::abs(det) < 1e-14)
                    continue;
                const double b0 = rows[i].b, b1 = rows[j].b, b2 = rows[k].b;
                std::array<double, 3> v{
                    (b0 * (B[1] * C[2] - B[2] * C[1]) - A[1] * (b1 * C[2] - B[2] * b2) + A[2] * (b1 * C[1] - B[1] * b2)) / det,
                    (A[0] * (b1 * C[2] - B[2] * b2) - b0 * (B[0] * C[2] - B[2] * C[0]) + A[2] * (B[0] * b2 - b1 * C[0])) / det,
                    (A[0] * (B[1] * b2 - b1 * C[1]) - A[1] * (B[0] * b2 - b1 * C[0]) + b0 * (B[0] * C[1] - B[1] * C[0])) / det,
                };
                if (!feasible(v))
                    continue;
                if (!best || v[2] > (*best)[2] + 1e-12 ||
                    (std::abs(v[2] - (*best)[2]) <= 1e-12 && (v[0] > (*best)[0] + 1e-12 ||
                                                               (std::abs(v[0] - (*best)[0]) <= 1e-12 && v[1] > (*best)[1]))))
                    best = v;
            }
    if (!best || !((*best)[2] > 0.0) || !((*best)[0] > 1e-15))
        throw FitError("no feasible affine envelope pair with K_l > 0");

    AffineFit fit;
    fit.locations = locations;
    fit.K_l = (*best)[0];
    fit.l = std::max(0.0, (*best)[1]);
    const double rho = 1.0 / (*best)[2];
    fit.K_h = rho * fit.K_l;
    fit.h = rho * fit.l;
    fit.objective = static_cast<double>(locations) * fit.spread();
    return fit;
}

double theoretical_ratio(const CostFit& fit, std::size_t locations, PolicyFamily family) {
    const double M = static_cast<double>(locations);
    if (const auto* sector = std::get_if<SectorFit>(&fit)) {
        switch (family) {
        case PolicyFamily::BaseStock:
            return sector->h / sector->l;
        case PolicyFamily::Online:
            return 2.0 * sector->h / sector->l;
        case PolicyFamily::SS:
            break;
        }
        throw MismatchError("sector fit pairs with base_stock or online, not sS");
    }
    const auto& affine = std::get<AffineFit>(fit);
    switch (family) {
    case PolicyFamily::SS:
        return M * affine.spread();
    case PolicyFamily::Online:
        return 3.0 * M * affine.spread();
    case PolicyFamily::BaseStock:
        break;
    }
    throw MismatchError("affine fit pairs with sS or online, not base_stock");
}

std::string to_string(PolicyFamily family) {
    switch (family) {
    case PolicyFamily::BaseStock:
        return "base_stock";
    case PolicyFamily::SS:
        return "sS";
    case PolicyFamily::Online:
        return "online";
    }
    return "?";
}

double sector_violation(const OrderingCost& c, const SectorFit& fit, FitDomain domain) {
    const auto s = shape_of(c, domain);
    double worst = -kInf;
    // near 0+, both sides vanish; compare slopes
    worst = std::max(worst, s.head_fixed > 0.0 ? kInf : std::max(fit.l - s.head_slope, s.head_slope - fit.h));
    for (const auto& pt : s.points) {
        if (pt.z <= 0.0)
            continue;
        worst = std::max(worst, fit.l * pt.z - pt.value);
        worst = std::max(worst, pt.value - fit.h * pt.z);
    }
    if (s.unbounded) {
        worst = std::max(worst, fit.l - s.tail_slope);
        worst = std::max(worst, s.tail_slope - fit.h);
    }
    return worst;
}

double affine_violation(const OrderingCost& c, const AffineFit& fit, FitDomain domain) {
    const auto s = shape_of(c, domain);
    double worst = -kInf;
    for (const auto& pt : s.points) {
        worst = std::max(worst, fit.K_l + fit.l * pt.z - pt.value);
        worst = std::max(worst, pt.value - fit.K_h - fit.h * pt.z);
    }
    if (s.unbounded) {
        const double tol = 1e-12;
        worst = std::max(worst, fit.l > s.tail_slope + tol ? kInf : (std::abs(fit.l - s.tail_slope) <= tol ? fit.K_l - s.tail_fixed : -kInf));
        worst = std::max(worst, s.tail_slope > fit.h + tol ? kInf : (std::abs(fit.h - s.tail_slope) <= tol ? s.tail_fixed - fit.K_h : -kInf));
    }
    return worst;
}

} // namespace invctl
