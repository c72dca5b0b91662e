#pragma once

#include <string>
#include <vector>

#include "invctl/model.hpp"
#include "invctl/policies.hpp"

namespace invctl {

enum class InstanceKind { Fig1Linear, Fig1Nonlinear, SectorSim, AffineSim, Tightness, TransformCheck };

struct InstanceId {
    InstanceKind kind = InstanceKind::Fig1Linear;
    TightnessParams tightness;  // used by Tightness only
};

/// Parses "fig1_linear", "sector_sim", "tightness:M=2,eps=0.1,l=1,h=4,p=100", ...
/// Omitted tightness parameters keep their defaults.
InstanceId parse_instance(const std::string& text);
std::string to_string(const InstanceId& id);
std::vector<std::string> instance_names();

/// Throws DomainError on invalid tightness parameters.
void validate_instance(const InstanceId& id);

Problem build(const InstanceId& id);
Problem build(const std::string& text);

/// Linear slope m removed by the transform_check pairing.
inline constexpr double kTransformSlope = 2.0;

/// Per-location level S = 1 + delta used by base_stock:S=auto on tightness instances.
double tightness_auto_level(const TightnessParams& params);

} // namespace invctl
