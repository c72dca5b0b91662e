#pragma once

#include <ostream>
#include <string>

#include "invctl/bounds.hpp"
#include "invctl/dp.hpp"
#include "invctl/sim.hpp"

namespace invctl {

/// Round-trip text for a double: %.12g when that is exact, else %.17g.
std::string format_number(double v);

/// x1..xM, V (per-period average), stage.
void write_value_csv(std::ostream& os, const DpSolution& sol, std::size_t stage);
/// x1..xM, u1..uM, stage.
void write_policy_csv(std::ostream& os, const TabularPolicy& pi, std::size_t stage);

/// x1..xM, mean_num, se_num, mean_den, se_den, ratio. se is "NA" when runs == 1.
void write_ratio_csv(std::ostream& os, const RatioReport& rep);
/// key: value block with aggregates, seeds and runtime.
void write_ratio_summary(std::ostream& os, const RatioReport& rep);

/// Parameters, witnesses and the bound formulas that apply.
void write_fit_report(std::ostream& os, const std::optional<SectorFit>& sector, const std::optional<AffineFit>& affine,
                      std::size_t locations);

/// gnuplot script drawing the ratio column of `csv_name` as a heatmap (M = 2 only).
std::string gnuplot_heatmap_script(const std::string& csv_name, const std::string& title);

} // namespace invctl
