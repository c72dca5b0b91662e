#include "invctl/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace invctl {

std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    if (std::strtod(buf, nullptr) != v)
        std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void header_states(std::ostream& os, std::size_t M) {
    for (std::size_t i = 0; i < M; ++i)
        os << (i ? "," : "") << "x" << (i + 1);
}

std::string se_text(const CostEstimate& e) { return e.se ? format_number(*e.se) : "NA"; }

} // namespace

void write_value_csv(std::ostream& os, const DpSolution& sol, std::size_t stage) {
    const std::size_t M = sol.policy.locations;
    const StateSpace space(sol.policy.grid, M);
    header_states(os, M);
    os << ",V,stage\n";
    const double N = static_cast<double>(sol.policy.stages());
    std::vector<double> x(M);
    for (std::size_t s = 0; s < space.size(); ++s) {
        space.coords(s, x);
        for (std::size_t i = 0; i < M; ++i)
            os << format_number(x[i]) << ",";
        os << format_number(sol.values.stages[stage][s] / N) << "," << stage << "\n";
    }
}

void write_policy_csv(std::ostream& os, const TabularPolicy& pi, std::size_t stage) {
    const std::size_t M = pi.locations;
    const StateSpace space(pi.grid, M);
    header_states(os, M);
    for (std::size_t i = 0; i < M; ++i)
        os << ",u" << (i + 1);
    os << ",stage\n";
    std::vector<double> x(M);
    for (std::size_t s = 0; s < space.size(); ++s) {
        space.coords(s, x);
        for (std::size_t i = 0; i < M; ++i)
            os << format_number(x[i]) << ",";
        const auto u = pi.order(stage, s);
        for (std::size_t i = 0; i < M; ++i)
            os << format_number(u[i]) << ",";
        os << stage << "\n";
    }
}

void write_ratio_csv(std::ostream& os, const RatioReport& rep) {
    const std::size_t M = rep.rows.empty() ? 0 : rep.rows.front().state.size();
    header_states(os, M);
    os << ",mean_num,se_num,mean_den,se_den,ratio\n";
    for (const auto& row : rep.rows) {
        for (double x : row.state)
            os << format_number(x) << ",";
        os << format_number(row.num.mean) << "," << se_text(row.num) << "," << format_number(row.den.mean) << ","
           << se_text(row.den) << "," << format_number(row.ratio) << "\n";
    }
}

void write_ratio_summary(std::ostream& os, const RatioReport& rep) {
    os << "num_policy: " << rep.num_policy << (rep.num_exact ? " (exact)" : " (monte carlo)") << "\n";
    os << "den_policy: " << rep.den_policy << (rep.den_exact ? " (exact)" : " (monte carlo)") << "\n";
    os << "states: " << rep.rows.size() << "\n";
    os << "mean_ratio: " << format_number(rep.mean_ratio) << "\n";
    os << "max_ratio: " << format_number(rep.max_ratio) << "\n";
    os << "argmax_state: (";
    if (!rep.rows.empty()) {
        const auto& st = rep.rows[rep.argmax].state;
        for (std::size_t i = 0; i < st.size(); ++i)
            os << (i ? ", " : "") << format_number(st[i]);
    }
    os << ")\n";
    os << "runs: " << rep.runs << "\n";
    os << "seed: " << rep.seed << "\n";
    os << "crn: " << (rep.crn ? "on" : "off") << "\n";
    os << "runtime_seconds: " << format_number(std::round(rep.runtime_seconds * 1000.0) / 1000.0) << "\n";
}

void write_fit_report(std::ostream& os, const std::optional<SectorFit>& sector, const std::optional<AffineFit>& affine,
                      std::size_t locations) {
    auto witness = [](const std::optional<double>& w) { return w ? "z = " + format_number(*w) : std::string("limit"); };
    if (sector) {
        os << "sector fit\n";
        os << "  l: " << format_number(sector->l) << " (" << witness(sector->l_witness) << ")\n";
        os << "  h: " << format_number(sector->h) << " (" << witness(sector->h_witness) << ")\n";
        os << "  base_stock bound h/l: " << format_number(theoretical_ratio(*sector, locations, PolicyFamily::BaseStock))
           << "\n";
        os << "  online bound 2h/l: " << format_number(theoretical_ratio(*sector, locations, PolicyFamily::Online))
           << "\n";
    }
    if (affine) {
        os << "affine fit (M = " << locations << ")\n";
        os << "  K_l: " << format_number(affine->K_l) << "\n";
        os << "  l: " << format_number(affine->l) << "\n";
        os << "  K_h: " << format_number(affine->K_h) << "\n";
        os << "  h: " << format_number(affine->h) << "\n";
        os << "  sS bound M max{K_h/K_l, h/l}: " << format_number(theoretical_ratio(*affine, locations, PolicyFamily::SS))
           << "\n";
        os << "  online bound 3M max{K_h/K_l, h/l}: "
           << format_number(theoretical_ratio(*affine, locations, PolicyFamily::Online)) << "\n";
    }
}

std::string gnuplot_heatmap_script(const std::string& csv_name, const std::string& title) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set title '" + title + "'\n";
    s += "set xlabel 'x1'\nset ylabel 'x2'\n";
    s += "set view map\nset palette rgbformulae 33,13,10\n";
    s += "set terminal pngcairo size 800,640\n";
    s += "set output '" + csv_name + ".png'\n";
    s += "plot '" + csv_name + "' every ::1 using 1:2:7 with image notitle\n";
    return s;
}

} // namespace invctl
