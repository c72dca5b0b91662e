// invctl: solve, compare, bound and verify multi-location inventory problems.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "invctl/bounds.hpp"
#include "invctl/config.hpp"
#include "invctl/dp.hpp"
#include "invctl/instances.hpp"
#include "invctl/policy_spec.hpp"
#include "invctl/report.hpp"
#include "invctl/sim.hpp"
#include "invctl/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace invctl;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kInvariantFailure = 1;
constexpr int kUsageError = 2;

struct Source {
    std::string instance;
    std::string config;
};

struct Loaded {
    Problem problem;
    std::optional<TightnessParams> tightness;
};

Loaded load(const Source& src) {
    if (!src.config.empty() && !src.instance.empty())
        throw ConfigError("pass either --instance or --config, not both");
    if (!src.config.empty())
        return {load_problem(src.config), std::nullopt};
    if (src.instance.empty())
        throw ConfigError("one of --instance or --config is required");
    const auto id = parse_instance(src.instance);
    Loaded out{build(id), std::nullopt};
    if (id.kind == InstanceKind::Tightness)
        out.tightness = id.tightness;
    return out;
}

json source_json(const Source& src) {
    return src.config.empty() ? json{{"instance", src.instance}} : json{{"config", src.config}};
}

std::ofstream open_out(const fs::path& dir, const std::string& name, json& outputs) {
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    outputs.push_back(path.string());
    return os;
}

void write_manifest(const fs::path& dir, json manifest) {
    manifest["artifact_version"] = kVersion;
    fs::create_directories(dir);
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("--instance", src.instance, "built-in instance, e.g. sector_sim or tightness:M=2,eps=0.1");
    cmd->add_option("--config", src.config, "JSON problem file");
}

int cmd_solve(const Source& src, const std::string& out, int threads, int stage, bool per_location) {
    const auto [p, _] = load(src);
    const auto sol = solve_joint_dp(p, threads);
    if (stage < 0 || stage >= p.periods())
        throw ConfigError("--stage must lie in [0, " + std::to_string(p.periods()) + ")");
    const auto k = static_cast<std::size_t>(stage);

    std::cout << "states: " << sol.values.stages[k].size() << "\n";
    std::cout << "stages: " << p.periods() << "\n";
    if (const auto S = decoupled_base_stock_levels(sol.policy, k)) {
        std::cout << "stage " << stage << " structure: decoupled base-stock, S = (";
        for (std::size_t i = 0; i < S->size(); ++i)
            std::cout << (i ? ", " : "") << format_number((*S)[i]);
        std::cout << ")\n";
    } else {
        std::cout << "stage " << stage << " structure: coupled (not a decoupled base-stock rule)\n";
    }

    if (out.empty()) {
        write_policy_csv(std::cout, sol.policy, k);
        return 0;
    }
    json outputs = json::array();
    {
        auto os = open_out(out, "policy_stage" + std::to_string(stage) + ".csv", outputs);
        write_policy_csv(os, sol.policy, k);
    }
    {
        auto os = open_out(out, "value_stage" + std::to_string(stage) + ".csv", outputs);
        write_value_csv(os, sol, k);
    }
    if (per_location) {
        for (std::size_t i = 0; i < p.locations; ++i) {
            const auto single = solve_single_dp(restrict_to_location(p, i, p.ordering), threads);
            auto os = open_out(out, "policy_location" + std::to_string(i + 1) + "_stage" + std::to_string(stage) + ".csv",
                               outputs);
            write_policy_csv(os, single.policy, k);
        }
    }
    write_manifest(out, {{"command", "solve"},
                         {"source", source_json(src)},
                         {"stage", stage},
                         {"per_location", per_location},
                         {"outputs", outputs}});
    return 0;
}

struct CompareArgs {
    std::string num, den, out, variant = "printed";
    int runs = 1000, threads = 0;
    std::uint64_t seed = 0;
    bool crn = false, exact_num = false, gnuplot = false;
    std::optional<int> horizon;
};

int cmd_compare(const Source& src, const CompareArgs& a) {
    const auto loaded = load(src);
    const Problem p = with_horizon(loaded.problem, a.horizon);
    PolicyContext ctx;
    ctx.threads = a.threads;
    ctx.tightness = loaded.tightness;
    ctx.balancing.variant = a.variant == "cumulative" ? HoldingProxyVariant::Cumulative : HoldingProxyVariant::Printed;
    const auto num = make_policy(p, a.num, ctx);
    const auto den = make_policy(p, a.den, ctx);

    SimConfig cfg;
    cfg.runs = a.runs;
    cfg.seed = a.seed;
    cfg.crn = a.crn;
    cfg.threads = a.threads;
    if (!p.is_finite() || p.grid.count() == 0) {
        // continuous-state instances start from the origin
        cfg.initial_states = {std::vector<double>(p.locations, 0.0)};
    }
    const auto rep = ratio_heatmap(p, num, den, cfg, a.exact_num ? EvalMode::Exact : EvalMode::Auto, EvalMode::Auto);
    write_ratio_summary(std::cout, rep);
    if (num.name == "balancing" || den.name == "balancing")
        std::cout << "balancing_variant: " << a.variant << "\n";

    if (!a.out.empty()) {
        json outputs = json::array();
        {
            auto os = open_out(a.out, "ratio.csv", outputs);
            write_ratio_csv(os, rep);
        }
        {
            auto os = open_out(a.out, "summary.txt", outputs);
            write_ratio_summary(os, rep);
        }
        if (a.gnuplot) {
            auto os = open_out(a.out, "heatmap.gp", outputs);
            os << gnuplot_heatmap_script("ratio.csv", a.num + " / " + a.den);
        }
        write_manifest(a.out, {{"command", "compare"},
                               {"source", source_json(src)},
                               {"policies", {{"num", a.num}, {"den", a.den}}},
                               {"sim",
                                {{"runs", a.runs},
                                 {"seed", a.seed},
                                 {"crn", a.crn},
                                 {"horizon", a.horizon ? json(*a.horizon) : json(nullptr)},
                                 {"balancing_variant", a.variant},
                                 {"exact_num", a.exact_num}}},
                               {"outputs", outputs}});
    }
    return 0;
}

int cmd_bounds(const Source& src, std::optional<std::size_t> locations, bool bounded) {
    const auto [p, _] = load(src);
    const std::size_t M = locations.value_or(p.locations);
    FitDomain domain;
    if (bounded)
        domain.z_max = static_cast<double>(M) * p.max_order_per_location;
    std::optional<SectorFit> sector;
    std::optional<AffineFit> affine;
    try {
        sector = fit_sector(p.ordering, domain);
    } catch (const NotSectorBoundable& e) {
        std::cout << "sector fit: not sector-boundable (" << e.what() << ")\n";
    } catch (const FitError& e) {
        std::cout << "sector fit: " << e.what() << "\n";
    }
    try {
        affine = fit_affine(p.ordering, M, domain);
    } catch (const FitError& e) {
        std::cout << "affine fit: " << e.what() << "\n";
    }
    write_fit_report(std::cout, sector, affine, M);
    if (sector || affine)
        return 0;
    std::cerr << "error: no envelope fits this ordering cost\n";
    return kUsageError;
}

int cmd_verify(const std::string& suite, int threads) {
    const auto res = run_suite(suite, threads);
    for (const auto& l : res.lines)
        std::cout << l << "\n";
    std::cout << res.name << ": " << (res.passed ? "PASS" : "FAIL") << "\n";
    return res.passed ? 0 : kInvariantFailure;
}

int cmd_export(const Source& src, const std::string& out) {
    const auto [p, _] = load(src);
    const auto text = problem_to_json(p).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out);
        if (!os)
            throw ConfigError("cannot write " + out);
        os << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-location inventory control: DP solver, decoupled and online policies, bounds, Monte Carlo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Source src;
    int threads = 0;
    std::string out;

    auto* solve = app.add_subcommand("solve", "solve the joint DP and write value/policy tables");
    add_source(solve, src);
    int stage = 0;
    bool per_location = false;
    solve->add_option("--stage", stage, "stage to report")->capture_default_str();
    solve->add_flag("--per-location", per_location, "also solve each location alone with the joint cost");
    solve->add_option("--out", out, "output directory (tables go to stdout when omitted)");
    solve->add_option("--threads", threads, "worker threads (0 = OpenMP default)");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "per-initial-state cost ratio of two policies");
    add_source(compare, src);
    compare->add_option("--num", ca.num, "numerator policy")->required();
    compare->add_option("--den", ca.den, "denominator policy")->required();
    compare->add_option("--runs", ca.runs, "Monte Carlo runs per initial state")->capture_default_str()->check(
        CLI::PositiveNumber);
    compare->add_option("--seed", ca.seed, "master seed")->capture_default_str();
    compare->add_flag("--crn", ca.crn, "common random numbers across policies");
    compare->add_option("--horizon", ca.horizon, "override N (or sim_periods)");
    compare->add_option("--threads", ca.threads, "worker threads (0 = OpenMP default)");
    compare->add_option("--balancing-variant", ca.variant, "holding proxy of the balancing policy")
        ->check(CLI::IsMember({"printed", "cumulative"}))
        ->capture_default_str();
    compare->add_flag("--exact-num", ca.exact_num, "evaluate the numerator exactly (deterministic policies)");
    compare->add_flag("--gnuplot", ca.gnuplot, "also write a gnuplot heatmap script");
    compare->add_option("--out", ca.out, "output directory");

    auto* bounds = app.add_subcommand("bounds", "fit sector/affine envelopes and print the ratio bounds");
    add_source(bounds, src);
    std::optional<std::size_t> locations;
    bool bounded = false;
    bounds->add_option("--locations", locations, "location count M for the affine objective");
    bounds->add_flag("--bounded", bounded, "restrict the fit to achievable totals z <= M * max order");

    auto* verify = app.add_subcommand("verify", "run a property suite");
    std::string suite = "all";
    verify->add_option("suite", suite, "theorem1 | transform | oracle | balancing-monotone | all")->capture_default_str();
    verify->add_option("--threads", threads, "worker threads (0 = OpenMP default)");

    auto* exp = app.add_subcommand("export", "print an instance as a JSON config");
    add_source(exp, src);
    exp->add_option("--out", out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*solve)
            return cmd_solve(src, out, threads, stage, per_location);
        if (*compare)
            return cmd_compare(src, ca);
        if (*bounds)
            return cmd_bounds(src, locations, bounded);
        if (*verify)
            return cmd_verify(suite, threads);
        if (*exp)
            return cmd_export(src, out);
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid problem\n";
        for (const auto& issue : e.issues())
            std::cerr << "  " << issue.path << ": " << issue.message << "\n";
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}
