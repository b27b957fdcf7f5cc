// qsl command line tool, ratio tau_qsl / tau over parameter grids.
//
// Exit codes: 0 success, 1 usage error, 2 tolerance failure, 3 more than 1% of
// the grid cells failed.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qsl/analytic.hpp"
#include "qsl/errors.hpp"
#include "qsl/qslt.hpp"
#include "qsl/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kTolerance = 2;
constexpr int kPartialGrid = 3;

// Options shared by sweep and verify. Every field stays empty unless given on
// the command line, so that config-file values survive.
struct Overrides {
    std::string config;
    std::optional<std::string> topology, gamma0, J, lambda, tau, omega0, oracle, out, hc_reading;
    std::optional<std::string> threads, time_points, bath_modes, bath_window, samples;
    bool no_plot = false;

    void attach(CLI::App& cmd, bool sweep_outputs) {
        cmd.add_option("--config,-c", config, "key = value configuration file");
        cmd.add_option("--topology", topology, "id | common | sys");
        cmd.add_option("--gamma0", gamma0, "coupling range min:max:steps");
        cmd.add_option("--J", J, "hopping range min:max:steps");
        cmd.add_option("--lambda", lambda, "spectral width");
        cmd.add_option("--tau", tau, "driving time");
        cmd.add_option("--omega0", omega0, "transition frequency");
        cmd.add_option("--oracle", oracle, "off | kernel | discrete");
        cmd.add_option("--threads", threads, "worker threads (0 = all cores)");
        cmd.add_option("--time-points", time_points, "initial samples per [0, tau] (>= 2001)");
        cmd.add_option("--bath-modes", bath_modes, "discrete bath modes");
        cmd.add_option("--bath-window", bath_window, "discrete bath half width (0 = 20 lambda)");
        if (sweep_outputs) {
            cmd.add_option("--out,-o", out, "output directory");
            cmd.add_flag("--no-plot", no_plot, "skip the gnuplot script");
        } else {
            cmd.add_option("--samples", samples, "cells per axis to compare");
            cmd.add_option("--hc-reading", hc_reading, "cosh | cos");
        }
    }

    // defaults < file < command line
    [[nodiscard]] qsl::SweepSpec resolve() const {
        qsl::SweepSpec spec;
        if (!config.empty()) spec = qsl::load_config(config, spec);
        const std::pair<const char*, const std::optional<std::string>*> keyed[] = {
            {"topology", &topology},       {"gamma0", &gamma0},         {"J", &J},
            {"lambda", &lambda},           {"tau", &tau},               {"omega0", &omega0},
            {"oracle", &oracle},           {"out", &out},               {"hc_reading", &hc_reading},
            {"threads", &threads},         {"time_points", &time_points}, {"bath_modes", &bath_modes},
            {"bath_window", &bath_window}, {"verify_samples", &samples},
        };
        for (const auto& [key, value] : keyed)
            if (value->has_value()) qsl::apply_setting(spec, key, **value);
        if (no_plot) spec.plot_script = false;
        spec.validate();
        return spec;
    }
};

nlohmann::json to_json(const qsl::QsltResult& r, const qsl::ModelConfig& cfg) {
    const auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
    return {
        {"topology", std::string(qsl::topology_id(cfg.topology))},
        {"gamma0", cfg.spectral.gamma0},
        {"J", cfg.J},
        {"lambda", cfg.spectral.lambda},
        {"tau", cfg.tau},
        {"bures_angle", r.bures_angle},
        {"rate_op", r.rate_op},
        {"rate_tr", r.rate_tr},
        {"rate_hs", r.rate_hs},
        {"bound_op", finite_or_null(r.bound_op)},
        {"bound_tr", finite_or_null(r.bound_tr)},
        {"bound_hs", finite_or_null(r.bound_hs)},
        {"tau_qsl", r.tau_qsl},
        {"ratio", r.ratio},
        {"tight_norm", std::string(qsl::norm_id(r.tight_norm))},
        {"zero_dynamics", r.zero_dynamics},
        {"quadrature_error", r.quadrature_error},
    };
}

int run_sweep(const Overrides& o) {
    const auto spec = o.resolve();
    const auto grid = qsl::run_sweep(spec);
    const auto paths = qsl::emit_outputs(grid, spec.out);
    std::printf("%s: %zu x %zu cells in %.2f s, %zu failed -> %s\n",
                std::string(qsl::topology_id(spec.topology)).c_str(), grid.gamma0_axis.size(),
                grid.J_axis.size(), grid.elapsed_seconds, grid.failed_count(), paths.csv.string().c_str());
    for (const auto& c : grid.cells)
        if (c.failed()) std::fprintf(stderr, "cell (%g, %g) failed: %s\n", c.gamma0, c.J, c.error.c_str());
    if (spec.oracle != qsl::OracleMode::Off) {
        double worst = 0.0;
        for (const auto& c : grid.cells) worst = std::max(worst, c.oracle_amplitude_deviation);
        std::printf("max oracle amplitude deviation %.3e (%s)\n", worst, paths.oracle_csv.string().c_str());
    }
    return grid.failed_fraction() > 0.01 ? kPartialGrid : kOk;
}

void print_report(const qsl::VerificationReport& r) {
    std::printf("%s (%s reading): %zu cells, max amplitude deviation %.3e (tol %.0e), max ratio deviation %.3e (tol %.0e)",
                std::string(qsl::topology_id(r.topology)).c_str(),
                r.reading == qsl::HcReading::Cosh ? "cosh" : "cos", r.entries.size(), r.max_amplitude_deviation,
                r.amplitude_tolerance, r.max_ratio_deviation, r.ratio_tolerance);
    if (r.max_discrete_deviation >= 0.0)
        std::printf(", discrete bath %.3e (tol %.0e)", r.max_discrete_deviation, r.discrete_tolerance);
    std::printf(" -> %s\n", r.passed ? "PASS" : "FAIL");
    for (const auto& e : r.entries) {
        if (!e.error.empty()) std::printf("  (%g, %g): %s\n", e.gamma0, e.J, e.error.c_str());
        else if (e.skipped) std::printf("  (%g, %g): skipped, coincident cubic roots\n", e.gamma0, e.J);
    }
}

int run_verify(const Overrides& o, bool all_topologies) {
    auto spec = o.resolve();
    if (spec.oracle == qsl::OracleMode::Off) spec.oracle = qsl::OracleMode::Kernel;

    std::vector<qsl::Topology> topologies{spec.topology};
    if (all_topologies)
        topologies = {qsl::Topology::IndependentBaths, qsl::Topology::CommonBath, qsl::Topology::SystemOnlyBath};

    bool passed = true;
    std::optional<qsl::VerificationReport> failing;
    for (auto t : topologies) {
        spec.topology = t;
        const auto report = qsl::verify(spec);
        print_report(report);
        if (!report.passed && !failing) failing = report;
        passed = passed && report.passed;
    }

    const auto arb = qsl::arbitrate_hc_reading();
    std::printf("common-bath prefactor at (gamma0, J, lambda, t) = (%g, %g, %g, %g): "
                "cosh deviation %.3e, cos deviation %.3e -> %s\n",
                arb.gamma0, arb.J, arb.lambda, arb.t, arb.cosh_deviation, arb.cos_deviation,
                arb.passed ? "cosh confirmed" : "inconclusive");

    std::fflush(stdout);
    if (!passed) {
        const auto& w = failing->worst;
        throw qsl::ToleranceExceeded(
            "verification failed for topology " + std::string(qsl::topology_id(failing->topology)) +
            "; worst cell gamma0 = " + std::to_string(w.gamma0) + ", J = " + std::to_string(w.J) +
            " (amplitude deviation " + std::to_string(w.amplitude_deviation) + ", ratio deviation " +
            std::to_string(w.ratio_deviation) + ")");
    }
    return kOk;
}

struct PointOptions {
    double gamma0 = 1.0;
    double J = 1.0;
    double lambda = 2.0;
    double tau = 3.0;
    double omega0 = 1.0;
    std::string topology = "id";
    std::size_t time_points = 2001;
};

int run_point(const PointOptions& p) {
    qsl::ModelConfig cfg;
    cfg.topology = qsl::parse_topology(p.topology);
    cfg.J = p.J;
    cfg.tau = p.tau;
    cfg.spectral = qsl::SpectralParams{p.gamma0, p.lambda, p.omega0};
    cfg.validate();
    if (p.time_points < 2) throw qsl::DomainError("time points must be at least 2");
    std::cout << to_json(qsl::evaluate_point(cfg, p.time_points), cfg).dump(2) << '\n';
    return kOk;
}

int run_compare(double lambda, double tau, const std::vector<double>& gammas, const std::vector<double>& Js) {
    const auto rows = qsl::compare_topologies(lambda, tau, gammas, Js);
    std::printf("%10s %10s %12s %12s %12s\n", "gamma0", "J", "id", "common", "sys");
    int common_le_id = 0, sys_le_id = 0;
    for (const auto& r : rows) {
        std::printf("%10g %10g %12.6f %12.6f %12.6f\n", r.gamma0, r.J, r.ratio_independent, r.ratio_common,
                    r.ratio_system_only);
        common_le_id += r.ratio_common <= r.ratio_independent;
        sys_le_id += r.ratio_system_only <= r.ratio_independent;
    }
    std::printf("common <= id at %d/%zu points, sys <= id at %d/%zu points\n", common_le_id, rows.size(),
                sys_le_id, rows.size());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum speed limit sweeps for a qubit with a hopping ancilla"};
    app.set_version_flag("--version", std::string(qsl::version()));
    app.require_subcommand(1);

    Overrides sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "evaluate tau_qsl / tau over a (gamma0, J) grid");
    sweep_opts.attach(*sweep, true);

    Overrides verify_opts;
    bool all_topologies = false;
    auto* verify = app.add_subcommand("verify", "compare the closed forms against the integrated dynamics");
    verify_opts.attach(*verify, false);
    verify->add_flag("--all-topologies", all_topologies, "check id, common and sys in turn");

    PointOptions point_opts;
    auto* point = app.add_subcommand("point", "print the speed limit of one parameter point as JSON");
    point->add_option("--gamma0", point_opts.gamma0, "coupling strength")->required();
    point->add_option("--J", point_opts.J, "hopping strength")->required();
    point->add_option("--lambda", point_opts.lambda, "spectral width")->capture_default_str();
    point->add_option("--tau", point_opts.tau, "driving time")->capture_default_str();
    point->add_option("--omega0", point_opts.omega0, "transition frequency")->capture_default_str();
    point->add_option("--topology", point_opts.topology, "id | common | sys")->capture_default_str();
    point->add_option("--time-points", point_opts.time_points, "initial samples")->capture_default_str();

    double cmp_lambda = 2.0, cmp_tau = 3.0;
    std::vector<double> cmp_gammas{1.0, 5.0, 10.0}, cmp_Js{1.0, 3.0, 5.0};
    auto* compare = app.add_subcommand("compare", "ratios of all three topologies at matched parameters");
    compare->add_option("--lambda", cmp_lambda, "spectral width")->capture_default_str();
    compare->add_option("--tau", cmp_tau, "driving time")->capture_default_str();
    compare->add_option("--gamma0", cmp_gammas, "coupling values")->delimiter(',')->capture_default_str();
    compare->add_option("--J", cmp_Js, "hopping values")->delimiter(',')->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*sweep) return run_sweep(sweep_opts);
        if (*verify) return run_verify(verify_opts, all_topologies);
        if (*point) return run_point(point_opts);
        if (*compare) return run_compare(cmp_lambda, cmp_tau, cmp_gammas, cmp_Js);
    } catch (const qsl::ToleranceExceeded& e) {
        std::fprintf(stderr, "qsl: %s\n", e.what());
        return kTolerance;
    } catch (const qsl::DomainError& e) {
        std::fprintf(stderr, "qsl: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        // IO problems and config files that cannot be opened
        std::fprintf(stderr, "qsl: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
