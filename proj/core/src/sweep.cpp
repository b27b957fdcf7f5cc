#include "qsl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "qsl/errors.hpp"
#include "qsl/oracle.hpp"

namespace qsl {
namespace {

constexpr double kRateTolerance = 1e-8;
constexpr std::size_t kMaxTimePoints = (std::size_t{1} << 17) + 1;
constexpr double kRatioSlack = 1e-9;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        throw DomainError("'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    return v;
}

std::size_t parse_count(std::string_view key, std::string_view text) {
    text = trim(text);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DomainError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw DomainError("'" + std::string(key) + "' expects a boolean, got '" + std::string(text) + "'");
}

// Closed form on a grid refined until the rate quadrature converges.
QsltResult analytic_qslt(const ModelConfig& cfg, std::size_t points, HcReading reading,
                         std::size_t* points_used, AmplitudeTrajectory* traj_out) {
    for (std::size_t n = points;; n = 2 * n - 1) {
        auto grid = uniform_grid(cfg.tau, n);
        auto traj = sample_analytic(cfg, grid, reading);
        auto result = qslt(traj);
        if (result.quadrature_error <= kRateTolerance || 2 * n - 1 > kMaxTimePoints) {
            if (result.quadrature_error > kRateTolerance)
                throw QuadratureFailure("rate quadrature did not converge (error estimate " +
                                        std::to_string(result.quadrature_error) + ")");
            if (points_used) *points_used = n;
            if (traj_out) *traj_out = std::move(traj);
            return result;
        }
    }
}

}  // namespace

std::string_view oracle_id(OracleMode m) noexcept {
    switch (m) {
        case OracleMode::Off: return "off";
        case OracleMode::Kernel: return "kernel";
        case OracleMode::Discrete: return "discrete";
    }
    return "?";
}

OracleMode parse_oracle(std::string_view text) {
    text = trim(text);
    if (text == "off" || text == "none") return OracleMode::Off;
    if (text == "kernel") return OracleMode::Kernel;
    if (text == "discrete") return OracleMode::Discrete;
    throw DomainError("unknown oracle '" + std::string(text) + "' (expected off|kernel|discrete)");
}

std::vector<double> AxisRange::values() const {
    std::vector<double> v(steps);
    if (steps == 1) {
        v[0] = min;
        return v;
    }
    const double n = static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i)
        v[i] = min + (max - min) * (static_cast<double>(i) / n);
    if (steps > 1) v.back() = max;
    return v;
}

AxisRange parse_range(std::string_view text) {
    text = trim(text);
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
        throw DomainError("range must look like min:max:steps, got '" + std::string(text) + "'");
    AxisRange r;
    r.min = parse_double("range min", text.substr(0, c1));
    r.max = parse_double("range max", text.substr(c1 + 1, c2 - c1 - 1));
    r.steps = parse_count("range steps", text.substr(c2 + 1));
    return r;
}

void SweepSpec::validate() const {
    for (const auto* axis : {&gamma0, &J}) {
        const char* name = axis == &gamma0 ? "gamma0" : "J";
        if (axis->steps < 2) throw DomainError(std::string(name) + " axis needs at least 2 steps");
        if (!(axis->min >= 0.0) || !(axis->max > axis->min))
            throw DomainError(std::string(name) + " range must satisfy 0 <= min < max");
        if (axis->max > safety_cap)
            throw DomainError(std::string(name) + " range exceeds the safety cap " +
                              std::to_string(safety_cap));
    }
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    if (!(omega0 > 0.0)) throw DomainError("omega0 must be positive");
    if (time_points < 2001) throw DomainError("time_points must be at least 2001");
    if (bath_modes < 1) throw DomainError("bath_modes must be at least 1");
    if (bath_window < 0.0) throw DomainError("bath_window must be non-negative");
    if (verify_samples < 2) throw DomainError("verify_samples must be at least 2");
}

unsigned SweepSpec::resolved_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

ModelConfig SweepSpec::model(double g, double j) const {
    ModelConfig cfg;
    cfg.topology = topology;
    cfg.J = j;
    cfg.tau = tau;
    cfg.spectral = SpectralParams{g, lambda, omega0};
    return cfg;
}

void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "topology") spec.topology = parse_topology(value);
    else if (key == "gamma0") spec.gamma0 = parse_range(value);
    else if (key == "J") spec.J = parse_range(value);
    else if (key == "lambda") spec.lambda = parse_double(key, value);
    else if (key == "tau") spec.tau = parse_double(key, value);
    else if (key == "omega0") spec.omega0 = parse_double(key, value);
    else if (key == "time_points") spec.time_points = parse_count(key, value);
    else if (key == "oracle") spec.oracle = parse_oracle(value);
    else if (key == "bath_modes") spec.bath_modes = parse_count(key, value);
    else if (key == "bath_window") spec.bath_window = parse_double(key, value);
    else if (key == "threads") spec.threads = static_cast<unsigned>(parse_count(key, value));
    else if (key == "out") spec.out = std::string(value);
    else if (key == "safety_cap") spec.safety_cap = parse_double(key, value);
    else if (key == "plot") spec.plot_script = parse_bool(key, value);
    else if (key == "verify_samples") spec.verify_samples = parse_count(key, value);
    else if (key == "hc_reading") {
        if (value == "cosh") spec.hc_reading = HcReading::Cosh;
        else if (value == "cos") spec.hc_reading = HcReading::LiteralCos;
        else throw DomainError("hc_reading expects cosh|cos");
    } else {
        throw DomainError("unknown setting '" + std::string(key) + "'");
    }
}

SweepSpec parse_config(std::istream& in, SweepSpec base) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find_first_of("#;"); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty() || view.front() == '[') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw DomainError("config line " + std::to_string(number) + ": expected key = value");
        try {
            apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
        } catch (const DomainError& e) {
            throw DomainError("config line " + std::to_string(number) + ": " + e.what());
        }
    }
    return base;
}

SweepSpec load_config(const std::filesystem::path& path, SweepSpec base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

std::string flag_string(unsigned flags) {
    if (flags == kCellOk) return "ok";
    static constexpr std::pair<unsigned, const char*> names[] = {
        {kDegenerateRoots, "degenerate_roots"}, {kOracleFallback, "oracle_fallback"},
        {kZeroDynamics, "zero_dynamics"},       {kOutOfRange, "out_of_range"},
        {kFailed, "failed"},
    };
    std::string out;
    for (const auto& [bit, name] : names) {
        if ((flags & bit) == 0) continue;
        if (!out.empty()) out += '|';
        out += name;
    }
    return out;
}

std::size_t SweepGrid::failed_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed(); }));
}

double SweepGrid::failed_fraction() const noexcept {
    return cells.empty() ? 0.0 : static_cast<double>(failed_count()) / static_cast<double>(cells.size());
}

QsltResult evaluate_point(const ModelConfig& cfg, std::size_t time_points) {
    try {
        return analytic_qslt(cfg, time_points, HcReading::Cosh, nullptr, nullptr);
    } catch (const NearDegenerateRoots&) {
        const auto grid = uniform_grid(cfg.tau, time_points);
        return qslt(integrate_kernel(cfg, grid));
    }
}

CellResult evaluate_cell(const SweepSpec& spec, double gamma0, double J) {
    CellResult cell;
    cell.gamma0 = gamma0;
    cell.J = J;
    const ModelConfig cfg = spec.model(gamma0, J);
    AmplitudeTrajectory traj;
    try {
        try {
            cell.result = analytic_qslt(cfg, spec.time_points, HcReading::Cosh, &cell.time_points, &traj);
        } catch (const NearDegenerateRoots&) {
            cell.flags |= kDegenerateRoots | kOracleFallback;
            cell.time_points = spec.time_points;
            traj = integrate_kernel(cfg, uniform_grid(cfg.tau, cell.time_points));
            cell.result = qslt(traj);
        }
        if (cell.result.zero_dynamics) cell.flags |= kZeroDynamics;
        if (!(cell.result.ratio >= -kRatioSlack && cell.result.ratio <= 1.0 + kRatioSlack))
            cell.flags |= kOutOfRange;

        if (spec.oracle != OracleMode::Off) {
            AmplitudeTrajectory reference;
            if (spec.oracle == OracleMode::Kernel) {
                reference = integrate_kernel(cfg, traj.times);
            } else {
                const auto bath = make_discrete_bath(cfg.spectral, spec.bath_modes, spec.bath_window);
                reference = integrate_discrete_bath(cfg, bath, traj.times);
            }
            cell.oracle_amplitude_deviation = sup_distance(traj, reference);
            cell.oracle_ratio_deviation = std::abs(qslt(reference).ratio - cell.result.ratio);
        }
    } catch (const std::exception& e) {
        cell.flags |= kFailed;
        cell.error = e.what();
        cell.result.ratio = std::numeric_limits<double>::quiet_NaN();
        cell.result.tau_qsl = std::numeric_limits<double>::quiet_NaN();
    }
    return cell;
}

SweepGrid run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    SweepGrid grid;
    grid.spec = spec;
    grid.gamma0_axis = spec.gamma0.values();
    grid.J_axis = spec.J.values();
    const std::size_t columns = grid.J_axis.size();
    const std::size_t total = grid.gamma0_axis.size() * columns;
    grid.cells.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1))
            grid.cells[idx] = evaluate_cell(spec, grid.gamma0_axis[idx / columns], grid.J_axis[idx % columns]);
    };
    const unsigned n_threads = std::min<unsigned>(spec.resolved_threads(), static_cast<unsigned>(total));
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    grid.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return grid;
}

HcArbitration arbitrate_hc_reading() {
    HcArbitration arb;
    ModelConfig cfg;
    cfg.topology = Topology::CommonBath;
    cfg.J = arb.J;
    cfg.tau = arb.t;
    cfg.spectral = SpectralParams{arb.gamma0, arb.lambda, 1.0};
    const auto grid = uniform_grid(arb.t, 2001);
    const cplx reference = integrate_kernel(cfg, grid).a.back();
    arb.cosh_deviation = std::abs(amplitude_common(arb.t, cfg, HcReading::Cosh) - reference);
    arb.cos_deviation = std::abs(amplitude_common(arb.t, cfg, HcReading::LiteralCos) - reference);
    arb.passed = arb.cosh_deviation <= 1e-7 && arb.cos_deviation > 1e-2;
    return arb;
}

VerificationReport verify(const SweepSpec& spec) {
    spec.validate();
    VerificationReport report;
    report.topology = spec.topology;
    report.reading = spec.hc_reading;

    const auto pick = [&](const AxisRange& axis) {
        const auto all = axis.values();
        std::vector<double> out;
        const std::size_t k = std::min(spec.verify_samples, all.size());
        for (std::size_t i = 0; i < k; ++i) out.push_back(all[i * (all.size() - 1) / (k - 1)]);
        return out;
    };
    const auto gammas = pick(spec.gamma0);
    const auto Js = pick(spec.J);

    report.entries.resize(gammas.size() * Js.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < report.entries.size(); idx = next.fetch_add(1)) {
            VerifyEntry& e = report.entries[idx];
            e.gamma0 = gammas[idx / Js.size()];
            e.J = Js[idx % Js.size()];
            const ModelConfig cfg = spec.model(e.gamma0, e.J);
            const auto grid = uniform_grid(cfg.tau, spec.time_points);
            AmplitudeTrajectory closed;
            try {
                closed = sample_analytic(cfg, grid, spec.hc_reading);
            } catch (const NearDegenerateRoots&) {
                e.skipped = true;
                continue;
            } catch (const std::exception& ex) {
                e.passed = false;
                e.error = ex.what();
                continue;
            }
            try {
                const auto kernel = integrate_kernel(cfg, grid);
                e.amplitude_deviation = sup_distance(closed, kernel);
                e.ratio_deviation = std::numeric_limits<double>::infinity();
                e.ratio_deviation = std::abs(qslt(closed).ratio - qslt(kernel).ratio);
                e.passed = e.amplitude_deviation <= report.amplitude_tolerance &&
                           e.ratio_deviation <= report.ratio_tolerance;
                if (spec.oracle == OracleMode::Discrete) {
                    const auto bath = make_discrete_bath(cfg.spectral, spec.bath_modes, spec.bath_window);
                    e.discrete_amplitude_deviation =
                        sup_distance(integrate_discrete_bath(cfg, bath, grid), kernel);
                    e.passed = e.passed && e.discrete_amplitude_deviation <= report.discrete_tolerance;
                }
            } catch (const std::exception& ex) {
                // e.g. a closed form whose population leaves [0, 1]
                e.passed = false;
                e.error = ex.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::min<unsigned>(spec.resolved_threads(), static_cast<unsigned>(report.entries.size()));
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    report.passed = true;
    double worst_score = -1.0;
    for (const auto& e : report.entries) {
        if (e.skipped) continue;
        report.max_amplitude_deviation = std::max(report.max_amplitude_deviation, e.amplitude_deviation);
        report.max_ratio_deviation = std::max(report.max_ratio_deviation, e.ratio_deviation);
        report.max_discrete_deviation = std::max(report.max_discrete_deviation, e.discrete_amplitude_deviation);
        const double score = std::max(e.amplitude_deviation / report.amplitude_tolerance,
                                      e.ratio_deviation / report.ratio_tolerance);
        if (score > worst_score) {
            worst_score = score;
            report.worst = e;
        }
        report.passed = report.passed && e.passed;
    }
    report.arbitration = arbitrate_hc_reading();
    report.passed = report.passed && report.arbitration.passed;
    return report;
}

std::vector<TopologyComparison> compare_topologies(double lambda, double tau,
                                                   const std::vector<double>& gammas,
                                                   const std::vector<double>& Js,
                                                   std::size_t time_points) {
    std::vector<TopologyComparison> rows;
    for (double g : gammas) {
        for (double j : Js) {
            TopologyComparison row{g, j, 0.0, 0.0, 0.0};
            ModelConfig cfg;
            cfg.J = j;
            cfg.tau = tau;
            cfg.spectral = SpectralParams{g, lambda, 1.0};
            cfg.topology = Topology::IndependentBaths;
            row.ratio_independent = evaluate_point(cfg, time_points).ratio;
            cfg.topology = Topology::CommonBath;
            row.ratio_common = evaluate_point(cfg, time_points).ratio;
            cfg.topology = Topology::SystemOnlyBath;
            row.ratio_system_only = evaluate_point(cfg, time_points).ratio;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_csv(const SweepGrid& grid, std::ostream& out) {
    out << "topology,lambda,tau,gamma0,J,ratio,tau_qsl,tight_norm,flags\n";
    char buf[512];
    const auto topo = topology_id(grid.spec.topology);
    for (const auto& c : grid.cells) {
        const std::string_view norm = c.failed() ? "none" : norm_id(c.result.tight_norm);
        std::snprintf(buf, sizeof buf, "%.*s,%.17e,%.17e,%.17e,%.17e,%.17e,%.17e,%.*s,%s\n",
                      static_cast<int>(topo.size()), topo.data(), grid.spec.lambda, grid.spec.tau,
                      c.gamma0, c.J, c.result.ratio, c.result.tau_qsl, static_cast<int>(norm.size()),
                      norm.data(), flag_string(c.flags).c_str());
        out << buf;
    }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

OutputPaths emit_outputs(const SweepGrid& grid, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    OutputPaths paths;
    paths.csv = dir / "grid.csv";
    {
        auto out = open_output(paths.csv);
        write_csv(grid, out);
        finish(out, paths.csv);
    }

    if (grid.spec.oracle != OracleMode::Off) {
        paths.oracle_csv = dir / "oracle.csv";
        auto out = open_output(paths.oracle_csv);
        out << "gamma0,J,amplitude_deviation,ratio_deviation\n";
        char buf[256];
        for (const auto& c : grid.cells) {
            std::snprintf(buf, sizeof buf, "%.17e,%.17e,%.17e,%.17e\n", c.gamma0, c.J,
                          c.oracle_amplitude_deviation, c.oracle_ratio_deviation);
            out << buf;
        }
        finish(out, paths.oracle_csv);
    }

    if (grid.spec.plot_script) {
        paths.plot = dir / "heatmap.gp";
        auto out = open_output(paths.plot);
        out << "# gnuplot heatmap of tau_qsl/tau over (J, gamma0)\n"
               "set datafile separator ','\n"
               "set terminal pngcairo size 900,720\n"
               "set output 'heatmap.png'\n"
               "set xlabel 'J'\n"
               "set ylabel 'gamma_0'\n"
               "set cblabel 'tau_{qsl}/tau'\n"
               "set cbrange [0:1]\n"
               "set palette rgbformulae 33,13,10\n"
               "set title 'topology = "
            << topology_id(grid.spec.topology) << ", lambda = " << grid.spec.lambda
            << ", tau = " << grid.spec.tau
            << "'\n"
               "plot 'grid.csv' skip 1 using 5:4:6 with image notitle\n";
        finish(out, paths.plot);
    }

    paths.manifest = dir / "manifest.json";
    {
        const auto& s = grid.spec;
        nlohmann::json m;
        m["version"] = std::string(version());
        m["generated_utc"] = utc_timestamp();
        m["settings"] = {
            {"topology", std::string(topology_id(s.topology))},
            {"gamma0", {{"min", s.gamma0.min}, {"max", s.gamma0.max}, {"steps", s.gamma0.steps}}},
            {"J", {{"min", s.J.min}, {"max", s.J.max}, {"steps", s.J.steps}}},
            {"lambda", s.lambda},
            {"tau", s.tau},
            {"omega0", s.omega0},
            {"time_points", s.time_points},
            {"oracle", std::string(oracle_id(s.oracle))},
            {"bath_modes", s.bath_modes},
            {"bath_window", s.bath_window},
            {"threads", s.resolved_threads()},
            {"safety_cap", s.safety_cap},
        };
        m["timings"] = {{"sweep_seconds", grid.elapsed_seconds}};
        m["cells"] = grid.cells.size();
        m["failed_cells"] = grid.failed_count();
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& c : grid.cells)
            if (c.failed()) failures.push_back({{"gamma0", c.gamma0}, {"J", c.J}, {"error", c.error}});
        m["failures"] = failures;
        m["outputs"] = {{"csv", paths.csv.filename().string()},
                        {"plot", paths.plot.empty() ? "" : paths.plot.filename().string()}};
        auto out = open_output(paths.manifest);
        out << m.dump(2) << '\n';
        finish(out, paths.manifest);
    }
    return paths;
}

std::string_view version() noexcept { return "1.0.0"; }

}  // namespace qsl
