#pragma once

// (gamma0, J) parameter sweeps of the speed-limit ratio, verification of the
// closed forms against the oracles, and file output.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qsl/analytic.hpp"
#include "qsl/model.hpp"
#include "qsl/qslt.hpp"

namespace qsl {

enum class OracleMode { Off, Kernel, Discrete };

[[nodiscard]] std::string_view oracle_id(OracleMode m) noexcept;
[[nodiscard]] OracleMode parse_oracle(std::string_view text);

/// Inclusive range sampled at `steps` evenly spaced points.
struct AxisRange {
    double min = 0.0;
    double max = 1.0;
    std::size_t steps = 2;

    [[nodiscard]] std::vector<double> values() const;
};

/// Parses "min:max:steps".
[[nodiscard]] AxisRange parse_range(std::string_view text);

struct SweepSpec {
    Topology topology = Topology::IndependentBaths;
    AxisRange gamma0{0.1, 10.0, 50};
    AxisRange J{0.0, 10.0, 50};
    double lambda = 2.0;
    double tau = 3.0;
    double omega0 = 1.0;
    /// Initial samples per [0, tau]; refined automatically.
    std::size_t time_points = 2001;
    OracleMode oracle = OracleMode::Off;
    std::size_t bath_modes = 1024;
    double bath_window = 0.0;  ///< 0 -> 20 lambda
    unsigned threads = 0;      ///< 0 -> hardware concurrency
    std::string out = "out";
    double safety_cap = 20.0;
    bool plot_script = true;
    /// Cells per axis compared by `verify`.
    std::size_t verify_samples = 5;
    HcReading hc_reading = HcReading::Cosh;

    /// Throws DomainError on an invalid spec.
    void validate() const;
    [[nodiscard]] unsigned resolved_threads() const;
    [[nodiscard]] ModelConfig model(double gamma0, double J) const;
};

/// Applies one `key = value` setting. Throws DomainError on unknown keys or
/// malformed values.
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value);

/// Flat key-value config: `key = value` lines, `#` or `;` comments, blank lines
/// and `[section]` headers ignored.
[[nodiscard]] SweepSpec parse_config(std::istream& in, SweepSpec base = {});
[[nodiscard]] SweepSpec load_config(const std::filesystem::path& path, SweepSpec base = {});

enum CellFlag : unsigned {
    kCellOk = 0,
    kDegenerateRoots = 1u << 0,
    kOracleFallback = 1u << 1,
    kZeroDynamics = 1u << 2,
    kOutOfRange = 1u << 3,
    kFailed = 1u << 4,
};

/// "ok" or the set flags joined by '|'.
[[nodiscard]] std::string flag_string(unsigned flags);

struct CellResult {
    double gamma0 = 0.0;
    double J = 0.0;
    QsltResult result{};
    unsigned flags = kCellOk;
    std::string error;
    std::size_t time_points = 0;
    /// Populated when an oracle is enabled.
    double oracle_amplitude_deviation = -1.0;
    double oracle_ratio_deviation = -1.0;

    [[nodiscard]] bool failed() const noexcept { return (flags & (kFailed | kOutOfRange)) != 0; }
};

struct SweepGrid {
    SweepSpec spec;
    std::vector<double> gamma0_axis;
    std::vector<double> J_axis;
    /// Row-major: gamma0 outer, J inner.
    std::vector<CellResult> cells;
    double elapsed_seconds = 0.0;

    [[nodiscard]] const CellResult& at(std::size_t gamma_index, std::size_t J_index) const {
        return cells[gamma_index * J_axis.size() + J_index];
    }
    [[nodiscard]] std::size_t failed_count() const noexcept;
    [[nodiscard]] double failed_fraction() const noexcept;
};

/// Evaluates one (gamma0, J) cell: closed form with quadrature refinement,
/// kernel fallback for coincident cubic roots, optional oracle comparison.
/// Never throws for numerical failures; they are reported through flags.
[[nodiscard]] CellResult evaluate_cell(const SweepSpec& spec, double gamma0, double J);

/// The closed-form (or fallback) trajectory and QSLT of a single point.
[[nodiscard]] QsltResult evaluate_point(const ModelConfig& cfg, std::size_t time_points = 2001);

[[nodiscard]] SweepGrid run_sweep(const SweepSpec& spec);

struct VerifyEntry {
    double gamma0 = 0.0;
    double J = 0.0;
    double amplitude_deviation = 0.0;
    double ratio_deviation = 0.0;
    double discrete_amplitude_deviation = -1.0;
    bool skipped = false;  ///< coincident cubic roots, no closed form to check
    bool passed = true;
    std::string error;     ///< set when the comparison itself failed
};

struct HcArbitration {
    double gamma0 = 1.0, J = 1.0, lambda = 2.0, t = 2.0;
    double cosh_deviation = 0.0;  ///< |a_cosh(t) - a_oracle(t)|
    double cos_deviation = 0.0;   ///< |a_cos(t) - a_oracle(t)|
    bool passed = false;          ///< cosh <= 1e-7 and cos > 1e-2
};

struct VerificationReport {
    Topology topology = Topology::IndependentBaths;
    HcReading reading = HcReading::Cosh;
    std::vector<VerifyEntry> entries;
    double max_amplitude_deviation = 0.0;
    double max_ratio_deviation = 0.0;
    double max_discrete_deviation = -1.0;
    VerifyEntry worst{};
    HcArbitration arbitration{};
    double amplitude_tolerance = 1e-7;
    double ratio_tolerance = 1e-6;
    double discrete_tolerance = 1e-3;
    bool passed = false;
};

[[nodiscard]] HcArbitration arbitrate_hc_reading();
[[nodiscard]] VerificationReport verify(const SweepSpec& spec);

struct TopologyComparison {
    double gamma0 = 0.0;
    double J = 0.0;
    double ratio_independent = 0.0;
    double ratio_common = 0.0;
    double ratio_system_only = 0.0;
};

/// Ratios of all three topologies at matched parameters.
[[nodiscard]] std::vector<TopologyComparison> compare_topologies(
    double lambda, double tau, const std::vector<double>& gammas, const std::vector<double>& Js,
    std::size_t time_points = 2001);

struct OutputPaths {
    std::filesystem::path csv;
    std::filesystem::path plot;  ///< empty when disabled
    std::filesystem::path manifest;
    std::filesystem::path oracle_csv;  ///< empty without oracle
};

/// The CSV body: header `topology,lambda,tau,gamma0,J,ratio,tau_qsl,tight_norm,flags`
/// then one row per cell in full-precision scientific notation.
void write_csv(const SweepGrid& grid, std::ostream& out);

/// Writes grid.csv, heatmap.gp (optional), manifest.json and, with an oracle,
/// oracle.csv into `dir`. Throws std::runtime_error naming the path on IO errors.
OutputPaths emit_outputs(const SweepGrid& grid, const std::filesystem::path& dir);

[[nodiscard]] std::string_view version() noexcept;

}  // namespace qsl
