#pragma once

// Shared domain types and physical conventions.
//
// Units: hbar = 1, every rate and frequency is expressed in units of the
// transition frequency omega0 and every time in units of 1/omega0. Amplitudes
// are stored in the frame rotating at omega0 unless flagged otherwise.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qsl {

using cplx = std::complex<double>;

/// Lorentzian bath descriptor.
struct SpectralParams {
    double gamma0 = 1.0;  ///< coupling strength
    double lambda = 2.0;  ///< spectral width (inverse bath correlation time)
    double omega0 = 1.0;  ///< transition frequency

    /// Throws DomainError unless lambda > 0, gamma0 >= 0 and omega0 > 0.
    void validate() const;

    /// Weak coupling, lambda > 2 gamma0.
    [[nodiscard]] bool is_markovian() const noexcept;
};

enum class Topology {
    IndependentBaths,  ///< system and ancilla each see their own bath
    CommonBath,        ///< both share one bath
    SystemOnlyBath,    ///< only the system couples to a bath
};

/// Short identifiers used on the command line and in CSV output:
/// "id", "common", "sys".
[[nodiscard]] std::string_view topology_id(Topology t) noexcept;
/// Accepts the short identifiers plus the long enum names. Throws DomainError.
[[nodiscard]] Topology parse_topology(std::string_view text);

struct ModelConfig {
    Topology topology = Topology::IndependentBaths;
    double J = 0.0;    ///< system-ancilla hopping strength
    double tau = 3.0;  ///< actual driving time
    SpectralParams spectral{};

    void validate() const;
};

enum class Frame { Rotating, Lab };

/// Sampled excited-state amplitude of the system and its time derivative.
struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<cplx> a;
    std::vector<cplx> a_dot;
    Frame frame = Frame::Rotating;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] double horizon() const { return times.back(); }

    /// Checks sizes, grid monotonicity, a(0) = 1 and |a|^2 <= 1 + slack.
    void validate(double population_slack = 1e-9) const;
};

/// Uniform grid of `points` samples over [0, tau] with both end points exact.
[[nodiscard]] std::vector<double> uniform_grid(double tau, std::size_t points);

/// Lorentzian spectral density, (1/2pi) gamma0 lambda^2 / ((w - w0)^2 + lambda^2).
[[nodiscard]] double lorentzian_density(double omega, const SpectralParams& p) noexcept;

/// Two-time bath correlation in the frame rotating at omega0,
/// f(dt) = (gamma0 lambda / 2) exp(-lambda dt), for dt >= 0.
[[nodiscard]] cplx memory_kernel(double dt, const SpectralParams& p);

/// A(t) = a(t) exp(-i w0 t) and dA/dt = (da/dt - i w0 a) exp(-i w0 t).
[[nodiscard]] AmplitudeTrajectory to_lab_frame(const AmplitudeTrajectory& rotating, double omega0);
[[nodiscard]] cplx lab_derivative(cplx a, cplx a_dot, double t, double omega0) noexcept;

}  // namespace qsl
