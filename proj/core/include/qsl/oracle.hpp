#pragma once

// Numerical ground truths for the closed-form amplitudes.
//
//  * Kernel integration: the Lorentzian bath has an exponential correlation
//    function, so each bath channel is replaced by one auxiliary variable
//    z(t) = int_0^t exp(-lambda (t - s)) x(s) ds obeying z' = -lambda z + x.
//    The resulting 3- or 4-dimensional linear ODE is exact.
//  * Discrete bath: the single-excitation Schroedinger equation with a finite
//    set of bath modes on a uniform frequency grid.
//
// Both run in the frame rotating at omega0.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qsl/model.hpp"

namespace qsl {

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Discrete bath only: maximum tolerated | ||psi||^2 - 1 |.
    double norm_tolerance = 1e-8;
    /// Accepted plus rejected steps allowed per run before giving up.
    std::size_t max_steps = 5'000'000;
};

/// Reduced state of the kernel integration.
struct KernelState {
    cplx a{1.0, 0.0};
    cplx b{};
    /// One memory variable per bath channel: (z_a, z_b) for independent baths,
    /// a single z for the common and system-only baths.
    std::vector<cplx> z;
};

[[nodiscard]] std::size_t kernel_channel_count(Topology topology) noexcept;
[[nodiscard]] KernelState initial_kernel_state(Topology topology);

/// Bath modes on a uniform grid of detunings omega_k - omega0 spanning
/// [-window, window] (bin mid-points), with |g_k|^2 = I(omega_k) * spacing.
struct DiscreteBath {
    std::vector<double> detuning;
    std::vector<double> coupling;
    double window = 0.0;
    double spacing = 0.0;

    [[nodiscard]] std::size_t mode_count() const noexcept { return detuning.size(); }
    /// sum_k |g_k|^2
    [[nodiscard]] double total_weight() const noexcept;
};

/// Default window half-width in units of lambda.
inline constexpr double kDefaultWindowWidths = 20.0;
inline constexpr std::size_t kDefaultBathModes = 1024;

[[nodiscard]] DiscreteBath make_discrete_bath(const SpectralParams& p,
                                              std::size_t modes = kDefaultBathModes,
                                              double window = 0.0 /* 0 -> 20 lambda */);

/// Fraction of the Lorentzian mass inside omega0 +- window, (2/pi) atan(window / lambda).
[[nodiscard]] double lorentzian_mass_fraction(const SpectralParams& p, double window);

/// Full state samples of an oracle run.
struct StateHistory {
    enum class Kind { Kernel, DiscreteBath };
    Kind kind = Kind::Kernel;
    Topology topology = Topology::IndependentBaths;
    std::vector<double> times;
    /// Kernel: [a, b, z...]. Discrete bath: [a, b, c_1..c_N (, d_1..d_N)].
    std::vector<std::vector<cplx>> states;
};

[[nodiscard]] AmplitudeTrajectory integrate_kernel(const ModelConfig& cfg,
                                                   std::span<const double> grid,
                                                   const IntegratorOptions& opts = {});
[[nodiscard]] StateHistory kernel_history(const ModelConfig& cfg, std::span<const double> grid,
                                          const IntegratorOptions& opts = {});

/// Tolerances used for discrete-bath runs unless overridden.
[[nodiscard]] IntegratorOptions discrete_bath_defaults() noexcept;

[[nodiscard]] AmplitudeTrajectory integrate_discrete_bath(
    const ModelConfig& cfg, const DiscreteBath& bath, std::span<const double> grid,
    const IntegratorOptions& opts = discrete_bath_defaults());
[[nodiscard]] StateHistory discrete_bath_history(
    const ModelConfig& cfg, const DiscreteBath& bath, std::span<const double> grid,
    const IntegratorOptions& opts = discrete_bath_defaults());

/// Converts a recorded history to the system amplitude trajectory; derivatives
/// are taken from the equations of motion.
[[nodiscard]] AmplitudeTrajectory trajectory_from_history(const StateHistory& history,
                                                          const ModelConfig& cfg,
                                                          const DiscreteBath* bath = nullptr);

struct BalanceReport {
    std::vector<double> retained;  ///< |a|^2 + |b|^2
    std::vector<double> absorbed;  ///< excitation held by the bath
    /// Discrete bath: max | total - 1 |. Kernel: max(retained - 1, 0).
    double max_deviation = 0.0;
    /// absorbed(t) is non-decreasing (1e-12 slack).
    bool absorbed_monotone = true;
};

[[nodiscard]] BalanceReport excitation_balance(const StateHistory& history);

/// Sup-norm distance between two trajectories sampled on the same grid.
[[nodiscard]] double sup_distance(const AmplitudeTrajectory& x, const AmplitudeTrajectory& y);

}  // namespace qsl
