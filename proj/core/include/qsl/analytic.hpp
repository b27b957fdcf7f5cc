#pragma once

// Closed-form excited-state amplitudes a(t) (rotating frame) for the three
// bath topologies, with exact time derivatives.
//
// Independent baths and the common bath reduce to Lorentzian "damped pair"
// modes of the symmetric/antisymmetric combinations a +- b:
//
//   sigma(t) = exp(-alpha t / 2) [cosh(d t / 2) + (alpha / d) sinh(d t / 2)],
//   d^2 = alpha^2 - 2 g lambda,   alpha = lambda -+ iJ,
//
// with g = gamma0 for independent baths and g = 2 gamma0 for the common bath.
// The system-only amplitude is a partial-fraction sum over the roots of the
// characteristic cubic (see cubic.hpp).

#include <complex>
#include <span>

#include "qsl/cubic.hpp"
#include "qsl/model.hpp"

namespace qsl {

/// Which square root of d^2 is used. Every closed form is even in d, so the
/// choice must not change any amplitude.
enum class RootBranch { Principal, Negated };

/// How the first term of the common-bath prefactor h_c is read. The printed
/// formula has cos where the structure of the independent-bath prefactor
/// (and the gamma0 = 0 limit) require cosh. LiteralCos exists only so that
/// `verify` can show it disagrees with the integrated dynamics.
enum class HcReading { Cosh, LiteralCos };

struct ClosedFormCoefficients {
    Topology topology = Topology::IndependentBaths;
    double lambda = 0.0;
    double J = 0.0;
    /// gamma0 for independent / system-only baths, 2 gamma0 for the common bath.
    double effective_gamma = 0.0;
    /// Discriminant root of the (lambda - iJ) channel: d_id or d_c.
    cplx d{};
    /// Discriminant root of the (lambda + iJ) twin channel (independent baths).
    cplx d_twin{};
    /// System-only topology; unused otherwise.
    CubicRoots cubic{};
};

[[nodiscard]] ClosedFormCoefficients closed_form_coefficients(
    const ModelConfig& cfg, RootBranch branch = RootBranch::Principal);

/// Time-dependent prefactor h(t) = cosh(d t/2) + ((lambda - iJ)/d) sinh(d t/2)
/// of the (lambda - iJ) channel, or of the (lambda + iJ) twin when `twin`.
[[nodiscard]] cplx h_factor(const ClosedFormCoefficients& c, double t, bool twin = false,
                            HcReading reading = HcReading::Cosh);

struct AmplitudeSample {
    cplx a;
    cplx a_dot;
};

/// Amplitude and exact derivative from precomputed coefficients.
/// Throws NearDegenerateRoots for an unresolvable system-only cubic.
[[nodiscard]] AmplitudeSample evaluate_closed_form(const ClosedFormCoefficients& c, double t,
                                                   HcReading reading = HcReading::Cosh);

[[nodiscard]] cplx amplitude_independent(double t, const ModelConfig& cfg);
[[nodiscard]] cplx amplitude_common(double t, const ModelConfig& cfg,
                                    HcReading reading = HcReading::Cosh);
[[nodiscard]] cplx amplitude_system_only(double t, const ModelConfig& cfg);

/// Dispatches on cfg.topology.
[[nodiscard]] cplx amplitude(double t, const ModelConfig& cfg);
/// Exact da/dt in the rotating frame.
[[nodiscard]] cplx amplitude_derivative(double t, const ModelConfig& cfg);

/// Damped Jaynes-Cummings amplitude exp(-lambda t/2)(cosh(dt/2) + (lambda/d) sinh(dt/2)),
/// d = sqrt(lambda (lambda - 2 gamma0)).
[[nodiscard]] cplx damped_jc_amplitude(double t, double gamma0, double lambda);

/// Samples a(t) and da/dt on `grid` (which must lie in [0, cfg.tau]).
[[nodiscard]] AmplitudeTrajectory sample_analytic(const ModelConfig& cfg,
                                                  std::span<const double> grid,
                                                  HcReading reading = HcReading::Cosh);

}  // namespace qsl
