#pragma once

// Unified quantum speed limit time for an initially excited system.
//
// The reduced state is rho(t) = diag(p, 1 - p) with p = |a|^2, so the
// generator L_t(rho_t) = d rho / dt = diag(p', -p'), p' = 2 Re[a' conj(a)].
// Its operator, Hilbert-Schmidt and trace norms are |p'|, sqrt(2)|p'| and
// 2|p'|. The Bures angle to the initial pure state is arccos(sqrt(p(tau))).

#include <string_view>

#include "qsl/model.hpp"

namespace qsl {

enum class NormKind { Operator, Trace, HilbertSchmidt };

[[nodiscard]] std::string_view norm_id(NormKind n) noexcept;  // "op", "tr", "hs"

/// Instantaneous norms of diag(x, -x).
struct GeneratorNorms {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
};
[[nodiscard]] GeneratorNorms generator_norms(double population_rate) noexcept;

/// Time-averaged norms (1/tau) int_0^tau ||L_t(rho_t)|| dt.
struct EvolutionRates {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
    /// Richardson estimate of the absolute error of `op`.
    double quadrature_error = 0.0;
};

struct QsltResult {
    double bures_angle = 0.0;  ///< radians in [0, pi/2]
    double rate_op = 0.0;
    double rate_tr = 0.0;
    double rate_hs = 0.0;
    /// sin^2(L) / rate for each norm; infinite when the rate vanishes.
    double bound_op = 0.0;
    double bound_tr = 0.0;
    double bound_hs = 0.0;
    double tau = 0.0;
    double tau_qsl = 0.0;
    double ratio = 0.0;  ///< tau_qsl / tau
    NormKind tight_norm = NormKind::Operator;
    /// No motion at all: every rate and the Bures angle vanish.
    bool zero_dynamics = false;
    double quadrature_error = 0.0;
};

/// arccos(sqrt(p)); p is clamped into [0, 1] within 1e-12, DomainError beyond.
[[nodiscard]] double bures_angle_pure(double population);

/// p'(t) = 2 Re[a'(t) conj(a(t))]. Frame independent.
[[nodiscard]] double population_rate(cplx a, cplx a_dot) noexcept;

/// Integrates |p'| over the trajectory. Each sample interval carries the cubic
/// Hermite interpolant of p built from (p, p') at its ends; intervals are
/// split at the zero crossings of its derivative and every constant-sign piece
/// is integrated by Simpson's rule, which is exact there.
[[nodiscard]] EvolutionRates evolution_rates(const AmplitudeTrajectory& traj);

/// Unified bound max{1/rate_op, 1/rate_tr, 1/rate_hs} * sin^2(L).
/// Throws Infeasible if the rates vanish while p(tau) < 1.
[[nodiscard]] QsltResult qslt(const AmplitudeTrajectory& traj);

}  // namespace qsl
