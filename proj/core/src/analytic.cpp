#include "qsl/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

constexpr cplx kI{0.0, 1.0};

// sinh(z)/z, analytic at z = 0.
cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-4) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

cplx discriminant_root(cplx alpha, double gamma, double lambda, RootBranch branch) {
    const cplx d = std::sqrt(alpha * alpha - 2.0 * gamma * lambda);
    return branch == RootBranch::Principal ? d : -d;
}

// Lorentzian damped mode sigma(t) and its derivative. The derivative
// collapses to -g lambda exp(-alpha t/2) sinh(dt/2)/d because d^2 - alpha^2 = -2 g lambda.
AmplitudeSample damped_mode(cplx alpha, cplx d, double gamma, double lambda, double t,
                            HcReading reading) {
    // without coupling d = +-alpha and the mode is identically 1
    if (gamma == 0.0 && reading == HcReading::Cosh) return {cplx{1.0, 0.0}, cplx{}};
    const cplx half_dt = 0.5 * d * t;
    const cplx envelope = std::exp(-0.5 * alpha * t);
    const cplx s = 0.5 * t * sinhc(half_dt);  // sinh(dt/2)/d
    if (reading == HcReading::Cosh) {
        return {envelope * (std::cosh(half_dt) + alpha * s), -gamma * lambda * envelope * s};
    }
    const cplx h = std::cos(half_dt) + alpha * s;
    const cplx h_dot = -0.5 * d * std::sin(half_dt) + 0.5 * alpha * std::cosh(half_dt);
    return {envelope * h, envelope * (h_dot - 0.5 * alpha * h)};
}

// ---- divided differences for the system-only amplitude -------------------
//
// The partial-fraction sum equals the second divided difference of
// g(s) = s (s + lambda) exp(s t) over the three roots, which stays finite when
// two roots merge. Leibniz: (f e)[x0,x1,x2] = f[x0] e[x0,x1,x2] + f[x0,x1] e[x1,x2] + f[x0,x1,x2] e[x2].

cplx exp_dd1(cplx x, cplx y, double t) {
    return t * std::exp(0.5 * (x + y) * t) * sinhc(0.5 * (x - y) * t);
}

cplx exp_dd2(cplx x0, cplx x1, cplx x2, double t) {
    const cplx spread = x0 - x2;
    if (std::abs(spread) * t >= 1e-2) return (exp_dd1(x0, x1, t) - exp_dd1(x1, x2, t)) / spread;

    // clustered nodes: e[x0,x1,x2] = exp(m t) sum_{k>=2} t^k / k! h_{k-2}(x - m)
    const cplx m = (x0 + x1 + x2) / 3.0;
    const std::array<cplx, 3> delta{x0 - m, x1 - m, x2 - m};
    constexpr int kTerms = 12;
    std::array<std::array<cplx, kTerms>, 3> pw{};
    for (int v = 0; v < 3; ++v) {
        pw[v][0] = 1.0;
        for (int k = 1; k < kTerms; ++k) pw[v][k] = pw[v][k - 1] * delta[v];
    }
    cplx sum{};
    double coeff = 0.5 * t * t;  // t^k / k! at k = 2
    for (int j = 0; j < kTerms; ++j) {
        cplx h{};
        for (int p = 0; p <= j; ++p)
            for (int q = 0; p + q <= j; ++q) h += pw[0][p] * pw[1][q] * pw[2][j - p - q];
        sum += coeff * h;
        coeff *= t / static_cast<double>(j + 3);
    }
    return std::exp(m * t) * sum;
}

AmplitudeSample system_only_divided(const std::array<cplx, 3>& u, double lambda, double t) {
    // order nodes so that x0, x2 is the most separated pair
    std::array<cplx, 3> x = u;
    const double d01 = std::abs(u[0] - u[1]);
    const double d02 = std::abs(u[0] - u[2]);
    const double d12 = std::abs(u[1] - u[2]);
    if (d01 >= d02 && d01 >= d12) x = {u[0], u[2], u[1]};
    else if (d12 >= d02 && d12 >= d01) x = {u[1], u[0], u[2]};

    const cplx e2 = exp_dd2(x[0], x[1], x[2], t);
    const cplx e1 = exp_dd1(x[1], x[2], t);
    const cplx e0 = std::exp(x[2] * t);

    // f(s) = s^2 + lambda s
    const cplx f0 = x[0] * (x[0] + lambda);
    const cplx f1 = x[0] + x[1] + lambda;
    // f'(s) = s^3 + lambda s^2 (multiplying by s differentiates exp(s t) in t)
    const cplx g0 = x[0] * x[0] * (x[0] + lambda);
    const cplx g1 = x[0] * x[0] + x[0] * x[1] + x[1] * x[1] + lambda * (x[0] + x[1]);
    const cplx g2 = x[0] + x[1] + x[2] + lambda;
    return {f0 * e2 + f1 * e1 + e0, g0 * e2 + g1 * e1 + g2 * e0};
}

AmplitudeSample system_only_residues(const std::array<cplx, 3>& u, double lambda, double t) {
    AmplitudeSample out{};
    for (int i = 0; i < 3; ++i) {
        const cplx uj = u[(i + 1) % 3];
        const cplx uk = u[(i + 2) % 3];
        const cplx term = std::exp(u[i] * t) * u[i] * (lambda + u[i]) / ((u[i] - uj) * (u[i] - uk));
        out.a += term;
        out.a_dot += u[i] * term;
    }
    return out;
}

// Relative root separation above which the plain residue sum is used.
constexpr double kResidueSeparation = 1e-2;

void require_topology(const ModelConfig& cfg, Topology expected) {
    if (cfg.topology != expected)
        throw DomainError("amplitude requested for topology '" + std::string(topology_id(expected)) +
                          "' but config is '" + std::string(topology_id(cfg.topology)) + "'");
}

void require_time(double t, const ModelConfig& cfg) {
    if (!(t >= 0.0) || t > cfg.tau * (1.0 + 1e-12))
        throw DomainError("time outside [0, tau]");
}

}  // namespace

ClosedFormCoefficients closed_form_coefficients(const ModelConfig& cfg, RootBranch branch) {
    cfg.validate();
    ClosedFormCoefficients c;
    c.topology = cfg.topology;
    c.lambda = cfg.spectral.lambda;
    c.J = cfg.J;
    const double gamma0 = cfg.spectral.gamma0;
    const cplx alpha{c.lambda, -c.J};
    switch (cfg.topology) {
        case Topology::IndependentBaths:
            c.effective_gamma = gamma0;
            c.d = discriminant_root(alpha, gamma0, c.lambda, branch);
            c.d_twin = discriminant_root(std::conj(alpha), gamma0, c.lambda, branch);
            break;
        case Topology::CommonBath:
            c.effective_gamma = 2.0 * gamma0;
            c.d = discriminant_root(alpha, c.effective_gamma, c.lambda, branch);
            break;
        case Topology::SystemOnlyBath:
            c.effective_gamma = gamma0;
            // J = 0 decouples the ancilla; d is then the damped-JC root
            c.d = discriminant_root({c.lambda, 0.0}, gamma0, c.lambda, branch);
            c.cubic = solve_cubic(c.J, c.lambda, gamma0);
            break;
    }
    return c;
}

cplx h_factor(const ClosedFormCoefficients& c, double t, bool twin, HcReading reading) {
    const cplx alpha{c.lambda, twin ? c.J : -c.J};
    const cplx d = twin ? c.d_twin : c.d;
    const cplx half_dt = 0.5 * d * t;
    const cplx first = reading == HcReading::Cosh ? std::cosh(half_dt) : std::cos(half_dt);
    return first + alpha * 0.5 * t * sinhc(half_dt);
}

AmplitudeSample evaluate_closed_form(const ClosedFormCoefficients& c, double t, HcReading reading) {
    const cplx alpha{c.lambda, -c.J};
    switch (c.topology) {
        case Topology::IndependentBaths: {
            // a = (s_+ + s_-)/2 with s_+ = exp(-iJt) sigma(lambda - iJ), s_- its J -> -J twin
            const cplx rot = std::polar(1.0, -c.J * t);
            const auto plus = damped_mode(alpha, c.d, c.effective_gamma, c.lambda, t, HcReading::Cosh);
            const auto minus =
                damped_mode(std::conj(alpha), c.d_twin, c.effective_gamma, c.lambda, t, HcReading::Cosh);
            const cplx a = 0.5 * (rot * plus.a + std::conj(rot) * minus.a);
            const cplx a_dot = 0.5 * (rot * (plus.a_dot - kI * c.J * plus.a) +
                                      std::conj(rot) * (minus.a_dot + kI * c.J * minus.a));
            return {a, a_dot};
        }
        case Topology::CommonBath: {
            // antisymmetric mode decouples from the bath: a - b = exp(iJt)
            const cplx rot = std::polar(1.0, -c.J * t);
            const auto sym = damped_mode(alpha, c.d, c.effective_gamma, c.lambda, t, reading);
            const cplx a = 0.5 * (std::conj(rot) + rot * sym.a);
            const cplx a_dot = 0.5 * (kI * c.J * std::conj(rot) + rot * (sym.a_dot - kI * c.J * sym.a));
            return {a, a_dot};
        }
        case Topology::SystemOnlyBath: {
            if (c.J == 0.0)
                return damped_mode({c.lambda, 0.0}, c.d, c.effective_gamma, c.lambda, t, HcReading::Cosh);
            // residues sum to 1 and their first moment to 0 only up to rounding
            if (t == 0.0) return {cplx{1.0, 0.0}, cplx{}};
            if (c.cubic.near_degenerate)
                throw NearDegenerateRoots("characteristic roots coincide within relative separation " +
                                          std::to_string(c.cubic.min_separation));
            if (c.cubic.min_separation >= kResidueSeparation)
                return system_only_residues(c.cubic.u, c.lambda, t);
            return system_only_divided(c.cubic.u, c.lambda, t);
        }
    }
    return {};
}

cplx amplitude_independent(double t, const ModelConfig& cfg) {
    require_topology(cfg, Topology::IndependentBaths);
    require_time(t, cfg);
    return evaluate_closed_form(closed_form_coefficients(cfg), t).a;
}

cplx amplitude_common(double t, const ModelConfig& cfg, HcReading reading) {
    require_topology(cfg, Topology::CommonBath);
    require_time(t, cfg);
    return evaluate_closed_form(closed_form_coefficients(cfg), t, reading).a;
}

cplx amplitude_system_only(double t, const ModelConfig& cfg) {
    require_topology(cfg, Topology::SystemOnlyBath);
    require_time(t, cfg);
    return evaluate_closed_form(closed_form_coefficients(cfg), t).a;
}

cplx amplitude(double t, const ModelConfig& cfg) {
    require_time(t, cfg);
    return evaluate_closed_form(closed_form_coefficients(cfg), t).a;
}

cplx amplitude_derivative(double t, const ModelConfig& cfg) {
    require_time(t, cfg);
    return evaluate_closed_form(closed_form_coefficients(cfg), t).a_dot;
}

cplx damped_jc_amplitude(double t, double gamma0, double lambda) {
    const cplx d = discriminant_root({lambda, 0.0}, gamma0, lambda, RootBranch::Principal);
    return damped_mode({lambda, 0.0}, d, gamma0, lambda, t, HcReading::Cosh).a;
}

AmplitudeTrajectory sample_analytic(const ModelConfig& cfg, std::span<const double> grid,
                                    HcReading reading) {
    const auto coeffs = closed_form_coefficients(cfg);
    AmplitudeTrajectory traj;
    traj.frame = Frame::Rotating;
    traj.times.assign(grid.begin(), grid.end());
    traj.a.resize(grid.size());
    traj.a_dot.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require_time(grid[i], cfg);
        const auto s = evaluate_closed_form(coeffs, grid[i], reading);
        traj.a[i] = s.a;
        traj.a_dot[i] = s.a_dot;
    }
    return traj;
}

}  // namespace qsl
