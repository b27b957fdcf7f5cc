#include "qsl/qslt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

struct Sample {
    double t, p, rate;
};

// |p'| integrated over one interval of the Hermite interpolant.
double interval_abs_integral(const Sample& l, const Sample& r) {
    const double h = r.t - l.t;
    // dP/ds on s in [0, 1]
    const double c2 = 6.0 * (l.p - r.p) + 3.0 * h * (l.rate + r.rate);
    const double c1 = 6.0 * (r.p - l.p) - h * (4.0 * l.rate + 2.0 * r.rate);
    const double c0 = h * l.rate;
    const auto q = [&](double s) { return (c2 * s + c1) * s + c0; };

    std::array<double, 4> cuts{0.0, 1.0, 1.0, 1.0};
    int n = 1;
    const auto add_root = [&](double s) {
        if (s > 0.0 && s < 1.0) cuts[n++] = s;
    };
    if (c2 == 0.0) {
        if (c1 != 0.0) add_root(-c0 / c1);
    } else {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc > 0.0) {
            const double big = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
            add_root(big / c2);
            if (big != 0.0) add_root(c0 / big);
        }
    }
    cuts[n++] = 1.0;
    std::sort(cuts.begin(), cuts.begin() + n);

    double total = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        if (b <= a) continue;
        total += std::abs((b - a) / 6.0 * (q(a) + 4.0 * q(0.5 * (a + b)) + q(b)));
    }
    return total;
}

double abs_rate_integral(const std::vector<Sample>& samples, std::size_t stride) {
    double total = 0.0;
    std::size_t i = 0;
    while (i + 1 < samples.size()) {
        const std::size_t j = std::min(i + stride, samples.size() - 1);
        total += interval_abs_integral(samples[i], samples[j]);
        i = j;
    }
    return total;
}

}  // namespace

std::string_view norm_id(NormKind n) noexcept {
    switch (n) {
        case NormKind::Operator: return "op";
        case NormKind::Trace: return "tr";
        case NormKind::HilbertSchmidt: return "hs";
    }
    return "?";
}

GeneratorNorms generator_norms(double population_rate) noexcept {
    const double x = std::abs(population_rate);
    return {x, 2.0 * x, std::sqrt(2.0) * x};
}

double bures_angle_pure(double population) {
    constexpr double slack = 1e-12;
    if (!(population >= -slack && population <= 1.0 + slack))
        throw DomainError("population outside [0, 1]: " + std::to_string(population));
    return std::acos(std::sqrt(std::clamp(population, 0.0, 1.0)));
}

double population_rate(cplx a, cplx a_dot) noexcept {
    return 2.0 * (a_dot * std::conj(a)).real();
}

EvolutionRates evolution_rates(const AmplitudeTrajectory& traj) {
    traj.validate();
    std::vector<Sample> samples(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double rate = population_rate(traj.a[i], traj.a_dot[i]);
        if (!std::isfinite(rate))
            throw QuadratureFailure("non-finite population rate at t = " + std::to_string(traj.times[i]));
        samples[i] = {traj.times[i], std::norm(traj.a[i]), rate};
    }

    const double fine = abs_rate_integral(samples, 1);
    const double coarse = abs_rate_integral(samples, 2);
    const double tau = traj.horizon();

    EvolutionRates r;
    r.op = fine / tau;
    r.tr = 2.0 * r.op;
    r.hs = std::sqrt(2.0) * r.op;
    // fourth-order interpolant: halving the spacing cuts the error by ~16
    r.quadrature_error = traj.size() > 2 ? std::abs(fine - coarse) / 15.0 / tau : 0.0;
    return r;
}

QsltResult qslt(const AmplitudeTrajectory& traj) {
    const auto rates = evolution_rates(traj);
    const double p_tau = std::norm(traj.a.back());

    QsltResult out;
    out.tau = traj.horizon();
    out.bures_angle = bures_angle_pure(p_tau);
    out.rate_op = rates.op;
    out.rate_tr = rates.tr;
    out.rate_hs = rates.hs;
    out.quadrature_error = rates.quadrature_error;

    const double distance = 1.0 - std::clamp(p_tau, 0.0, 1.0);  // sin^2 of the Bures angle
    constexpr double inf = std::numeric_limits<double>::infinity();

    if (rates.op == 0.0) {
        if (distance > 1e-14)
            throw Infeasible("evolution rates vanish but the population moved by " +
                             std::to_string(distance));
        out.zero_dynamics = true;
        out.bound_op = out.bound_tr = out.bound_hs = inf;
        out.tau_qsl = 0.0;
        out.ratio = 0.0;
        return out;
    }

    out.bound_op = distance / rates.op;
    out.bound_tr = distance / rates.tr;
    out.bound_hs = distance / rates.hs;
    out.tau_qsl = out.bound_op;
    out.tight_norm = NormKind::Operator;
    if (out.bound_hs > out.tau_qsl) {
        out.tau_qsl = out.bound_hs;
        out.tight_norm = NormKind::HilbertSchmidt;
    }
    if (out.bound_tr > out.tau_qsl) {
        out.tau_qsl = out.bound_tr;
        out.tight_norm = NormKind::Trace;
    }
    out.ratio = out.tau_qsl / out.tau;
    return out;
}

}  // namespace qsl
