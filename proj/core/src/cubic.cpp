#include "qsl/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

using cplx = std::complex<double>;

struct Monic {
    double a, b, c;  // s^3 + a s^2 + b s + c

    [[nodiscard]] cplx value(cplx s) const noexcept { return ((s + a) * s + b) * s + c; }
    [[nodiscard]] cplx slope(cplx s) const noexcept { return (3.0 * s + 2.0 * a) * s + b; }
};

cplx polish(const Monic& p, cplx root) {
    cplx best = root;
    double best_residual = std::abs(p.value(root));
    for (int iter = 0; iter < 4 && best_residual > 0.0; ++iter) {
        const cplx slope = p.slope(best);
        if (slope == cplx{}) break;
        const cplx candidate = best - p.value(best) / slope;
        const double residual = std::abs(p.value(candidate));
        if (!(residual < best_residual)) break;
        best = candidate;
        best_residual = residual;
    }
    return best;
}

}  // namespace

std::array<double, 4> characteristic_coefficients(double J, double lambda, double gamma0) noexcept {
    const double j2 = J * J;
    return {2.0, 2.0 * lambda, 2.0 * j2 + gamma0 * lambda, 2.0 * j2 * lambda};
}

double cubic_residual(cplx s, double J, double lambda, double gamma0) noexcept {
    const auto c = characteristic_coefficients(J, lambda, gamma0);
    const cplx value = ((c[0] * s + c[1]) * s + c[2]) * s + c[3];
    double scale = 0.0;
    for (double k : c) scale = std::max(scale, std::abs(k));
    return std::abs(value) / scale;
}

CubicRoots solve_cubic(double J, double lambda, double gamma0, double dedup_tolerance) {
    if (!std::isfinite(J) || !std::isfinite(lambda) || !std::isfinite(gamma0))
        throw DomainError("cubic coefficients must be finite");

    const Monic p{lambda, J * J + 0.5 * gamma0 * lambda, J * J * lambda};
    const double a3 = p.a / 3.0;
    const double q = (p.a * p.a - 3.0 * p.b) / 9.0;
    const double r = (2.0 * p.a * p.a * p.a - 9.0 * p.a * p.b + 27.0 * p.c) / 54.0;

    CubicRoots out;
    out.dedup_tolerance = dedup_tolerance;

    if (r * r < q * q * q) {
        // three real roots
        const double theta = std::acos(std::clamp(r / std::sqrt(q * q * q), -1.0, 1.0));
        const double m = -2.0 * std::sqrt(q);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        out.u = {polish(p, {m * std::cos(theta / 3.0) - a3, 0.0}),
                 polish(p, {m * std::cos((theta + two_pi) / 3.0) - a3, 0.0}),
                 polish(p, {m * std::cos((theta - two_pi) / 3.0) - a3, 0.0})};
        for (auto& u : out.u) u = {u.real(), 0.0};
    } else {
        const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q * q * q)), r);
        const double small = big == 0.0 ? 0.0 : q / big;
        const cplx real_root = polish(p, {big + small - a3, 0.0});
        cplx pair = polish(p, {-0.5 * (big + small) - a3, 0.5 * std::sqrt(3.0) * (big - small)});
        if (pair.imag() < 0.0) pair = std::conj(pair);
        out.u = {cplx{real_root.real(), 0.0}, pair, std::conj(pair)};
    }

    std::sort(out.u.begin(), out.u.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    double scale = 0.0;
    for (const auto& u : out.u) scale = std::max(scale, std::abs(u));
    double sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) sep = std::min(sep, std::abs(out.u[i] - out.u[j]));
    out.min_separation = scale > 0.0 ? sep / scale : 0.0;
    out.near_degenerate = out.min_separation < dedup_tolerance;
    return out;
}

}  // namespace qsl
