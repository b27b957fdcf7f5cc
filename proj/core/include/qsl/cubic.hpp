#pragma once

#include <array>
#include <complex>

namespace qsl {

/// Roots of the system-only characteristic polynomial
///   2 s^3 + 2 lambda s^2 + (2 J^2 + gamma0 lambda) s + 2 J^2 lambda = 0.
///
/// Roots are sorted by real part, then imaginary part. A conjugate pair is
/// stored with bit-identical real parts.
struct CubicRoots {
    std::array<std::complex<double>, 3> u{};
    /// Relative separation below which roots count as coincident.
    double dedup_tolerance = 1e-8;
    /// min |u_i - u_j| / max |u_i|
    double min_separation = 0.0;
    bool near_degenerate = false;

    [[nodiscard]] std::complex<double> sum() const noexcept { return u[0] + u[1] + u[2]; }
    [[nodiscard]] std::complex<double> product() const noexcept { return u[0] * u[1] * u[2]; }
};

/// Coefficients (c3, c2, c1, c0) of the cubic above, highest power first.
[[nodiscard]] std::array<double, 4> characteristic_coefficients(double J, double lambda,
                                                                double gamma0) noexcept;

/// |P(s)| / max_k |c_k| for the characteristic polynomial.
[[nodiscard]] double cubic_residual(std::complex<double> s, double J, double lambda,
                                    double gamma0) noexcept;

/// Closed-form (trigonometric / Cardano) roots of the real cubic, each
/// polished by Newton iteration on the original polynomial.
[[nodiscard]] CubicRoots solve_cubic(double J, double lambda, double gamma0,
                                     double dedup_tolerance = 1e-8);

}  // namespace qsl
