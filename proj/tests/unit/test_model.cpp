#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qsl/errors.hpp"
#include "qsl/model.hpp"
#include "test_support.hpp"

using namespace qsl;
using qsl::testing::simpson;

namespace {
constexpr double pi = std::numbers::pi;
SpectralParams params(double g, double l) { return SpectralParams{g, l, 1.0}; }
}  // namespace

TEST_CASE("lorentzian peak and half width") {
    const auto p = params(1.0, 2.0);
    CHECK(lorentzian_density(1.0, p) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-15));
    CHECK(lorentzian_density(1.0, p) == doctest::Approx(0.159155).epsilon(1e-6));
    CHECK(lorentzian_density(1.0 + 2.0, p) == doctest::Approx(0.5 * lorentzian_density(1.0, p)).epsilon(1e-15));
    CHECK(lorentzian_density(1.0 - 2.0, p) == doctest::Approx(0.5 * lorentzian_density(1.0, p)).epsilon(1e-15));
}

TEST_CASE("lorentzian mass inside a finite window") {
    // Simpson over omega0 +- 50 lambda against the closed-form windowed mass.
    for (const auto& [g, l] : {std::pair{1.0, 2.0}, {0.3, 0.5}, {4.0, 1.0}}) {
        const auto p = params(g, l);
        const double w = 50.0 * l;
        const double numeric = simpson([&](double x) { return lorentzian_density(x, p); }, 1.0 - w, 1.0 + w, 200000);
        const double windowed = 0.5 * g * l * (2.0 / pi) * std::atan(50.0);
        CHECK(numeric == doctest::Approx(windowed).epsilon(1e-9));
        // the window holds 98.7% of the mass, so the full integral is 1.3% larger
        CHECK(windowed / (0.5 * g * l) == doctest::Approx(0.98727).epsilon(1e-5));
    }
}

TEST_CASE("lorentzian total mass is gamma0 lambda / 2") {
    // omega = omega0 + lambda tan(theta) maps the real line onto (-pi/2, pi/2)
    const auto p = params(1.7, 2.0);
    const double total = simpson(
        [&](double th) {
            const double c = std::cos(th);
            if (c == 0.0) return 0.0;
            return lorentzian_density(1.0 + p.lambda * std::tan(th), p) * p.lambda / (c * c);
        },
        -pi / 2, pi / 2, 2000);
    CHECK(total == doctest::Approx(0.5 * p.gamma0 * p.lambda).epsilon(1e-3));
}

TEST_CASE("lorentzian symmetry about omega0") {
    qsl::testing::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto p = SpectralParams{rng.uniform(0.0, 10.0), rng.uniform(0.01, 10.0), rng.uniform(0.1, 5.0)};
        const double x = rng.uniform(0.0, 100.0);
        CHECK(lorentzian_density(p.omega0 + x, p) == doctest::Approx(lorentzian_density(p.omega0 - x, p)).epsilon(1e-14));
        CHECK(lorentzian_density(p.omega0 + x, p) <= lorentzian_density(p.omega0, p));
        if (p.gamma0 > 0.0) CHECK(lorentzian_density(p.omega0 + x, p) > 0.0);
    }
}

TEST_CASE("memory kernel values") {
    const auto p = params(1.0, 2.0);
    CHECK(memory_kernel(0.0, p) == cplx{1.0, 0.0});
    CHECK(memory_kernel(0.5, p).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(memory_kernel(0.5, p).imag() == 0.0);
    CHECK_THROWS_AS((void)memory_kernel(-1e-3, p), DomainError);
}

TEST_CASE("memory kernel decreases monotonically") {
    const auto p = params(2.5, 1.3);
    double previous = std::abs(memory_kernel(0.0, p));
    CHECK(previous == doctest::Approx(0.5 * 2.5 * 1.3));
    for (int i = 1; i <= 400; ++i) {
        const double now = std::abs(memory_kernel(0.01 * i, p));
        CHECK(now < previous);
        previous = now;
    }
}

TEST_CASE("memory kernel is the Fourier transform of the density") {
    // f(dt) = 2 int_0^inf I(omega0 + x) cos(x dt) dx. Simpson up to L plus the
    // leading integration-by-parts terms of the tail.
    const auto p = params(1.0, 2.0);
    const double c = p.gamma0 * p.lambda * p.lambda / (2.0 * pi);
    const double L = 2000.0;
    for (int k = 0; k <= 10; ++k) {
        const double dt = 0.25 * k;
        const double body = simpson(
            [&](double x) { return lorentzian_density(1.0 + x, p) * std::cos(x * dt); }, 0.0, L, 500000);
        double tail = 0.0;
        if (dt == 0.0) {
            tail = c / p.lambda * (pi / 2 - std::atan(L / p.lambda));
        } else {
            const double g = c / (L * L + p.lambda * p.lambda);
            const double g1 = -2.0 * L * c / ((L * L + p.lambda * p.lambda) * (L * L + p.lambda * p.lambda));
            tail = -g * std::sin(L * dt) / dt - g1 * std::cos(L * dt) / (dt * dt);
        }
        const double f = 2.0 * (body + tail);
        CHECK(std::abs(f - memory_kernel(dt, p).real()) < 1e-6);
    }
}

TEST_CASE("markovian predicate flips at lambda = 2 gamma0") {
    CHECK(params(0.99, 2.0).is_markovian());
    CHECK_FALSE(params(1.0, 2.0).is_markovian());
    CHECK_FALSE(params(1.01, 2.0).is_markovian());
    qsl::testing::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto p = params(rng.uniform(0.0, 10.0), rng.uniform(0.01, 10.0));
        CHECK(p.is_markovian() == (p.lambda * (p.lambda - 2.0 * p.gamma0) > 0.0));
    }
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(params(0.0, 2.0).validate());
    CHECK_THROWS_AS(params(-0.1, 2.0).validate(), DomainError);
    CHECK_THROWS_AS(params(1.0, 0.0).validate(), DomainError);
    CHECK_THROWS_AS((SpectralParams{1.0, 2.0, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralParams{NAN, 2.0, 1.0}.validate()), DomainError);

    ModelConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.J = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.J = 1.0;
    cfg.tau = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("topology identifiers round trip") {
    for (auto t : {Topology::IndependentBaths, Topology::CommonBath, Topology::SystemOnlyBath})
        CHECK(parse_topology(topology_id(t)) == t);
    CHECK(topology_id(Topology::CommonBath) == "common");
    CHECK(parse_topology("SystemOnlyBath") == Topology::SystemOnlyBath);
    CHECK_THROWS_AS((void)parse_topology("shared"), DomainError);
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(3.0, 2001);
    REQUIRE(g.size() == 2001);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 3.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS_AS((void)uniform_grid(3.0, 1), DomainError);
    CHECK_THROWS_AS((void)uniform_grid(-1.0, 10), DomainError);
}

TEST_CASE("trajectory validation") {
    AmplitudeTrajectory traj;
    traj.times = {0.0, 0.5, 1.0};
    traj.a = {1.0, 0.8, 0.5};
    traj.a_dot = {0.0, -0.5, -0.5};
    CHECK_NOTHROW(traj.validate());
    CHECK(traj.horizon() == 1.0);

    auto bad = traj;
    bad.a[0] = 0.9;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = traj;
    bad.a[1] = 1.01;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = traj;
    bad.times[2] = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = traj;
    bad.a_dot.pop_back();
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = traj;
    bad.times[0] = 0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("lab frame conversion") {
    AmplitudeTrajectory traj;
    traj.times = {0.0, 1.0, 2.0};
    traj.a = {1.0, cplx{0.3, 0.4}, cplx{-0.2, 0.1}};
    traj.a_dot = {0.0, cplx{0.1, -0.7}, cplx{0.5, 0.5}};
    const double w0 = 1.7;
    const auto lab = to_lab_frame(traj, w0);
    CHECK(lab.frame == Frame::Lab);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const cplx phase = std::exp(cplx{0.0, -w0 * t});
        CHECK(std::abs(lab.a[i] - traj.a[i] * phase) < 1e-15);
        CHECK(std::abs(lab.a_dot[i] - (traj.a_dot[i] - cplx{0.0, w0} * traj.a[i]) * phase) < 1e-14);
        CHECK(std::norm(lab.a[i]) == doctest::Approx(std::norm(traj.a[i])).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)to_lab_frame(lab, w0), DomainError);
}
