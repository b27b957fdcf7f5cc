#include "qsl/model.hpp"

#include <cmath>
#include <numbers>

#include "qsl/errors.hpp"

namespace qsl {

void SpectralParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("spectral width lambda must be positive and finite");
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0))
        throw DomainError("coupling gamma0 must be non-negative and finite");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw DomainError("transition frequency omega0 must be positive and finite");
}

bool SpectralParams::is_markovian() const noexcept {
    return lambda * (lambda - 2.0 * gamma0) > 0.0;
}

std::string_view topology_id(Topology t) noexcept {
    switch (t) {
        case Topology::IndependentBaths: return "id";
        case Topology::CommonBath: return "common";
        case Topology::SystemOnlyBath: return "sys";
    }
    return "?";
}

Topology parse_topology(std::string_view text) {
    if (text == "id" || text == "independent" || text == "IndependentBaths")
        return Topology::IndependentBaths;
    if (text == "common" || text == "c" || text == "CommonBath") return Topology::CommonBath;
    if (text == "sys" || text == "system" || text == "SystemOnlyBath")
        return Topology::SystemOnlyBath;
    throw DomainError("unknown topology '" + std::string(text) + "' (expected id|common|sys)");
}

void ModelConfig::validate() const {
    spectral.validate();
    if (!(J >= 0.0) || !std::isfinite(J)) throw DomainError("hopping J must be non-negative");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("driving time tau must be positive");
}

void AmplitudeTrajectory::validate(double population_slack) const {
    if (times.size() < 2) throw DomainError("trajectory needs at least two samples");
    if (a.size() != times.size() || a_dot.size() != times.size())
        throw DomainError("trajectory arrays have mismatched lengths");
    if (times.front() != 0.0) throw DomainError("trajectory must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("trajectory times must increase strictly");
    if (std::abs(a.front() - cplx{1.0, 0.0}) > 1e-12)
        throw DomainError("trajectory must start from a(0) = 1");
    for (const auto& v : a) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("trajectory contains non-finite amplitudes");
        if (std::norm(v) > 1.0 + population_slack)
            throw DomainError("trajectory population exceeds 1");
    }
}

std::vector<double> uniform_grid(double tau, std::size_t points) {
    if (points < 2) throw DomainError("time grid needs at least two points");
    if (!(tau > 0.0)) throw DomainError("time grid horizon must be positive");
    std::vector<double> grid(points);
    const double n = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = tau * (static_cast<double>(i) / n);
    grid.back() = tau;
    return grid;
}

double lorentzian_density(double omega, const SpectralParams& p) noexcept {
    const double detuning = omega - p.omega0;
    return p.gamma0 * p.lambda * p.lambda /
           (2.0 * std::numbers::pi * (detuning * detuning + p.lambda * p.lambda));
}

cplx memory_kernel(double dt, const SpectralParams& p) {
    if (dt < 0.0) throw DomainError("memory kernel is defined for dt >= 0");
    return {0.5 * p.gamma0 * p.lambda * std::exp(-p.lambda * dt), 0.0};
}

cplx lab_derivative(cplx a, cplx a_dot, double t, double omega0) noexcept {
    return (a_dot - cplx{0.0, omega0} * a) * std::polar(1.0, -omega0 * t);
}

AmplitudeTrajectory to_lab_frame(const AmplitudeTrajectory& rotating, double omega0) {
    if (rotating.frame != Frame::Rotating) throw DomainError("trajectory is already in the lab frame");
    AmplitudeTrajectory lab;
    lab.frame = Frame::Lab;
    lab.times = rotating.times;
    lab.a.resize(rotating.size());
    lab.a_dot.resize(rotating.size());
    for (std::size_t i = 0; i < rotating.size(); ++i) {
        const double t = rotating.times[i];
        lab.a[i] = rotating.a[i] * std::polar(1.0, -omega0 * t);
        lab.a_dot[i] = lab_derivative(rotating.a[i], rotating.a_dot[i], t, omega0);
    }
    return lab;
}

}  // namespace qsl
