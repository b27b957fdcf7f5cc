#include "qsl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

namespace odeint = boost::numeric::odeint;

using State = std::vector<cplx>;
constexpr cplx kI{0.0, 1.0};

class KernelSystem {
public:
    explicit KernelSystem(const ModelConfig& cfg)
        : topology_(cfg.topology),
          J_(cfg.J),
          lambda_(cfg.spectral.lambda),
          weight_(0.5 * cfg.spectral.gamma0 * cfg.spectral.lambda) {}

    // y = [a, b, z...]
    void operator()(const State& y, State& dy, double /*t*/) const {
        const cplx a = y[0];
        const cplx b = y[1];
        switch (topology_) {
            case Topology::IndependentBaths:
                dy[0] = -kI * J_ * b - weight_ * y[2];
                dy[1] = -kI * J_ * a - weight_ * y[3];
                dy[2] = -lambda_ * y[2] + a;
                dy[3] = -lambda_ * y[3] + b;
                break;
            case Topology::CommonBath:
                dy[0] = -kI * J_ * b - weight_ * y[2];
                dy[1] = -kI * J_ * a - weight_ * y[2];
                dy[2] = -lambda_ * y[2] + a + b;
                break;
            case Topology::SystemOnlyBath:
                dy[0] = -kI * J_ * b - weight_ * y[2];
                dy[1] = -kI * J_ * a;
                dy[2] = -lambda_ * y[2] + a;
                break;
        }
    }

private:
    Topology topology_;
    double J_;
    double lambda_;
    double weight_;
};

class BathSystem {
public:
    BathSystem(const ModelConfig& cfg, const DiscreteBath& bath)
        : topology_(cfg.topology), J_(cfg.J), bath_(&bath) {}

    [[nodiscard]] std::size_t dimension() const noexcept {
        const std::size_t n = bath_->mode_count();
        return 2 + (topology_ == Topology::IndependentBaths ? 2 * n : n);
    }

    // y = [a, b, c_1..c_N (, d_1..d_N)]
    void operator()(const State& y, State& dy, double /*t*/) const {
        const std::size_t n = bath_->mode_count();
        const auto& g = bath_->coupling;
        const auto& w = bath_->detuning;
        const cplx a = y[0];
        const cplx b = y[1];
        const cplx* c = y.data() + 2;
        cplx* dc = dy.data() + 2;

        cplx field_c{};
        for (std::size_t k = 0; k < n; ++k) field_c += g[k] * c[k];

        switch (topology_) {
            case Topology::IndependentBaths: {
                const cplx* d = c + n;
                cplx* dd = dc + n;
                cplx field_d{};
                for (std::size_t k = 0; k < n; ++k) field_d += g[k] * d[k];
                dy[0] = -kI * (J_ * b + field_c);
                dy[1] = -kI * (J_ * a + field_d);
                for (std::size_t k = 0; k < n; ++k) {
                    dc[k] = -kI * (w[k] * c[k] + g[k] * a);
                    dd[k] = -kI * (w[k] * d[k] + g[k] * b);
                }
                break;
            }
            case Topology::CommonBath: {
                dy[0] = -kI * (J_ * b + field_c);
                dy[1] = -kI * (J_ * a + field_c);
                const cplx source = a + b;
                for (std::size_t k = 0; k < n; ++k) dc[k] = -kI * (w[k] * c[k] + g[k] * source);
                break;
            }
            case Topology::SystemOnlyBath:
                dy[0] = -kI * (J_ * b + field_c);
                dy[1] = -kI * J_ * a;
                for (std::size_t k = 0; k < n; ++k) dc[k] = -kI * (w[k] * c[k] + g[k] * a);
                break;
        }
    }

private:
    Topology topology_;
    double J_;
    const DiscreteBath* bath_;
};

double squared_norm(const State& y) {
    double s = 0.0;
    for (const auto& v : y) s += std::norm(v);
    return s;
}

void check_grid(std::span<const double> grid) {
    if (grid.size() < 2) throw DomainError("oracle grid needs at least two points");
    if (grid.front() != 0.0) throw DomainError("oracle grid must start at t = 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("oracle grid must increase strictly");
}

// Adaptive RKF7(8) over the grid; lands exactly on every grid point.
// on_step(y, t) runs after every accepted step, on_sample(i, y) at grid[i].
template <class System, class OnStep, class OnSample>
void drive(const System& system, State& y, std::span<const double> grid,
           const IntegratorOptions& opts, OnStep&& on_step, OnSample&& on_sample) {
    check_grid(grid);
    auto stepper =
        odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(opts.abs_tol, opts.rel_tol);

    double t = grid.front();
    double dt = std::min(1e-2, grid.back() - grid.front());
    std::size_t steps = 0;
    on_sample(std::size_t{0}, y);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double target = grid[i];
        int rejected = 0;
        while (t < target) {
            const bool clipped = dt >= target - t;
            double step = clipped ? target - t : dt;
            const double t_before = t;
            const double min_step = 1e-14 * std::max(1.0, std::abs(t_before));
            // below this the state stops changing and the error estimate reads zero
            if (!clipped && step < min_step)
                throw StepSizeUnderflow("adaptive step underflow at t = " + std::to_string(t_before) +
                                        " (dt = " + std::to_string(step) + ")");
            if (++steps > opts.max_steps)
                throw StepSizeUnderflow("step budget of " + std::to_string(opts.max_steps) +
                                        " exhausted at t = " + std::to_string(t_before) +
                                        " (dt = " + std::to_string(step) + ")");
            const auto result = stepper.try_step(system, y, t, step);
            if (result == odeint::success) {
                if (clipped) t = target;
                // a clipped step may be a rounding-sized remainder; its suggestion says nothing about dt
                if (!clipped) dt = step;
                rejected = 0;
                on_step(y, t);
            } else {
                dt = step;
                if (++rejected > 200 || dt < min_step)
                    throw StepSizeUnderflow("adaptive step underflow at t = " + std::to_string(t_before) +
                                            " (dt = " + std::to_string(dt) + ")");
            }
        }
        on_sample(i, y);
    }
}

}  // namespace

std::size_t kernel_channel_count(Topology topology) noexcept {
    return topology == Topology::IndependentBaths ? 2 : 1;
}

KernelState initial_kernel_state(Topology topology) {
    KernelState s;
    s.z.assign(kernel_channel_count(topology), cplx{});
    return s;
}

double DiscreteBath::total_weight() const noexcept {
    double s = 0.0;
    for (double g : coupling) s += g * g;
    return s;
}

DiscreteBath make_discrete_bath(const SpectralParams& p, std::size_t modes, double window) {
    p.validate();
    if (modes < 1) throw DomainError("discrete bath needs at least one mode");
    if (window == 0.0) window = kDefaultWindowWidths * p.lambda;
    if (!(window > 0.0)) throw DomainError("bath window must be positive");

    DiscreteBath bath;
    bath.window = window;
    bath.spacing = 2.0 * window / static_cast<double>(modes);
    bath.detuning.resize(modes);
    bath.coupling.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        const double detuning = -window + (static_cast<double>(k) + 0.5) * bath.spacing;
        bath.detuning[k] = detuning;
        bath.coupling[k] = std::sqrt(lorentzian_density(p.omega0 + detuning, p) * bath.spacing);
    }
    return bath;
}

double lorentzian_mass_fraction(const SpectralParams& p, double window) {
    return 2.0 / std::numbers::pi * std::atan(window / p.lambda);
}

StateHistory kernel_history(const ModelConfig& cfg, std::span<const double> grid,
                            const IntegratorOptions& opts) {
    cfg.validate();
    const KernelSystem system(cfg);
    const auto init = initial_kernel_state(cfg.topology);
    State y{init.a, init.b};
    y.insert(y.end(), init.z.begin(), init.z.end());

    StateHistory h;
    h.kind = StateHistory::Kind::Kernel;
    h.topology = cfg.topology;
    h.times.assign(grid.begin(), grid.end());
    h.states.resize(grid.size());
    drive(
        system, y, grid, opts, [](const State&, double) {},
        [&](std::size_t i, const State& s) { h.states[i] = s; });
    return h;
}

AmplitudeTrajectory integrate_kernel(const ModelConfig& cfg, std::span<const double> grid,
                                     const IntegratorOptions& opts) {
    cfg.validate();
    const KernelSystem system(cfg);
    const auto init = initial_kernel_state(cfg.topology);
    State y{init.a, init.b};
    y.insert(y.end(), init.z.begin(), init.z.end());

    AmplitudeTrajectory traj;
    traj.times.assign(grid.begin(), grid.end());
    traj.a.resize(grid.size());
    traj.a_dot.resize(grid.size());
    State dy(y.size());
    drive(
        system, y, grid, opts, [](const State&, double) {},
        [&](std::size_t i, const State& s) {
            system(s, dy, grid[i]);
            traj.a[i] = s[0];
            traj.a_dot[i] = dy[0];
        });
    return traj;
}

IntegratorOptions discrete_bath_defaults() noexcept {
    IntegratorOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-12;
    return opts;
}

namespace {

template <class OnSample>
void run_discrete_bath(const ModelConfig& cfg, const DiscreteBath& bath, std::span<const double> grid,
                       const IntegratorOptions& opts, OnSample&& on_sample) {
    cfg.validate();
    if (bath.mode_count() < 1) throw DomainError("discrete bath needs at least one mode");
    const BathSystem system(cfg, bath);
    State y(system.dimension(), cplx{});
    y[0] = 1.0;
    auto norm_guard = [&](const State& s, double t) {
        const double drift = std::abs(squared_norm(s) - 1.0);
        if (drift > opts.norm_tolerance)
            throw NormDrift("state norm drifted by " + std::to_string(drift) + " at t = " +
                            std::to_string(t));
    };
    drive(system, y, grid, opts, norm_guard, [&](std::size_t i, const State& s) { on_sample(system, i, s); });
}

}  // namespace

StateHistory discrete_bath_history(const ModelConfig& cfg, const DiscreteBath& bath,
                                   std::span<const double> grid, const IntegratorOptions& opts) {
    StateHistory h;
    h.kind = StateHistory::Kind::DiscreteBath;
    h.topology = cfg.topology;
    h.times.assign(grid.begin(), grid.end());
    h.states.resize(grid.size());
    run_discrete_bath(cfg, bath, grid, opts,
                      [&](const BathSystem&, std::size_t i, const State& s) { h.states[i] = s; });
    return h;
}

AmplitudeTrajectory integrate_discrete_bath(const ModelConfig& cfg, const DiscreteBath& bath,
                                            std::span<const double> grid,
                                            const IntegratorOptions& opts) {
    AmplitudeTrajectory traj;
    traj.times.assign(grid.begin(), grid.end());
    traj.a.resize(grid.size());
    traj.a_dot.resize(grid.size());
    State dy;
    run_discrete_bath(cfg, bath, grid, opts,
                      [&](const BathSystem& system, std::size_t i, const State& s) {
                          dy.resize(s.size());
                          system(s, dy, grid[i]);
                          traj.a[i] = s[0];
                          traj.a_dot[i] = dy[0];
                      });
    return traj;
}

AmplitudeTrajectory trajectory_from_history(const StateHistory& history, const ModelConfig& cfg,
                                            const DiscreteBath* bath) {
    if (history.topology != cfg.topology) throw DomainError("history topology does not match config");
    AmplitudeTrajectory traj;
    traj.times = history.times;
    traj.a.resize(history.states.size());
    traj.a_dot.resize(history.states.size());
    State dy;
    for (std::size_t i = 0; i < history.states.size(); ++i) {
        const State& s = history.states[i];
        dy.resize(s.size());
        if (history.kind == StateHistory::Kind::Kernel) {
            KernelSystem{cfg}(s, dy, history.times[i]);
        } else {
            if (bath == nullptr) throw DomainError("discrete-bath history needs its bath");
            BathSystem{cfg, *bath}(s, dy, history.times[i]);
        }
        traj.a[i] = s[0];
        traj.a_dot[i] = dy[0];
    }
    return traj;
}

BalanceReport excitation_balance(const StateHistory& history) {
    BalanceReport r;
    const std::size_t n = history.states.size();
    r.retained.resize(n);
    r.absorbed.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = history.states[i];
        const double retained = std::norm(s[0]) + std::norm(s[1]);
        r.retained[i] = retained;
        if (history.kind == StateHistory::Kind::DiscreteBath) {
            double bath = 0.0;
            for (std::size_t k = 2; k < s.size(); ++k) bath += std::norm(s[k]);
            r.absorbed[i] = bath;
            r.max_deviation = std::max(r.max_deviation, std::abs(retained + bath - 1.0));
        } else {
            r.absorbed[i] = 1.0 - retained;
            r.max_deviation = std::max(r.max_deviation, retained - 1.0);
        }
        if (i > 0 && r.absorbed[i] < r.absorbed[i - 1] - 1e-12) r.absorbed_monotone = false;
    }
    return r;
}

double sup_distance(const AmplitudeTrajectory& x, const AmplitudeTrajectory& y) {
    if (x.size() != y.size()) throw DomainError("trajectories have different lengths");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.times[i] != y.times[i]) throw DomainError("trajectories sampled on different grids");
        worst = std::max(worst, std::abs(x.a[i] - y.a[i]));
    }
    return worst;
}

}  // namespace qsl
