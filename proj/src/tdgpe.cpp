#include "ncbogo/tdgpe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "ncbogo/errors.hpp"

namespace ncbogo {

PotentialSchedule PotentialSchedule::none() { return {}; }

PotentialSchedule PotentialSchedule::harmonic(double omega) {
    PotentialSchedule s;
    s.kind = Kind::harmonic;
    s.omega = omega;
    return s;
}

PotentialSchedule PotentialSchedule::quench(double omega_from, double omega_to, double t_switch) {
    PotentialSchedule s;
    s.kind = Kind::quench;
    s.omega = omega_from;
    s.omega_to = omega_to;
    s.t_switch = t_switch;
    return s;
}

double PotentialSchedule::omega_at(double t) const {
    switch (kind) {
    case Kind::none: return 0.0;
    case Kind::harmonic: return omega;
    case Kind::quench: return t < t_switch ? omega : omega_to;
    }
    return 0.0;
}

ComplexField PotentialSchedule::at(const GridPtr& grid, double t) const {
    if (kind == Kind::none) return zero_potential(grid);
    return harmonic_potential(grid, omega_at(t));
}

bool PotentialSchedule::is_static() const { return kind != Kind::quench || omega == omega_to; }

std::string PotentialSchedule::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::none: os << "none"; break;
    case Kind::harmonic: os << "harmonic(omega=" << omega << ")"; break;
    case Kind::quench:
        os << "quench(omega=" << omega << " -> " << omega_to << " at t=" << t_switch << ")";
        break;
    }
    return os.str();
}

namespace {

constexpr std::array<std::array<double, 5>, 5> kStencil{{
    {-25.0, 48.0, -36.0, 16.0, -3.0},
    {-3.0, -10.0, 18.0, -6.0, 1.0},
    {1.0, -8.0, 0.0, 8.0, -1.0},
    {-1.0, 6.0, -18.0, 10.0, 3.0},
    {3.0, -16.0, 36.0, -48.0, 25.0},
}};

// Potential arrays before and after the switch; step n -> n+1 uses `after`
// iff n >= switch_step.
struct PotentialTable {
    ComplexField before;
    ComplexField after;
    int switch_step = -1;

    const ComplexField& for_point(int n) const { return (switch_step >= 0 && n >= switch_step) ? after : before; }
};

PotentialTable make_table(const GridPtr& grid, const PotentialSchedule& s, double dt, int n_steps) {
    PotentialTable tab;
    tab.before = s.at(grid, 0.0);
    tab.after = tab.before;
    if (s.kind == PotentialSchedule::Kind::quench) {
        if (s.t_switch <= 0.0) {
            tab.before = harmonic_potential(grid, s.omega_to);
            tab.after = tab.before;
        } else {
            const double steps = s.t_switch / dt;
            const long sw = std::lround(steps);
            if (std::abs(steps - static_cast<double>(sw)) > 1e-9 * std::max(1.0, steps))
                throw ConfigurationError("quench t_switch must be a multiple of dt");
            tab.after = harmonic_potential(grid, s.omega_to);
            if (sw <= n_steps) tab.switch_step = static_cast<int>(sw);
        }
    }
    return tab;
}

class SplitStepper {
public:
    SplitStepper(GridPtr grid, double u_evolve, int order) : grid_(std::move(grid)), u_(u_evolve) {
        if (order == 2) {
            weights_ = {1.0};
        } else if (order == 4) {
            const double cbrt2 = std::cbrt(2.0);
            const double w1 = 1.0 / (2.0 - cbrt2);
            weights_ = {w1, -cbrt2 * w1, w1};
        } else {
            throw ConfigurationError("integrator order must be 2 or 4");
        }
    }

    void step(Eigen::VectorXcd& psi, const Eigen::VectorXd& v, double dt) {
        for (double w : weights_) strang(psi, v, w * dt);
    }

private:
    void strang(Eigen::VectorXcd& psi, const Eigen::VectorXd& v, double h) {
        const Eigen::VectorXcd& kin = kinetic_phase(h);
        potential_half(psi, v, h);
        psi = grid_->spectral_multiply(psi, kin);
        potential_half(psi, v, h);
    }

    void potential_half(Eigen::VectorXcd& psi, const Eigen::VectorXd& v, double h) const {
        for (int j = 0; j < psi.size(); ++j) {
            const double phase = -0.5 * h * (v[j] + u_ * std::norm(psi[j]));
            psi[j] *= cplx(std::cos(phase), std::sin(phase));
        }
    }

    const Eigen::VectorXcd& kinetic_phase(double h) {
        auto it = kinetic_.find(h);
        if (it != kinetic_.end()) return it->second;
        const Eigen::VectorXd& k = grid_->wavenumbers();
        Eigen::VectorXcd m(k.size());
        for (int j = 0; j < k.size(); ++j) {
            const double phase = -0.5 * h * k[j] * k[j];
            m[j] = cplx(std::cos(phase), std::sin(phase));
        }
        return kinetic_.emplace(h, std::move(m)).first->second;
    }

    GridPtr grid_;
    double u_;
    std::vector<double> weights_;
    std::map<double, Eigen::VectorXcd> kinetic_;
};

int count_steps(double t_final, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigurationError("t_final must be positive");
    const double steps = t_final / dt;
    const long n = std::lround(steps);
    if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps))
        throw ConfigurationError("t_final must be a multiple of dt");
    if (n < 4) throw ConfigurationError("need at least 4 time steps");
    if (n > 100000000L) throw ResourceError("too many time steps");
    return static_cast<int>(n);
}

int window_start(int n, int total, int sw) {
    int s = n - 2;
    if (sw > 0 && sw < total) {
        if (n >= sw)
            s = std::max(s, sw);
        else
            s = std::min(s, sw - 4);
    }
    return std::clamp(s, 0, total - 4);
}

double center_of_mass(const ComplexField& xi) {
    const Eigen::VectorXd& x = xi.grid->points();
    double c = 0.0;
    for (int j = 0; j < xi.size(); ++j) c += x[j] * std::norm(xi.values[j]);
    return c * xi.grid->spacing();
}

// Drives the stepper and hands every state to `visit(index, values)`.
template <class Visit>
void run_steps(const ComplexField& initial, double u_evolve, double dt, int n_steps, int order,
               const PotentialTable& table, Visit&& visit) {
    SplitStepper stepper(initial.grid, u_evolve, order);
    const Eigen::VectorXd v_before = table.before.values.real();
    const Eigen::VectorXd v_after = table.after.values.real();
    Eigen::VectorXcd psi = initial.values;
    visit(0, psi);
    for (int n = 0; n < n_steps; ++n) {
        const bool after = table.switch_step >= 0 && n >= table.switch_step;
        stepper.step(psi, after ? v_after : v_before, dt);
        visit(n + 1, psi);
    }
}

bool is_snapshot(int n, int n_steps, int stride) { return n % stride == 0 || n == n_steps; }

} // namespace

ComplexField Trajectory::potential_at(int i) const {
    const GridPtr& grid = xi_t.at(i).grid;
    const int n = step_index.at(i);
    if (schedule.kind == PotentialSchedule::Kind::quench) {
        if (schedule.t_switch <= 0.0 || (switch_step >= 0 && n >= switch_step))
            return harmonic_potential(grid, schedule.omega_to);
        return harmonic_potential(grid, schedule.omega);
    }
    return schedule.at(grid, 0.0);
}

double Trajectory::max_norm_drift() const {
    double d = 0.0;
    for (double v : norm_t) d = std::max(d, std::abs(v - 1.0));
    return d;
}

double Trajectory::max_h1_drift() const {
    double d = 0.0;
    for (double v : h1_t) d = std::max(d, std::abs(v - h1_t.front()));
    return d;
}

Trajectory propagate(const CondensateState& initial, double t_final, double dt, const PotentialSchedule& schedule,
                     const PropagateOptions& options) {
    return propagate(initial.xi, initial.u_tilde, t_final, dt, schedule, options);
}

Trajectory propagate(const ComplexField& initial, double u_tilde, double t_final, double dt,
                     const PotentialSchedule& schedule, const PropagateOptions& options) {
    if (!initial.grid) throw DimensionError("propagate: initial field has no grid");
    if (options.stride < 1) throw ConfigurationError("snapshot stride must be >= 1");
    if (u_tilde < 0.0) throw ConfigurationError("u_tilde must be nonnegative");
    if (std::abs(norm(initial) - 1.0) > 1e-8) throw ConfigurationError("propagate: initial state is not normalized");
    const int n_steps = count_steps(t_final, dt);
    const PotentialTable table = make_table(initial.grid, schedule, dt, n_steps);

    Trajectory traj;
    traj.u_tilde = u_tilde;
    traj.dt = dt;
    traj.n_steps = n_steps;
    traj.switch_step = table.switch_step;
    traj.schedule = schedule;
    traj.options = options;

    const GridPtr grid = initial.grid;
    std::deque<std::pair<int, Eigen::VectorXcd>> recent;
    std::deque<int> pending;

    auto finish_snapshot = [&](int n) {
        const int s = window_start(n, n_steps, table.switch_step);
        const auto& w = kStencil[n - s];
        Eigen::VectorXcd d = Eigen::VectorXcd::Zero(grid->n_points());
        const Eigen::VectorXcd* centre = nullptr;
        for (const auto& [idx, vals] : recent) {
            if (idx >= s && idx <= s + 4) d += w[idx - s] * vals;
            if (idx == n) centre = &vals;
        }
        d /= 12.0 * dt;
        ComplexField xi(grid, *centre);
        ComplexField xi_dot(grid, std::move(d));
        const ComplexField& pot = table.for_point(n);
        traj.times.push_back(n * dt);
        traj.step_index.push_back(n);
        const MuPair mu = mu_of_t(xi, xi_dot, pot, u_tilde);
        traj.mu_t.push_back(mu.functional);
        traj.mu_dyn_t.push_back(mu.dynamic);
        traj.h1_t.push_back(energy_functional_h1(xi, pot, u_tilde));
        traj.norm_t.push_back(norm(xi));
        traj.center_t.push_back(center_of_mass(xi));
        traj.xi_t.push_back(std::move(xi));
        traj.xi_dot_t.push_back(std::move(xi_dot));
    };

    const double u_evolve = options.evolve_linear ? 0.0 : u_tilde;
    run_steps(initial, u_evolve, dt, n_steps, options.order, table, [&](int n, const Eigen::VectorXcd& psi) {
        const double nrm = std::sqrt(psi.squaredNorm() * grid->spacing());
        if (!(std::abs(nrm - 1.0) <= 1e-6))
            throw IntegratorError("norm drifted by " + std::to_string(std::abs(nrm - 1.0)) + " at t = " +
                                  std::to_string(n * dt) + "; reduce dt");
        recent.emplace_back(n, psi);
        if (recent.size() > 9) recent.pop_front();
        if (is_snapshot(n, n_steps, options.stride)) pending.push_back(n);
        while (!pending.empty() && window_start(pending.front(), n_steps, table.switch_step) + 4 <= n) {
            finish_snapshot(pending.front());
            pending.pop_front();
        }
    });
    while (!pending.empty()) {
        finish_snapshot(pending.front());
        pending.pop_front();
    }
    return traj;
}

namespace {

// Plane rotation taking a -> b (both unit, <a, b> real positive) on span{a, b},
// identity on the complement.
struct PlaneRotation {
    Eigen::VectorXcd e1, e2;
    double c = 1.0, s = 0.0;
    double dx = 0.0;

    PlaneRotation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double spacing) : dx(spacing) {
        e1 = a / std::sqrt(a.squaredNorm() * dx);
        Eigen::VectorXcd bn = b / std::sqrt(b.squaredNorm() * dx);
        c = std::clamp((e1.dot(bn) * dx).real(), -1.0, 1.0);
        Eigen::VectorXcd w = bn - c * e1;
        s = std::sqrt(w.squaredNorm() * dx);
        if (s > 1e-15) e2 = w / s;
    }

    void apply(Eigen::VectorXcd& x) const {
        if (!(s > 1e-15)) return;
        const cplx a1 = e1.dot(x) * dx;
        const cplx a2 = e2.dot(x) * dx;
        x += ((c - 1.0) * a1 - s * a2) * e1 + ((c - 1.0) * a2 + s * a1) * e2;
    }
};

void midpoint_modes(std::vector<Eigen::VectorXcd>& modes, const Eigen::VectorXcd& xi0, const Eigen::VectorXcd& xi1,
                    double dt, double dx) {
    const Eigen::VectorXcd xm = 0.5 * (xi0 + xi1);
    const Eigen::VectorXcd xd = (xi1 - xi0) / dt;
    const cplx a = xm.dot(xd) * dx;
    auto rhs = [&](const Eigen::VectorXcd& f) -> Eigen::VectorXcd {
        return a * f - (xd.dot(f) * dx) * xm;
    };
    for (auto& m : modes) {
        const Eigen::VectorXcd half = m + 0.5 * dt * rhs(m);
        m += dt * rhs(half);
    }
}

} // namespace

Trajectory propagate_modes(Trajectory traj, const PhononBasis& initial_basis, ModeScheme scheme) {
    if (traj.xi_t.empty()) throw ConfigurationError("propagate_modes: empty trajectory");
    const ComplexField& xi0 = traj.xi_t.front();
    if (!initial_basis.condensate.grid || !initial_basis.condensate.grid->same_as(*xi0.grid))
        throw DimensionError("propagate_modes: basis lives on a different grid");
    if (initial_basis.gram_deviation() > 1e-8)
        throw ConfigurationError("propagate_modes: initial basis is not orthonormal");
    for (const auto& m : initial_basis.modes)
        if (std::abs(inner_product(xi0, m)) > 1e-8)
            throw ConfigurationError("propagate_modes: initial basis is not orthogonal to xi(0)");

    const GridPtr grid = xi0.grid;
    const double dx = grid->spacing();
    const double dt = traj.dt;
    const int n_steps = traj.n_steps;
    const PotentialTable table = make_table(grid, traj.schedule, dt, n_steps);
    const double u_evolve = traj.options.evolve_linear ? 0.0 : traj.u_tilde;

    std::vector<Eigen::VectorXcd> modes;
    for (const auto& m : initial_basis.modes) modes.push_back(m.values);

    traj.modes_t.clear();
    traj.gram_deviation_t.clear();
    traj.condensate_overlap_t.clear();
    std::size_t next = 0;
    Eigen::VectorXcd prev;

    run_steps(xi0, u_evolve, dt, n_steps, traj.options.order, table, [&](int n, const Eigen::VectorXcd& psi) {
        if (n > 0) {
            if (scheme == ModeScheme::transport) {
                const cplx ov = prev.dot(psi) * dx;
                const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
                const PlaneRotation rot(prev, std::conj(phase) * psi, dx);
                for (auto& m : modes) {
                    rot.apply(m);
                    m *= phase;
                }
            } else {
                midpoint_modes(modes, prev, psi, dt, dx);
            }
        }
        prev = psi;
        if (next < traj.step_index.size() && traj.step_index[next] == n) {
            PhononBasis b;
            b.condensate = ComplexField(grid, psi);
            for (const auto& m : modes) b.modes.emplace_back(grid, m);
            const double gram = b.gram_deviation();
            const double overlap = b.condensate_overlap();
            if (!(gram <= 1e-6) || !(overlap <= 1e-6))
                throw IntegratorError("mode orthonormality drifted (Gram " + std::to_string(gram) + ", overlap " +
                                      std::to_string(overlap) + ") at t = " + std::to_string(n * dt));
            traj.gram_deviation_t.push_back(gram);
            traj.condensate_overlap_t.push_back(overlap);
            traj.modes_t.push_back(std::move(b));
            ++next;
        }
    });
    return traj;
}

double mu_of_t(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    return chemical_potential(xi, potential, u_tilde);
}

MuPair mu_of_t(const ComplexField& xi, const ComplexField& xi_dot, const ComplexField& potential, double u_tilde) {
    require_same_grid(xi, xi_dot);
    MuPair p;
    p.functional = chemical_potential(xi, potential, u_tilde);
    p.dynamic = inner_product(xi, cplx(0.0, 1.0) * xi_dot).real();
    return p;
}

std::vector<QuadraticHamiltonian> h3_of_t(Trajectory& traj, double u_tilde) {
    if (traj.modes_t.size() != traj.xi_t.size())
        throw ConfigurationError("h3_of_t: trajectory has no transported modes; call propagate_modes first");
    std::vector<QuadraticHamiltonian> out;
    out.reserve(traj.xi_t.size());
    for (int i = 0; i < traj.size(); ++i) {
        const ComplexField pot = traj.potential_at(i);
        const double mu = mu_of_t(traj.xi_t[i], pot, u_tilde);
        out.push_back(assemble(traj.xi_t[i], pot, u_tilde, mu, traj.modes_t[i]));
    }
    traj.h3_t = out;
    return out;
}

std::vector<HrDiagnostic> hr_diagnostic(const Trajectory& traj) {
    if (traj.modes_t.size() != traj.xi_t.size())
        throw ConfigurationError("hr_diagnostic: trajectory has no transported modes; call propagate_modes first");
    std::vector<HrDiagnostic> out;
    out.reserve(traj.xi_t.size());
    for (int i = 0; i < traj.size(); ++i) {
        const ComplexField pot = traj.potential_at(i);
        const ComplexField hxi = gp_operator_apply(traj.xi_t[i], pot, traj.u_tilde);
        const ComplexField ixdot = cplx(0.0, 1.0) * traj.xi_dot_t[i];
        const PhononBasis& b = traj.modes_t[i];
        HrDiagnostic d;
        d.time = traj.times[i];
        d.h2_vector.resize(b.size());
        d.hr_vector.resize(b.size());
        for (int k = 0; k < b.size(); ++k) {
            d.h2_vector[k] = inner_product(b.modes[k], hxi);
            d.hr_vector[k] = -inner_product(b.modes[k], ixdot);
        }
        d.mismatch = (d.h2_vector + d.hr_vector).norm();
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace ncbogo
