#include "ncbogo/gpe.hpp"

#include <cmath>
#include <string>

#include "ncbogo/bdg.hpp"
#include "ncbogo/errors.hpp"

namespace ncbogo {

namespace {

Eigen::VectorXd real_potential(const ComplexField& potential) {
    if (potential.values.imag().cwiseAbs().maxCoeff() > 0.0)
        throw ConfigurationError("potential must be real");
    return potential.values.real();
}

void check_inputs(const GridPtr& grid, const ComplexField& potential, double u_tilde) {
    if (!grid) throw DimensionError("solve_stationary: null grid");
    if (!potential.grid || !potential.grid->same_as(*grid))
        throw DimensionError("potential is not sampled on the solver grid");
    if (u_tilde < 0.0)
        throw ConfigurationError("attractive interaction (u_tilde < 0) is not supported");
    if (!std::isfinite(u_tilde)) throw ConfigurationError("u_tilde must be finite");
}

// Real, with nonnegative sum.
ComplexField fix_gauge(const ComplexField& xi) {
    const cplx s = xi.values.sum();
    cplx phase = std::abs(s) > 0.0 ? std::conj(s) / std::abs(s) : cplx(1.0);
    ComplexField out = phase * xi;
    return out;
}

ComplexField imaginary_time_step(const ComplexField& psi, const Eigen::VectorXd& v, double u_tilde,
                                 const Eigen::VectorXd& kinetic_decay, double dt) {
    Eigen::VectorXcd w = psi.values;
    auto half_potential = [&](Eigen::VectorXcd& f) {
        for (int j = 0; j < f.size(); ++j)
            f[j] *= std::exp(-0.5 * dt * (v[j] + u_tilde * std::norm(f[j])));
    };
    half_potential(w);
    w = psi.grid->spectral_multiply(w, kinetic_decay);
    half_potential(w);
    return normalized(ComplexField(psi.grid, std::move(w)));
}

double residual_norm(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    const double mu = chemical_potential(xi, potential, u_tilde);
    ComplexField r = gp_operator_apply(xi, potential, u_tilde) - mu * xi;
    return norm(r);
}

// Newton iteration on the real system F(xi, mu) = ((H0 + u|xi|^2 - mu) xi, |xi|^2 - 1).
bool newton_polish(ComplexField& xi, const Eigen::VectorXd& v, double u_tilde, double tol,
                   int max_iters, const ComplexField& potential, int& iterations) {
    const auto& grid = *xi.grid;
    const int n = grid.n_points();
    const double dx = grid.spacing();
    const Eigen::MatrixXd& t = grid.kinetic_matrix();

    Eigen::VectorXd y = xi.values.real();
    double mu = chemical_potential(xi, potential, u_tilde);
    double res = residual_norm(xi, potential, u_tilde);

    for (int it = 0; it < max_iters && res > tol; ++it) {
        ++iterations;
        Eigen::VectorXd f1 = t * y + (v.array() + u_tilde * y.array().square() - mu).matrix().cwiseProduct(y);
        const double f2 = y.squaredNorm() * dx - 1.0;

        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
        jac.topLeftCorner(n, n) = t;
        jac.topLeftCorner(n, n).diagonal() += (v.array() + 3.0 * u_tilde * y.array().square() - mu).matrix();
        jac.block(0, n, n, 1) = -y;
        jac.block(n, 0, 1, n) = 2.0 * dx * y.transpose();

        Eigen::VectorXd rhs(n + 1);
        rhs.head(n) = -f1;
        rhs[n] = -f2;
        const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
        if (!delta.allFinite()) return false;

        double step = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 8; ++ls) {
            Eigen::VectorXd y_try = y + step * delta.head(n);
            ComplexField trial(xi.grid, y_try.cast<cplx>());
            trial = normalized(trial);
            const double r_try = residual_norm(trial, potential, u_tilde);
            if (r_try < res) {
                y = trial.values.real();
                res = r_try;
                mu = chemical_potential(trial, potential, u_tilde);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    xi = ComplexField(xi.grid, y.cast<cplx>());
    return res <= tol;
}

} // namespace

ComplexField harmonic_potential(GridPtr grid, double omega) {
    return ComplexField::from_function(grid, [omega](double x) { return cplx(0.5 * omega * omega * x * x); });
}

ComplexField zero_potential(GridPtr grid) { return ComplexField(grid); }

ComplexField gp_operator_apply(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    require_same_grid(xi, potential);
    ComplexField out = apply_kinetic(xi);
    for (int j = 0; j < xi.size(); ++j)
        out.values[j] += (potential.values[j].real() + u_tilde * std::norm(xi.values[j])) * xi.values[j];
    return out;
}

EnergyParts energy_parts(const ComplexField& xi, const ComplexField& potential) {
    require_same_grid(xi, potential);
    const double dx = xi.grid->spacing();
    EnergyParts e;
    e.kinetic = inner_product(xi, apply_kinetic(xi)).real();
    for (int j = 0; j < xi.size(); ++j) {
        const double rho = std::norm(xi.values[j]);
        e.potential += potential.values[j].real() * rho;
        e.quartic += rho * rho;
    }
    e.potential *= dx;
    e.quartic *= dx;
    return e;
}

double chemical_potential(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    const auto e = energy_parts(xi, potential);
    return e.kinetic + e.potential + u_tilde * e.quartic;
}

double chemical_potential(const CondensateState& s) { return chemical_potential(s.xi, s.potential, s.u_tilde); }

double energy_functional_h1(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    const auto e = energy_parts(xi, potential);
    return e.kinetic + e.potential + 0.5 * u_tilde * e.quartic;
}

double energy_functional_h1(const CondensateState& s) {
    return energy_functional_h1(s.xi, s.potential, s.u_tilde);
}

double gpe_residual(const CondensateState& s) { return residual_norm(s.xi, s.potential, s.u_tilde); }

double virial_defect(const ComplexField& xi, const ComplexField& potential, double u_tilde) {
    const auto e = energy_parts(xi, potential);
    return 2.0 * e.kinetic - 2.0 * e.potential + 0.5 * u_tilde * e.quartic;
}

CondensateState make_state(const ComplexField& xi, const ComplexField& potential, double u_tilde,
                           double n_particles) {
    require_same_grid(xi, potential);
    CondensateState s;
    s.xi = xi;
    s.potential = potential;
    s.u_tilde = u_tilde;
    s.n_particles = n_particles;
    s.mu = chemical_potential(s);
    s.residual = gpe_residual(s);
    return s;
}

CondensateState solve_stationary(GridPtr grid, const ComplexField& potential, double u_tilde,
                                 double n_particles, double tol, int max_iters) {
    StationaryOptions opt;
    opt.tol = tol;
    opt.max_iters = max_iters;
    return solve_stationary(std::move(grid), potential, u_tilde, n_particles, opt);
}

CondensateState solve_stationary(GridPtr grid, const ComplexField& potential, double u_tilde,
                                 double n_particles, const StationaryOptions& opt,
                                 StationaryReport* report) {
    check_inputs(grid, potential, u_tilde);
    if (!(opt.tol > 0.0)) throw ConfigurationError("solver tolerance must be positive");
    if (!(n_particles > 0.0)) throw ConfigurationError("n_particles must be positive");
    const Eigen::VectorXd v = real_potential(potential);

    ComplexField psi(grid);
    if (opt.initial_guess) {
        require_same_grid(*opt.initial_guess, psi);
        psi = normalized(*opt.initial_guess);
    } else {
        const double vmin = v.minCoeff();
        for (int j = 0; j < grid->n_points(); ++j) psi.values[j] = std::exp(-0.5 * (v[j] - vmin));
        psi = normalized(psi);
    }

    StationaryReport local;
    StationaryReport& rep = report ? *report : local;
    rep = StationaryReport{};

    double dt = opt.initial_step;
    double energy = energy_functional_h1(psi, potential, u_tilde);
    rep.energy_history.push_back(energy);
    double res = residual_norm(psi, potential, u_tilde);

    const double switch_res = opt.newton_polish ? std::max(opt.newton_switch_residual, opt.tol) : opt.tol;
    int iter = 0;
    double checkpoint_energy = energy;
    bool stalled = false;
    while (!stalled && res > switch_res && iter < opt.max_iters && dt > 1e-14) {
        const Eigen::VectorXd decay = (-0.5 * dt * grid->wavenumbers().array().square()).exp();
        // Re-use the decay factors until the step changes.
        const double dt_now = dt;
        while (iter < opt.max_iters && dt == dt_now) {
            ++iter;
            ComplexField trial = imaginary_time_step(psi, v, u_tilde, decay, dt);
            const double e_trial = energy_functional_h1(trial, potential, u_tilde);
            if (e_trial > energy + 1e-14 * std::max(1.0, std::abs(energy))) {
                dt *= 0.5;
                ++rep.rejected_steps;
                break;
            }
            psi = std::move(trial);
            energy = e_trial;
            rep.energy_history.push_back(energy);
            ++rep.imaginary_time_steps;
            if (iter % 10 == 0) {
                res = residual_norm(psi, potential, u_tilde);
                if (res <= switch_res) break;
                // The split-step fixed point sits O(dt) away from the true
                // ground state; once descent stalls, either hand over to Newton
                // or refine the step.
                const double drop = checkpoint_energy - energy;
                checkpoint_energy = energy;
                if (drop < 1e-13 * std::max(1.0, std::abs(energy))) {
                    if (opt.newton_polish) {
                        stalled = true;
                    } else {
                        dt *= 0.5;
                    }
                    break;
                }
            }
        }
    }
    rep.final_step = dt;
    res = residual_norm(psi, potential, u_tilde);

    if (opt.newton_polish && res > opt.tol) {
        psi = fix_gauge(psi);
        newton_polish(psi, v, u_tilde, opt.tol, opt.max_newton_iters, potential, rep.newton_iterations);
    }

    CondensateState state = make_state(normalized(fix_gauge(psi)), potential, u_tilde, n_particles);
    if (!(state.residual <= opt.tol))
        throw ConvergenceError("stationary solver did not converge: residual " +
                                   std::to_string(state.residual) + " > tol " + std::to_string(opt.tol),
                               state.residual);
    return state;
}

Eigen::VectorXcd h2_coefficients(const CondensateState& state, const PhononBasis& basis) {
    if (!basis.condensate.grid || !basis.condensate.grid->same_as(*state.xi.grid))
        throw DimensionError("phonon basis and state live on different grids");
    const ComplexField hxi = gp_operator_apply(state.xi, state.potential, state.u_tilde);
    Eigen::VectorXcd v(basis.size());
    for (int k = 0; k < basis.size(); ++k) v[k] = inner_product(basis.modes[k], hxi);
    return v;
}

} // namespace ncbogo
