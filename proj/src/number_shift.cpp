#include "ncbogo/number_shift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncbogo/errors.hpp"

namespace ncbogo {

namespace {

CondensateState solve_at(const SolverConfig& config, double n_particles, const ComplexField* guess) {
    StationaryOptions opt = config.options;
    if (guess) opt.initial_guess = *guess;
    return solve_stationary(config.grid, config.potential, config.u * n_particles, n_particles, opt);
}

ComplexField align_to(const ComplexField& reference, const ComplexField& f) {
    const cplx overlap = inner_product(reference, f);
    if (std::abs(overlap) == 0.0) return f;
    return (std::conj(overlap) / std::abs(overlap)) * f;
}

ComplexField central_difference(const SolverConfig& config, const CondensateState& centre, double delta) {
    if (!(delta > 0.0) || !(centre.n_particles - delta > 0.0))
        throw ConfigurationError("dxi_dN: need 0 < delta_N < N");
    const ComplexField plus = align_to(centre.xi, solve_at(config, centre.n_particles + delta, &centre.xi).xi);
    const ComplexField minus = align_to(centre.xi, solve_at(config, centre.n_particles - delta, &centre.xi).xi);
    return (1.0 / (2.0 * delta)) * (plus - minus);
}

} // namespace

DerivativeResult dxi_dN_checked(const SolverConfig& config, double n_particles, double delta_N) {
    if (!config.grid) throw ConfigurationError("dxi_dN: solver config has no grid");
    const CondensateState centre = solve_at(config, n_particles, nullptr);
    DerivativeResult out;
    const ComplexField full = central_difference(config, centre, delta_N);
    out.dxi = central_difference(config, centre, 0.5 * delta_N);
    out.delta_N = 0.5 * delta_N;
    out.richardson_change = norm(out.dxi - full);
    return out;
}

ComplexField dxi_dN(const SolverConfig& config, double n_particles, double delta_N) {
    return dxi_dN_checked(config, n_particles, delta_N).dxi;
}

PhaseFixResult phase_fix_and_r(const CondensateState& state, const PhononBasis& basis, const ComplexField& dxi) {
    require_same_grid(state.xi, dxi);
    if (!basis.condensate.grid || !basis.condensate.grid->same_as(*state.xi.grid))
        throw DimensionError("phase_fix_and_r: basis lives on a different grid");
    const double n = state.n_particles;
    PhaseFixResult out;
    const cplx gauge = inner_product(state.xi, dxi);
    // Coefficient of xi* in dxi* is conj(gauge) = i r0 / N.
    out.r0_raw = (cplx(0.0, -1.0) * n * std::conj(gauge)).real();
    out.re_overlap = std::abs(gauge.real());
    out.fixed_dxi = dxi - gauge * state.xi;
    out.r0 = (cplx(0.0, -1.0) * n * std::conj(inner_product(state.xi, out.fixed_dxi))).real();

    out.r.resize(basis.size());
    ComplexField outside = out.fixed_dxi;
    for (int k = 0; k < basis.size(); ++k) {
        out.r[k] = n * inner_product(out.fixed_dxi, basis.modes[k]);
        outside -= inner_product(basis.modes[k], out.fixed_dxi) * basis.modes[k];
    }
    // dxi/dN is naturally O(1/N); that floor keeps pure solver noise from
    // counting as a truncation failure when the true derivative vanishes.
    const double scale = std::max(norm(dxi), 1.0 / n);
    out.outside_fraction = scale > 0.0 ? norm(outside) / scale : 0.0;
    if (out.outside_fraction > 1e-6)
        throw TruncationError("phase_fix_and_r: " + std::to_string(out.outside_fraction) +
                              " of dxi/dN lies outside the phonon basis; increase K");
    return out;
}

std::pair<std::vector<ComplexField>, std::vector<ComplexField>>
modified_amplitudes(const QuasiparticleSpectrum& spectrum, const CondensateState& state, const Eigen::VectorXcd& r) {
    const int k = spectrum.size();
    if (r.size() != spectrum.c_matrix.rows())
        throw DimensionError("modified_amplitudes: r has " + std::to_string(r.size()) + " entries, basis has " +
                             std::to_string(spectrum.c_matrix.rows()));
    if (static_cast<int>(spectrum.p_waves.size()) != k)
        throw DimensionError("modified_amplitudes: spectrum carries no quasiparticle wavefunctions");
    const Eigen::VectorXcd rc = spectrum.c_matrix.transpose() * r;
    const Eigen::VectorXcd rs = spectrum.s_matrix.transpose() * r;
    std::vector<ComplexField> f, g;
    f.reserve(k);
    g.reserve(k);
    for (int m = 0; m < k; ++m) {
        require_same_grid(spectrum.p_waves[m], state.xi);
        f.push_back(spectrum.p_waves[m] - rc[m] * state.xi);
        g.push_back(spectrum.q_waves[m] - rs[m] * state.xi);
    }
    return {std::move(f), std::move(g)};
}

NumberShiftReport compute_number_shift(const SolverConfig& config, const CondensateState& state,
                                       const PhononBasis& basis, const QuasiparticleSpectrum& spectrum,
                                       double delta_N) {
    const DerivativeResult d = dxi_dN_checked(config, state.n_particles, delta_N);
    // The derivative was taken around a fresh solve; align it with `state`.
    const CondensateState centre = solve_at(config, state.n_particles, &state.xi);
    const cplx phase = inner_product(centre.xi, state.xi);
    const ComplexField dxi = std::abs(phase) > 0.0 ? (phase / std::abs(phase)) * d.dxi : d.dxi;

    const PhaseFixResult pf = phase_fix_and_r(state, basis, dxi);
    NumberShiftReport rep;
    rep.n_particles = state.n_particles;
    rep.dxi_dN = pf.fixed_dxi;
    rep.r0 = pf.r0;
    rep.r0_raw = pf.r0_raw;
    rep.re_overlap = pf.re_overlap;
    rep.r = pf.r;
    auto [f, g] = modified_amplitudes(spectrum, state, pf.r);
    rep.f_waves = std::move(f);
    rep.g_waves = std::move(g);
    rep.delta_N = d.delta_N;
    rep.richardson_change = d.richardson_change;
    rep.condensate_amplitude = std::sqrt(state.n_particles + 1.0);
    return rep;
}

NumberShiftReport compute_number_shift(const SolverConfig& config, double n_particles, int K, double delta_N) {
    const CondensateState state = solve_at(config, n_particles, nullptr);
    const PhononBasis basis = build_phonon_basis(state, K);
    const QuasiparticleSpectrum sp = diagonalize(assemble(state, basis), basis);
    return compute_number_shift(config, state, basis, sp, delta_N);
}

MatrixElements matrix_elements(const CondensateState& state, const NumberShiftReport& report) {
    MatrixElements me;
    me.ground = report.condensate_amplitude * state.xi;
    const double channel = std::sqrt((state.n_particles + 1.0) / state.n_particles);
    for (const auto& f : report.f_waves) me.absorb.push_back(channel * f);
    for (const auto& g : report.g_waves) me.emit.push_back(channel * g);
    return me;
}

} // namespace ncbogo
