#include "ncbogo/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "ncbogo/bdg.hpp"
#include "ncbogo/errors.hpp"
#include "ncbogo/gpe.hpp"
#include "ncbogo/homogeneous.hpp"
#include "ncbogo/number_shift.hpp"
#include "ncbogo/tdgpe.hpp"

namespace ncbogo {

namespace {

namespace fs = std::filesystem;
using boost::property_tree::ptree;
using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

const std::map<std::string, Scenario>& scenario_names() {
    static const std::map<std::string, Scenario> names{
        {"stationary", Scenario::stationary},
        {"spectrum", Scenario::spectrum},
        {"dynamics", Scenario::dynamics},
        {"number-shift", Scenario::number_shift},
        {"homogeneous-check", Scenario::homogeneous_check},
        {"fock-oracle", Scenario::fock_oracle},
    };
    return names;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"grid", {"n_points", "length", "boundary", "origin"}},
        {"physics", {"u_tilde", "u", "n_particles", "potential", "omega", "omega_to", "t_switch"}},
        {"numerics",
         {"tol", "dt", "t_final", "K", "delta_N", "n_max_excited", "fock_n_values", "order", "evolution",
          "k_mode"}},
        {"output", {"directory", "stride", "formats"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigurationError(key + ": expected a finite number, got '" + s + "'");
    return v;
}

int to_int(const std::string& key, const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < -2147483647LL || v > 2147483647LL)
        throw ConfigurationError(key + ": expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}

class Section {
public:
    Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
    std::string full(const std::string& key) const { return name_ + "." + key; }

    std::string raw(const std::string& key) const {
        if (!has(key)) throw ConfigurationError("missing required key " + full(key));
        return trim(tree_->find(key)->second.data());
    }
    double number(const std::string& key) const { return to_double(full(key), raw(key)); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
    int integer(const std::string& key) const { return to_int(full(key), raw(key)); }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }
    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? raw(key) : fallback;
    }

private:
    std::string name_;
    const ptree* tree_;
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigurationError(key + ": " + what);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string formats_string(const ScenarioConfig::OutputSection& o) {
    if (o.csv && o.json) return "csv,json";
    return o.csv ? "csv" : "json";
}

bool is_multiple(double t, double dt) {
    const double steps = t / dt;
    return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps);
}

void check_scenario_constraints(const ScenarioConfig& c) {
    const auto& g = c.grid;
    const auto& p = c.physics;
    const auto& n = c.numerics;
    switch (c.scenario) {
    case Scenario::homogeneous_check:
        require(g.boundary == Boundary::periodic, "grid.boundary", "homogeneous-check needs a periodic grid");
        require(p.potential == "none", "physics.potential", "homogeneous-check needs potential = none");
        require(p.u_tilde > 0.0, "physics.u_tilde", "homogeneous-check needs a repulsive interaction");
        require(n.K >= 4, "numerics.K", "homogeneous-check needs K >= 4");
        break;
    case Scenario::dynamics:
        require(is_multiple(n.t_final, n.dt), "numerics.t_final", "must be a multiple of numerics.dt");
        require(std::llround(n.t_final / n.dt) >= 4, "numerics.t_final", "need at least 4 time steps");
        require(std::llround(n.t_final / n.dt) <= 100000000LL, "numerics.dt", "too many time steps");
        if (p.potential == "quench")
            require(is_multiple(p.t_switch, n.dt) || p.t_switch == 0.0, "physics.t_switch",
                    "must be a multiple of numerics.dt");
        break;
    case Scenario::number_shift:
        require(n.delta_N < p.n_particles, "numerics.delta_N", "must be smaller than physics.n_particles");
        break;
    case Scenario::fock_oracle:
        require(n.k_mode != 0.0, "numerics.k_mode", "must be nonzero");
        break;
    default: break;
    }
}

json config_json(const ScenarioConfig& c) {
    json j;
    j["scenario"] = to_string(c.scenario);
    j["grid"] = {{"n_points", c.grid.n_points},
                 {"length", c.grid.length},
                 {"boundary", to_string(c.grid.boundary)},
                 {"origin", c.grid.origin}};
    j["physics"] = {{"u_tilde", c.physics.u_tilde},       {"u", c.physics.u},
                    {"n_particles", c.physics.n_particles}, {"potential", c.physics.potential},
                    {"omega", c.physics.omega},             {"omega_to", c.physics.omega_to},
                    {"t_switch", c.physics.t_switch}};
    j["numerics"] = {{"tol", c.numerics.tol},
                     {"dt", c.numerics.dt},
                     {"t_final", c.numerics.t_final},
                     {"K", c.numerics.K},
                     {"delta_N", c.numerics.delta_N},
                     {"n_max_excited", c.numerics.n_max_excited < 0 ? json("full") : json(c.numerics.n_max_excited)},
                     {"fock_n_values", c.numerics.fock_n_values},
                     {"order", c.numerics.order},
                     {"evolution", c.numerics.evolve_linear ? "linear" : "gpe"},
                     {"k_mode", c.numerics.k_mode}};
    j["output"] = {{"directory", c.output.directory}, {"stride", c.output.stride}, {"formats", formats_string(c.output)}};
    return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(number_or_null(v[i]));
    return a;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// Collects CSV tables (when enabled) and the list of files written.
struct Output {
    fs::path dir;
    bool csv = true;
    std::vector<std::string> files;

    std::optional<CsvWriter> table(const std::string& name, const std::vector<std::string>& header) {
        if (!csv) return std::nullopt;
        files.push_back(name);
        return std::optional<CsvWriter>(std::in_place, dir / name, header);
    }
};

GridPtr make_grid(const ScenarioConfig& c) {
    return build_grid(c.grid.n_points, c.grid.length, c.grid.boundary, c.grid.origin);
}

ComplexField initial_potential(const ScenarioConfig& c, const GridPtr& grid) {
    if (c.physics.potential == "none") return zero_potential(grid);
    return harmonic_potential(grid, c.physics.omega);
}

StationaryOptions solver_options(const ScenarioConfig& c) {
    StationaryOptions o;
    o.tol = c.numerics.tol;
    return o;
}

void write_condensate(Output& out, const std::string& name, const ComplexField& xi) {
    auto t = out.table(name, {"x", "re", "im", "density"});
    if (!t) return;
    const auto& x = xi.grid->points();
    for (int j = 0; j < xi.size(); ++j)
        t->row({x[j], xi.values[j].real(), xi.values[j].imag(), std::norm(xi.values[j])});
}

json stationary_json(const CondensateState& s, const StationaryReport& rep) {
    const EnergyParts e = energy_parts(s.xi, s.potential);
    return {{"mu", s.mu},
            {"h1", energy_functional_h1(s)},
            {"residual", s.residual},
            {"kinetic", e.kinetic},
            {"potential_energy", e.potential},
            {"quartic_integral", e.quartic},
            {"virial_defect", virial_defect(s.xi, s.potential, s.u_tilde)},
            {"imaginary_time_steps", rep.imaginary_time_steps},
            {"rejected_steps", rep.rejected_steps},
            {"newton_iterations", rep.newton_iterations}};
}

bool uniform_case(const ScenarioConfig& c) {
    return c.grid.boundary == Boundary::periodic && c.physics.potential == "none";
}

// Basis wavenumbers in plane-wave order (+k1, -k1, +k2, ...), for the uniform gas.
std::vector<double> basis_wavenumbers(int K, double length) {
    std::vector<double> k;
    for (int i = 0; i < K; ++i) k.push_back((i % 2 == 0 ? 1.0 : -1.0) * 2.0 * M_PI * (i / 2 + 1) / length);
    return k;
}

int run_stationary(const ScenarioConfig& c, json& res, Output& out) {
    const GridPtr grid = make_grid(c);
    StationaryReport rep;
    const CondensateState s =
        solve_stationary(grid, initial_potential(c, grid), c.physics.u_tilde, c.physics.n_particles, solver_options(c), &rep);
    res = stationary_json(s, rep);
    if (c.physics.potential != "none" && c.physics.u_tilde > 0.0)
        res["thomas_fermi_mu"] = std::pow(3.0 * c.physics.u_tilde * c.physics.omega / (4.0 * std::sqrt(2.0)), 2.0 / 3.0);
    write_condensate(out, "condensate.csv", s.xi);
    return 0;
}

int run_spectrum(const ScenarioConfig& c, json& res, Output& out) {
    const GridPtr grid = make_grid(c);
    StationaryReport rep;
    const CondensateState s =
        solve_stationary(grid, initial_potential(c, grid), c.physics.u_tilde, c.physics.n_particles, solver_options(c), &rep);
    const PhononBasis basis = build_phonon_basis(s, c.numerics.K);
    const QuadraticHamiltonian qh = assemble(s, basis);
    const QuasiparticleSpectrum sp = diagonalize(qh, basis);
    const StabilityReport st = check_stability(sp);

    res["condensate"] = stationary_json(s, rep);
    res["K"] = basis.size();
    res["method"] = sp.method;
    res["omega_g"] = sp.omega_g;
    res["e3"] = qh.e3;
    res["h2_norm"] = h2_coefficients(s, basis).norm();
    res["symplectic_deviation"] = symplectic_deviation(sp);
    res["energies"] = vector_json(sp.energies);
    res["max_abs_imag"] = sp.imag_parts.size() ? sp.imag_parts.cwiseAbs().maxCoeff() : 0.0;
    res["stable"] = st.stable;
    res["offending_modes"] = st.offending_modes;
    res["anomalous_modes"] = sp.anomalous_modes;

    if (uniform_case(c)) {
        std::vector<double> ks = basis_wavenumbers(basis.size(), c.grid.length);
        std::vector<double> analytic;
        for (double k : ks) analytic.push_back(bogoliubov_dispersion(k, c.physics.u_tilde, c.grid.length));
        std::vector<double> absk;
        for (double k : ks) absk.push_back(std::abs(k));
        std::sort(analytic.begin(), analytic.end());
        std::sort(absk.begin(), absk.end());
        double worst = 0.0;
        auto t = out.table("spectrum.csv", {"k", "epsilon_numeric", "epsilon_analytic", "relative_deviation"});
        for (int m = 0; m < sp.size(); ++m) {
            const double dev = std::abs(sp.energies[m] - analytic[m]) / analytic[m];
            worst = std::max(worst, dev);
            if (t) t->row({absk[m], sp.energies[m], analytic[m], dev});
        }
        res["max_relative_deviation"] = worst;
    } else {
        int kohn = -1;
        auto t = out.table("spectrum.csv", {"m", "epsilon", "imag", "parity"});
        for (int m = 0; m < sp.size(); ++m) {
            const int par = mode_parity(sp, m);
            if (kohn < 0 && par == -1) kohn = m;
            if (t) t->row({static_cast<double>(m + 1), sp.energies[m], sp.imag_parts[m], static_cast<double>(par)});
        }
        res["lowest_odd_mode"] = kohn >= 0 ? json(kohn + 1) : json(nullptr);
        res["lowest_odd_energy"] = kohn >= 0 ? json(sp.energies[kohn]) : json(nullptr);
    }
    write_condensate(out, "condensate.csv", s.xi);
    if (!st.stable) {
        res["instability"] = st.message;
        return 4;
    }
    return 0;
}

int run_dynamics(const ScenarioConfig& c, json& res, Output& out) {
    const GridPtr grid = make_grid(c);
    StationaryReport rep;
    const CondensateState s =
        solve_stationary(grid, initial_potential(c, grid), c.physics.u_tilde, c.physics.n_particles, solver_options(c), &rep);
    PotentialSchedule sched = PotentialSchedule::none();
    if (c.physics.potential == "harmonic") sched = PotentialSchedule::harmonic(c.physics.omega);
    if (c.physics.potential == "quench")
        sched = PotentialSchedule::quench(c.physics.omega, c.physics.omega_to, c.physics.t_switch);
    PropagateOptions po;
    po.stride = c.output.stride;
    po.evolve_linear = c.numerics.evolve_linear;
    po.order = c.numerics.order;

    Trajectory traj = propagate(s, c.numerics.t_final, c.numerics.dt, sched, po);
    traj = propagate_modes(std::move(traj), build_phonon_basis(s, c.numerics.K));
    const auto h3 = h3_of_t(traj, c.physics.u_tilde);
    const auto hr = hr_diagnostic(traj);

    double mismatch = 0.0, mu_diff = 0.0, gram = 0.0, overlap = 0.0;
    for (const auto& d : hr) mismatch = std::max(mismatch, d.mismatch);
    for (int i = 0; i < traj.size(); ++i) {
        mu_diff = std::max(mu_diff, std::abs(traj.mu_t[i] - traj.mu_dyn_t[i]));
        gram = std::max(gram, traj.gram_deviation_t[i]);
        overlap = std::max(overlap, traj.condensate_overlap_t[i]);
    }
    res["initial_condensate"] = stationary_json(s, rep);
    res["schedule"] = sched.describe();
    res["n_steps"] = traj.n_steps;
    res["snapshots"] = traj.size();
    res["max_norm_drift"] = traj.max_norm_drift();
    res["max_h1_drift"] = traj.max_h1_drift();
    res["max_mu_difference"] = mu_diff;
    res["max_mismatch"] = mismatch;
    res["max_gram_deviation"] = gram;
    res["max_condensate_overlap"] = overlap;
    res["mu_initial"] = traj.mu_t.front();
    res["mu_final"] = traj.mu_t.back();
    res["center_final"] = traj.center_t.back();
    res["e3_final"] = h3.back().e3;

    auto t = out.table("timeseries.csv", {"t", "norm", "h1", "mu", "mu_dynamic", "center", "mismatch",
                                          "gram_deviation", "condensate_overlap", "e3"});
    if (t)
        for (int i = 0; i < traj.size(); ++i)
            t->row({traj.times[i], traj.norm_t[i], traj.h1_t[i], traj.mu_t[i], traj.mu_dyn_t[i], traj.center_t[i],
                    hr[i].mismatch, traj.gram_deviation_t[i], traj.condensate_overlap_t[i], h3[i].e3});
    write_condensate(out, "condensate_final.csv", traj.xi_t.back());
    return 0;
}

int run_number_shift(const ScenarioConfig& c, json& res, Output& out) {
    const GridPtr grid = make_grid(c);
    SolverConfig sc{grid, initial_potential(c, grid), c.physics.u, solver_options(c)};
    StationaryReport rep;
    const CondensateState s = solve_stationary(grid, sc.potential, c.physics.u_tilde, c.physics.n_particles, sc.options, &rep);
    const PhononBasis basis = build_phonon_basis(s, c.numerics.K);
    const QuasiparticleSpectrum sp = diagonalize(assemble(s, basis), basis);
    const NumberShiftReport ns = compute_number_shift(sc, s, basis, sp, c.numerics.delta_N);
    const MatrixElements me = matrix_elements(s, ns);

    Eigen::VectorXd ratio(std::min(sp.size(), 10));
    for (int m = 0; m < ratio.size(); ++m) {
        const double pn = norm(sp.p_waves[m]);
        ratio[m] = pn > 0.0 ? norm(ns.f_waves[m] - sp.p_waves[m]) / pn : 0.0;
    }
    res["condensate"] = stationary_json(s, rep);
    res["r0"] = ns.r0;
    res["r0_raw"] = ns.r0_raw;
    res["re_overlap"] = ns.re_overlap;
    res["richardson_change"] = ns.richardson_change;
    res["delta_N"] = ns.delta_N;
    res["r_norm"] = ns.r.norm();
    res["r_abs"] = vector_json(ns.r.cwiseAbs());
    res["correction_ratio"] = vector_json(ratio);
    res["condensate_amplitude"] = ns.condensate_amplitude;
    res["energies"] = vector_json(sp.energies);

    if (auto t = out.table("r.csv", {"k", "re", "im", "abs"}))
        for (int k = 0; k < ns.r.size(); ++k)
            t->row({static_cast<double>(k + 1), ns.r[k].real(), ns.r[k].imag(), std::abs(ns.r[k])});
    const int shown = std::min<int>(3, static_cast<int>(me.absorb.size()));
    std::vector<std::string> header{"x", "ground_re", "dxi_re", "dxi_im"};
    for (int m = 0; m < shown; ++m)
        for (const char* part : {"f", "g"})
            for (const char* c2 : {"_re", "_im"}) header.push_back(std::string(part) + std::to_string(m + 1) + c2);
    if (auto t = out.table("amplitudes.csv", header)) {
        const auto& x = grid->points();
        for (int j = 0; j < grid->n_points(); ++j) {
            std::vector<double> row{x[j], me.ground.values[j].real(), ns.dxi_dN.values[j].real(),
                                    ns.dxi_dN.values[j].imag()};
            for (int m = 0; m < shown; ++m) {
                row.push_back(ns.f_waves[m].values[j].real());
                row.push_back(ns.f_waves[m].values[j].imag());
                row.push_back(ns.g_waves[m].values[j].real());
                row.push_back(ns.g_waves[m].values[j].imag());
            }
            t->row(row);
        }
    }
    return 0;
}

int run_homogeneous(const ScenarioConfig& c, json& res, Output& out) {
    const GridPtr grid = make_grid(c);
    StationaryReport rep;
    const double L = c.grid.length;
    const CondensateState s =
        solve_stationary(grid, zero_potential(grid), c.physics.u_tilde, c.physics.n_particles, solver_options(c), &rep);
    const PhononBasis basis = build_phonon_basis(s, c.numerics.K);
    const QuasiparticleSpectrum sp = diagonalize(assemble(s, basis), basis);

    std::vector<double> ks = basis_wavenumbers(basis.size(), L);
    for (double& k : ks) k = std::abs(k);
    std::sort(ks.begin(), ks.end());
    double worst = 0.0;
    auto t = out.table("dispersion.csv", {"k", "epsilon_numeric", "epsilon_analytic", "relative_deviation"});
    for (int m = 0; m < sp.size(); ++m) {
        const double a = bogoliubov_dispersion(ks[m], c.physics.u_tilde, L);
        const double dev = std::abs(sp.energies[m] - a) / a;
        worst = std::max(worst, dev);
        if (t) t->row({ks[m], sp.energies[m], a, dev});
    }
    const double v_expected = std::sqrt(c.physics.u_tilde / L);
    const double v_fit = fit_sound_speed(ks[0], sp.energies[0], ks[2], sp.energies[2]);
    const HydroCoefficients h = hydro_coefficients(ks[0], c.physics.u, c.physics.n_particles, L);

    res["condensate"] = stationary_json(s, rep);
    res["max_relative_deviation"] = worst;
    res["sound_speed_fit"] = v_fit;
    res["sound_speed_expected"] = v_expected;
    res["sound_speed_relative_error"] = std::abs(v_fit - v_expected) / v_expected;
    res["phi_coeff"] = h.phi_coeff;
    res["rho_coeff"] = h.rho_coeff;
    res["phi_rho_product"] = h.phi_coeff * h.rho_coeff;
    res["sound_energy"] = h.sound_energy;
    res["sound_energy_expected"] = ks[0] * h.v_sound;
    res["omega_g"] = sp.omega_g;
    return 0;
}

int run_fock(const ScenarioConfig& c, json& res, Output& out) {
    const double V = c.grid.length;
    const double k = c.numerics.k_mode;
    const double ut = c.physics.u_tilde;
    std::vector<FockSpectrum> spectra;
    for (int n : c.numerics.fock_n_values) {
        const int cap = c.numerics.n_max_excited < 0 ? n : std::min(c.numerics.n_max_excited, n);
        spectra.push_back(exact_fock_spectrum(n, k, ut / n, V, cap));
    }
    const AsymptoticStudy st = compare_asymptotics(spectra, ut);

    // Cap convergence at the largest N: halve the cap when it is already full.
    const FockSpectrum& last = spectra.back();
    const int other_cap = last.n_max_excited >= last.n_particles ? last.n_particles / 2
                                                                  : std::min(2 * last.n_max_excited, last.n_particles);
    const FockSpectrum alt = exact_fock_spectrum(last.n_particles, k, ut / last.n_particles, V, other_cap);

    json pts = json::array();
    long cross_n = 0, cross_p = 0;
    auto t = out.table("fock.csv", {"N", "dimension", "ground_exact", "ground_predicted", "ground_error", "gap_exact",
                                    "gap_bogoliubov", "gap_error"});
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        const auto& p = st.points[i];
        cross_n += spectra[i].cross_number_elements;
        cross_p += spectra[i].cross_momentum_elements;
        pts.push_back({{"N", p.n_particles},
                       {"dimension", spectra[i].dimension},
                       {"n_max_excited", spectra[i].n_max_excited},
                       {"ground_exact", p.ground_exact},
                       {"ground_predicted", p.ground_predicted},
                       {"ground_error", p.ground_error},
                       {"gap_exact", p.gap_exact},
                       {"gap_bogoliubov", p.gap_bogoliubov},
                       {"gap_error", p.gap_error},
                       {"gaps", vector_json(spectra[i].gaps)}});
        if (t)
            t->row({static_cast<double>(p.n_particles), static_cast<double>(spectra[i].dimension), p.ground_exact,
                    p.ground_predicted, p.ground_error, p.gap_exact, p.gap_bogoliubov, p.gap_error});
    }
    res["points"] = pts;
    res["gap_power"] = number_or_null(st.gap_power);
    res["ground_power"] = number_or_null(st.ground_power);
    res["gap_error_monotone"] = st.gap_error_monotone;
    res["cross_number_elements"] = cross_n;
    res["cross_momentum_elements"] = cross_p;
    res["cap_check"] = {{"N", last.n_particles},
                        {"cap", last.n_max_excited},
                        {"other_cap", other_cap},
                        {"gap_change", std::abs(alt.phonon_gap - last.phonon_gap)}};
    return 0;
}

} // namespace

const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::stationary: return "stationary";
    case Scenario::spectrum: return "spectrum";
    case Scenario::dynamics: return "dynamics";
    case Scenario::number_shift: return "number-shift";
    case Scenario::homogeneous_check: return "homogeneous-check";
    case Scenario::fock_oracle: return "fock-oracle";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    const auto& names = scenario_names();
    const auto it = names.find(s);
    if (it != names.end()) return it->second;
    std::string allowed;
    for (const auto& [k, v] : names) allowed += (allowed.empty() ? "" : ", ") + k;
    throw ConfigurationError("scenario: unknown value '" + s + "' (allowed: " + allowed + ")");
}

// Drops comments: a ';' or '#' at the start of a line or after whitespace.
static std::string strip_comments(const std::string& text) {
    std::istringstream lines(text);
    std::string out, line;
    while (std::getline(lines, line)) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if ((line[i] == ';' || line[i] == '#') && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
                line.erase(i);
                break;
            }
        }
        out += line;
        out += '\n';
    }
    return out;
}

ScenarioConfig parse_config(const std::string& text) {
    ptree pt;
    std::istringstream in(strip_comments(text));
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigurationError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
    }

    const auto& sections = allowed_keys();
    std::map<std::string, const ptree*> found;
    std::optional<std::string> scenario_name;
    for (const auto& [name, node] : pt) {
        const auto it = sections.find(name);
        if (it == sections.end()) {
            if (name == "scenario" && node.empty()) {
                scenario_name = trim(node.data());
                continue;
            }
            throw ConfigurationError(node.empty() ? "unknown top-level key '" + name + "'"
                                                  : "unknown section [" + name + "]");
        }
        for (const auto& [key, value] : node)
            if (!it->second.count(key)) throw ConfigurationError("unknown key " + name + "." + key);
        found[name] = &node;
    }
    auto section = [&](const std::string& name) {
        const auto it = found.find(name);
        return Section(name, it == found.end() ? nullptr : it->second);
    };

    ScenarioConfig c;
    if (!scenario_name || scenario_name->empty()) throw ConfigurationError("missing required key scenario");
    c.scenario = scenario_from_string(*scenario_name);

    const Section grid = section("grid");
    c.grid.n_points = grid.integer("n_points");
    c.grid.length = grid.number("length");
    const std::string boundary = grid.text("boundary", "periodic");
    if (boundary == "periodic")
        c.grid.boundary = Boundary::periodic;
    else if (boundary == "box")
        c.grid.boundary = Boundary::box;
    else
        throw ConfigurationError("grid.boundary: unknown value '" + boundary + "' (allowed: box, periodic)");
    require(c.grid.n_points >= 8 && c.grid.n_points <= 4096, "grid.n_points", "must be in [8, 4096]");
    if (c.grid.boundary == Boundary::periodic)
        require((c.grid.n_points & (c.grid.n_points - 1)) == 0, "grid.n_points",
                "must be a power of two on a periodic grid");
    require(c.grid.length > 0.0, "grid.length", "must be positive");
    c.grid.origin = grid.number("origin", -0.5 * c.grid.length);

    const Section phys = section("physics");
    const bool has_ut = phys.has("u_tilde");
    const bool has_u = phys.has("u");
    if (has_ut && has_u) throw ConfigurationError("physics.u: give either physics.u_tilde or physics.u, not both");
    if (!has_ut && !has_u)
        throw ConfigurationError("missing required key physics.u_tilde (or physics.u with physics.n_particles)");
    if (has_u) {
        const double u = phys.number("u");
        c.physics.n_particles = phys.number("n_particles");
        require(u >= 0.0, "physics.u", "must be nonnegative (attractive gases are not supported)");
        c.physics.u_tilde = u * c.physics.n_particles;
    } else {
        c.physics.u_tilde = phys.number("u_tilde");
        c.physics.n_particles = phys.number("n_particles", 1000.0);
        require(c.physics.u_tilde >= 0.0, "physics.u_tilde", "must be nonnegative (attractive gases are not supported)");
    }
    require(c.physics.n_particles > 0.0, "physics.n_particles", "must be positive");
    c.physics.u = c.physics.u_tilde / c.physics.n_particles;
    c.physics.potential = phys.text("potential", "none");
    if (c.physics.potential != "none" && c.physics.potential != "harmonic" && c.physics.potential != "quench")
        throw ConfigurationError("physics.potential: unknown value '" + c.physics.potential +
                                 "' (allowed: none, harmonic, quench)");
    c.physics.omega = phys.number("omega", 1.0);
    require(c.physics.omega > 0.0, "physics.omega", "must be positive");
    if (c.physics.potential == "quench") {
        c.physics.omega_to = phys.number("omega_to");
        c.physics.t_switch = phys.number("t_switch", 0.0);
    } else {
        c.physics.omega_to = phys.number("omega_to", c.physics.omega);
        c.physics.t_switch = phys.number("t_switch", 0.0);
    }
    require(c.physics.omega_to > 0.0, "physics.omega_to", "must be positive");
    require(c.physics.t_switch >= 0.0, "physics.t_switch", "must be nonnegative");

    const Section num = section("numerics");
    c.numerics.tol = num.number("tol", 1e-10);
    require(c.numerics.tol > 0.0 && c.numerics.tol <= 1e-2, "numerics.tol", "must be in (0, 1e-2]");
    c.numerics.dt = num.number("dt", 1e-3);
    require(c.numerics.dt > 0.0 && c.numerics.dt <= 1.0, "numerics.dt", "must be in (0, 1]");
    c.numerics.t_final = num.number("t_final", 10.0);
    require(c.numerics.t_final > 0.0, "numerics.t_final", "must be positive");
    c.numerics.K = num.integer("K", c.grid.n_points / 4);
    require(c.numerics.K >= 1 && c.numerics.K <= c.grid.n_points - 2, "numerics.K", "must be in [1, n_points - 2]");
    c.numerics.delta_N = num.number("delta_N", 0.5);
    require(c.numerics.delta_N > 0.0, "numerics.delta_N", "must be positive");
    const std::string cap = num.text("n_max_excited", "full");
    if (cap == "full") {
        c.numerics.n_max_excited = -1;
    } else {
        c.numerics.n_max_excited = to_int("numerics.n_max_excited", cap);
        require(c.numerics.n_max_excited >= 0, "numerics.n_max_excited", "must be 'full' or a nonnegative integer");
    }
    if (num.has("fock_n_values")) {
        c.numerics.fock_n_values.clear();
        for (const auto& item : split_list(num.raw("fock_n_values"))) {
            const int n = to_int("numerics.fock_n_values", item);
            require(n >= 1, "numerics.fock_n_values", "entries must be at least 1");
            c.numerics.fock_n_values.push_back(n);
        }
        require(!c.numerics.fock_n_values.empty(), "numerics.fock_n_values", "must not be empty");
        require(std::is_sorted(c.numerics.fock_n_values.begin(), c.numerics.fock_n_values.end()) &&
                    std::adjacent_find(c.numerics.fock_n_values.begin(), c.numerics.fock_n_values.end()) ==
                        c.numerics.fock_n_values.end(),
                "numerics.fock_n_values", "must be strictly increasing");
    }
    c.numerics.order = num.integer("order", 2);
    require(c.numerics.order == 2 || c.numerics.order == 4, "numerics.order", "must be 2 or 4");
    const std::string evo = num.text("evolution", "gpe");
    if (evo != "gpe" && evo != "linear")
        throw ConfigurationError("numerics.evolution: unknown value '" + evo + "' (allowed: gpe, linear)");
    c.numerics.evolve_linear = evo == "linear";
    c.numerics.k_mode = num.number("k_mode", 2.0 * M_PI / c.grid.length);

    const Section outs = section("output");
    c.output.directory = outs.text("directory", "ncbogo-out");
    require(!c.output.directory.empty(), "output.directory", "must not be empty");
    c.output.stride = outs.integer("stride", 100);
    require(c.output.stride >= 1, "output.stride", "must be >= 1");
    if (outs.has("formats")) {
        c.output.csv = c.output.json = false;
        for (const auto& f : split_list(outs.raw("formats"))) {
            if (f == "csv")
                c.output.csv = true;
            else if (f == "json")
                c.output.json = true;
            else
                throw ConfigurationError("output.formats: unknown format '" + f + "' (allowed: csv, json)");
        }
        require(c.output.csv || c.output.json, "output.formats", "must name at least one format");
    }

    check_scenario_constraints(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string normalized_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "scenario = " << to_string(c.scenario) << "\n\n";
    os << "[grid]\n"
       << "n_points = " << c.grid.n_points << "\n"
       << "length = " << fmt(c.grid.length) << "\n"
       << "boundary = " << to_string(c.grid.boundary) << "\n"
       << "origin = " << fmt(c.grid.origin) << "\n\n";
    os << "[physics]\n"
       << "u_tilde = " << fmt(c.physics.u_tilde) << "\n"
       << "n_particles = " << fmt(c.physics.n_particles) << "\n"
       << "potential = " << c.physics.potential << "\n"
       << "omega = " << fmt(c.physics.omega) << "\n"
       << "omega_to = " << fmt(c.physics.omega_to) << "\n"
       << "t_switch = " << fmt(c.physics.t_switch) << "\n\n";
    os << "[numerics]\n"
       << "tol = " << fmt(c.numerics.tol) << "\n"
       << "dt = " << fmt(c.numerics.dt) << "\n"
       << "t_final = " << fmt(c.numerics.t_final) << "\n"
       << "K = " << c.numerics.K << "\n"
       << "delta_N = " << fmt(c.numerics.delta_N) << "\n"
       << "n_max_excited = "
       << (c.numerics.n_max_excited < 0 ? std::string("full") : std::to_string(c.numerics.n_max_excited)) << "\n"
       << "fock_n_values = " << join_ints(c.numerics.fock_n_values) << "\n"
       << "order = " << c.numerics.order << "\n"
       << "evolution = " << (c.numerics.evolve_linear ? "linear" : "gpe") << "\n"
       << "k_mode = " << fmt(c.numerics.k_mode) << "\n\n";
    os << "[output]\n"
       << "directory = " << c.output.directory << "\n"
       << "stride = " << c.output.stride << "\n"
       << "formats = " << formats_string(c.output) << "\n";
    return os.str();
}

RunOutcome run_scenario(const ScenarioConfig& c, const std::string& output_dir) {
    RunOutcome outcome;
    outcome.output_dir = output_dir.empty() ? c.output.directory : output_dir;
    Output out;
    out.dir = outcome.output_dir;
    out.csv = c.output.csv;
    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec) throw Error("cannot create output directory '" + outcome.output_dir + "': " + ec.message());

    json res = json::object();
    switch (c.scenario) {
    case Scenario::stationary: outcome.exit_code = run_stationary(c, res, out); break;
    case Scenario::spectrum: outcome.exit_code = run_spectrum(c, res, out); break;
    case Scenario::dynamics: outcome.exit_code = run_dynamics(c, res, out); break;
    case Scenario::number_shift: outcome.exit_code = run_number_shift(c, res, out); break;
    case Scenario::homogeneous_check: outcome.exit_code = run_homogeneous(c, res, out); break;
    case Scenario::fock_oracle: outcome.exit_code = run_fock(c, res, out); break;
    }

    json summary;
    summary["metadata"] = {{"program", "ncbogo"}, {"version", kVersion}};
    summary["config"] = config_json(c);
    summary["scenario"] = to_string(c.scenario);
    summary["status"] = outcome.exit_code == 0 ? "ok" : "unstable";
    summary["results"] = res;
    outcome.summary_json = summary.dump(2) + "\n";
    if (c.output.json) {
        std::ofstream f(out.dir / "summary.json");
        if (!f) throw Error("cannot write summary.json in '" + outcome.output_dir + "'");
        f << outcome.summary_json;
        out.files.insert(out.files.begin(), "summary.json");
    }
    outcome.files = out.files;
    return outcome;
}

} // namespace ncbogo
