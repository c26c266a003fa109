#include "ncbogo/ncbogo.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "ncbogo/bdg.hpp"
#include "ncbogo/errors.hpp"
#include "ncbogo/gpe.hpp"
#include "ncbogo/homogeneous.hpp"
#include "ncbogo/scenario.hpp"

struct ncbogo_config {
    ncbogo::ScenarioConfig config;
};

struct ncbogo_result {
    ncbogo::RunOutcome outcome;
};

struct ncbogo_grid {
    ncbogo::GridPtr grid;
};

struct ncbogo_state {
    ncbogo::CondensateState state;
};

struct ncbogo_spectrum {
    ncbogo::QuasiparticleSpectrum spectrum;
    bool stable = true;
};

namespace {

thread_local std::string last_error;

ncbogo_status fail(ncbogo_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

// Runs `f`, translating library exceptions into status codes.
template <class F>
ncbogo_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const ncbogo::ConfigurationError& e) {
        return fail(NCBOGO_ERR_CONFIG, e.what());
    } catch (const ncbogo::ConvergenceError& e) {
        return fail(NCBOGO_ERR_CONVERGENCE, e.what());
    } catch (const ncbogo::InstabilityError& e) {
        return fail(NCBOGO_ERR_INSTABILITY, e.what());
    } catch (const ncbogo::ResourceError& e) {
        return fail(NCBOGO_ERR_RESOURCE, e.what());
    } catch (const ncbogo::DomainError& e) {
        return fail(NCBOGO_ERR_DOMAIN, e.what());
    } catch (const ncbogo::DimensionError& e) {
        return fail(NCBOGO_ERR_DIMENSION, e.what());
    } catch (const ncbogo::IntegratorError& e) {
        return fail(NCBOGO_ERR_INTEGRATOR, e.what());
    } catch (const ncbogo::TruncationError& e) {
        return fail(NCBOGO_ERR_TRUNCATION, e.what());
    } catch (const ncbogo::DegeneracyError& e) {
        return fail(NCBOGO_ERR_DEGENERACY, e.what());
    } catch (const std::bad_alloc&) {
        return fail(NCBOGO_ERR_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return fail(NCBOGO_ERR_OTHER, e.what());
    } catch (...) {
        return fail(NCBOGO_ERR_OTHER, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define NCBOGO_REQUIRE(cond, what)                                                                                     \
    do {                                                                                                               \
        if (!(cond)) return fail(NCBOGO_ERR_ARGUMENT, what);                                                           \
    } while (0)

} // namespace

extern "C" {

const char* ncbogo_version(void) { return "0.1.0"; }

const char* ncbogo_last_error(void) { return last_error.c_str(); }

const char* ncbogo_status_name(ncbogo_status status) {
    switch (status) {
    case NCBOGO_OK: return "ok";
    case NCBOGO_ERR_OTHER: return "error";
    case NCBOGO_ERR_CONFIG: return "configuration";
    case NCBOGO_ERR_CONVERGENCE: return "convergence";
    case NCBOGO_ERR_INSTABILITY: return "instability";
    case NCBOGO_ERR_RESOURCE: return "resource";
    case NCBOGO_ERR_ARGUMENT: return "argument";
    case NCBOGO_ERR_DOMAIN: return "domain";
    case NCBOGO_ERR_DIMENSION: return "dimension";
    case NCBOGO_ERR_INTEGRATOR: return "integrator";
    case NCBOGO_ERR_TRUNCATION: return "truncation";
    case NCBOGO_ERR_DEGENERACY: return "degeneracy";
    }
    return "unknown";
}

int ncbogo_status_exit_code(ncbogo_status status) {
    switch (status) {
    case NCBOGO_OK: return 0;
    case NCBOGO_ERR_CONFIG: return 2;
    case NCBOGO_ERR_CONVERGENCE: return 3;
    case NCBOGO_ERR_INSTABILITY: return 4;
    case NCBOGO_ERR_RESOURCE: return 5;
    default: return 1;
    }
}

void ncbogo_string_free(char* s) { std::free(s); }

ncbogo_status ncbogo_config_load(const char* path, ncbogo_config** out) {
    NCBOGO_REQUIRE(path && out, "ncbogo_config_load: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new ncbogo_config{ncbogo::load_config(path)};
        return NCBOGO_OK;
    });
}

ncbogo_status ncbogo_config_parse(const char* text, ncbogo_config** out) {
    NCBOGO_REQUIRE(text && out, "ncbogo_config_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new ncbogo_config{ncbogo::parse_config(text)};
        return NCBOGO_OK;
    });
}

ncbogo_status ncbogo_config_normalized(const ncbogo_config* config, char** out) {
    NCBOGO_REQUIRE(config && out, "ncbogo_config_normalized: null argument");
    return guarded([&] {
        *out = copy_string(ncbogo::normalized_config(config->config));
        return NCBOGO_OK;
    });
}

void ncbogo_config_free(ncbogo_config* config) { delete config; }

ncbogo_status ncbogo_run(const ncbogo_config* config, const char* output_dir, ncbogo_result** out) {
    NCBOGO_REQUIRE(config && out, "ncbogo_run: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* r = new ncbogo_result{ncbogo::run_scenario(config->config, output_dir ? output_dir : "")};
        *out = r;
        if (r->outcome.exit_code == 4)
            return fail(NCBOGO_ERR_INSTABILITY, "unstable quasiparticle spectrum; outputs written to " +
                                                    r->outcome.output_dir);
        return NCBOGO_OK;
    });
}

ncbogo_status ncbogo_result_summary(const ncbogo_result* result, char** json_out) {
    NCBOGO_REQUIRE(result && json_out, "ncbogo_result_summary: null argument");
    return guarded([&] {
        *json_out = copy_string(result->outcome.summary_json);
        return NCBOGO_OK;
    });
}

ncbogo_status ncbogo_result_output_dir(const ncbogo_result* result, char** out) {
    NCBOGO_REQUIRE(result && out, "ncbogo_result_output_dir: null argument");
    return guarded([&] {
        *out = copy_string(result->outcome.output_dir);
        return NCBOGO_OK;
    });
}

void ncbogo_result_free(ncbogo_result* result) { delete result; }

ncbogo_status ncbogo_grid_create(int n_points, double length, ncbogo_boundary boundary, double origin,
                                 ncbogo_grid** out) {
    NCBOGO_REQUIRE(out, "ncbogo_grid_create: null argument");
    NCBOGO_REQUIRE(boundary == NCBOGO_PERIODIC || boundary == NCBOGO_BOX, "ncbogo_grid_create: bad boundary");
    *out = nullptr;
    return guarded([&] {
        const auto b = boundary == NCBOGO_BOX ? ncbogo::Boundary::box : ncbogo::Boundary::periodic;
        *out = new ncbogo_grid{ncbogo::build_grid(n_points, length, b, origin)};
        return NCBOGO_OK;
    });
}

int ncbogo_grid_size(const ncbogo_grid* grid) { return grid ? grid->grid->n_points() : 0; }

ncbogo_status ncbogo_grid_points(const ncbogo_grid* grid, double* x, size_t capacity) {
    NCBOGO_REQUIRE(grid && x, "ncbogo_grid_points: null argument");
    const auto& p = grid->grid->points();
    NCBOGO_REQUIRE(capacity >= static_cast<size_t>(p.size()), "ncbogo_grid_points: buffer too small");
    for (int i = 0; i < p.size(); ++i) x[i] = p[i];
    return NCBOGO_OK;
}

void ncbogo_grid_free(ncbogo_grid* grid) { delete grid; }

ncbogo_status ncbogo_solve_stationary(const ncbogo_grid* grid, double omega, double u_tilde, double n_particles,
                                      double tol, ncbogo_state** out) {
    NCBOGO_REQUIRE(grid && out, "ncbogo_solve_stationary: null argument");
    *out = nullptr;
    return guarded([&] {
        const auto& g = grid->grid;
        const auto v = omega > 0.0 ? ncbogo::harmonic_potential(g, omega) : ncbogo::zero_potential(g);
        ncbogo::StationaryOptions opt;
        opt.tol = tol;
        *out = new ncbogo_state{ncbogo::solve_stationary(g, v, u_tilde, n_particles, opt)};
        return NCBOGO_OK;
    });
}

double ncbogo_state_mu(const ncbogo_state* state) { return state ? state->state.mu : 0.0; }

double ncbogo_state_h1(const ncbogo_state* state) {
    return state ? ncbogo::energy_functional_h1(state->state) : 0.0;
}

double ncbogo_state_residual(const ncbogo_state* state) { return state ? state->state.residual : 0.0; }

ncbogo_status ncbogo_state_values(const ncbogo_state* state, double* re, double* im, size_t capacity) {
    NCBOGO_REQUIRE(state && re && im, "ncbogo_state_values: null argument");
    const auto& v = state->state.xi.values;
    NCBOGO_REQUIRE(capacity >= static_cast<size_t>(v.size()), "ncbogo_state_values: buffer too small");
    for (int i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
    return NCBOGO_OK;
}

void ncbogo_state_free(ncbogo_state* state) { delete state; }

ncbogo_status ncbogo_spectrum_compute(const ncbogo_state* state, int K, ncbogo_spectrum** out) {
    NCBOGO_REQUIRE(state && out, "ncbogo_spectrum_compute: null argument");
    *out = nullptr;
    return guarded([&] {
        const auto basis = ncbogo::build_phonon_basis(state->state, K);
        auto* s = new ncbogo_spectrum{ncbogo::diagonalize(ncbogo::assemble(state->state, basis), basis)};
        s->stable = ncbogo::check_stability(s->spectrum).stable;
        *out = s;
        return NCBOGO_OK;
    });
}

int ncbogo_spectrum_size(const ncbogo_spectrum* spectrum) { return spectrum ? spectrum->spectrum.size() : 0; }

ncbogo_status ncbogo_spectrum_energies(const ncbogo_spectrum* spectrum, double* energies, size_t capacity) {
    NCBOGO_REQUIRE(spectrum && energies, "ncbogo_spectrum_energies: null argument");
    const auto& e = spectrum->spectrum.energies;
    NCBOGO_REQUIRE(capacity >= static_cast<size_t>(e.size()), "ncbogo_spectrum_energies: buffer too small");
    for (int i = 0; i < e.size(); ++i) energies[i] = e[i];
    return NCBOGO_OK;
}

double ncbogo_spectrum_omega_g(const ncbogo_spectrum* spectrum) { return spectrum ? spectrum->spectrum.omega_g : 0.0; }

int ncbogo_spectrum_stable(const ncbogo_spectrum* spectrum) { return spectrum && spectrum->stable ? 1 : 0; }

void ncbogo_spectrum_free(ncbogo_spectrum* spectrum) { delete spectrum; }

ncbogo_status ncbogo_bogoliubov_dispersion(double k, double u_tilde, double length, double* out) {
    NCBOGO_REQUIRE(out, "ncbogo_bogoliubov_dispersion: null argument");
    return guarded([&] {
        *out = ncbogo::bogoliubov_dispersion(k, u_tilde, length);
        return NCBOGO_OK;
    });
}

ncbogo_status ncbogo_fock_spectrum(int n_particles, double k_mode, double u, double volume, int n_max_excited,
                                   double* ground_energy, double* phonon_gap, int* dimension) {
    return guarded([&] {
        const auto s = ncbogo::exact_fock_spectrum(n_particles, k_mode, u, volume, n_max_excited);
        if (ground_energy) *ground_energy = s.ground_energy;
        if (phonon_gap) *phonon_gap = s.phonon_gap;
        if (dimension) *dimension = s.dimension;
        return NCBOGO_OK;
    });
}

} // extern "C"
