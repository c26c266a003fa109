/* C interface to the ncbogo library.
 *
 * Every function returns an ncbogo_status. On failure the message of the most
 * recent error on the calling thread is available from ncbogo_last_error().
 * Objects are opaque handles released with the matching *_free function;
 * strings returned through char** are released with ncbogo_string_free. */
#ifndef NCBOGO_H
#define NCBOGO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncbogo_status {
    NCBOGO_OK = 0,
    NCBOGO_ERR_OTHER = 1,
    NCBOGO_ERR_CONFIG = 2,
    NCBOGO_ERR_CONVERGENCE = 3,
    NCBOGO_ERR_INSTABILITY = 4,
    NCBOGO_ERR_RESOURCE = 5,
    NCBOGO_ERR_ARGUMENT = 6,
    NCBOGO_ERR_DOMAIN = 7,
    NCBOGO_ERR_DIMENSION = 8,
    NCBOGO_ERR_INTEGRATOR = 9,
    NCBOGO_ERR_TRUNCATION = 10,
    NCBOGO_ERR_DEGENERACY = 11
} ncbogo_status;

typedef enum ncbogo_boundary { NCBOGO_PERIODIC = 0, NCBOGO_BOX = 1 } ncbogo_boundary;

typedef struct ncbogo_config ncbogo_config;
typedef struct ncbogo_result ncbogo_result;
typedef struct ncbogo_grid ncbogo_grid;
typedef struct ncbogo_state ncbogo_state;
typedef struct ncbogo_spectrum ncbogo_spectrum;

const char* ncbogo_version(void);
const char* ncbogo_last_error(void);
/* Short machine-readable class name, e.g. "configuration". */
const char* ncbogo_status_name(ncbogo_status status);
/* Process exit code for a status: 0, 2, 3, 4, 5, or 1 for everything else. */
int ncbogo_status_exit_code(ncbogo_status status);
void ncbogo_string_free(char* s);

/* Scenario configuration (INI text; see README). */
ncbogo_status ncbogo_config_load(const char* path, ncbogo_config** out);
ncbogo_status ncbogo_config_parse(const char* text, ncbogo_config** out);
ncbogo_status ncbogo_config_normalized(const ncbogo_config* config, char** out);
void ncbogo_config_free(ncbogo_config* config);

/* Runs the scenario. output_dir may be NULL to use the configured directory.
 * With NCBOGO_ERR_INSTABILITY a result is still produced and its files written. */
ncbogo_status ncbogo_run(const ncbogo_config* config, const char* output_dir, ncbogo_result** out);
ncbogo_status ncbogo_result_summary(const ncbogo_result* result, char** json_out);
ncbogo_status ncbogo_result_output_dir(const ncbogo_result* result, char** out);
void ncbogo_result_free(ncbogo_result* result);

/* Grids and fields. */
ncbogo_status ncbogo_grid_create(int n_points, double length, ncbogo_boundary boundary, double origin,
                                 ncbogo_grid** out);
int ncbogo_grid_size(const ncbogo_grid* grid);
ncbogo_status ncbogo_grid_points(const ncbogo_grid* grid, double* x, size_t capacity);
void ncbogo_grid_free(ncbogo_grid* grid);

/* Stationary state in V = omega^2 x^2 / 2 (omega <= 0: no potential). */
ncbogo_status ncbogo_solve_stationary(const ncbogo_grid* grid, double omega, double u_tilde,
                                      double n_particles, double tol, ncbogo_state** out);
double ncbogo_state_mu(const ncbogo_state* state);
double ncbogo_state_h1(const ncbogo_state* state);
double ncbogo_state_residual(const ncbogo_state* state);
ncbogo_status ncbogo_state_values(const ncbogo_state* state, double* re, double* im, size_t capacity);
void ncbogo_state_free(ncbogo_state* state);

/* Quasiparticle spectrum over a K-mode basis. */
ncbogo_status ncbogo_spectrum_compute(const ncbogo_state* state, int K, ncbogo_spectrum** out);
int ncbogo_spectrum_size(const ncbogo_spectrum* spectrum);
ncbogo_status ncbogo_spectrum_energies(const ncbogo_spectrum* spectrum, double* energies, size_t capacity);
double ncbogo_spectrum_omega_g(const ncbogo_spectrum* spectrum);
int ncbogo_spectrum_stable(const ncbogo_spectrum* spectrum);
void ncbogo_spectrum_free(ncbogo_spectrum* spectrum);

/* Uniform-gas oracles. */
ncbogo_status ncbogo_bogoliubov_dispersion(double k, double u_tilde, double length, double* out);
ncbogo_status ncbogo_fock_spectrum(int n_particles, double k_mode, double u, double volume, int n_max_excited,
                                   double* ground_energy, double* phonon_gap, int* dimension);

#ifdef __cplusplus
}
#endif

#endif
