/* Plain C client of the shared library. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ncbogo/ncbogo.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: expectation failed: %s (last error: %s)\n", \
                    __FILE__, __LINE__, #cond, ncbogo_last_error());        \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void test_status_mapping(void) {
    EXPECT(ncbogo_status_exit_code(NCBOGO_OK) == 0);
    EXPECT(ncbogo_status_exit_code(NCBOGO_ERR_CONFIG) == 2);
    EXPECT(ncbogo_status_exit_code(NCBOGO_ERR_CONVERGENCE) == 3);
    EXPECT(ncbogo_status_exit_code(NCBOGO_ERR_INSTABILITY) == 4);
    EXPECT(ncbogo_status_exit_code(NCBOGO_ERR_RESOURCE) == 5);
    EXPECT(ncbogo_status_exit_code(NCBOGO_ERR_DOMAIN) == 1);
    EXPECT(strcmp(ncbogo_status_name(NCBOGO_ERR_CONFIG), "configuration") == 0);
    EXPECT(strlen(ncbogo_version()) > 0);
}

static void test_grid_and_state(void) {
    ncbogo_grid* grid = NULL;
    ncbogo_state* state = NULL;
    ncbogo_spectrum* sp = NULL;
    double x[128], re[128], im[128], eps[32];
    double sum = 0.0;
    int i, n;

    EXPECT(ncbogo_grid_create(128, 20.0, NCBOGO_BOX, -10.0, &grid) == NCBOGO_OK);
    EXPECT(ncbogo_grid_size(grid) == 128);
    EXPECT(ncbogo_grid_points(grid, x, 128) == NCBOGO_OK);
    EXPECT(fabs(x[0] + 10.0 - 20.0 / 129.0) < 1e-12);
    EXPECT(ncbogo_grid_points(grid, x, 10) == NCBOGO_ERR_ARGUMENT);

    EXPECT(ncbogo_solve_stationary(grid, 1.0, 0.0, 100.0, 1e-11, &state) == NCBOGO_OK);
    EXPECT(fabs(ncbogo_state_mu(state) - 0.5) < 1e-8);
    EXPECT(ncbogo_state_residual(state) < 1e-8);
    EXPECT(ncbogo_state_values(state, re, im, 128) == NCBOGO_OK);
    for (i = 0; i < 128; ++i) sum += (re[i] * re[i] + im[i] * im[i]) * (20.0 / 129.0);
    EXPECT(fabs(sum - 1.0) < 1e-12);

    EXPECT(ncbogo_spectrum_compute(state, 32, &sp) == NCBOGO_OK);
    n = ncbogo_spectrum_size(sp);
    EXPECT(n == 32);
    EXPECT(ncbogo_spectrum_energies(sp, eps, 32) == NCBOGO_OK);
    for (i = 0; i < 10; ++i) EXPECT(fabs(eps[i] - (i + 1)) < 1e-6);
    EXPECT(fabs(ncbogo_spectrum_omega_g(sp)) < 1e-10);
    EXPECT(ncbogo_spectrum_stable(sp) == 1);

    ncbogo_spectrum_free(sp);
    ncbogo_state_free(state);

    EXPECT(ncbogo_solve_stationary(grid, 1.0, -1.0, 100.0, 1e-11, &state) == NCBOGO_ERR_CONFIG);
    EXPECT(strstr(ncbogo_last_error(), "u_tilde") != NULL);
    ncbogo_grid_free(grid);

    EXPECT(ncbogo_grid_create(48, 1.0, NCBOGO_PERIODIC, 0.0, &grid) == NCBOGO_ERR_CONFIG);
    EXPECT(ncbogo_grid_create(64, 1.0, NCBOGO_PERIODIC, 0.0, NULL) == NCBOGO_ERR_ARGUMENT);
}

static void test_oracles(void) {
    double e = 0.0, ground = 0.0, gap = 0.0;
    int dim = 0;
    EXPECT(ncbogo_bogoliubov_dispersion(1.0, 2.0, 1.0, &e) == NCBOGO_OK);
    EXPECT(fabs(e - 1.5) < 1e-14);
    EXPECT(ncbogo_bogoliubov_dispersion(0.0, 2.0, 1.0, &e) == NCBOGO_ERR_DOMAIN);
    EXPECT(ncbogo_fock_spectrum(20, 1.0, 0.05, 6.283185307179586, 20, &ground, &gap, &dim) == NCBOGO_OK);
    EXPECT(dim == 231);
    EXPECT(gap > 0.5 && gap < 0.8);
    EXPECT(ncbogo_fock_spectrum(700, 1.0, 0.001, 1.0, 700, &ground, &gap, &dim) == NCBOGO_ERR_RESOURCE);
}

static void test_config_run(void) {
    const char* text =
        "scenario = fock-oracle\n[grid]\nn_points = 64\nlength = 6.283185307179586\n"
        "[physics]\nu_tilde = 1\n[numerics]\nk_mode = 1\nfock_n_values = 4,8\n";
    ncbogo_config* cfg = NULL;
    ncbogo_result* res = NULL;
    char* norm = NULL;
    char* summary = NULL;
    char* dir = NULL;

    EXPECT(ncbogo_config_parse(text, &cfg) == NCBOGO_OK);
    EXPECT(ncbogo_config_normalized(cfg, &norm) == NCBOGO_OK);
    EXPECT(norm && strstr(norm, "fock-oracle") != NULL);
    ncbogo_string_free(norm);

    EXPECT(ncbogo_run(cfg, "capi-out", &res) == NCBOGO_OK);
    EXPECT(ncbogo_result_summary(res, &summary) == NCBOGO_OK);
    EXPECT(summary && strstr(summary, "\"status\": \"ok\"") != NULL);
    EXPECT(ncbogo_result_output_dir(res, &dir) == NCBOGO_OK);
    EXPECT(dir && strstr(dir, "capi-out") != NULL);
    ncbogo_string_free(summary);
    ncbogo_string_free(dir);
    ncbogo_result_free(res);
    ncbogo_config_free(cfg);

    cfg = NULL;
    EXPECT(ncbogo_config_parse("scenario = nope\n", &cfg) == NCBOGO_ERR_CONFIG);
    EXPECT(cfg == NULL);
    EXPECT(ncbogo_config_load("/nonexistent.ini", &cfg) == NCBOGO_ERR_CONFIG);
}

int main(void) {
    test_status_mapping();
    test_grid_and_state();
    test_oracles();
    test_config_run();
    if (failures) {
        fprintf(stderr, "%d expectation(s) failed\n", failures);
        return 1;
    }
    printf("all C API checks passed\n");
    return 0;
}
