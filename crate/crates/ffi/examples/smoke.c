/* Minimal consumer of the C API: simulate, estimate, query a rate. */
#include <stdio.h>

#include "weakdens.h"

int main(void) {
    WdProcess *process = NULL;
    if (wd_process_preset("doubling", &process) != WD_STATUS_OK) {
        fprintf(stderr, "preset: %s\n", wd_last_error_message());
        return 1;
    }

    WdPath *path = NULL;
    if (wd_simulate(process, 10000, 42, &path) != WD_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", wd_last_error_message());
        return 2;
    }

    double xs[3] = {0.25, 0.5, 0.75};
    double fx[3];
    if (wd_estimate_grid(path, "compact2", 8, xs, 3, fx) != WD_STATUS_OK) {
        fprintf(stderr, "estimate: %s\n", wd_last_error_message());
        return 3;
    }
    for (int i = 0; i < 3; i++) {
        /* true density is 1 on [0,1] */
        if (fx[i] < 0.5 || fx[i] > 1.5) {
            fprintf(stderr, "estimate off at x=%g: %g\n", xs[i], fx[i]);
            return 4;
        }
    }

    double exponent, log_power;
    if (wd_rate_exponent("t1", "eta", "geometric(1,1)", 1.0, 2.0, 1, 2.0,
                         &exponent, &log_power) != WD_STATUS_OK) {
        fprintf(stderr, "rate: %s\n", wd_last_error_message());
        return 5;
    }
    if (exponent < 0.3999999 || exponent > 0.4000001) {
        fprintf(stderr, "unexpected exponent %g\n", exponent);
        return 6;
    }

    printf("ok: f(0.5) = %.3f, exponent = %.3f\n", fx[1], exponent);
    wd_path_free(path);
    wd_process_free(process);
    return 0;
}
