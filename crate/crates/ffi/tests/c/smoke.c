#include <math.h>
#include <stdio.h>
#include "qfrac.h"

static double identity(double x, void *user) {
    (void)user;
    return x;
}

static double scaled(double x, void *user) {
    return *(double *)user * x;
}

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    QfracParams *p = NULL;
    double v = 0.0;

    CHECK(qfrac_params_new(0.5, &p) == QFRAC_STATUS_OK && p != NULL);

    CHECK(qfrac_gamma(p, 1.0, &v) == QFRAC_STATUS_OK && v == 1.0);
    CHECK(qfrac_gamma(p, 0.5, &v) == QFRAC_STATUS_OK && fabs(v - 1.5720327257863239) < 1e-10);

    CHECK(qfrac_left(p, QFRAC_OPERATOR_INTEGRAL, identity, NULL, 0.0, 1.0, 1.0, &v) == QFRAC_STATUS_OK);
    CHECK(fabs(v - 2.0 / 3.0) < 1e-12);

    double k = 3.0;
    CHECK(qfrac_left(p, QFRAC_OPERATOR_INTEGRAL, scaled, &k, 0.0, 1.0, 1.0, &v) == QFRAC_STATUS_OK);
    CHECK(fabs(v - 2.0) < 1e-12);

    CHECK(qfrac_exp_big_e(p, 2.0, &v) == QFRAC_STATUS_DOMAIN);
    CHECK(qfrac_last_error_message() != NULL);
    CHECK(qfrac_gamma(p, -1.0, &v) == QFRAC_STATUS_POLE);
    CHECK(qfrac_gamma(NULL, 1.0, &v) == QFRAC_STATUS_NULL_POINTER);
    CHECK(qfrac_left(p, QFRAC_OPERATOR_INTEGRAL, NULL, NULL, 0.0, 1.0, 1.0, &v) == QFRAC_STATUS_NULL_POINTER);

    QfracIvpSolution *y = NULL;
    CHECK(qfrac_ivp_solve(p, 1.0, 1.0, 0.0, 1.0, 0, &y) == QFRAC_STATUS_OK);
    double e = 0.0;
    CHECK(qfrac_ivp_evaluate(y, 0.5, &v) == QFRAC_STATUS_OK);
    CHECK(qfrac_exp_e(p, 0.5, &e) == QFRAC_STATUS_OK);
    CHECK(fabs(v - e) < 1e-10);
    qfrac_ivp_free(y);

    qfrac_params_free(p);
    printf("ok %s\n", qfrac_version());
    return 0;
}
