#include <math.h>
#include <stdio.h>
#include "nnsparse.h"

#define CHECK(cond)                                                     \
    do {                                                                \
        if (!(cond)) {                                                  \
            const char *msg = nns_last_error_message();                 \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,      \
                    msg ? msg : "no message");                          \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    /* Column equal to b, plus an unrelated column. */
    size_t rows[] = {0, 1, 2, 0};
    size_t cols[] = {0, 0, 0, 1};
    double vals[] = {1.0, 2.0, 3.0, 5.0};
    double b[] = {2.0, 4.0, 6.0};
    NnsSystem *sys = NULL;
    CHECK(nns_system_from_triplets(3, 2, rows, cols, vals, 4, b, &sys) == NNS_STATUS_OK);

    size_t m = 0, kept = 0, orig = 0;
    CHECK(nns_system_shape(sys, &m, &kept, &orig) == NNS_STATUS_OK);
    CHECK(m == 3 && kept == 2 && orig == 2);

    NnsReport *rep = NULL;
    CHECK(nns_solve(sys, 1, 0.5, 0, NNS_STOP_RULE_RESIDUAL, &rep) == NNS_STATUS_OK);
    double residual = -1.0;
    size_t support = 0;
    CHECK(nns_report_summary(rep, &residual, &support, NULL, NULL) == NNS_STATUS_OK);
    CHECK(residual < 1e-12 && support == 1);

    size_t ids[1];
    double weights[1];
    size_t written = 0;
    CHECK(nns_report_solution(rep, ids, weights, 1, &written) == NNS_STATUS_OK);
    CHECK(written == 1 && ids[0] == 0 && fabs(weights[0] - 1.0) < 1e-15);

    CHECK(nns_solve(NULL, 1, 0.5, 0, 0, &rep) == NNS_STATUS_NULL_POINTER);
    CHECK(nns_last_error_message() != NULL);

    nns_report_free(rep);
    nns_system_free(sys);
    puts("ok");
    return 0;
}
