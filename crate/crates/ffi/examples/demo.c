/* cc demo.c -I../include -L../../../target/release -lhyperion_ffi -lm -lpthread -ldl */
#include <stdio.h>
#include "hyperion.h"

int main(void) {
    HyperionProver *p = NULL;
    if (hyperion_prover_new(NULL, NULL, &p) != HYPERION_STATUS_OK) {
        fprintf(stderr, "%s\n", hyperion_last_error());
        return 2;
    }
    HyperionReport *r = NULL;
    if (hyperion_prove_theorem(p, "p1p2", &r) != HYPERION_STATUS_OK) {
        fprintf(stderr, "%s\n", hyperion_last_error());
        hyperion_prover_free(p);
        return 2;
    }
    int proved = hyperion_report_proved(r);
    printf("p1p2: %s, %zu certificates\n", proved ? "proved" : "failed",
           hyperion_report_certificate_count(r));
    hyperion_report_free(r);
    hyperion_prover_free(p);
    return proved ? 0 : 1;
}
