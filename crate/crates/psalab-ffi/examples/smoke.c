#include <assert.h>
#include <math.h>
#include <stdio.h>
#include "psalab.h"

int main(void) {
    PsalabState *s = psalab_state_vacuum(2);
    assert(s != NULL);
    assert(psalab_apply_two_mode_pa(s, 0, 1, 2.0, 0.0) == PSALAB_STATUS_OK);

    uintptr_t modes[2] = {0, 1};
    double angles[2] = {0.0, 0.0};
    double weights[2] = {1.0, -1.0};
    double var = 0.0;
    assert(psalab_linear_combo_variance(s, modes, angles, weights, 2, &var) == PSALAB_STATUS_OK);
    double expected = 2.0 * pow(sqrt(5.0) - 2.0, 2.0);
    assert(fabs(var - expected) < 1e-12);

    PsalabReport report;
    assert(psalab_psa_joint_metrics(2.0, 5.0, 1.0, 0.6, &report) == PSALAB_STATUS_OK);
    assert(fabs(report.inseparability - 0.138829) < 1e-5);

    assert(psalab_apply_loss(s, 0, 1.5) == PSALAB_STATUS_INVALID_ARGUMENT);
    printf("C smoke test: Var(X1-X2) = %.9f, joint I' = %.9f -> ok\n",
           var, report.inseparability);
    psalab_state_free(s);
    return 0;
}
