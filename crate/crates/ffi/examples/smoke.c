#include <math.h>
#include <stdio.h>
#include "spincorr.h"

int main(void) {
    SpincorrDensity *rho = NULL;
    SpincorrTensor t;
    double z[3] = {0.0, 0.0, 1.0};
    double e = 0.0;

    if (spincorr_density_singlet(&rho) != SPINCORR_STATUS_OK) return 1;
    if (spincorr_density_tensor(rho, &t) != SPINCORR_STATUS_OK) return 1;
    if (spincorr_correlate(&t, z, z, &e) != SPINCORR_STATUS_OK) return 1;
    spincorr_density_free(rho);
    printf("spincorr %s: E(z,z) = %.17g\n", spincorr_version(), e);

    if (spincorr_density_pair(4.0, 0.0, 0.0, 0.0, &rho) != SPINCORR_STATUS_INVALID_ARGUMENT) return 1;
    printf("rejected: %s\n", spincorr_last_error_message());
    return fabs(e + 1.0) < 1e-12 ? 0 : 1;
}
