#include <stdio.h>
#include <string.h>
#include "plasmon_focus.h"

int main(void) {
    PfParticle *p = NULL;
    if (pf_particle_new(94.0, 46.0, 1.0, 0.0, 1.49, &p) != PF_STATUS_OK) return 1;
    PfCrossSections c;
    if (pf_cross_sections(p, 589.0, 0, &c) != PF_STATUS_OK) return 2;
    if (!(c.ext > 0.0 && c.sca > 0.0)) return 3;
    PfBeam beam = {589.0, 1.4, 0.7, 1.0, 0.0};
    PfImager *d = NULL;
    if (pf_imager_new(p, &beam, 0, 1.0, 1e-3, &d) != PF_STATUS_OK) return 4;
    double img[9];
    if (pf_raster_scan(d, 3, 3, 50.0, 0.0, img, 9) != PF_STATUS_OK) return 5;
    if (pf_raster_scan(d, 3, 3, 50.0, 0.0, img, 4) != PF_STATUS_BUFFER_TOO_SMALL) return 6;
    if (strlen(pf_last_error_message()) == 0) return 7;
    if (pf_particle_new(-1.0, 46.0, 1.0, 0.0, 1.49, &p) != PF_STATUS_DOMAIN) return 8;
    printf("%s %.6f %.6f\n", pf_version(), c.sca, img[4]);
    pf_imager_free(d);
    pf_particle_free(p);
    return 0;
}
