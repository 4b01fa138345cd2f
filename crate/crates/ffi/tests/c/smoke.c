#include <stdio.h>
#include "rainham.h"

int main(void) {
    RhFamily *f = NULL;
    if (rh_family_generate("{\"kind\":\"all-clique\",\"n\":6}", &f) != RH_STATUS_OK) return 1;
    uint64_t count = 0;
    if (rh_count_transversals(f, 10, &count) != RH_STATUS_OK || count != 43200) return 2;
    RhTransversal *t = NULL;
    if (rh_find_transversal(f, 1000000, &t) != RH_STATUS_OK) return 3;
    size_t len = rh_transversal_len(t);
    size_t vs[6], cs[6];
    if (len != 6 || rh_transversal_copy(t, vs, cs, 6) != RH_STATUS_OK) return 4;
    if (rh_transversal_validate(f, t) != RH_STATUS_OK) return 5;
    if (rh_family_generate("{\"kind\":\"nope\"}", &f) != RH_STATUS_MALFORMED) return 6;
    if (rh_last_error() == NULL) return 7;
    char *js = rh_transversal_to_json(t);
    printf("%s\n", js);
    rh_string_free(js);
    rh_transversal_free(t);
    rh_family_free(f);
    return 0;
}
