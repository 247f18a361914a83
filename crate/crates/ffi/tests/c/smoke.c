#include <stdio.h>
#include <string.h>

#include "intcx.h"

#define CHECK(cond)                                                      \
  do {                                                                   \
    if (!(cond)) {                                                       \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,     \
              icx_last_error());                                         \
      return 1;                                                          \
    }                                                                    \
  } while (0)

int main(void) {
  IcxTable *t = NULL;
  CHECK(icx_table_compute(5000, &t) == ICX_STATUS_OK);
  CHECK(icx_table_limit(t) == 5000);

  uint8_t f = 0;
  CHECK(icx_table_get(t, 5000, &f) == ICX_STATUS_OK && f == 26);
  CHECK(icx_table_get(t, 5001, &f) == ICX_STATUS_OUT_OF_RANGE);
  CHECK(strlen(icx_last_error()) > 0);

  char buf[256];
  size_t needed = 0;
  CHECK(icx_witness(t, 6, buf, sizeof buf, &needed) == ICX_STATUS_OK);
  CHECK(strcmp(buf, "(1+1)*(1+1+1)") == 0 && needed == 14);
  CHECK(icx_witness(t, 6, buf, 3, &needed) == ICX_STATUS_BUFFER_TOO_SMALL);

  IcxDbrSummary s;
  CHECK(icx_dbr_summary(t, 1, 0, &s) == ICX_STATUS_OK);
  CHECK(s.b == 2 && s.m0 == 3 && s.m1 == 0 && s.m2 == 1 && s.dsum == 5);

  IcxExploreSummary e;
  CHECK(icx_explore("2^102-2^100-2", 3, 0.55, 64, &e) == ICX_STATUS_OK);
  CHECK(e.iterations == 2 && e.stop == ICX_STOP_NICE);
  CHECK(icx_explore("2^", 3, 0.55, 64, &e) == ICX_STATUS_PARSE);

  double c = 0.0;
  CHECK(icx_guy_constant(0.75, &c) == ICX_STATUS_OK && c > 4.3586 && c < 4.3587);

  icx_table_free(t);
  icx_table_free(NULL);
  puts("ok");
  return 0;
}
