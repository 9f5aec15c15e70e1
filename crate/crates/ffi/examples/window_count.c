/* cargo build -p kloostat-ffi --release, then from this directory:
   cc -std=c11 -D_DEFAULT_SOURCE window_count.c -I../include \
      ../../../target/release/libkloostat_ffi.a -lm -lpthread -ldl */
#include <math.h>
#include <stdio.h>

#include "kloostat.h"

int main(void) {
    KlsContext *ctx = NULL;
    KlsTable *table = NULL;
    uint64_t count = 0;
    double ratio = 0.0;

    if (kls_context_new(10007, 0, &ctx) != KLS_STATUS_OK ||
        kls_table_compute(ctx, KLS_METHOD_BATCH, &table) != KLS_STATUS_OK) {
        fprintf(stderr, "error: %s\n", kls_last_error_message());
        kls_context_free(ctx);
        return 1;
    }
    kls_window_count(table, 0.0, M_PI / 2.0, &count);
    kls_weil_ratio(table, &ratio);
    printf("p=%llu count(0, pi/2)=%llu weil_ratio=%.6f\n",
           (unsigned long long)kls_table_prime(table), (unsigned long long)count, ratio);

    if (kls_context_new(91, 0, &ctx) != KLS_STATUS_OK)
        printf("expected failure: %s\n", kls_last_error_message());

    kls_table_free(table);
    kls_context_free(ctx);
    return 0;
}
