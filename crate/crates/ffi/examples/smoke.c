/* Minimal C consumer of the dedupe-kb C API.
 *
 *   cargo build -p dedupe-kb-ffi --release
 *   cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *      target/release/libdedupe_kb_ffi.a -lpthread -ldl -lm -o smoke
 *   ./smoke listings.csv
 */
#include <stdio.h>
#include "dedupe_kb.h"

static int fail(DkbStatus status) {
    const char *msg = dkb_last_error_message();
    fprintf(stderr, "error %d: %s\n", (int)status, msg ? msg : "(none)");
    return 1;
}

int main(int argc, char **argv) {
    if (argc < 2) {
        fprintf(stderr, "usage: %s KB.csv\n", argv[0]);
        return 2;
    }
    DkbConfig *config = NULL;
    DkbKnowledgeBase *kb = NULL;
    DkbLinkSet *links = NULL;
    size_t candidates = 0;
    DkbStatus s;

    if ((s = dkb_config_default(&config)) != DKB_STATUS_OK) return fail(s);
    if ((s = dkb_kb_load(argv[1], config, &kb)) != DKB_STATUS_OK) return fail(s);
    if ((s = dkb_deduplicate(kb, config, 2, &links, &candidates)) != DKB_STATUS_OK) return fail(s);

    printf("records: %zu\ncandidate pairs: %zu\nlinks: %zu\n",
           dkb_kb_len(kb), candidates, dkb_links_len(links));
    for (size_t i = 0; i < dkb_links_len(links); i++) {
        DkbLink link;
        if ((s = dkb_links_get(links, i, &link)) != DKB_STATUS_OK) return fail(s);
        printf("%s\t%s\t%.6f\n", link.a, link.b, link.probability);
    }

    dkb_links_free(links);
    dkb_kb_free(kb);
    dkb_config_free(config);
    return 0;
}
