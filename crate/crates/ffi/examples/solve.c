/* Reads an instance from a file and prints a min-cost popular matching,
 * or a min-cost augmentation plan when none exists. */
#include <stdio.h>
#include <stdlib.h>

#include "popaug.h"

static char *read_file(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long len = ftell(f);
    rewind(f);
    char *buf = malloc((size_t)len + 1);
    if (buf && fread(buf, 1, (size_t)len, f) != (size_t)len) {
        free(buf);
        buf = NULL;
    }
    if (buf) buf[len] = '\0';
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s <instance>\n", argv[0]);
        return 2;
    }
    char *text = read_file(argv[1]);
    if (!text) {
        perror(argv[1]);
        return 2;
    }
    PopaugInstance *inst = NULL;
    PopaugStatus status = popaug_instance_parse(text, &inst);
    free(text);
    if (status != POPAUG_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", status, popaug_last_error());
        return 2;
    }

    PopaugMatching *m = NULL;
    uint64_t cost = 0;
    status = popaug_min_cost_popular(inst, false, &m, &cost);
    if (status == POPAUG_STATUS_OK) {
        char *out = NULL;
        popaug_matching_to_string(inst, m, &out);
        printf("%s# cost %llu\n", out, (unsigned long long)cost);
        popaug_string_free(out);
        popaug_matching_free(m);
    } else if (status == POPAUG_STATUS_NOT_FOUND) {
        char *plan = NULL;
        status = popaug_augment(inst, POPAUG_AUGMENT_MODE_EXACT, false, 1000000, &plan, &cost);
        if (status == POPAUG_STATUS_OK) {
            printf("no popular matching; cheapest augmentation:\n%s", plan);
            popaug_string_free(plan);
        } else {
            fprintf(stderr, "error %d: %s\n", status, popaug_last_error());
        }
    } else {
        fprintf(stderr, "error %d: %s\n", status, popaug_last_error());
    }
    popaug_instance_free(inst);
    return status == POPAUG_STATUS_OK ? 0 : 1;
}
