#include <stdio.h>
#include <string.h>

#include "surface_mmp.h"

/* A2 configuration: two (-2)-curves meeting once, both contracted. */
static const char *A2 =
    "{\"schema\": 1,"
    " \"configuration\": {"
    "   \"curves\": [{\"id\": \"E1\", \"self_int\": -2, \"canon_int\": 0},"
    "              {\"id\": \"E2\", \"self_int\": -2, \"canon_int\": 0}],"
    "   \"matrix\": [[-2, 1], [1, -2]],"
    "   \"points\": [{\"id\": \"p\", \"curves\": [\"E1\", \"E2\"]}]},"
    " \"model\": {\"contracted\": [\"E1\", \"E2\"], \"q_factorial\": true}}";

int main(void) {
    sm_document *doc = NULL;
    if (sm_document_parse(A2, &doc) != SM_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", sm_last_error_message());
        return 1;
    }
    char *out = NULL;
    int32_t code = -1;
    if (sm_run(doc, "classify", NULL, 0, &out, &code) != SM_STATUS_OK || code != 0) {
        fprintf(stderr, "classify: %s\n", sm_last_error_message());
        return 1;
    }
    if (strncmp(out, "canonical; numerically-lc: yes; klt: yes", 40) != 0) {
        fprintf(stderr, "unexpected output: %s\n", out);
        return 1;
    }
    sm_string_free(out);

    char *report = NULL;
    if (sm_run(doc, "discrepancies", NULL, 1, &report, NULL) != SM_STATUS_OK) {
        return 1;
    }
    char *failures = NULL;
    sm_status verified = sm_verify(doc, report, &failures);
    sm_string_free(report);
    sm_string_free(failures);
    if (verified != SM_STATUS_OK) {
        return 1;
    }

    if (sm_run(doc, "ioa", NULL, 0, &out, NULL) != SM_STATUS_INPUT_ERROR
        || sm_last_error_message() == NULL) {
        return 1;
    }
    sm_document_free(doc);

    if (sm_document_parse("{\"schema\": 1}", &doc) != SM_STATUS_PARSE_ERROR || doc != NULL) {
        return 1;
    }
    printf("ok %s\n", sm_version());
    return 0;
}
