#ifndef SURFACE_MMP_H
#define SURFACE_MMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum sm_status {
  SM_STATUS_OK = 0,
  // A required pointer was null.
  SM_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not UTF-8.
  SM_STATUS_INVALID_UTF8 = 2,
  // The document is not well-formed or does not match the schema.
  SM_STATUS_PARSE_ERROR = 3,
  // The document or request is invalid for the operation.
  SM_STATUS_INPUT_ERROR = 4,
  // A checked theorem failed on the computed data.
  SM_STATUS_INVARIANT_VIOLATION = 5,
  // `sm_verify` found failing checks; details are in the output string.
  SM_STATUS_VERIFY_FAILED = 6,
  // Internal panic caught at the boundary.
  SM_STATUS_INTERNAL = 7,
} sm_status;

// Parsed input document.
typedef struct sm_document sm_document;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON document. On success `*out` receives a handle to free with
// [`sm_document_free`].
//
// # Safety
// `text` is a NUL-terminated string; `out` is writable.
enum sm_status sm_document_parse(const char *text, struct sm_document **out);

// Releases a document. Null is ignored.
//
// # Safety
// `doc` is null or a handle from [`sm_document_parse`] not yet freed.
void sm_document_free(struct sm_document *doc);

// Runs a command by its CLI name (`classify`, `mmp`, `ioa`, ...).
//
// `arg` is the curve id for `diff` and `ioa`, the point id for `blowup`, and
// `"qf"` or `"lc"` for `mmp`; pass null otherwise. With `json` nonzero the
// output is the machine report. `exit_code` (may be null) receives the code
// the CLI would exit with, e.g. 2 when `validate` finds violations.
//
// # Safety
// `doc` is a live handle; `command` and `arg` are null or NUL-terminated;
// `out` and `exit_code` are null or writable.
enum sm_status sm_run(const struct sm_document *doc,
                      const char *command,
                      const char *arg,
                      int32_t json,
                      char **out,
                      int32_t *exit_code);

// Re-checks a machine report against the document. `*out` receives one line
// per failed check (empty when everything verifies).
//
// # Safety
// `doc` is a live handle; `report` is NUL-terminated; `out` is null or writable.
enum sm_status sm_verify(const struct sm_document *doc, const char *report, char **out);

// Canonical JSON form of the document.
//
// # Safety
// `doc` is a live handle; `out` is writable.
enum sm_status sm_document_canonical(const struct sm_document *doc, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void sm_string_free(char *s);

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *sm_last_error_message(void);

// Library version as a static string.
const char *sm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURFACE_MMP_H */
