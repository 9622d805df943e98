#ifndef FTCC_H
#define FTCC_H

/* Generated by cbindgen from ftcc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define FTCC_OK 0

// The requested verification ran and the claim failed.
#define FTCC_FAIL 1

// Malformed arguments (unknown names, bad UTF-8, null pointers).
#define FTCC_ERR_USAGE 2

// An enumeration or memory budget was exceeded.
#define FTCC_ERR_BUDGET 3

// Internal error; details via `ftcc_last_error`.
#define FTCC_ERR_INTERNAL 4

// Opaque circuit handle.
typedef struct FtccCircuit FtccCircuit;

// Opaque stabilizer-code handle.
typedef struct FtccCode FtccCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Toolkit version as a static NUL-terminated string.
const char *ftcc_version(void);

// Last error message for this thread (valid until the next failing call).
const char *ftcc_last_error(void);

// Releases a string returned through a `char**` out-parameter.
//
// # Safety
// `s` must have been produced by this library and not freed before.
void ftcc_string_free(char *s);

// Loads a base code (`five_qubit`, `steane`, `rm15`) or a named
// concatenated code (`hcc-steane-1`, ...). Returns NULL on error.
//
// # Safety
// `name` must be a valid NUL-terminated string.
FtccCode *ftcc_code_load(const char *name);

// # Safety
// `code` must come from [`ftcc_code_load`] and not be freed twice.
void ftcc_code_free(FtccCode *code);

// Physical qubit count, or -1 on null.
//
// # Safety
// `code` must be a live handle.
int32_t ftcc_code_qubits(const FtccCode *code);

// Stabilizer generator count, or -1 on null.
//
// # Safety
// `code` must be a live handle.
int32_t ftcc_code_generators(const FtccCode *code);

// Number of structural violations (0 = well formed), or -1 on null.
//
// # Safety
// `code` must be a live handle.
int32_t ftcc_code_validate(const FtccCode *code);

// Brute-force minimum logical weight up to `w_max`; writes -1 to `out`
// when no nontrivial logical exists at or below the cap.
//
// # Safety
// `code` must be a live handle; `out` must be writable.
int32_t ftcc_code_min_logical_weight(const FtccCode *code, uint32_t w_max, int32_t *out);

// Serializes the code to its JSON file format.
//
// # Safety
// `code` must be a live handle; `out` receives an owned string.
int32_t ftcc_code_json(const FtccCode *code, char **out);

// Builds the lifted fault-tolerant gadget for `gate` on the named
// concatenated code. Returns NULL on error.
//
// # Safety
// `spec` and `gate` must be valid NUL-terminated strings.
FtccCircuit *ftcc_gadget_lifted(const char *spec, const char *gate);

// # Safety
// `c` must come from a gadget builder and not be freed twice.
void ftcc_circuit_free(FtccCircuit *c);

// Gate count (markers included), or -1 on null.
//
// # Safety
// `c` must be a live handle.
int32_t ftcc_circuit_gates(const FtccCircuit *c);

// Serializes the circuit to the line-per-gate text format.
//
// # Safety
// `c` must be a live handle; `out` receives an owned string.
int32_t ftcc_circuit_text(const FtccCircuit *c, char **out);

// Runs the effective-distance check for one (code, gate) cell.
// `claimed` = 0 uses the published value. Writes 1 to `out_pass` on PASS.
// Returns FTCC_OK when the check ran (whatever the verdict).
//
// # Safety
// `spec` and `gate` must be valid NUL-terminated strings; `out_pass`
// must be writable.
int32_t ftcc_effective_distance(const char *spec,
                                const char *gate,
                                uint32_t claimed,
                                uint64_t seed,
                                uint64_t samples,
                                int32_t *out_pass);

// Emits the code catalog as JSON.
//
// # Safety
// `out` receives an owned string.
int32_t ftcc_catalog_json(char **out);

// Runs the full effective-distance table; writes the JSON report and
// returns FTCC_OK / FTCC_FAIL for all-pass / any-fail.
//
// # Safety
// `out` receives an owned string.
int32_t ftcc_table1_json(uint64_t seed, uint64_t samples, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FTCC_H */
