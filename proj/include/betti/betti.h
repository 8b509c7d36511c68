/* C interface to the betti library. Strings returned through char** are
 * owned by the caller and released with betti_string_free. */
#ifndef BETTI_BETTI_H
#define BETTI_BETTI_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(BETTI_BUILDING)
#define BETTI_API __declspec(dllexport)
#else
#define BETTI_API __declspec(dllimport)
#endif
#else
#define BETTI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct betti_presentation betti_presentation;
typedef struct betti_table betti_table;
typedef struct betti_character betti_character;

typedef enum betti_status {
  BETTI_OK = 0,
  BETTI_ERR_SYNTAX = 1,
  BETTI_ERR_UNKNOWN_GENERATOR = 2,
  BETTI_ERR_EMPTY_GENERATORS = 3,
  BETTI_ERR_INVALID_ARGUMENT = 4,
  BETTI_ERR_PRECONDITION = 5,
  BETTI_ERR_VALIDATION = 6,
  BETTI_ERR_CAP_EXCEEDED = 7,
  BETTI_ERR_UNDECIDABLE = 8,
  BETTI_ERR_ROUTE_DISAGREEMENT = 9,
  BETTI_ERR_IO = 10,
  BETTI_ERR_INTERNAL = 11
} betti_status;

typedef enum betti_mode { BETTI_MODE_EXACT = 0, BETTI_MODE_FLOAT = 1 } betti_mode;

BETTI_API const char* betti_version(void);
BETTI_API const char* betti_status_name(betti_status status);
/* JSON error object of the last failure on this thread, "" if none. */
BETTI_API const char* betti_last_error(void);
/* CLI exit code for a status: 0, 2 or 3. */
BETTI_API int betti_exit_code(betti_status status);
BETTI_API void betti_string_free(char* s);

BETTI_API betti_status betti_presentation_parse(const char* text, betti_presentation** out);
BETTI_API betti_status betti_presentation_load(const char* path, betti_presentation** out);
BETTI_API betti_status betti_presentation_string(const betti_presentation* p, char** out);
BETTI_API int betti_presentation_rank(const betti_presentation* p);
BETTI_API void betti_presentation_free(betti_presentation* p);

/* Regular action of the presented group; max_cosets 0 selects the default. */
BETTI_API betti_status betti_group_table(const betti_presentation* p, size_t max_cosets, betti_table** out);
BETTI_API size_t betti_table_order(const betti_table* t);
BETTI_API betti_status betti_table_json(const betti_table* t, char** out);
BETTI_API void betti_table_free(betti_table* t);

/* Spec mini-language: regular, trivial, perm:<words>, table:<csv>, mix:w*spec+... */
BETTI_API betti_status betti_character_parse(const betti_presentation* p, const char* spec, const char* base_dir,
                                             betti_character** out);
BETTI_API void betti_character_free(betti_character* c);
/* Writes 1 to *valid when psi is a character of the table's group. */
BETTI_API betti_status betti_character_validate(const betti_character* c, const betti_table* t, double tol,
                                                int* valid, char** report_json);

/* Reports are JSON documents. */
BETTI_API betti_status betti_b0(const betti_table* t, const betti_character* c, betti_mode mode, double tol,
                                char** report_json);
BETTI_API betti_status betti_b1(const betti_table* t, const betti_character* c, betti_mode mode, double tol,
                                char** report_json);
/* Permutation character of the quotient by the extra relators. */
BETTI_API betti_status betti_b1_quotient(const betti_presentation* p, const char* extra_relators, size_t max_cosets,
                                         char** report_json);

/* Runs a JSON run configuration exactly as the command line would. */
BETTI_API betti_status betti_run(const char* config_json, char** out, char** err, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
