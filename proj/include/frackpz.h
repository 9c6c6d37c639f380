/* C interface of the frackpz shared library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return fkpz_status; on failure fkpz_last_error() describes the
 * problem for the calling thread.  Field data crosses the boundary as plain
 * double arrays of length fkpz_grid_node_count(), indexed in node order.
 */
#ifndef FRACKPZ_H
#define FRACKPZ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FKPZ_API __declspec(dllexport)
#else
#define FKPZ_API __attribute__((visibility("default")))
#endif

typedef enum {
    FKPZ_OK = 0,
    FKPZ_INVALID_ARGUMENT = 2, /* bad parameters or malformed config */
    FKPZ_NUMERICAL_ERROR = 3,  /* factorization failure, blow-up, non-finite values */
    FKPZ_IO_ERROR = 4          /* unreadable config or unwritable outputs */
} fkpz_status;

typedef struct fkpz_grid fkpz_grid;
typedef struct fkpz_operator fkpz_operator;
typedef struct fkpz_green fkpz_green;

FKPZ_API const char* fkpz_version(void);

/* message of the last failure on this thread; empty string when none */
FKPZ_API const char* fkpz_last_error(void);

/* domain_json: {"shape":"interval","a":...,"b":...} |
 *              {"shape":"disk","center":[x,y],"radius":...} |
 *              {"shape":"square","corner":[x,y],"side":...}                */
FKPZ_API fkpz_status fkpz_grid_create(const char* domain_json, double h, fkpz_grid** out);
FKPZ_API void fkpz_grid_destroy(fkpz_grid* grid);
FKPZ_API int fkpz_grid_node_count(const fkpz_grid* grid);
FKPZ_API int fkpz_grid_dimension(const fkpz_grid* grid);
FKPZ_API double fkpz_grid_cell_measure(const fkpz_grid* grid);
FKPZ_API double fkpz_grid_tail_radius(const fkpz_grid* grid);
/* xy: node_count * dimension doubles, node-major */
FKPZ_API fkpz_status fkpz_grid_nodes(const fkpz_grid* grid, double* xy);
FKPZ_API fkpz_status fkpz_grid_boundary_distance(const fkpz_grid* grid, double* delta);

/* dense (-Delta)^sigma with exterior zero condition, sigma in (0,1) */
FKPZ_API fkpz_status fkpz_operator_assemble(const fkpz_grid* grid, double sigma,
                                            fkpz_operator** out);
FKPZ_API void fkpz_operator_destroy(fkpz_operator* op);
FKPZ_API fkpz_status fkpz_operator_apply(const fkpz_operator* op, const double* u, double* out);

/* factorized solver for (-Delta)^s u = h */
FKPZ_API fkpz_status fkpz_green_create(const fkpz_grid* grid, double s, fkpz_green** out);
FKPZ_API void fkpz_green_destroy(fkpz_green* green);
FKPZ_API fkpz_status fkpz_green_solve(const fkpz_green* green, const double* h, double* u);

/* Runs one experiment described by a JSON config (text, not a path) and
 * writes the field CSVs, report.json and manifest.json under out_dir.
 * seed_override >= 0 replaces the config seed.  Deterministic for identical
 * config + seed. */
FKPZ_API fkpz_status fkpz_run_experiment(const char* config_json, const char* out_dir,
                                         int64_t seed_override);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FRACKPZ_H */
