/* C API for the ifslearn shared library.
 *
 * Usage: load a configuration into an opaque handle, optionally override
 * fields, then run pipeline commands. Commands return 0 on all-pass, 1 when a
 * validated bound fails, 2 on I/O or configuration errors; ifsl_last_error()
 * returns a thread-local message for the most recent failure.
 */
#ifndef IFSLEARN_H
#define IFSLEARN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ifsl_config ifsl_config;

#define IFSL_OK 0
#define IFSL_FAIL 1  /* validation or bound failure */
#define IFSL_ERROR 2 /* I/O or configuration error */

const char* ifsl_version(void);

/* NULL on error; see ifsl_last_error(). */
ifsl_config* ifsl_config_load_file(const char* path);
ifsl_config* ifsl_config_load_json(const char* json_text);
void ifsl_config_free(ifsl_config* config);

int ifsl_config_set_seed(ifsl_config* config, uint64_t seed);
int ifsl_config_set_out_dir(ifsl_config* config, const char* out_dir);
int ifsl_config_set_replicates(ifsl_config* config, size_t replicates);

int ifsl_run_copula(const ifsl_config* config);
int ifsl_run_mixing(const ifsl_config* config);
int ifsl_run_learn(const ifsl_config* config);
int ifsl_run_bounds(const ifsl_config* config);
int ifsl_run_all(const ifsl_config* config);

/* Empty string when no error has occurred on this thread. */
const char* ifsl_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* IFSLEARN_H */
