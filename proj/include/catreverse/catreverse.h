/* Copyright 2026 The catreverse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the catreverse library.
 *
 * Every fallible call returns a catrev_status. On failure a message is
 * available from catrev_last_error() until the next call on the same thread.
 * Handles are opaque; each *_create has a matching *_free that accepts NULL.
 */

#ifndef CATREVERSE_CATREVERSE_H
#define CATREVERSE_CATREVERSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CATREVERSE_BUILDING_LIBRARY)
#define CATREV_API __declspec(dllexport)
#else
#define CATREV_API __declspec(dllimport)
#endif
#else
#define CATREV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum catrev_status {
  CATREV_OK = 0,
  CATREV_ERR_NULL_ARGUMENT = 1,
  CATREV_ERR_DOMAIN = 2,       /* argument outside the documented range */
  CATREV_ERR_PARSE = 3,        /* malformed configuration, circuit or image */
  CATREV_ERR_IO = 4,           /* file could not be read or written */
  CATREV_ERR_FIT = 5,          /* not enough data for a fit */
  CATREV_ERR_CHECK_FAILED = 6, /* scenario ran but an in-run check failed */
  CATREV_ERR_BUFFER_TOO_SMALL = 7,
  CATREV_ERR_NOT_FOUND = 8,
  CATREV_ERR_INTERNAL = 9
} catrev_status;

CATREV_API const char* catrev_version(void);
CATREV_API const char* catrev_status_string(catrev_status status);
CATREV_API const char* catrev_last_error(void);

/* Worker threads for data-parallel kernels, clamped to [1, CATREVERSE_THREADS]. */
CATREV_API catrev_status catrev_set_threads(int requested, int* in_effect);

/* ---- lattice ---------------------------------------------------------- */

CATREV_API catrev_status catrev_map_forward(unsigned n_q, unsigned n_q_prime, uint64_t i,
                                            uint64_t j, uint64_t* out_i, uint64_t* out_j);
CATREV_API catrev_status catrev_map_inverse(unsigned n_q, unsigned n_q_prime, uint64_t i,
                                            uint64_t j, uint64_t* out_i, uint64_t* out_j);
CATREV_API catrev_status catrev_invert_velocity(unsigned n_q, unsigned n_q_prime, uint64_t i,
                                                uint64_t j, uint64_t* out_i, uint64_t* out_j);
CATREV_API catrev_status catrev_lyapunov_exponent(uint64_t steps, double* out);

/* ---- estimates -------------------------------------------------------- */

CATREV_API catrev_status catrev_resource_estimate(double particles, uint64_t L, unsigned* n_q,
                                                  unsigned* n_q_prime, unsigned* total_qubits);
CATREV_API catrev_status catrev_fidelity_timescale(unsigned n_q, double epsilon, double C,
                                                   double* out);
CATREV_API catrev_status catrev_escape_time(double epsilon, double* out);

/* ---- circuits --------------------------------------------------------- */

typedef enum catrev_circuit_kind { CATREV_CIRCUIT_MAP = 0, CATREV_CIRCUIT_INVERSION = 1 } catrev_circuit_kind;

typedef struct catrev_circuit catrev_circuit;

CATREV_API catrev_status catrev_circuit_create(unsigned n_q, unsigned n_q_prime,
                                               catrev_circuit_kind kind, catrev_circuit** out);
CATREV_API void catrev_circuit_free(catrev_circuit* circuit);
CATREV_API catrev_status catrev_circuit_counts(const catrev_circuit* circuit, uint64_t* nots,
                                               uint64_t* cnots, uint64_t* toffolis);
CATREV_API catrev_status catrev_circuit_qubits(const catrev_circuit* circuit, unsigned* total);
/* Runs the circuit on one computational basis state. */
CATREV_API catrev_status catrev_circuit_apply_classical(const catrev_circuit* circuit,
                                                        uint64_t basis_state, uint64_t* out);
/* Text dump, one gate per line. Writes at most `capacity` bytes including the
 * terminating NUL; *needed receives the full size including the NUL. */
CATREV_API catrev_status catrev_circuit_dump(const catrev_circuit* circuit, char* buffer,
                                             size_t capacity, size_t* needed);

/* ---- state vectors ---------------------------------------------------- */

typedef struct catrev_state catrev_state;

/* Uniform superposition over `count` lattice points given as (i, j) pairs in
 * `ij`, workspace cleared. */
CATREV_API catrev_status catrev_state_create(unsigned n_q, unsigned n_q_prime, const uint64_t* ij,
                                             size_t count, catrev_state** out);
CATREV_API void catrev_state_free(catrev_state* state);
/* Gate noise used by catrev_state_apply; epsilon = 0 switches it off. */
CATREV_API catrev_status catrev_state_set_noise(catrev_state* state, double epsilon, uint64_t seed);
CATREV_API catrev_status catrev_state_apply(catrev_state* state, const catrev_circuit* circuit);
/* Probability of each y index; `length` must equal 2^n_q_prime. */
CATREV_API catrev_status catrev_state_marginal_y(const catrev_state* state, double* out,
                                                 size_t length);
CATREV_API catrev_status catrev_state_fidelity(const catrev_state* a, const catrev_state* b,
                                               double* out);
CATREV_API catrev_status catrev_state_norm(const catrev_state* state, double* out);

/* ---- scenario runs ---------------------------------------------------- */

typedef struct catrev_run catrev_run;

/* scenario: diffusion, profile, image, fidelity, verify or resources. */
CATREV_API catrev_status catrev_run_create(const char* scenario, catrev_run** out);
CATREV_API void catrev_run_free(catrev_run* run);
/* Applies a key=value configuration file. */
CATREV_API catrev_status catrev_run_load(catrev_run* run, const char* path);
/* Applies one "key=value" override. */
CATREV_API catrev_status catrev_run_set(catrev_run* run, const char* assignment);
CATREV_API catrev_status catrev_run_full_preset(catrev_run* run);
/* Executes the scenario and writes its outputs. Returns
 * CATREV_ERR_CHECK_FAILED when any in-run check fails. */
CATREV_API catrev_status catrev_run_execute(catrev_run* run);
/* Human-readable summary of the last execution (checks, metrics, files). */
CATREV_API catrev_status catrev_run_report(const catrev_run* run, char* buffer, size_t capacity,
                                           size_t* needed);
CATREV_API catrev_status catrev_run_metric(const catrev_run* run, const char* name, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CATREVERSE_CATREVERSE_H */
