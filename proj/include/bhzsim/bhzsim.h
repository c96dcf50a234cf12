/* bhzsim: spin Chern numbers of the BHZ model.
 *
 * Plain C interface over the C++ core. Every fallible call returns a
 * bhz_status; on failure bhz_last_error_message() describes the problem for
 * the calling thread. Objects are opaque handles released with their
 * matching *_destroy function (NULL is accepted).
 *
 * Complex arrays are interleaved (re, im). Basis order for 4-component
 * states: |+,E1>, |+,H1>, |-,E1>, |-,H1>. Energies in units of A.
 */
#ifndef BHZSIM_BHZSIM_H
#define BHZSIM_BHZSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BHZSIM_BUILDING_LIBRARY)
#    define BHZ_API __declspec(dllexport)
#  else
#    define BHZ_API __declspec(dllimport)
#  endif
#else
#  define BHZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bhz_status {
  BHZ_OK = 0,
  BHZ_ERR_INVALID_ARGUMENT = 1,
  BHZ_ERR_PRECONDITION = 2,
  BHZ_ERR_DEGENERATE_INPUT = 3,
  BHZ_ERR_ENERGY_GAP_CLOSED = 4,
  BHZ_ERR_SPIN_GAP_CLOSED = 5,
  BHZ_ERR_ILL_CONDITIONED_LINK = 6,
  BHZ_ERR_INTEGRATOR_FAILURE = 7,
  BHZ_ERR_CLOSURE_VIOLATION = 8,
  BHZ_ERR_INCONSISTENT_DATA = 9,
  BHZ_ERR_OUT_OF_MEMORY = 10,
  BHZ_ERR_INTERNAL = 11
} bhz_status;

typedef enum bhz_reference_mode {
  BHZ_REFERENCE_ADIABATIC = 0,
  BHZ_REFERENCE_INITIAL = 1,
  BHZ_REFERENCE_PAPER_CONSTANT = 2
} bhz_reference_mode;

typedef enum bhz_spin_operator {
  BHZ_SPIN_PSEUDOSPIN = 0, /* diag(1, 1, -1, -1) */
  BHZ_SPIN_ORBITAL = 1     /* diag(1, -1, 1, -1) */
} bhz_spin_operator;

BHZ_API const char* bhz_version(void);
BHZ_API const char* bhz_status_string(bhz_status status);

/* Message of the last failed call on this thread ("" if none). */
BHZ_API const char* bhz_last_error_message(void);
/* 1 and the offending momentum if the last error carried one, else 0. */
BHZ_API int bhz_last_error_location(double* kx, double* ky);

/* ------------------------------------------------------------------ model */

typedef struct bhz_model_params {
  double A;
  double B;
  double M;
  double g;
} bhz_model_params;

typedef struct bhz_model bhz_model;

BHZ_API bhz_status bhz_model_create(const bhz_model_params* params, bhz_model** out);
BHZ_API void bhz_model_destroy(bhz_model* model);
BHZ_API bhz_status bhz_model_params_get(const bhz_model* model, bhz_model_params* out);

/* 4x4 Bloch Hamiltonian, row-major, 32 doubles. */
BHZ_API bhz_status bhz_hamiltonian(const bhz_model* model, double kx, double ky, double out[32]);

typedef struct bhz_gap {
  double value;
  double kx;
  double ky;
} bhz_gap;

BHZ_API bhz_status bhz_energy_gap(const bhz_model* model, int R, int N, bhz_gap* out);
BHZ_API bhz_status bhz_spin_gap(const bhz_model* model, int R, int N, bhz_spin_operator op, double gap_floor,
                                bhz_gap* out);

/* ------------------------------------------------------------- invariants */

typedef struct bhz_chern_options {
  int R;
  int N;
  double gap_floor;
  int scramble;          /* nonzero: random U(2) mix of each occupied pair */
  uint64_t scramble_seed;
  bhz_spin_operator spin_operator;
  int workers;
} bhz_chern_options;

typedef struct bhz_invariants {
  double c_plus;
  double c_minus;
  double c_s;
  double delta_s;
  double delta_cv;
  int grid_R;
  int grid_N;
} bhz_invariants;

BHZ_API void bhz_chern_options_default(bhz_chern_options* options);
BHZ_API bhz_status bhz_spin_chern(const bhz_model* model, const bhz_chern_options* options, bhz_invariants* out);

/* Per-plaquette field strengths, R*N doubles each, row-major in (r, n).
 * Either output may be NULL. */
BHZ_API bhz_status bhz_ulink_fields(const bhz_model* model, const bhz_chern_options* options, double* plus,
                                    double* minus);

/* --------------------------------------------------------------- dynamics */

typedef struct bhz_protocol {
  double ky;
  double omega_t_over_pi;
  int steps; /* multiple of 2 * meas_count; 0 picks the default for omega_t_over_pi */
  int meas_count;
  bhz_reference_mode reference_mode;
  int smoothing_window;
  double gap_floor;
} bhz_protocol;

BHZ_API void bhz_protocol_default(bhz_protocol* protocol);
BHZ_API int bhz_default_steps(double omega_t_over_pi, int meas_count);

/* Initial state psi+ + psi- at (-pi, ky), 8 doubles. */
BHZ_API bhz_status bhz_initial_state(const bhz_model* model, double ky, double gap_floor, double out[8]);

typedef struct bhz_curvature_sample {
  double kx;
  double ky;
  double f_plus;
  double f_minus;
  double f_s;
} bhz_curvature_sample;

typedef struct bhz_chern_estimate {
  double c_plus;
  double c_minus;
  double c_s;
} bhz_chern_estimate;

typedef struct bhz_curvature_map bhz_curvature_map;

BHZ_API bhz_status bhz_curvature_map_create(bhz_curvature_map** out);
BHZ_API void bhz_curvature_map_destroy(bhz_curvature_map* map);
BHZ_API size_t bhz_curvature_map_size(const bhz_curvature_map* map);
BHZ_API bhz_status bhz_curvature_map_get(const bhz_curvature_map* map, size_t index, bhz_curvature_sample* out);
BHZ_API bhz_status bhz_curvature_map_append(bhz_curvature_map* map, const bhz_curvature_sample* sample);

/* Appends one ky line (protocol->ky). */
BHZ_API bhz_status bhz_lr_line(const bhz_model* model, const bhz_protocol* protocol, bhz_curvature_map* map);

/* Runs every line in ky_lines (protocol->ky ignored), appends them in order
 * and integrates. */
BHZ_API bhz_status bhz_lr_run(const bhz_model* model, const bhz_protocol* protocol, const double* ky_lines,
                              size_t line_count, int workers, bhz_curvature_map* map, bhz_chern_estimate* out);

BHZ_API bhz_status bhz_curvature_integrate(const bhz_curvature_map* map, bhz_chern_estimate* out);

/* n lines from -pi to pi inclusive. */
BHZ_API bhz_status bhz_ky_line_set(int n, double* out);

/* ------------------------------------------------------------- microwaves */

typedef struct bhz_tone {
  double rabi;
  double detuning;
  double phase;
} bhz_tone;

typedef struct bhz_microwaves {
  bhz_tone tones[4];
  double level_plus_e;
  double level_plus_h;
  double level_minus_e;
  double level_minus_h;
} bhz_microwaves;

BHZ_API bhz_status bhz_model_to_microwaves(const bhz_model* model, double kx, double ky, double carrier_scale,
                                           bhz_microwaves* out);
BHZ_API bhz_status bhz_rotating_frame_hamiltonian(const bhz_microwaves* mw, double out[32]);

typedef struct bhz_frame_options {
  double duration;
  int steps; /* 0: automatic */
  int checkpoints;
} bhz_frame_options;

typedef struct bhz_frame_report {
  double max_population_deviation;
  double max_state_deviation;
  double max_model_deviation; /* negative when not applicable */
  int steps;
  int pass;
} bhz_frame_report;

BHZ_API void bhz_frame_options_default(bhz_frame_options* options);
BHZ_API bhz_status bhz_frames_check(const bhz_microwaves* mw, const double psi0[8], const bhz_frame_options* options,
                                    bhz_frame_report* out);
BHZ_API bhz_status bhz_frames_check_model(const bhz_model* model, double kx, double ky, double carrier_scale,
                                          const double psi0[8], const bhz_frame_options* options,
                                          bhz_frame_report* out);

/* ------------------------------------------------------------- tomography */

typedef struct bhz_tomography_row {
  double t;
  double kx;
  int tau; /* +1 or -1 */
  double direct[3];
  double pipeline[3];
  double block_norm;
  double residual;
} bhz_tomography_row;

typedef struct bhz_tomography_trace bhz_tomography_trace;

BHZ_API bhz_status bhz_tomography_run(const bhz_model* model, const bhz_protocol* protocol,
                                      bhz_tomography_trace** out);
BHZ_API void bhz_tomography_trace_destroy(bhz_tomography_trace* trace);
BHZ_API size_t bhz_tomography_trace_size(const bhz_tomography_trace* trace);
BHZ_API bhz_status bhz_tomography_trace_get(const bhz_tomography_trace* trace, size_t index,
                                            bhz_tomography_row* out);

/* Accumulated frame angle at the end of the sweep. */
BHZ_API bhz_status bhz_frame_angle(const bhz_model* model, const bhz_protocol* protocol, double* out);

#ifdef __cplusplus
}
#endif

#endif /* BHZSIM_BHZSIM_H */
