#include "bhzsim/bhzsim.h"

#include <new>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"
#include "invariants.hpp"
#include "model.hpp"
#include "tomography.hpp"

struct bhz_model {
  bhz::ModelParams params;
};

struct bhz_curvature_map {
  bhz::CurvatureMap map;
};

struct bhz_tomography_trace {
  std::vector<bhz::TomographyRow> rows;
};

namespace {

struct LastError {
  std::string message;
  std::optional<bhz::KPoint> where;
};

thread_local LastError last_error;

bhz_status status_for(bhz::ErrorKind kind) {
  using bhz::ErrorKind;
  switch (kind) {
    case ErrorKind::Precondition: return BHZ_ERR_PRECONDITION;
    case ErrorKind::DegenerateInput: return BHZ_ERR_DEGENERATE_INPUT;
    case ErrorKind::EnergyGapClosed: return BHZ_ERR_ENERGY_GAP_CLOSED;
    case ErrorKind::SpinGapClosed: return BHZ_ERR_SPIN_GAP_CLOSED;
    case ErrorKind::IllConditionedLink: return BHZ_ERR_ILL_CONDITIONED_LINK;
    case ErrorKind::IntegratorFailure: return BHZ_ERR_INTEGRATOR_FAILURE;
    case ErrorKind::ClosureViolation: return BHZ_ERR_CLOSURE_VIOLATION;
    case ErrorKind::InconsistentData: return BHZ_ERR_INCONSISTENT_DATA;
    case ErrorKind::InvalidInput: return BHZ_ERR_INVALID_ARGUMENT;
  }
  return BHZ_ERR_INTERNAL;
}

bhz_status fail(bhz_status status, std::string message, std::optional<bhz::KPoint> where = std::nullopt) {
  last_error.message = std::move(message);
  last_error.where = where;
  return status;
}

template <typename Fn>
bhz_status guarded(Fn&& fn) {
  try {
    fn();
    last_error = {};
    return BHZ_OK;
  } catch (const bhz::Error& e) {
    return fail(status_for(e.kind()), e.what(), e.where());
  } catch (const std::bad_alloc&) {
    return fail(BHZ_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(BHZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BHZ_ERR_INTERNAL, "unknown error");
  }
}

#define BHZ_REQUIRE(ptr)                                                                  \
  do {                                                                                    \
    if ((ptr) == nullptr) return fail(BHZ_ERR_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

void write_matrix(const bhz::Matrix4& m, double* out) {
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      out[2 * (4 * i + j)] = m(i, j).real();
      out[2 * (4 * i + j) + 1] = m(i, j).imag();
    }
}

bhz::Vector4 read_state(const double* in) {
  bhz::Vector4 v;
  for (std::size_t i = 0; i < 4; ++i) v[i] = {in[2 * i], in[2 * i + 1]};
  return v;
}

bhz::ReferenceMode to_mode(bhz_reference_mode m) {
  switch (m) {
    case BHZ_REFERENCE_ADIABATIC: return bhz::ReferenceMode::Adiabatic;
    case BHZ_REFERENCE_INITIAL: return bhz::ReferenceMode::Initial;
    case BHZ_REFERENCE_PAPER_CONSTANT: return bhz::ReferenceMode::PaperConstant;
  }
  throw bhz::Error(bhz::ErrorKind::InvalidInput, "unknown reference mode");
}

bhz::SpinOperator to_operator(bhz_spin_operator op) {
  switch (op) {
    case BHZ_SPIN_PSEUDOSPIN: return bhz::SpinOperator::Pseudospin;
    case BHZ_SPIN_ORBITAL: return bhz::SpinOperator::Orbital;
  }
  throw bhz::Error(bhz::ErrorKind::InvalidInput, "unknown spin operator");
}

bhz::SweepProtocol to_protocol(const bhz_protocol& p) {
  bhz::SweepProtocol s;
  s.ky = p.ky;
  s.omega_t_over_pi = p.omega_t_over_pi;
  s.meas_count = p.meas_count;
  s.steps = p.steps == 0 ? bhz::default_steps(p.omega_t_over_pi, p.meas_count) : p.steps;
  return s;
}

bhz::ChernOptions to_chern_options(const bhz_chern_options& o) {
  bhz::ChernOptions c;
  c.gap_floor = o.gap_floor;
  if (o.scramble) c.scramble_seed = o.scramble_seed;
  c.op = to_operator(o.spin_operator);
  c.workers = o.workers;
  return c;
}

bhz::MicrowaveParams to_microwaves(const bhz_microwaves& in) {
  bhz::MicrowaveParams mw;
  for (std::size_t k = 0; k < 4; ++k) mw.tones[k] = {in.tones[k].rabi, in.tones[k].detuning, in.tones[k].phase};
  mw.level_plus_e = in.level_plus_e;
  mw.level_plus_h = in.level_plus_h;
  mw.level_minus_e = in.level_minus_e;
  mw.level_minus_h = in.level_minus_h;
  return mw;
}

bhz::FrameCheckOptions to_frame_options(const bhz_frame_options* o) {
  bhz::FrameCheckOptions f;
  if (o != nullptr) {
    f.duration = o->duration;
    f.steps = o->steps;
    f.checkpoints = o->checkpoints;
  }
  return f;
}

void write_report(const bhz::FrameCheckReport& r, bhz_frame_report* out) {
  *out = {r.max_population_deviation, r.max_state_deviation, r.max_model_deviation, r.steps, r.pass ? 1 : 0};
}

}  // namespace

extern "C" {

const char* bhz_version(void) { return "0.1.0"; }

const char* bhz_status_string(bhz_status status) {
  switch (status) {
    case BHZ_OK: return "ok";
    case BHZ_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case BHZ_ERR_PRECONDITION: return "precondition";
    case BHZ_ERR_DEGENERATE_INPUT: return "degenerate-input";
    case BHZ_ERR_ENERGY_GAP_CLOSED: return "energy-gap-closed";
    case BHZ_ERR_SPIN_GAP_CLOSED: return "spin-gap-closed";
    case BHZ_ERR_ILL_CONDITIONED_LINK: return "ill-conditioned-link";
    case BHZ_ERR_INTEGRATOR_FAILURE: return "integrator-failure";
    case BHZ_ERR_CLOSURE_VIOLATION: return "closure-violation";
    case BHZ_ERR_INCONSISTENT_DATA: return "inconsistent-data";
    case BHZ_ERR_OUT_OF_MEMORY: return "out-of-memory";
    case BHZ_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bhz_last_error_message(void) { return last_error.message.c_str(); }

int bhz_last_error_location(double* kx, double* ky) {
  if (!last_error.where) return 0;
  if (kx != nullptr) *kx = last_error.where->kx;
  if (ky != nullptr) *ky = last_error.where->ky;
  return 1;
}

bhz_status bhz_model_create(const bhz_model_params* params, bhz_model** out) {
  BHZ_REQUIRE(params);
  BHZ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    bhz::ModelParams p{params->A, params->B, params->M, params->g};
    p.validate();
    *out = new bhz_model{p};
  });
}

void bhz_model_destroy(bhz_model* model) { delete model; }

bhz_status bhz_model_params_get(const bhz_model* model, bhz_model_params* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  *out = {model->params.A, model->params.B, model->params.M, model->params.g};
  return BHZ_OK;
}

bhz_status bhz_hamiltonian(const bhz_model* model, double kx, double ky, double out[32]) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  return guarded([&] { write_matrix(bhz::hamiltonian(model->params, bhz::Momentum(kx, ky)), out); });
}

bhz_status bhz_energy_gap(const bhz_model* model, int R, int N, bhz_gap* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto g = bhz::energy_gap(model->params, bhz::BZGrid(R, N));
    *out = {g.value, g.where.kx(), g.where.ky()};
  });
}

bhz_status bhz_spin_gap(const bhz_model* model, int R, int N, bhz_spin_operator op, double gap_floor,
                        bhz_gap* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto g = bhz::spin_gap(model->params, bhz::BZGrid(R, N), to_operator(op), gap_floor);
    *out = {g.value, g.where.kx(), g.where.ky()};
  });
}

void bhz_chern_options_default(bhz_chern_options* options) {
  if (options == nullptr) return;
  *options = {60, 60, bhz::kDefaultGapFloor, 0, 0, BHZ_SPIN_PSEUDOSPIN, 1};
}

bhz_status bhz_spin_chern(const bhz_model* model, const bhz_chern_options* options, bhz_invariants* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(options);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto r = bhz::spin_chern(model->params, bhz::BZGrid(options->R, options->N), to_chern_options(*options));
    *out = {r.c_plus, r.c_minus, r.c_s, r.delta_s, r.delta_cv, r.grid_R, r.grid_N};
  });
}

bhz_status bhz_ulink_fields(const bhz_model* model, const bhz_chern_options* options, double* plus, double* minus) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(options);
  return guarded([&] {
    const auto f =
        bhz::ulink_field_map(model->params, bhz::BZGrid(options->R, options->N), to_chern_options(*options));
    for (std::size_t i = 0; i < f.plus.size(); ++i) {
      if (plus != nullptr) plus[i] = f.plus[i];
      if (minus != nullptr) minus[i] = f.minus[i];
    }
  });
}

void bhz_protocol_default(bhz_protocol* protocol) {
  if (protocol == nullptr) return;
  *protocol = {0.0, 24.0, 4800, 60, BHZ_REFERENCE_ADIABATIC, 1, bhz::kDefaultGapFloor};
}

int bhz_default_steps(double omega_t_over_pi, int meas_count) { return bhz::default_steps(omega_t_over_pi, meas_count); }

bhz_status bhz_initial_state(const bhz_model* model, double ky, double gap_floor, double out[8]) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto psi = bhz::prepare_initial_state(model->params, ky, gap_floor);
    for (std::size_t i = 0; i < 4; ++i) {
      out[2 * i] = psi[i].real();
      out[2 * i + 1] = psi[i].imag();
    }
  });
}

bhz_status bhz_curvature_map_create(bhz_curvature_map** out) {
  BHZ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new bhz_curvature_map{}; });
}

void bhz_curvature_map_destroy(bhz_curvature_map* map) { delete map; }

size_t bhz_curvature_map_size(const bhz_curvature_map* map) { return map == nullptr ? 0 : map->map.samples.size(); }

bhz_status bhz_curvature_map_get(const bhz_curvature_map* map, size_t index, bhz_curvature_sample* out) {
  BHZ_REQUIRE(map);
  BHZ_REQUIRE(out);
  if (index >= map->map.samples.size()) return fail(BHZ_ERR_INVALID_ARGUMENT, "curvature sample index out of range");
  const auto& s = map->map.samples[index];
  *out = {s.kx, s.ky, s.f_plus, s.f_minus, s.f_s};
  return BHZ_OK;
}

bhz_status bhz_curvature_map_append(bhz_curvature_map* map, const bhz_curvature_sample* sample) {
  BHZ_REQUIRE(map);
  BHZ_REQUIRE(sample);
  return guarded(
      [&] { map->map.samples.push_back({sample->kx, sample->ky, sample->f_plus, sample->f_minus, sample->f_s}); });
}

bhz_status bhz_lr_line(const bhz_model* model, const bhz_protocol* protocol, bhz_curvature_map* map) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(protocol);
  BHZ_REQUIRE(map);
  return guarded([&] {
    const auto line = bhz::berry_curvature_lr(model->params, to_protocol(*protocol), to_mode(protocol->reference_mode),
                                              protocol->smoothing_window, protocol->gap_floor);
    map->map.omega_t_over_pi = line.omega_t_over_pi;
    map->map.mode = line.mode;
    map->map.append(line);
  });
}

bhz_status bhz_lr_run(const bhz_model* model, const bhz_protocol* protocol, const double* ky_lines,
                      size_t line_count, int workers, bhz_curvature_map* map, bhz_chern_estimate* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(protocol);
  BHZ_REQUIRE(ky_lines);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const std::vector<double> lines(ky_lines, ky_lines + line_count);
    const auto r = bhz::lr_spin_chern(model->params, to_protocol(*protocol), lines, to_mode(protocol->reference_mode),
                                      protocol->smoothing_window, workers, protocol->gap_floor);
    if (map != nullptr) {
      map->map.omega_t_over_pi = r.map.omega_t_over_pi;
      map->map.mode = r.map.mode;
      map->map.append(r.map);
    }
    *out = {r.estimate.c_plus, r.estimate.c_minus, r.estimate.c_s};
  });
}

bhz_status bhz_curvature_integrate(const bhz_curvature_map* map, bhz_chern_estimate* out) {
  BHZ_REQUIRE(map);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto e = bhz::integrate_curvature(map->map);
    *out = {e.c_plus, e.c_minus, e.c_s};
  });
}

bhz_status bhz_ky_line_set(int n, double* out) {
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto lines = bhz::ky_line_set(n);
    for (std::size_t i = 0; i < lines.size(); ++i) out[i] = lines[i];
  });
}

bhz_status bhz_model_to_microwaves(const bhz_model* model, double kx, double ky, double carrier_scale,
                                   bhz_microwaves* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(out);
  return guarded([&] {
    const auto mw = bhz::model_to_microwaves(model->params, bhz::Momentum(kx, ky), carrier_scale);
    for (std::size_t k = 0; k < 4; ++k) out->tones[k] = {mw.tones[k].rabi, mw.tones[k].detuning, mw.tones[k].phase};
    out->level_plus_e = mw.level_plus_e;
    out->level_plus_h = mw.level_plus_h;
    out->level_minus_e = mw.level_minus_e;
    out->level_minus_h = mw.level_minus_h;
  });
}

bhz_status bhz_rotating_frame_hamiltonian(const bhz_microwaves* mw, double out[32]) {
  BHZ_REQUIRE(mw);
  BHZ_REQUIRE(out);
  return guarded([&] { write_matrix(bhz::rotating_frame_hamiltonian(to_microwaves(*mw)), out); });
}

void bhz_frame_options_default(bhz_frame_options* options) {
  if (options == nullptr) return;
  const bhz::FrameCheckOptions d;
  *options = {d.duration, d.steps, d.checkpoints};
}

bhz_status bhz_frames_check(const bhz_microwaves* mw, const double psi0[8], const bhz_frame_options* options,
                            bhz_frame_report* out) {
  BHZ_REQUIRE(mw);
  BHZ_REQUIRE(psi0);
  BHZ_REQUIRE(out);
  return guarded([&] {
    write_report(bhz::frame_equivalence_check(to_microwaves(*mw), read_state(psi0), to_frame_options(options)), out);
  });
}

bhz_status bhz_frames_check_model(const bhz_model* model, double kx, double ky, double carrier_scale,
                                  const double psi0[8], const bhz_frame_options* options, bhz_frame_report* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(psi0);
  BHZ_REQUIRE(out);
  return guarded([&] {
    write_report(bhz::frame_equivalence_check(model->params, bhz::Momentum(kx, ky), carrier_scale, read_state(psi0),
                                              to_frame_options(options)),
                 out);
  });
}

bhz_status bhz_tomography_run(const bhz_model* model, const bhz_protocol* protocol, bhz_tomography_trace** out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(protocol);
  BHZ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto rows = bhz::tomography_trace(model->params, to_protocol(*protocol), protocol->gap_floor);
    *out = new bhz_tomography_trace{std::move(rows)};
  });
}

void bhz_tomography_trace_destroy(bhz_tomography_trace* trace) { delete trace; }

size_t bhz_tomography_trace_size(const bhz_tomography_trace* trace) { return trace == nullptr ? 0 : trace->rows.size(); }

bhz_status bhz_tomography_trace_get(const bhz_tomography_trace* trace, size_t index, bhz_tomography_row* out) {
  BHZ_REQUIRE(trace);
  BHZ_REQUIRE(out);
  if (index >= trace->rows.size()) return fail(BHZ_ERR_INVALID_ARGUMENT, "tomography row index out of range");
  const auto& r = trace->rows[index];
  *out = {r.t,
          r.kx,
          r.tau,
          {r.direct[0], r.direct[1], r.direct[2]},
          {r.pipeline[0], r.pipeline[1], r.pipeline[2]},
          r.block_norm,
          r.residual};
  return BHZ_OK;
}

bhz_status bhz_frame_angle(const bhz_model* model, const bhz_protocol* protocol, double* out) {
  BHZ_REQUIRE(model);
  BHZ_REQUIRE(protocol);
  BHZ_REQUIRE(out);
  return guarded([&] { *out = bhz::frame_angle(model->params, to_protocol(*protocol)); });
}

}  // extern "C"
