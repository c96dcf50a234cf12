#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <tuple>
#include <vector>

#include "bhzsim/bhzsim.h"
#include "csv.hpp"
#include "json.hpp"
#include "ordered_pool.hpp"

namespace bhzcli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct ModelDeleter {
  void operator()(bhz_model* m) const { bhz_model_destroy(m); }
};
struct MapDeleter {
  void operator()(bhz_curvature_map* m) const { bhz_curvature_map_destroy(m); }
};
struct TraceDeleter {
  void operator()(bhz_tomography_trace* t) const { bhz_tomography_trace_destroy(t); }
};
using ModelPtr = std::unique_ptr<bhz_model, ModelDeleter>;
using MapPtr = std::unique_ptr<bhz_curvature_map, MapDeleter>;
using TracePtr = std::unique_ptr<bhz_tomography_trace, TraceDeleter>;

std::string describe_failure(bhz_status s) {
  std::string msg = std::string(bhz_status_string(s)) + ": " + bhz_last_error_message();
  double kx = 0.0;
  double ky = 0.0;
  if (bhz_last_error_location(&kx, &ky)) msg += " [kx=" + format_double(kx) + ", ky=" + format_double(ky) + "]";
  return msg;
}

void check(bhz_status s, const std::string& context) {
  if (s != BHZ_OK) throw NumericalError(context + ": " + describe_failure(s));
}

bool gap_closed(bhz_status s) { return s == BHZ_ERR_ENERGY_GAP_CLOSED || s == BHZ_ERR_SPIN_GAP_CLOSED; }

ModelPtr make_model(const bhz_model_params& p) {
  bhz_model* m = nullptr;
  check(bhz_model_create(&p, &m), "model");
  return ModelPtr(m);
}

bhz_reference_mode to_c(ReferenceModeConfig m) {
  switch (m) {
    case ReferenceModeConfig::Adiabatic: return BHZ_REFERENCE_ADIABATIC;
    case ReferenceModeConfig::Initial: return BHZ_REFERENCE_INITIAL;
    case ReferenceModeConfig::PaperConstant: return BHZ_REFERENCE_PAPER_CONSTANT;
  }
  return BHZ_REFERENCE_ADIABATIC;
}

bhz_protocol make_protocol(const RunConfig& cfg, double omega_t_over_pi, double ky) {
  bhz_protocol p;
  bhz_protocol_default(&p);
  p.ky = ky;
  p.omega_t_over_pi = omega_t_over_pi;
  p.meas_count = cfg.protocol.meas_count;
  p.steps = cfg.protocol.steps > 0 ? cfg.protocol.steps : bhz_default_steps(omega_t_over_pi, p.meas_count);
  p.reference_mode = to_c(cfg.reference_mode);
  p.smoothing_window = cfg.protocol.smoothing_window;
  p.gap_floor = cfg.gap_floor;
  return p;
}

// ---------------------------------------------------------------- sweeps

struct Point {
  double m_over_2b = 0.0;
  double g_over_a = 0.0;
  double omega_t_over_pi = 0.0;
  bhz_model_params params{};
};

std::vector<Point> sweep_points(const RunConfig& cfg, bool vary_omega) {
  const auto& mc = cfg.model;
  std::vector<std::optional<double>> ms(1);
  std::vector<std::optional<double>> gs(1);
  if (!cfg.sweep.m_over_2b_values.empty()) ms.assign(cfg.sweep.m_over_2b_values.begin(), cfg.sweep.m_over_2b_values.end());
  if (!cfg.sweep.g_over_a_values.empty()) gs.assign(cfg.sweep.g_over_a_values.begin(), cfg.sweep.g_over_a_values.end());
  std::vector<double> ots{cfg.protocol.omega_t_over_pi};
  if (vary_omega && !cfg.sweep.omega_t_over_pi_values.empty()) ots = cfg.sweep.omega_t_over_pi_values;

  std::vector<Point> pts;
  for (const auto& m : ms)
    for (const auto& g : gs)
      for (double ot : ots) {
        Point p;
        p.params = {mc.A, mc.B, m ? 2.0 * mc.B * *m : mc.M, g ? *g * mc.A : mc.g};
        p.m_over_2b = m ? *m : mc.M / (2.0 * mc.B);
        p.g_over_a = g ? *g : mc.g / mc.A;
        p.omega_t_over_pi = ot;
        pts.push_back(p);
      }
  const auto key = [](const Point& p) { return std::make_tuple(p.m_over_2b, p.g_over_a, p.omega_t_over_pi); };
  std::stable_sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) { return key(a) < key(b); });
  pts.erase(std::unique(pts.begin(), pts.end(), [&](const Point& a, const Point& b) { return key(a) == key(b); }),
            pts.end());
  return pts;
}

struct Record {
  Point point;
  std::string status = "ok";
  std::string detail;
  std::optional<double> cs_ulink, c_plus, c_minus, cs_lr, delta_s, delta_cv;
  std::string curvature_file;
};

struct UlinkResult {
  std::string status = "ok";
  std::string detail;
  std::optional<double> cs, c_plus, c_minus, delta_s, delta_cv;
};

UlinkResult compute_ulink(const RunConfig& cfg, const Point& pt, bool invariants) {
  UlinkResult r;
  const ModelPtr model = make_model(pt.params);

  bhz_gap gap{};
  check(bhz_energy_gap(model.get(), cfg.grid.R, cfg.grid.N, &gap), "energy gap");
  r.delta_cv = gap.value;

  const bhz_status sg = bhz_spin_gap(model.get(), cfg.grid.R, cfg.grid.N, BHZ_SPIN_PSEUDOSPIN, cfg.gap_floor, &gap);
  if (sg == BHZ_OK) {
    r.delta_s = gap.value;
  } else if (!gap_closed(sg)) {
    check(sg, "spin gap");
  }
  if (!invariants) return r;

  bhz_chern_options opt;
  bhz_chern_options_default(&opt);
  opt.R = cfg.grid.R;
  opt.N = cfg.grid.N;
  opt.gap_floor = cfg.gap_floor;
  if (cfg.seed) {
    opt.scramble = 1;
    opt.scramble_seed = *cfg.seed;
  }
  bhz_invariants inv{};
  const bhz_status s = bhz_spin_chern(model.get(), &opt, &inv);
  if (gap_closed(s)) {
    r.status = "gap-closed";
    r.detail = describe_failure(s);
    return r;
  }
  check(s, "spin Chern number");
  r.cs = inv.c_s;
  r.c_plus = inv.c_plus;
  r.c_minus = inv.c_minus;
  return r;
}

struct LineResult {
  bool closed = false;
  std::string detail;
  std::vector<bhz_curvature_sample> samples;
};

LineResult compute_line(const RunConfig& cfg, const Point& pt, double ky) {
  LineResult out;
  const ModelPtr model = make_model(pt.params);
  const bhz_protocol proto = make_protocol(cfg, pt.omega_t_over_pi, ky);
  bhz_curvature_map* raw = nullptr;
  check(bhz_curvature_map_create(&raw), "curvature map");
  const MapPtr map(raw);
  const bhz_status s = bhz_lr_line(model.get(), &proto, map.get());
  if (gap_closed(s)) {
    out.closed = true;
    out.detail = describe_failure(s);
    return out;
  }
  check(s, "linear response at m_over_2b=" + format_double(pt.m_over_2b) + ", g_over_a=" + format_double(pt.g_over_a) +
               ", ky=" + format_double(ky));
  out.samples.resize(bhz_curvature_map_size(map.get()));
  for (std::size_t i = 0; i < out.samples.size(); ++i) check(bhz_curvature_map_get(map.get(), i, &out.samples[i]), "map");
  return out;
}

std::string stem_of(const std::string& output_path) {
  fs::path p(output_path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string();
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json units_block() {
  return {{"note", "annotation only; all computed quantities are in reduced units with A = 1"},
          {"A", "2*pi x 24 kHz"},
          {"B", "2*pi x 24 kHz"},
          {"T_seconds", 500e-6},
          {"time_unit", "1/A"}};
}

json config_echo(const RunConfig& cfg) {
  return {{"model", {{"A", cfg.model.A}, {"B", cfg.model.B}, {"M", cfg.model.M}, {"g", cfg.model.g}}},
          {"grid", {{"R", cfg.grid.R}, {"N", cfg.grid.N}}},
          {"protocol",
           {{"omega_t_over_pi", cfg.protocol.omega_t_over_pi},
            {"steps", cfg.protocol.steps},
            {"meas_count", cfg.protocol.meas_count},
            {"ky_lines", cfg.protocol.ky_lines},
            {"ky", cfg.protocol.ky},
            {"smoothing_window", cfg.protocol.smoothing_window}}},
          {"reference_mode", to_string(cfg.reference_mode)},
          {"gap_floor", cfg.gap_floor},
          {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)}};
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

const std::vector<std::string> kSweepHeader = {"m_over_2b", "g_over_a", "omega_t_over_pi", "status",
                                               "cs_ulink",  "c_plus",   "c_minus",         "cs_lr",
                                               "delta_s",   "delta_cv", "curvature_file"};

std::vector<std::string> sweep_row(const Record& r) {
  return {format_double(r.point.m_over_2b),
          format_double(r.point.g_over_a),
          format_double(r.point.omega_t_over_pi),
          r.status,
          opt_field(r.cs_ulink),
          opt_field(r.c_plus),
          opt_field(r.c_minus),
          opt_field(r.cs_lr),
          opt_field(r.delta_s),
          opt_field(r.delta_cv),
          r.curvature_file};
}

json sweep_json(const Record& r) {
  json j = {{"m_over_2b", r.point.m_over_2b},
            {"g_over_a", r.point.g_over_a},
            {"omega_t_over_pi", r.point.omega_t_over_pi},
            {"status", r.status},
            {"cs_ulink", opt_json(r.cs_ulink)},
            {"c_plus", opt_json(r.c_plus)},
            {"c_minus", opt_json(r.c_minus)},
            {"cs_lr", opt_json(r.cs_lr)},
            {"delta_s", opt_json(r.delta_s)},
            {"delta_cv", opt_json(r.delta_cv)}};
  if (!r.curvature_file.empty()) j["curvature_file"] = r.curvature_file;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

void write_curvature(const std::string& path, const std::vector<bhz_curvature_sample>& samples) {
  CsvWriter w(path, {"kx", "ky", "f_plus", "f_minus", "f_s"});
  for (const auto& s : samples)
    w.row({format_double(s.kx), format_double(s.ky), format_double(s.f_plus), format_double(s.f_minus),
           format_double(s.f_s)});
  w.close();
}

// One job per (point, line); line == -1 is the point's U-link / gap job.
struct Job {
  std::size_t point = 0;
  int line = -1;
};

struct JobResult {
  UlinkResult ulink;
  LineResult line;
};

int run_sweep(const RunConfig& cfg, std::ostream& log, const std::string& command, bool with_ulink, bool with_lr) {
  const std::vector<Point> points = sweep_points(cfg, with_lr);
  std::vector<double> kys;
  if (with_lr) {
    kys.resize(static_cast<std::size_t>(cfg.protocol.ky_lines));
    check(bhz_ky_line_set(cfg.protocol.ky_lines, kys.data()), "ky lines");
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    jobs.push_back({i, -1});
    if (with_lr)
      for (std::size_t q = 0; q < kys.size(); ++q) jobs.push_back({i, static_cast<int>(q)});
  }

  ensure_parent(cfg.output_path);
  const std::string stem = stem_of(cfg.output_path);
  CsvWriter csv(cfg.output_path, kSweepHeader);
  json records = json::array();

  Record current;
  std::vector<bhz_curvature_sample> samples;

  const auto produce = [&](std::size_t j) {
    const Job& job = jobs[j];
    const Point& pt = points[job.point];
    JobResult r;
    if (job.line < 0) {
      r.ulink = compute_ulink(cfg, pt, with_ulink);
    } else {
      r.line = compute_line(cfg, pt, kys[static_cast<std::size_t>(job.line)]);
    }
    return r;
  };

  const auto finish = [&] {
    if (with_lr && current.status == "ok") {
      bhz_curvature_map* raw = nullptr;
      check(bhz_curvature_map_create(&raw), "curvature map");
      const MapPtr map(raw);
      for (const auto& s : samples) check(bhz_curvature_map_append(map.get(), &s), "curvature map");
      bhz_chern_estimate est{};
      check(bhz_curvature_integrate(map.get(), &est), "curvature integral");
      current.cs_lr = est.c_s;
      const std::size_t index = static_cast<std::size_t>(records.size());
      const std::string file = stem + "_curvature_" + std::to_string(index) + ".csv";
      write_curvature(file, samples);
      current.curvature_file = fs::path(file).filename().string();
    }
    csv.row(sweep_row(current));
    records.push_back(sweep_json(current));
    log << command << " m_over_2b=" << format_double(current.point.m_over_2b)
        << " g_over_a=" << format_double(current.point.g_over_a) << " status=" << current.status;
    if (current.cs_ulink) log << " cs_ulink=" << format_double(*current.cs_ulink);
    if (current.cs_lr) log << " cs_lr=" << format_double(*current.cs_lr);
    log << '\n';
  };

  const auto consume = [&](std::size_t j, JobResult r) {
    const Job& job = jobs[j];
    if (job.line < 0) {
      current = Record{};
      current.point = points[job.point];
      samples.clear();
      current.status = r.ulink.status;
      current.detail = r.ulink.detail;
      current.cs_ulink = r.ulink.cs;
      current.c_plus = r.ulink.c_plus;
      current.c_minus = r.ulink.c_minus;
      current.delta_s = r.ulink.delta_s;
      current.delta_cv = r.ulink.delta_cv;
    } else if (r.line.closed) {
      current.status = "gap-closed";
      if (current.detail.empty()) current.detail = r.line.detail;
    } else {
      samples.insert(samples.end(), r.line.samples.begin(), r.line.samples.end());
    }
    const bool last = j + 1 == jobs.size() || jobs[j + 1].point != job.point;
    if (last) finish();
  };

  run_ordered<JobResult>(jobs.size(), cfg.workers, produce, consume);
  csv.close();

  json summary = {{"command", command}, {"records", records}, {"physical_units", units_block()},
                  {"config", config_echo(cfg)}};
  write_json(stem + ".json", summary);
  return kExitOk;
}

}  // namespace

int cmd_ulink(const RunConfig& cfg, std::ostream& log) { return run_sweep(cfg, log, "ulink", true, false); }

int cmd_lr(const RunConfig& cfg, std::ostream& log) { return run_sweep(cfg, log, "lr", false, true); }

int cmd_sweep(const RunConfig& cfg, std::ostream& log) { return run_sweep(cfg, log, "sweep", true, true); }

int cmd_tomography(const RunConfig& cfg, std::ostream& log) {
  const auto& mc = cfg.model;
  const ModelPtr model = make_model({mc.A, mc.B, mc.M, mc.g});
  const bhz_protocol proto = make_protocol(cfg, cfg.protocol.omega_t_over_pi, cfg.protocol.ky);

  bhz_tomography_trace* raw = nullptr;
  check(bhz_tomography_run(model.get(), &proto, &raw), "tomography");
  const TracePtr trace(raw);
  double phi_end = 0.0;
  check(bhz_frame_angle(model.get(), &proto, &phi_end), "frame angle");

  ensure_parent(cfg.output_path);
  CsvWriter csv(cfg.output_path, {"t", "kx", "tau", "sx_direct", "sy_direct", "sz_direct", "sx_pipeline", "sy_pipeline",
                                  "sz_pipeline", "block_norm", "residual"});
  double max_residual = 0.0;
  double norm_min = 1e300;
  double norm_max = -1e300;
  const std::size_t n = bhz_tomography_trace_size(trace.get());
  for (std::size_t i = 0; i < n; ++i) {
    bhz_tomography_row r{};
    check(bhz_tomography_trace_get(trace.get(), i, &r), "tomography row");
    max_residual = std::max(max_residual, r.residual);
    norm_min = std::min(norm_min, r.block_norm);
    norm_max = std::max(norm_max, r.block_norm);
    csv.row({format_double(r.t), format_double(r.kx), std::to_string(r.tau), format_double(r.direct[0]),
             format_double(r.direct[1]), format_double(r.direct[2]), format_double(r.pipeline[0]),
             format_double(r.pipeline[1]), format_double(r.pipeline[2]), format_double(r.block_norm),
             format_double(r.residual)});
  }
  csv.row({"max_residual", "", "", "", "", "", "", "", "", "", format_double(max_residual)});
  csv.close();

  json summary = {{"command", "tomography"},
                  {"max_residual", max_residual},
                  {"block_norm_min", norm_min},
                  {"block_norm_max", norm_max},
                  {"frame_angle_end", phi_end},
                  {"rows", n},
                  {"physical_units", units_block()},
                  {"config", config_echo(cfg)}};
  write_json(stem_of(cfg.output_path) + ".json", summary);
  log << "tomography rows=" << n << " max_residual=" << format_double(max_residual) << '\n';
  return kExitOk;
}

int cmd_frames_check(const RunConfig& cfg, std::ostream& log) {
  const auto& mc = cfg.model;
  const auto& fc = cfg.frames;
  const ModelPtr model = make_model({mc.A, mc.B, mc.M, mc.g});

  // Fixed generic state with every level populated, norm^2 = 2.
  const double psi0[8] = {0.7, 0.1, 0.3, -0.5, -0.4, 0.2, 0.6, 0.6};
  double scale = 0.0;
  for (double x : psi0) scale += x * x;
  double psi[8];
  for (int i = 0; i < 8; ++i) psi[i] = psi0[i] * std::sqrt(2.0 / scale);

  bhz_frame_options opt;
  bhz_frame_options_default(&opt);
  opt.duration = fc.duration;
  opt.steps = fc.steps;
  opt.checkpoints = fc.checkpoints;

  bhz_frame_report rep{};
  if (fc.closure_offset == 0.0) {
    check(bhz_frames_check_model(model.get(), fc.kx, fc.ky, fc.carrier_scale, psi, &opt, &rep), "frames-check");
  } else {
    bhz_microwaves mw{};
    check(bhz_model_to_microwaves(model.get(), fc.kx, fc.ky, fc.carrier_scale, &mw), "microwaves");
    mw.tones[3].detuning += fc.closure_offset;
    check(bhz_frames_check(&mw, psi, &opt, &rep), "frames-check");
  }

  ensure_parent(cfg.output_path);
  CsvWriter csv(cfg.output_path, {"max_population_deviation", "max_state_deviation", "max_model_deviation", "steps",
                                  "tolerance", "pass"});
  csv.row({format_double(rep.max_population_deviation), format_double(rep.max_state_deviation),
           format_double(rep.max_model_deviation), std::to_string(rep.steps), format_double(1e-6),
           rep.pass ? "true" : "false"});
  csv.close();
  write_json(stem_of(cfg.output_path) + ".json",
             {{"command", "frames-check"},
              {"max_population_deviation", rep.max_population_deviation},
              {"max_state_deviation", rep.max_state_deviation},
              {"max_model_deviation", rep.max_model_deviation},
              {"steps", rep.steps},
              {"pass", rep.pass != 0},
              {"config", config_echo(cfg)}});
  log << "frames-check " << (rep.pass ? "PASS" : "FAIL")
      << " max_population_deviation=" << format_double(rep.max_population_deviation) << '\n';
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (name == "ulink") return cmd_ulink(cfg, log);
    if (name == "lr") return cmd_lr(cfg, log);
    if (name == "sweep") return cmd_sweep(cfg, log);
    if (name == "tomography") return cmd_tomography(cfg, log);
    if (name == "frames-check") return cmd_frames_check(cfg, log);
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace bhzcli
