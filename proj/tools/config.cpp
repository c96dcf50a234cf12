#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bhzcli {

namespace {

using json = nlohmann::json;

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Byte offset -> "line L, column C" for parser diagnostics.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_strict(const std::string& text, const std::string& source) {
  struct Frame {
    std::string path;
    std::set<std::string> keys;
  };
  std::vector<Frame> stack;
  std::string pending_key;
  std::string duplicate;

  const json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack.push_back({stack.empty() ? std::string() : join_path(stack.back().path, pending_key), {}});
        break;
      case json::parse_event_t::object_end:
        if (!stack.empty()) stack.pop_back();
        break;
      case json::parse_event_t::key: {
        pending_key = parsed.get<std::string>();
        if (!stack.empty() && !stack.back().keys.insert(pending_key).second && duplicate.empty()) {
          duplicate = join_path(stack.back().path, pending_key);
        }
        break;
      }
      default:
        break;
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + locate(text, e.byte) + ": malformed JSON (" + e.what() + ")");
  }
  if (!duplicate.empty()) throw ConfigError(source + ": duplicate key '" + duplicate + "'");
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
  return doc;
}

// Reads fields of one object, remembering what was consumed so leftovers can
// be reported as unknown keys.
class Section {
 public:
  Section(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      error(key, "must be a finite number");
      return;
    }
    out = v.get<double>();
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) {
      error(key, "must be an integer");
      return;
    }
    out = v.get<int>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      error(key, "must be a string");
      return;
    }
    out = v.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) {
      error(key, "must be an array of numbers");
      return;
    }
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        error(key, "must contain only finite numbers");
        return;
      }
      out.push_back(x.get<double>());
    }
  }

  std::optional<Section> object(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_object()) {
      error(key, "must be an object");
      return std::nullopt;
    }
    return Section(v, join_path(path_, key), errors_);
  }

  void error(const std::string& key, const std::string& what) { errors_.push_back(join_path(path_, key) + " " + what); }

  void reject_unknown() {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) errors_.push_back("unknown key '" + join_path(path_, key) + "'");
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += "\n  - " + s;
  return out;
}

}  // namespace

const char* to_string(ReferenceModeConfig mode) noexcept {
  switch (mode) {
    case ReferenceModeConfig::Adiabatic: return "adiabatic";
    case ReferenceModeConfig::Initial: return "initial";
    case ReferenceModeConfig::PaperConstant: return "paper-constant";
  }
  return "adiabatic";
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const json doc = parse_strict(text, source);
  RunConfig cfg;
  std::vector<std::string> errors;
  std::vector<std::string> missing;

  Section root(doc, "", errors);

  if (auto model = root.object("model")) {
    if (!model->has("B")) missing.push_back("model.B");
    if (!model->has("M")) missing.push_back("model.M");
    model->number("A", cfg.model.A);
    model->number("B", cfg.model.B);
    model->number("M", cfg.model.M);
    model->number("g", cfg.model.g);
    model->reject_unknown();
  } else if (!doc.contains("model")) {
    missing.push_back("model");
  }

  if (auto grid = root.object("grid")) {
    grid->integer("R", cfg.grid.R);
    grid->integer("N", cfg.grid.N);
    grid->reject_unknown();
  }

  if (auto proto = root.object("protocol")) {
    proto->number("omega_t_over_pi", cfg.protocol.omega_t_over_pi);
    proto->integer("steps", cfg.protocol.steps);
    proto->integer("meas_count", cfg.protocol.meas_count);
    proto->integer("ky_lines", cfg.protocol.ky_lines);
    proto->number("ky", cfg.protocol.ky);
    proto->integer("smoothing_window", cfg.protocol.smoothing_window);
    proto->reject_unknown();
  }

  std::string mode = to_string(cfg.reference_mode);
  root.text("reference_mode", mode);
  if (mode == "adiabatic") {
    cfg.reference_mode = ReferenceModeConfig::Adiabatic;
  } else if (mode == "initial") {
    cfg.reference_mode = ReferenceModeConfig::Initial;
  } else if (mode == "paper-constant") {
    cfg.reference_mode = ReferenceModeConfig::PaperConstant;
  } else {
    root.error("reference_mode", "must be one of adiabatic, initial, paper-constant (got '" + mode + "')");
  }

  root.number("gap_floor", cfg.gap_floor);

  if (auto sweep = root.object("sweep")) {
    sweep->numbers("m_over_2b_values", cfg.sweep.m_over_2b_values);
    sweep->numbers("g_over_a_values", cfg.sweep.g_over_a_values);
    sweep->numbers("omega_t_over_pi_values", cfg.sweep.omega_t_over_pi_values);
    sweep->reject_unknown();
  }

  if (auto frames = root.object("frames")) {
    frames->number("carrier_scale", cfg.frames.carrier_scale);
    frames->number("kx", cfg.frames.kx);
    frames->number("ky", cfg.frames.ky);
    frames->number("duration", cfg.frames.duration);
    frames->integer("steps", cfg.frames.steps);
    frames->integer("checkpoints", cfg.frames.checkpoints);
    frames->number("closure_offset", cfg.frames.closure_offset);
    frames->reject_unknown();
  }

  if (!root.has("output_path")) missing.push_back("output_path");
  root.text("output_path", cfg.output_path);
  root.integer("workers", cfg.workers);

  if (root.has("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      root.error("seed", "must be a non-negative integer");
    }
  }
  root.reject_unknown();

  if (cfg.workers < 1) errors.push_back("workers must be >= 1");
  if (!(cfg.protocol.omega_t_over_pi > 0.0)) errors.push_back("protocol.omega_t_over_pi must be > 0");
  for (double v : cfg.sweep.omega_t_over_pi_values)
    if (!(v > 0.0)) errors.push_back("sweep.omega_t_over_pi_values entries must be > 0");
  if (cfg.protocol.meas_count < 8) errors.push_back("protocol.meas_count must be >= 8");
  if (cfg.protocol.steps < 0 || (cfg.protocol.steps > 0 && cfg.protocol.steps % (2 * cfg.protocol.meas_count) != 0))
    errors.push_back("protocol.steps must be 0 (automatic) or a multiple of 2 * protocol.meas_count");
  if (cfg.protocol.ky_lines < 2) errors.push_back("protocol.ky_lines must be >= 2");
  if (cfg.protocol.smoothing_window < 1) errors.push_back("protocol.smoothing_window must be >= 1");
  if (!(cfg.gap_floor > 0.0)) errors.push_back("gap_floor must be > 0");
  if (cfg.frames.checkpoints < 1) errors.push_back("frames.checkpoints must be >= 1");
  if (cfg.frames.steps < 0) errors.push_back("frames.steps must be >= 0");

  std::string msg;
  if (!missing.empty()) {
    msg += "missing required keys:";
    for (const auto& m : missing) msg += " " + m;
  }
  if (!errors.empty()) msg += (msg.empty() ? "" : "\n") + std::string("invalid configuration:") + bullet_list(errors);
  if (!msg.empty()) throw ConfigError(source + ": " + msg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace bhzcli
