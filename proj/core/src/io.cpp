#include "muskat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "muskat/common.hpp"

namespace muskat {

namespace {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw data_error("write to '" + path + "' failed");
}

double parse_double(const std::string& s, const std::string& where) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw data_error(where + ": cannot parse number from '" + s + "'");
  while (*end == ' ' || *end == '\r' || *end == '\t') ++end;
  if (*end != '\0') throw data_error(where + ": trailing characters after number in '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  const double v = parse_double(s, where);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) throw data_error(where + ": expected an integer, got '" + s + "'");
  return l;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// ----- strict JSON helpers -----

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw config_error("config: '" + where + "' must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || (it.key() == k);
    if (!ok) throw config_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& where, const char* key, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) throw config_error("config: '" + where + "." + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key, int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw config_error("config: '" + where + "." + key + "' must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw config_error("config: '" + where + "." + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) throw config_error("config: '" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

const char* kind_name(SchemeKind k) { return k == SchemeKind::if_rk4 ? "if_rk4" : "rk4"; }

SchemeKind kind_of(const std::string& s) {
  if (s == "if_rk4") return SchemeKind::if_rk4;
  if (s == "rk4") return SchemeKind::rk4;
  throw config_error("config: scheme.kind must be 'if_rk4' or 'rk4', got '" + s + "'");
}

const char* path_name(RhsPath p) {
  switch (p) {
    case RhsPath::direct: return "direct";
    case RhsPath::series: return "series";
    case RhsPath::regularized: return "regularized";
  }
  return "direct";
}

RhsPath path_of(const std::string& s) {
  if (s == "direct") return RhsPath::direct;
  if (s == "series") return RhsPath::series;
  if (s == "regularized") return RhsPath::regularized;
  throw config_error("config: rhs.path must be 'direct', 'series', or 'regularized', got '" + s +
                     "'");
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ===== snapshots =====

void write_snapshot(const std::string& path, const Field& f, double t) {
  std::ostringstream os;
  os << "d,N,L,t\n"
     << f.grid.dim << "," << f.grid.n << "," << format_g17(f.grid.period) << "," << format_g17(t)
     << "\n";
  for (double v : f.v) os << format_g17(v) << "\n";
  write_text_file(path, os.str());
}

Sample load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open snapshot '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"d", "N", "L", "t"})
    throw data_error("snapshot '" + path + "': bad header line (expected d,N,L,t)");
  if (!std::getline(in, line)) throw data_error("snapshot '" + path + "': missing value line");
  const std::vector<std::string> head = split_csv(line);
  if (head.size() != 4) throw data_error("snapshot '" + path + "': header needs 4 values");
  const int dim = static_cast<int>(parse_long(head[0], path));
  const int n = static_cast<int>(parse_long(head[1], path));
  const double period = parse_double(head[2], path);
  const double t = parse_double(head[3], path);

  Field f = make_field(make_grid(dim, n, period));
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    if (!std::getline(in, line))
      throw data_error("snapshot '" + path + "': truncated (expected " +
                       std::to_string(f.v.size()) + " values)");
    f.v[i] = parse_double(line, path);
  }
  while (std::getline(in, line))
    if (!line.empty() && line != "\r")
      throw data_error("snapshot '" + path + "': trailing data after the field values");
  return Sample{t, std::move(f)};
}

// ===== diagnostics CSV =====

static const char* kDiagHeader =
    "t,l2,linf,grad_linf,norm_1,norm_2,norm_1_plus_delta,identity_residual,flags";

void write_diagnostics_csv(const std::string& path, const std::vector<DiagRecord>& rows) {
  std::ostringstream os;
  os << kDiagHeader << "\n";
  for (const DiagRecord& r : rows) {
    os << format_g17(r.t) << "," << format_g17(r.l2) << "," << format_g17(r.linf) << ","
       << format_g17(r.grad_linf) << "," << format_g17(r.norm_1) << "," << format_g17(r.norm_2)
       << "," << format_g17(r.norm_1_plus_delta) << "," << format_g17(r.identity_residual) << ","
       << r.flags << "\n";
  }
  write_text_file(path, os.str());
}

std::vector<DiagRecord> load_diagnostics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open diagnostics file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != split_csv(kDiagHeader))
    throw data_error("diagnostics '" + path + "': bad header line");
  std::vector<DiagRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> parts = split_csv(line);
    if (parts.size() != 9)
      throw data_error("diagnostics '" + path + "': row needs 9 fields, got " +
                       std::to_string(parts.size()));
    DiagRecord r;
    r.t = parse_double(parts[0], path);
    r.l2 = parse_double(parts[1], path);
    r.linf = parse_double(parts[2], path);
    r.grad_linf = parse_double(parts[3], path);
    r.norm_1 = parse_double(parts[4], path);
    r.norm_2 = parse_double(parts[5], path);
    r.norm_1_plus_delta = parse_double(parts[6], path);
    r.identity_residual = parse_double(parts[7], path);
    r.flags = parts[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

// ===== run config JSON =====

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  check_keys(root, "the top level",
             {"dimension", "N", "L", "rho_bar", "scheme", "rhs", "initial", "diagnostics",
              "output_dir"});

  RunConfig cfg;
  cfg.dimension = get_int(root, "", "dimension", cfg.dimension);
  cfg.n = get_int(root, "", "N", cfg.n);
  cfg.period = get_number(root, "", "L", cfg.period);
  cfg.rho_bar = get_number(root, "", "rho_bar", cfg.rho_bar);
  cfg.output_dir = get_string(root, "", "output_dir", cfg.output_dir);

  if (root.contains("scheme")) {
    const json& s = root.at("scheme");
    check_keys(s, "scheme", {"kind", "dt", "t_end", "stride"});
    cfg.scheme.kind = kind_of(get_string(s, "scheme", "kind", kind_name(cfg.scheme.kind)));
    cfg.scheme.dt = get_number(s, "scheme", "dt", cfg.scheme.dt);
    cfg.scheme.t_end = get_number(s, "scheme", "t_end", cfg.scheme.t_end);
    cfg.scheme.stride = get_int(s, "scheme", "stride", cfg.scheme.stride);
  }
  if (root.contains("rhs")) {
    const json& r = root.at("rhs");
    check_keys(r, "rhs", {"path", "eps", "c_const", "n_max", "theta", "dealias"});
    cfg.rhs.path = path_of(get_string(r, "rhs", "path", path_name(cfg.rhs.path)));
    cfg.rhs.eps = get_number(r, "rhs", "eps", cfg.rhs.eps);
    cfg.rhs.c_const = get_number(r, "rhs", "c_const", cfg.rhs.c_const);
    cfg.rhs.n_max = get_int(r, "rhs", "n_max", cfg.rhs.n_max);
    cfg.rhs.theta = get_number(r, "rhs", "theta", cfg.rhs.theta);
    cfg.rhs.dealias = get_bool(r, "rhs", "dealias", cfg.rhs.dealias);
  }
  if (root.contains("initial")) {
    const json& i = root.at("initial");
    check_keys(i, "initial", {"preset", "amplitude", "modes", "file", "mollify_eps"});
    cfg.initial.preset = get_string(i, "initial", "preset", cfg.initial.preset);
    cfg.initial.amplitude = get_number(i, "initial", "amplitude", cfg.initial.amplitude);
    cfg.initial.file = get_string(i, "initial", "file", cfg.initial.file);
    cfg.initial.mollify_eps = get_number(i, "initial", "mollify_eps", cfg.initial.mollify_eps);
    if (i.contains("modes")) {
      const json& modes = i.at("modes");
      if (!modes.is_array()) throw config_error("config: 'initial.modes' must be an array");
      for (const json& m : modes) {
        check_keys(m, "initial.modes[]", {"k", "amp", "phase"});
        InitialSpec::Mode mode;
        if (!m.contains("k") || !m.at("k").is_array())
          throw config_error("config: each mode needs an integer array 'k'");
        for (const json& kj : m.at("k")) {
          if (!kj.is_number_integer())
            throw config_error("config: mode wavevector entries must be integers");
          mode.k.push_back(kj.get<int>());
        }
        mode.amp = get_number(m, "initial.modes[]", "amp", 0.0);
        mode.phase = get_number(m, "initial.modes[]", "phase", 0.0);
        cfg.initial.modes.push_back(std::move(mode));
      }
    }
  }
  if (root.contains("diagnostics")) {
    const json& d = root.at("diagnostics");
    check_keys(d, "diagnostics",
               {"delta", "identity_tol", "per_step_tol", "slope_tol", "mean_tol", "budget_tol",
                "contraction_tol"});
    cfg.diagnostics.delta = get_number(d, "diagnostics", "delta", cfg.diagnostics.delta);
    cfg.diagnostics.identity_tol =
        get_number(d, "diagnostics", "identity_tol", cfg.diagnostics.identity_tol);
    cfg.diagnostics.per_step_tol =
        get_number(d, "diagnostics", "per_step_tol", cfg.diagnostics.per_step_tol);
    cfg.diagnostics.slope_tol = get_number(d, "diagnostics", "slope_tol", cfg.diagnostics.slope_tol);
    cfg.diagnostics.mean_tol = get_number(d, "diagnostics", "mean_tol", cfg.diagnostics.mean_tol);
    cfg.diagnostics.budget_tol =
        get_number(d, "diagnostics", "budget_tol", cfg.diagnostics.budget_tol);
    cfg.diagnostics.contraction_tol =
        get_number(d, "diagnostics", "contraction_tol", cfg.diagnostics.contraction_tol);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const RunConfig& cfg) {
  json root;
  root["dimension"] = cfg.dimension;
  root["N"] = cfg.n;
  root["L"] = cfg.period;
  root["rho_bar"] = cfg.rho_bar;
  root["scheme"] = {{"kind", kind_name(cfg.scheme.kind)},
                    {"dt", cfg.scheme.dt},
                    {"t_end", cfg.scheme.t_end},
                    {"stride", cfg.scheme.stride}};
  root["rhs"] = {{"path", path_name(cfg.rhs.path)}, {"eps", cfg.rhs.eps},
                 {"c_const", cfg.rhs.c_const},      {"n_max", cfg.rhs.n_max},
                 {"theta", cfg.rhs.theta},          {"dealias", cfg.rhs.dealias}};
  json initial;
  initial["preset"] = cfg.initial.preset;
  initial["amplitude"] = cfg.initial.amplitude;
  initial["file"] = cfg.initial.file;
  initial["mollify_eps"] = cfg.initial.mollify_eps;
  json modes = json::array();
  for (const InitialSpec::Mode& m : cfg.initial.modes)
    modes.push_back({{"k", m.k}, {"amp", m.amp}, {"phase", m.phase}});
  initial["modes"] = modes;
  root["initial"] = initial;
  root["diagnostics"] = {{"delta", cfg.diagnostics.delta},
                         {"identity_tol", cfg.diagnostics.identity_tol},
                         {"per_step_tol", cfg.diagnostics.per_step_tol},
                         {"slope_tol", cfg.diagnostics.slope_tol},
                         {"mean_tol", cfg.diagnostics.mean_tol},
                         {"budget_tol", cfg.diagnostics.budget_tol},
                         {"contraction_tol", cfg.diagnostics.contraction_tol}};
  root["output_dir"] = cfg.output_dir;
  return root.dump(2) + "\n";
}

// ===== run directories =====

namespace {

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", index);
  return buf;
}

}  // namespace

void write_run(const RunResult& result) {
  if (result.config.output_dir.empty())
    throw config_error("write_run: config.output_dir is not set");
  namespace fs = std::filesystem;
  const fs::path dir(result.config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw data_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  write_text_file((dir / "config.json").string(), config_to_json(result.config));
  for (std::size_t i = 0; i < result.samples.size(); ++i)
    write_snapshot((dir / snapshot_name(i)).string(), result.samples[i].f, result.samples[i].t);
  write_diagnostics_csv((dir / "diagnostics.csv").string(), result.diag);
  write_summary((dir / "summary.json").string(), result.monitors, result.aborted,
                result.abort_reason);
}

StoredRun load_run(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw data_error("'" + dir + "' is not a directory");
  StoredRun out;
  out.config = load_config((fs::path(dir) / "config.json").string());

  std::vector<std::string> names;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0 && name.size() >= 4 &&
        name.compare(name.size() - 4, 4, ".csv") == 0)
      names.push_back(e.path().string());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw data_error("'" + dir + "' contains no snapshot files");
  for (const std::string& p : names) out.samples.push_back(load_snapshot(p));
  for (const Sample& s : out.samples)
    if (!(s.f.grid == make_grid(out.config.dimension, out.config.n, out.config.period)))
      throw data_error("'" + dir + "': snapshot grid does not match config.json");

  out.diag = load_diagnostics_csv((fs::path(dir) / "diagnostics.csv").string());
  return out;
}

// ===== summaries =====

std::string monitors_to_json(const std::vector<MonitorResult>& monitors, bool aborted,
                             const std::string& abort_reason) {
  json arr = json::array();
  bool any_fail = false;
  for (const MonitorResult& m : monitors) {
    any_fail = any_fail || (m.status == MonitorStatus::fail);
    arr.push_back({{"check_name", m.check_name},
                   {"status", to_string(m.status)},
                   {"worst_margin", m.worst_margin},
                   {"time_of_worst", m.time_of_worst},
                   {"note", m.note}});
  }
  json root;
  root["monitors"] = arr;
  root["aborted"] = aborted;
  root["abort_reason"] = abort_reason;
  root["passed"] = !aborted && !any_fail;
  return root.dump(2) + "\n";
}

void write_summary(const std::string& path, const std::vector<MonitorResult>& monitors,
                   bool aborted, const std::string& abort_reason) {
  write_text_file(path, monitors_to_json(monitors, aborted, abort_reason));
}

}  // namespace muskat
