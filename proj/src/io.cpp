#include "nonessential/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nonessential/error.hpp"

namespace nonessential {

using json = nlohmann::ordered_json;

namespace {

const json& required(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("problem file: missing \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError("problem file: " + where + " must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError("problem file: " + where + " must be an integer");
  return j.get<int>();
}

// null stands for an infinite bound with the given sign.
double bound(const json& j, double infinity, const std::string& where) {
  return j.is_null() ? infinity : number(j, where);
}

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<Expr> expressions(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError("problem file: " + where + " must be an array of strings");
  std::vector<Expr> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw FormatError("problem file: " + where + " must be an array of strings");
    out.push_back(Expr::parse(e.get<std::string>()));
  }
  return out;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError("problem file: " + where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, where));
  return out;
}

Backend parse_backend(const std::string& s) {
  if (s == "gradient") return Backend::Gradient;
  if (s == "switchtime") return Backend::SwitchTime;
  throw FormatError("unknown backend '" + s + "' (expected gradient or switchtime)");
}

const char* backend_name(Backend b) { return b == Backend::Gradient ? "gradient" : "switchtime"; }

SolverConfig parse_solver(const json& j) {
  SolverConfig c;
  if (!j.is_object()) throw FormatError("problem file: \"solver\" must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "K") c.K = integer(v, key);
    else if (key == "starts") c.starts = integer(v, key);
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "backend") c.backend = parse_backend(v.get<std::string>());
    else if (key == "max_switches") c.max_switches = integer(v, key);
    else if (key == "max_iterations") c.max_iterations = integer(v, key);
    else if (key == "tol_terminal") c.tol_terminal = number(v, key);
    else if (key == "tol_path") c.tol_path = number(v, key);
    else if (key == "tol_step") c.tol_step = number(v, key);
    else if (key == "tol_opt") c.tol_opt = number(v, key);
    else if (key == "tol_bound") c.tol_bound = number(v, key);
    else if (key == "mu0") c.penalty.mu0 = number(v, key);
    else if (key == "growth") c.penalty.growth = number(v, key);
    else if (key == "rounds") c.penalty.rounds = integer(v, key);
    else if (key == "extra_rounds") c.penalty.extra_rounds = integer(v, key);
    else throw FormatError("problem file: unknown solver key \"" + key + "\"");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("problem file: ") + e.what());
  }
  return c;
}

json solver_json(const SolverConfig& c) {
  return json{{"K", c.K},
              {"starts", c.starts},
              {"seed", c.seed},
              {"backend", backend_name(c.backend)},
              {"max_switches", c.max_switches},
              {"max_iterations", c.max_iterations},
              {"tol_terminal", c.tol_terminal},
              {"tol_path", c.tol_path},
              {"tol_step", c.tol_step},
              {"tol_opt", c.tol_opt},
              {"tol_bound", c.tol_bound},
              {"mu0", c.penalty.mu0},
              {"growth", c.penalty.growth},
              {"rounds", c.penalty.rounds},
              {"extra_rounds", c.penalty.extra_rounds}};
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("problem file: ") + e.what());
  }
  try {
    if (!j.is_object()) throw FormatError("problem file: top level must be an object");
    const auto schema = required(j, "schema");
    if (!schema.is_string() || schema.get<std::string>() != kProblemSchema)
      throw FormatError("problem file: schema must be \"" + std::string(kProblemSchema) + "\"");

    ProblemFile f;
    ProblemSpec& s = f.spec;
    s.name = j.value("name", std::string());
    s.n = integer(required(j, "n"), "n");
    s.r = integer(required(j, "r"), "r");
    if (j.contains("t0")) s.t0 = number(j["t0"], "t0");
    if (j.contains("horizon")) {
      const auto& h = j["horizon"];
      if (h.value("free", false)) {
        s.horizon = FreeHorizon{number(required(h, "Tmin"), "Tmin"), number(required(h, "Tmax"), "Tmax")};
      } else {
        s.horizon = FixedHorizon{number(required(h, "T"), "T")};
      }
    }
    s.dynamics = expressions(required(j, "dynamics"), "dynamics");
    s.initial_state = numbers(required(j, "initial_state"), "initial_state");
    if (j.contains("terminal_state")) {
      for (const auto& v : j["terminal_state"])
        s.terminal_state.push_back(v.is_null() ? std::optional<double>() : number(v, "terminal_state"));
    } else {
      s.terminal_state.assign(static_cast<std::size_t>(std::max(s.n, 0)), std::nullopt);
    }
    if (j.contains("path_constraints")) s.path_constraints = expressions(j["path_constraints"], "path_constraints");
    const double inf = std::numeric_limits<double>::infinity();
    if (j.contains("control_bounds")) {
      const auto& b = j["control_bounds"];
      for (const auto& v : required(b, "lo")) s.control_lo.push_back(bound(v, -inf, "control_bounds.lo"));
      for (const auto& v : required(b, "hi")) s.control_hi.push_back(bound(v, inf, "control_bounds.hi"));
    } else {
      s.control_lo.assign(static_cast<std::size_t>(std::max(s.r, 0)), -inf);
      s.control_hi.assign(static_cast<std::size_t>(std::max(s.r, 0)), inf);
    }
    const auto& objectives = required(j, "objectives");
    if (!objectives.is_array()) throw FormatError("problem file: \"objectives\" must be an array");
    for (const auto& o : objectives) {
      Objective obj;
      obj.name = o.value("name", std::string());
      if (o.contains("integrand")) obj.integrand = Expr::parse(o["integrand"].get<std::string>());
      if (o.contains("composition")) obj.composition = Expr::parse(o["composition"].get<std::string>());
      obj.smooth_abs = o.value("smooth_abs", false);
      s.objectives.push_back(std::move(obj));
    }
    if (j.contains("solver")) f.solver = parse_solver(j["solver"]);
    require_valid(s);
    return f;
  } catch (const json::exception& e) {
    throw FormatError(std::string("problem file: ") + e.what());
  }
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("file not found: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_problem(text.str());
}

std::string dump_problem(const ProblemFile& f) {
  const ProblemSpec& s = f.spec;
  json j;
  j["schema"] = kProblemSchema;
  j["name"] = s.name;
  j["n"] = s.n;
  j["r"] = s.r;
  j["t0"] = s.t0;
  if (const auto* h = std::get_if<FreeHorizon>(&s.horizon)) {
    j["horizon"] = json{{"free", true}, {"Tmin", h->Tmin}, {"Tmax", h->Tmax}};
  } else {
    j["horizon"] = json{{"free", false}, {"T", std::get<FixedHorizon>(s.horizon).T}};
  }
  j["initial_state"] = s.initial_state;
  json terminal = json::array();
  for (const auto& v : s.terminal_state) terminal.push_back(v ? json(*v) : json(nullptr));
  j["terminal_state"] = terminal;
  json lo = json::array(), hi = json::array();
  for (double v : s.control_lo) lo.push_back(bound_json(v));
  for (double v : s.control_hi) hi.push_back(bound_json(v));
  j["control_bounds"] = json{{"lo", lo}, {"hi", hi}};
  json dyn = json::array(), path = json::array(), objs = json::array();
  for (const auto& e : s.dynamics) dyn.push_back(e.to_string());
  for (const auto& e : s.path_constraints) path.push_back(e.to_string());
  for (const auto& o : s.objectives) {
    json oj;
    oj["name"] = o.name;
    if (o.integrand) oj["integrand"] = o.integrand->to_string();
    if (o.composition) oj["composition"] = o.composition->to_string();
    if (o.smooth_abs) oj["smooth_abs"] = true;
    objs.push_back(oj);
  }
  j["dynamics"] = dyn;
  j["path_constraints"] = path;
  j["objectives"] = objs;
  j["solver"] = solver_json(f.solver);
  return j.dump(2) + "\n";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_front_csv(std::ostream& out, const ParetoArchive& archive) {
  std::size_t N = 0, r = 0, K = 0;
  for (const auto& m : archive.members()) {
    N = std::max(N, m.objectives.size());
    r = std::max(r, m.controls.size());
    for (const auto& c : m.controls) K = std::max(K, c.size());
  }
  std::string line;
  for (std::size_t i = 0; i < N; ++i) line += "I" + std::to_string(i + 1) + ",";
  line += "T";
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t k = 0; k < K; ++k) line += ",u" + std::to_string(c + 1) + "_" + std::to_string(k + 1);
  out << line << '\n';
  for (const auto& m : archive.members()) {
    line.clear();
    for (std::size_t i = 0; i < N; ++i) line += (i < m.objectives.size() ? format_number(m.objectives[i]) : "") + ",";
    line += format_number(m.T);
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t k = 0; k < K; ++k) {
        line += ',';
        if (c < m.controls.size() && k < m.controls[c].size()) line += format_number(m.controls[c][k]);
      }
    out << line << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Solution& s) {
  out << "t";
  for (std::size_t i = 0; i < s.states.size(); ++i) out << ",x" << i + 1;
  for (std::size_t c = 0; c < s.controls.size(); ++c) out << ",u" << c + 1;
  out << '\n';
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    std::string line = format_number(s.grid[k]);
    for (const auto& x : s.states) line += "," + (k < x.size() ? format_number(x[k]) : std::string());
    for (const auto& u : s.controls) line += "," + (k < u.size() ? format_number(u[k]) : std::string());
    out << line << '\n';
  }
}

std::string verdict_json(const Verdict& v, std::string_view front_csv) {
  json j;
  j["schema"] = kVerdictSchema;
  j["status"] = to_string(v.status);
  j["extra"] = v.extra + 1;
  json base = json::array();
  for (std::size_t i : v.base) base.push_back(i + 1);
  j["base"] = base;
  j["archive_provenance"] = v.archive_provenance;
  j["archive_size"] = v.archive.size();
  j["front_csv"] = front_csv;
  json evidence = json::array();
  for (const auto& e : v.evidence) {
    json rows = json::array();
    for (std::size_t w : e.witnesses) rows.push_back(w + 1);
    evidence.push_back(json{{"test", e.test},
                            {"outcome", to_string(e.outcome)},
                            {"strength", to_string(e.strength)},
                            {"witness_rows", rows},
                            {"detail", e.detail}});
  }
  j["evidence"] = evidence;
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path.string());
  out << content;
  if (!out) throw FileError("cannot write " + path.string());
}

}  // namespace nonessential
