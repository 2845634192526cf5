#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace vaxeq {

namespace {

using json = nlohmann::ordered_json;

// 12 significant digits: enough to round-trip certified residual comparisons
// in golden files while keeping diffs readable.
std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ScenarioError("scenario schema: " + path + ": " + what);
}

const json& require_key(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(path, std::string("missing key \"") + key + "\"");
  return *it;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) schema_error(path, "unknown key \"" + it.key() + "\"");
  }
}

double require_number(const json& j, const char* key, const std::string& path) {
  const json& v = require_key(j, key, path);
  if (!v.is_number()) schema_error(path + "." + key, "expected a number");
  return v.get<double>();
}

int require_int(const json& j, const char* key, const std::string& path) {
  const json& v = require_key(j, key, path);
  if (!v.is_number_integer()) schema_error(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string require_string(const json& j, const char* key, const std::string& path) {
  const json& v = require_key(j, key, path);
  if (!v.is_string()) schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

FunctionSpec parse_function(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected a function spec object");
  const std::string kind = require_string(j, "kind", path);
  if (kind == "constant") {
    reject_unknown(j, {"kind", "value"}, path);
    return FunctionSpec::constant(require_number(j, "value", path));
  }
  if (kind == "piecewise_linear") {
    reject_unknown(j, {"kind", "breakpoints"}, path);
    const json& bps = require_key(j, "breakpoints", path);
    if (!bps.is_array()) schema_error(path + ".breakpoints", "expected an array of [t, v] pairs");
    std::vector<std::pair<double, double>> pts;
    for (const json& bp : bps) {
      if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number() || !bp[1].is_number())
        schema_error(path + ".breakpoints", "each breakpoint must be a [t, v] number pair");
      pts.emplace_back(bp[0].get<double>(), bp[1].get<double>());
    }
    return FunctionSpec::piecewise_linear(std::move(pts));
  }
  schema_error(path + ".kind", "expected \"constant\" or \"piecewise_linear\"");
}

json function_to_json(const FunctionSpec& f) {
  json j;
  if (f.kind == FunctionSpec::Kind::Constant) {
    j["kind"] = "constant";
    j["value"] = f.value;
  } else {
    j["kind"] = "piecewise_linear";
    json bps = json::array();
    for (const auto& [t, v] : f.breakpoints) bps.push_back(json::array({t, v}));
    j["breakpoints"] = std::move(bps);
  }
  return j;
}

std::vector<FunctionSpec> parse_function_list(const json& j, const char* key, int k,
                                              const std::string& path) {
  const json& arr = require_key(j, key, path);
  const std::string where = path + "." + key;
  if (!arr.is_array()) schema_error(where, "expected an array of function specs");
  if (static_cast<int>(arr.size()) != k)
    schema_error(where, "expected one entry per group (" + std::to_string(k) + ")");
  std::vector<FunctionSpec> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(parse_function(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario syntax: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  reject_unknown(j, {"horizon", "grid_points", "groups", "pi_model", "solver", "oracle", "output"},
                 "scenario");

  Scenario s;
  s.model.horizon = require_number(j, "horizon", "scenario");
  if (!(s.model.horizon > 0.0)) schema_error("scenario.horizon", "must be positive");
  s.grid_points = require_int(j, "grid_points", "scenario");
  if (s.grid_points < 2) schema_error("scenario.grid_points", "must be at least 2");

  const json& groups = require_key(j, "groups", "scenario");
  if (!groups.is_array() || groups.empty()) schema_error("scenario.groups", "expected a non-empty array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const json& gj = groups[i];
    std::string path = "scenario.groups[" + std::to_string(i) + "]";
    if (!gj.is_object()) schema_error(path, "expected a group object");
    if (gj.contains("name") && gj["name"].is_string())
      path = "group \"" + gj["name"].get<std::string>() + "\"";
    reject_unknown(gj, {"name", "epsilon", "r_v", "r_inf"}, path);
    GroupSpec g;
    g.name = require_string(gj, "name", path);
    g.epsilon = parse_function(require_key(gj, "epsilon", path), path + ".epsilon");
    g.r_v = parse_function(require_key(gj, "r_v", path), path + ".r_v");
    g.r_inf = parse_function(require_key(gj, "r_inf", path), path + ".r_inf");
    s.model.groups.push_back(std::move(g));
  }
  const int k = s.model.group_count();

  const json& pj = require_key(j, "pi_model", "scenario");
  if (!pj.is_object()) schema_error("scenario.pi_model", "expected an object");
  const std::string pi_kind = require_string(pj, "kind", "scenario.pi_model");
  if (pi_kind == "constant") {
    reject_unknown(pj, {"kind", "c"}, "scenario.pi_model");
    s.model.pi.kind = PiModel::Kind::Constant;
    s.model.pi.c = parse_function_list(pj, "c", k, "scenario.pi_model");
  } else if (pi_kind == "linear_coverage") {
    reject_unknown(pj, {"kind", "a", "b"}, "scenario.pi_model");
    s.model.pi.kind = PiModel::Kind::LinearCoverage;
    s.model.pi.a = parse_function_list(pj, "a", k, "scenario.pi_model");
    s.model.pi.b = parse_function_list(pj, "b", k, "scenario.pi_model");
  } else {
    schema_error("scenario.pi_model.kind", "expected \"constant\" or \"linear_coverage\"");
  }

  if (j.contains("solver")) {
    const json& sj = j["solver"];
    reject_unknown(sj, {"method", "gamma", "max_iters", "tol", "oracle_fallback_resolution"},
                   "scenario.solver");
    if (sj.contains("method")) {
      const std::string m = require_string(sj, "method", "scenario.solver");
      if (m == "extragradient")
        s.solver.method = SolverParams::Method::Extragradient;
      else if (m == "fixed_point")
        s.solver.method = SolverParams::Method::FixedPoint;
      else
        schema_error("scenario.solver.method", "expected \"extragradient\" or \"fixed_point\"");
    }
    if (sj.contains("gamma")) {
      s.solver.gamma = require_number(sj, "gamma", "scenario.solver");
      if (s.solver.gamma < 0.0) schema_error("scenario.solver.gamma", "must be positive (or 0 for automatic)");
    }
    if (sj.contains("max_iters")) {
      s.solver.max_iters = require_int(sj, "max_iters", "scenario.solver");
      if (s.solver.max_iters < 1) schema_error("scenario.solver.max_iters", "must be at least 1");
    }
    if (sj.contains("tol")) {
      s.solver.tol = require_number(sj, "tol", "scenario.solver");
      if (!(s.solver.tol > 0.0)) schema_error("scenario.solver.tol", "must be positive");
    }
    if (sj.contains("oracle_fallback_resolution")) {
      s.solver.oracle_fallback_resolution = require_int(sj, "oracle_fallback_resolution", "scenario.solver");
      if (s.solver.oracle_fallback_resolution < 2)
        schema_error("scenario.solver.oracle_fallback_resolution", "must be at least 2");
    }
  }

  if (j.contains("oracle")) {
    const json& oj = j["oracle"];
    reject_unknown(oj, {"resolution", "improvement_tol", "max_sweeps"}, "scenario.oracle");
    if (oj.contains("resolution")) {
      s.oracle.resolution = require_number(oj, "resolution", "scenario.oracle");
      if (!(s.oracle.resolution > 0.0 && s.oracle.resolution <= 0.5))
        schema_error("scenario.oracle.resolution", "must lie in (0, 0.5]");
    }
    if (oj.contains("improvement_tol")) {
      s.oracle.improvement_tol = require_number(oj, "improvement_tol", "scenario.oracle");
      if (!(s.oracle.improvement_tol > 0.0))
        schema_error("scenario.oracle.improvement_tol", "must be positive");
    }
    if (oj.contains("max_sweeps")) {
      s.oracle.max_sweeps = require_int(oj, "max_sweeps", "scenario.oracle");
      if (s.oracle.max_sweeps < 1) schema_error("scenario.oracle.max_sweeps", "must be at least 1");
    }
  }

  if (j.contains("output")) {
    const json& oj = j["output"];
    reject_unknown(oj, {"csv", "report"}, "scenario.output");
    if (oj.contains("csv")) s.output.csv = require_string(oj, "csv", "scenario.output");
    if (oj.contains("report")) s.output.report = require_string(oj, "report", "scenario.output");
  }

  require_valid(s.model, s.grid());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["horizon"] = s.model.horizon;
  j["grid_points"] = s.grid_points;
  json groups = json::array();
  for (const GroupSpec& g : s.model.groups) {
    json gj;
    gj["name"] = g.name;
    gj["epsilon"] = function_to_json(g.epsilon);
    gj["r_v"] = function_to_json(g.r_v);
    gj["r_inf"] = function_to_json(g.r_inf);
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  json pj;
  if (s.model.pi.kind == PiModel::Kind::Constant) {
    pj["kind"] = "constant";
    json c = json::array();
    for (const auto& f : s.model.pi.c) c.push_back(function_to_json(f));
    pj["c"] = std::move(c);
  } else {
    pj["kind"] = "linear_coverage";
    json a = json::array(), b = json::array();
    for (const auto& f : s.model.pi.a) a.push_back(function_to_json(f));
    for (const auto& f : s.model.pi.b) b.push_back(function_to_json(f));
    pj["a"] = std::move(a);
    pj["b"] = std::move(b);
  }
  j["pi_model"] = std::move(pj);
  json sj;
  sj["method"] = s.solver.method == SolverParams::Method::Extragradient ? "extragradient" : "fixed_point";
  sj["gamma"] = s.solver.gamma;
  sj["max_iters"] = s.solver.max_iters;
  sj["tol"] = s.solver.tol;
  sj["oracle_fallback_resolution"] = s.solver.oracle_fallback_resolution;
  j["solver"] = std::move(sj);
  json oj;
  oj["resolution"] = s.oracle.resolution;
  oj["improvement_tol"] = s.oracle.improvement_tol;
  oj["max_sweeps"] = s.oracle.max_sweeps;
  j["oracle"] = std::move(oj);
  json out;
  out["csv"] = s.output.csv;
  out["report"] = s.output.report;
  j["output"] = std::move(out);
  return j.dump(2) + "\n";
}

long write_timeseries_csv(std::ostream& os, const GameModel& model, const StrategyProfile& Q,
                          const MultiplierPair& mult, const RegimeClassification& regimes) {
  if (Q.values.empty()) {  // nothing solved yet: header only
    os << "t,group,Q,alpha,beta,u,g,coverage,regime\n";
    return 0;
  }
  if (!(Q.grid == mult.grid) || Q.k != mult.k || !(Q.grid == regimes.grid) || Q.k != regimes.k)
    throw DomainError("profile, multipliers and classification must share a grid");
  if (Q.k != model.group_count()) throw DomainError("profile group count does not match model");

  os << "t,group,Q,alpha,beta,u,g,coverage,regime\n";
  long rows = 0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const double t = Q.grid.node(n);
    const auto slice = Q.slice(n);
    const std::vector<double> u = eval_payoff(model, t, slice);
    const std::vector<double> g = vi_map(model, t, slice);
    const double p = coverage(model, t, slice);
    for (int i = 0; i < Q.k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      os << fmt12(t) << ',' << model.groups[ui].name << ',' << fmt12(Q.at(n, i)) << ','
         << fmt12(mult.alpha_at(n, i)) << ',' << fmt12(mult.beta_at(n, i)) << ',' << fmt12(u[ui])
         << ',' << fmt12(g[ui]) << ',' << fmt12(p) << ',' << regime_label(regimes.at(n, i)) << '\n';
      ++rows;
    }
  }
  return rows;
}

long write_timeseries_csv(const std::filesystem::path& path, const GameModel& model,
                          const StrategyProfile& Q, const MultiplierPair& mult,
                          const RegimeClassification& regimes) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const long rows = write_timeseries_csv(os, model, Q, mult, regimes);
  if (!os) throw IoError("write failed: " + path.string());
  return rows;
}

namespace {

double parse_csv_number(const std::string& field, long row, const char* what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << "csv row " << row << ": cannot parse " << what << " \"" << field << "\"";
    throw IoError(os.str());
  }
  return value;
}

}  // namespace

ImportedSolution read_timeseries_csv(std::istream& is, const Scenario& scenario) {
  const TimeGrid grid = scenario.grid();
  const int k = scenario.model.group_count();

  std::string line;
  if (!std::getline(is, line)) throw IoError("csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,group,Q,alpha,beta,u,g,coverage,regime")
    throw IoError("csv: unexpected header \"" + line + "\"");

  ImportedSolution out;
  out.strategy = StrategyProfile(grid, k);
  out.multipliers = MultiplierPair(grid, k);

  long row = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    }
    if (fields.size() != 9) {
      std::ostringstream os;
      os << "csv row " << row << ": expected 9 fields, got " << fields.size();
      throw IoError(os.str());
    }
    const long expected_rows = static_cast<long>(grid.n_nodes) * k;
    if (row >= expected_rows) throw IoError("csv: more rows than grid_points * groups");
    const int node = static_cast<int>(row / k);
    const int group = static_cast<int>(row % k);

    const double t = parse_csv_number(fields[0], row, "t");
    if (std::abs(t - grid.node(node)) > 1e-9 * std::max(1.0, grid.horizon)) {
      std::ostringstream os;
      os << "csv row " << row << ": node time " << t << " does not match grid node " << node;
      throw IoError(os.str());
    }
    if (fields[1] != scenario.model.groups[static_cast<std::size_t>(group)].name) {
      std::ostringstream os;
      os << "csv row " << row << ": group \"" << fields[1] << "\" does not match scenario order";
      throw IoError(os.str());
    }
    const double q = parse_csv_number(fields[2], row, "Q");
    if (!(q >= 0.0 && q <= 1.0)) {
      std::ostringstream os;
      os << "csv row " << row << ": Q=" << q << " outside [0,1]";
      throw IoError(os.str());
    }
    out.strategy.at(node, group) = q;
    const std::size_t idx = static_cast<std::size_t>(node) * k + group;
    out.multipliers.alpha[idx] = parse_csv_number(fields[3], row, "alpha");
    out.multipliers.beta[idx] = parse_csv_number(fields[4], row, "beta");
    // u, g, coverage and regime are recomputed downstream; only require that
    // the numeric columns parse.
    parse_csv_number(fields[5], row, "u");
    parse_csv_number(fields[6], row, "g");
    parse_csv_number(fields[7], row, "coverage");
    ++row;
  }
  if (row != static_cast<long>(grid.n_nodes) * k) {
    std::ostringstream os;
    os << "csv: expected " << static_cast<long>(grid.n_nodes) * k << " rows, got " << row;
    throw IoError(os.str());
  }
  return out;
}

ImportedSolution read_timeseries_csv(const std::filesystem::path& path, const Scenario& scenario) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open csv: " + path.string());
  return read_timeseries_csv(is, scenario);
}

namespace {

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

std::string write_report(const GameModel& model, const StrategyProfile& Q,
                         const MultiplierPair& mult, const RegimeClassification& regimes,
                         const DualityReport& report) {
  std::ostringstream os;
  os << "equilibrium report\n";
  os << "==================\n";
  os << "groups: " << Q.k << ", horizon: " << fmt6(Q.grid.horizon) << ", nodes: " << Q.grid.n_nodes
     << "\n\n";
  os << report.summary();
  os << "\nconstraint qualification: verified through its computable surrogate --\n"
        "active-set sign conditions plus nonnegativity of the reconstructed\n"
        "multipliers. The tangent-cone form quantifies over sequences and is not\n"
        "evaluated directly.\n\n";
  os << "multiplier interpretation by node\n";
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    os << "t=" << fmt6(Q.grid.node(n)) << "\n";
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    for (int i = 0; i < Q.k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double a = mult.alpha_at(n, i);
      const double b = mult.beta_at(n, i);
      const double marginal = -g[ui];  // du_i/dP_i
      os << "  " << model.groups[ui].name << ": Q=" << fmt6(Q.at(n, i)) << " ["
         << regime_label(regimes.at(n, i)) << "] ";
      if (a > 0.0) {
        os << "case (a): alpha=" << fmt6(a)
           << " > 0 -> probability of getting vaccinated is null";
      } else if (b > 0.0) {
        os << "case (c): beta=" << fmt6(b)
           << " > 0 -> probability of getting vaccinated is maximum";
      } else if (regimes.at(n, i) != Regime::Minus) {
        os << "case (b): alpha=0 -> beta equals the marginal payoff du/dP=" << fmt6(marginal);
      } else {
        os << "case (d): beta=0 -> alpha equals the opposite of the marginal payoff, "
           << fmt6(-marginal);
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace vaxeq
