#include "gvp/problem.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace gvp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  fail(Errc::schema_error, where + ": " + what);
}

double number_or_inf(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    schema_fail(where, "expected a number or \"inf\"");
  }
  schema_fail(where, "expected a number");
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    schema_fail(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

Point parse_point(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) schema_fail(where, "expected a coordinate array");
  Point p;
  for (const auto& c : v) {
    if (!c.is_number()) schema_fail(where, "coordinates must be numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

DiagonalRule parse_diagonal(const json& v, const std::string& where) {
  DiagonalRule rule;
  if (v.is_null()) return rule;
  if (!v.is_object()) schema_fail(where, "expected an object");
  const std::string policy = v.value("policy", "effective_radius");
  if (policy == "effective_radius") {
    rule.policy = DiagonalPolicy::effective_radius;
    rule.scale = v.value("scale", 0.5);
    if (!(rule.scale > 0.0)) schema_fail(where + ".scale", "must be positive");
  } else if (policy == "explicit") {
    rule.policy = DiagonalPolicy::explicit_values;
    if (!v.contains("values") || !v["values"].is_array())
      schema_fail(where + ".values", "expected an array of {point, value}");
    for (const auto& e : v["values"]) {
      rule.values.emplace_back(parse_point(e.at("point"), where + ".values.point"),
                               require_number(e, "value", where + ".values"));
    }
  } else if (policy == "exclude") {
    rule.policy = DiagonalPolicy::exclude;
  } else {
    schema_fail(where + ".policy", "unknown policy '" + policy + "'");
  }
  return rule;
}

Kernel parse_kernel(const json& v, const std::string& where) {
  if (!v.is_object()) schema_fail(where, "expected an object");
  const std::string family = v.value("family", "");
  DiagonalRule rule = parse_diagonal(v.contains("diagonal") ? v["diagonal"] : json(),
                                     where + ".diagonal");
  if (family == "riesz") {
    return Kernel::riesz(require_number(v, "alpha", where),
                         static_cast<int>(require_number(v, "dim", where)), rule);
  }
  if (family == "newtonian") {
    return Kernel::newtonian(static_cast<int>(require_number(v, "dim", where)), rule);
  }
  if (family == "log_unit_ball") {
    return Kernel::log_unit_ball(rule);
  }
  if (family == "custom") {
    if (!v.contains("matrix") || !v["matrix"].is_array())
      schema_fail(where + ".matrix", "expected a matrix");
    const auto& rows = v["matrix"];
    const std::size_t n = rows.size();
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n)
        schema_fail(where + ".matrix", "matrix must be square");
      for (std::size_t j = 0; j < n; ++j) {
        if (!rows[i][j].is_number())
          schema_fail(where + ".matrix", "entries must be numbers");
        m(i, j) = rows[i][j].get<double>();
      }
    }
    return Kernel::custom(std::move(m), rule);
  }
  schema_fail(where + ".family", "unknown kernel family '" + family + "'");
}

Condenser parse_plates(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) schema_fail(where, "expected a nonempty array");
  Condenser c;
  int id = 0;
  for (const auto& pv : v) {
    const std::string pw = where + "[" + std::to_string(id) + "]";
    Plate p;
    p.id = id++;
    if (!pv.contains("sign") || !pv["sign"].is_number_integer() ||
        (pv["sign"].get<int>() != 1 && pv["sign"].get<int>() != -1))
      schema_fail(pw + ".sign", "must be 1 or -1");
    p.sign = pv["sign"].get<int>();
    if (!pv.contains("nodes") || !pv["nodes"].is_array() || pv["nodes"].empty())
      schema_fail(pw + ".nodes", "expected a nonempty array of points");
    for (const auto& nv : pv["nodes"]) p.nodes.push_back(parse_point(nv, pw + ".nodes"));
    if (!pv.contains("g")) {
      p.g.assign(p.nodes.size(), 1.0);
    } else if (pv["g"].is_number()) {
      p.g.assign(p.nodes.size(), pv["g"].get<double>());
    } else if (pv["g"].is_array()) {
      for (const auto& gv : pv["g"]) {
        if (!gv.is_number()) schema_fail(pw + ".g", "entries must be numbers");
        p.g.push_back(gv.get<double>());
      }
      if (p.g.size() != p.nodes.size())
        fail(Errc::validation_error, pw + ".g: length does not match node count");
    } else {
      schema_fail(pw + ".g", "expected a number or an array");
    }
    p.mass = require_number(pv, "mass", pw);
    c.plates.push_back(std::move(p));
  }
  return c;
}

std::vector<std::vector<double>> parse_value_table(const json& v,
                                                   const std::string& where) {
  if (!v.is_array()) schema_fail(where, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) schema_fail(where, "expected an array of arrays");
    std::vector<double> row;
    for (const auto& e : v[i])
      row.push_back(number_or_inf(e, where + "[" + std::to_string(i) + "]"));
    out.push_back(std::move(row));
  }
  return out;
}

ExternalField parse_field(const json& v, const Condenser& c, const std::string& where) {
  if (v.is_null()) return ExternalField::zero(c);
  if (!v.is_object()) schema_fail(where, "expected an object");
  const std::string mode = v.value("mode", "tabulated");
  if (mode == "tabulated")
    return ExternalField::tabulated(parse_value_table(v.at("values"), where + ".values"));
  if (mode == "lsc")
    return ExternalField::lsc_nonnegative(
        parse_value_table(v.at("values"), where + ".values"));
  if (mode == "scalar_source") {
    if (!v.contains("atoms") || !v["atoms"].is_array())
      schema_fail(where + ".atoms", "expected an array of {point, weight}");
    ScalarSignedMeasure sigma;
    for (const auto& e : v["atoms"]) {
      sigma.atoms.push_back({parse_point(e.at("point"), where + ".atoms.point"),
                             require_number(e, "weight", where + ".atoms")});
    }
    return ExternalField::from_scalar_source(std::move(sigma));
  }
  if (mode == "vector_source") {
    DiscreteVectorMeasure nu;
    for (const auto& row : parse_value_table(v.at("weights"), where + ".weights"))
      nu.weights.push_back(row);
    return ExternalField::from_vector_source(std::move(nu));
  }
  schema_fail(where + ".mode", "unknown field mode '" + mode + "'");
}

SolverConfig parse_solver(const json& v, const std::string& where,
                          unsigned long* seed) {
  SolverConfig cfg;
  if (v.is_null()) return cfg;
  if (!v.is_object()) schema_fail(where, "expected an object");
  cfg.max_iters = static_cast<long>(v.value("max_iters", 200000.0));
  cfg.gap_tol_abs = v.value("gap_tol_abs", 1e-9);
  cfg.gap_tol_rel = v.value("gap_tol_rel", 1e-9);
  cfg.support_threshold = v.value("support_threshold", 1e-8);
  if (!(cfg.gap_tol_abs >= 0.0) || !(cfg.gap_tol_rel >= 0.0) || cfg.max_iters < 1)
    fail(Errc::validation_error, where + ": tolerances must be >= 0 and max_iters >= 1");
  const std::string rule = v.value("step_rule", "exact");
  if (rule == "exact")
    cfg.step_rule = StepRule::exact_line_search;
  else if (rule == "harmonic")
    cfg.step_rule = StepRule::harmonic;
  else
    schema_fail(where + ".step_rule", "expected \"exact\" or \"harmonic\"");
  if (v.contains("init")) {
    const auto& init = v["init"];
    if (init.is_string() && init.get<std::string>() == "uniform") {
      cfg.init = InitKind::uniform_feasible;
    } else if (init.is_object() && init.contains("vertex")) {
      cfg.init = InitKind::vertex;
      for (const auto& e : init["vertex"]) {
        if (!e.is_number_integer() || e.get<long>() < 0)
          schema_fail(where + ".init.vertex", "expected nonnegative indices");
        cfg.vertex_init.push_back(e.get<std::size_t>());
      }
    } else {
      schema_fail(where + ".init", "expected \"uniform\" or {\"vertex\": [...]}");
    }
  }
  if (seed && v.contains("seed")) {
    if (!v["seed"].is_number_integer() || v["seed"].get<long long>() < 0)
      schema_fail(where + ".seed", "expected a nonnegative integer");
    *seed = v["seed"].get<unsigned long>();
  }
  return cfg;
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, origin + ": " + e.what());
  }
  if (!doc.is_object()) fail(Errc::schema_error, origin + ": expected a JSON object");

  ProblemFile pf;
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    schema_fail("schema_version", "required integer");
  pf.schema_version = doc["schema_version"].get<int>();
  if (pf.schema_version != 1)
    schema_fail("schema_version", "unsupported version " + std::to_string(pf.schema_version));

  if (!doc.contains("kernel")) schema_fail("kernel", "required");
  pf.kernel = parse_kernel(doc["kernel"], "kernel");
  if (!doc.contains("plates")) schema_fail("plates", "required");
  pf.condenser = parse_plates(doc["plates"], "plates");

  const ValidationResult vr = validate_condenser(pf.condenser);
  if (!vr.ok) {
    std::ostringstream msg;
    msg << "condenser invalid:";
    for (const auto& rec : vr.violations)
      msg << ' ' << violation_name(rec.kind) << "(plate " << rec.plate << ")";
    fail(Errc::validation_error, msg.str());
  }

  pf.field = parse_field(doc.contains("field") ? doc["field"] : json(), pf.condenser,
                         "field");
  // Cross-reference checks that need the condenser shape.
  if (pf.field.mode == FieldMode::tabulated || pf.field.mode == FieldMode::lsc) {
    if (pf.field.values.size() != pf.condenser.plates.size())
      fail(Errc::validation_error, "field.values: plate count mismatch");
    for (std::size_t i = 0; i < pf.field.values.size(); ++i)
      if (pf.field.values[i].size() != pf.condenser.plates[i].nodes.size())
        fail(Errc::validation_error, "field.values: node count mismatch on plate " +
                                         std::to_string(i));
  }
  if (pf.field.mode == FieldMode::vector_source) {
    if (pf.field.nu.weights.size() != pf.condenser.plates.size())
      fail(Errc::validation_error, "field.weights: plate count mismatch");
    for (std::size_t i = 0; i < pf.field.nu.weights.size(); ++i)
      if (pf.field.nu.weights[i].size() != pf.condenser.plates[i].nodes.size())
        fail(Errc::validation_error, "field.weights: node count mismatch on plate " +
                                         std::to_string(i));
  }

  pf.solver = parse_solver(doc.contains("solver") ? doc["solver"] : json(), "solver",
                           &pf.seed);
  if (doc.contains("exhaustion")) {
    const auto& e = doc["exhaustion"];
    ExhaustionSpec spec;
    spec.steps = static_cast<int>(e.value("steps", 1.0));
    if (spec.steps < 1) fail(Errc::validation_error, "exhaustion.steps must be >= 1");
    const std::string order = e.value("order", "index");
    if (order == "centroid")
      spec.order = ExhaustionOrder::by_distance_from_centroid;
    else if (order == "index")
      spec.order = ExhaustionOrder::by_index;
    else
      schema_fail("exhaustion.order", "expected \"centroid\" or \"index\"");
    pf.exhaustion = spec;
  }
  return pf;
}

ProblemFile parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), path);
}

namespace {

ordered_json point_json(const Point& p) {
  ordered_json arr = ordered_json::array();
  for (double c : p) arr.push_back(c);
  return arr;
}

ordered_json value_or_inf(double v) {
  if (v == kInf) return "inf";
  return v;
}

}  // namespace

ordered_json serialize_problem(const ProblemFile& pf) {
  ordered_json doc;
  doc["schema_version"] = pf.schema_version;

  ordered_json k;
  switch (pf.kernel.family()) {
    case KernelFamily::riesz:
      k["family"] = "riesz";
      k["alpha"] = pf.kernel.alpha();
      k["dim"] = pf.kernel.dim();
      break;
    case KernelFamily::newtonian:
      k["family"] = "newtonian";
      k["dim"] = pf.kernel.dim();
      break;
    case KernelFamily::log_unit_ball:
      k["family"] = "log_unit_ball";
      break;
    case KernelFamily::custom: {
      k["family"] = "custom";
      ordered_json m = ordered_json::array();
      for (std::size_t i = 0; i < pf.kernel.matrix().rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < pf.kernel.matrix().cols(); ++j)
          row.push_back(pf.kernel.matrix()(i, j));
        m.push_back(std::move(row));
      }
      k["matrix"] = std::move(m);
      break;
    }
  }
  ordered_json diag;
  switch (pf.kernel.diagonal().policy) {
    case DiagonalPolicy::effective_radius:
      diag["policy"] = "effective_radius";
      diag["scale"] = pf.kernel.diagonal().scale;
      break;
    case DiagonalPolicy::explicit_values: {
      diag["policy"] = "explicit";
      ordered_json vals = ordered_json::array();
      for (const auto& [pt, v] : pf.kernel.diagonal().values) {
        ordered_json e;
        e["point"] = point_json(pt);
        e["value"] = v;
        vals.push_back(std::move(e));
      }
      diag["values"] = std::move(vals);
      break;
    }
    case DiagonalPolicy::exclude:
      diag["policy"] = "exclude";
      break;
  }
  k["diagonal"] = std::move(diag);
  doc["kernel"] = std::move(k);

  ordered_json plates = ordered_json::array();
  for (const Plate& p : pf.condenser.plates) {
    ordered_json pv;
    pv["sign"] = p.sign;
    ordered_json nodes = ordered_json::array();
    for (const auto& n : p.nodes) nodes.push_back(point_json(n));
    pv["nodes"] = std::move(nodes);
    ordered_json g = ordered_json::array();
    for (double v : p.g) g.push_back(v);
    pv["g"] = std::move(g);
    pv["mass"] = p.mass;
    plates.push_back(std::move(pv));
  }
  doc["plates"] = std::move(plates);

  ordered_json field;
  switch (pf.field.mode) {
    case FieldMode::tabulated:
    case FieldMode::lsc: {
      field["mode"] = pf.field.mode == FieldMode::lsc ? "lsc" : "tabulated";
      ordered_json values = ordered_json::array();
      for (const auto& plate : pf.field.values) {
        ordered_json row = ordered_json::array();
        for (double v : plate) row.push_back(value_or_inf(v));
        values.push_back(std::move(row));
      }
      field["values"] = std::move(values);
      break;
    }
    case FieldMode::scalar_source: {
      field["mode"] = "scalar_source";
      ordered_json atoms = ordered_json::array();
      for (const auto& a : pf.field.sigma.atoms) {
        ordered_json e;
        e["point"] = point_json(a.where);
        e["weight"] = a.weight;
        atoms.push_back(std::move(e));
      }
      field["atoms"] = std::move(atoms);
      break;
    }
    case FieldMode::vector_source: {
      field["mode"] = "vector_source";
      ordered_json weights = ordered_json::array();
      for (const auto& row : pf.field.nu.weights) {
        ordered_json r = ordered_json::array();
        for (double v : row) r.push_back(v);
        weights.push_back(std::move(r));
      }
      field["weights"] = std::move(weights);
      break;
    }
  }
  doc["field"] = std::move(field);

  ordered_json solver;
  solver["max_iters"] = pf.solver.max_iters;
  solver["gap_tol_abs"] = pf.solver.gap_tol_abs;
  solver["gap_tol_rel"] = pf.solver.gap_tol_rel;
  solver["step_rule"] =
      pf.solver.step_rule == StepRule::harmonic ? "harmonic" : "exact";
  if (pf.solver.init == InitKind::vertex) {
    ordered_json v;
    ordered_json idx = ordered_json::array();
    for (std::size_t i : pf.solver.vertex_init) idx.push_back(i);
    v["vertex"] = std::move(idx);
    solver["init"] = std::move(v);
  } else {
    solver["init"] = "uniform";
  }
  solver["support_threshold"] = pf.solver.support_threshold;
  solver["seed"] = pf.seed;
  doc["solver"] = std::move(solver);

  if (pf.exhaustion) {
    ordered_json e;
    e["steps"] = pf.exhaustion->steps;
    e["order"] = pf.exhaustion->order == ExhaustionOrder::by_distance_from_centroid
                     ? "centroid"
                     : "index";
    doc["exhaustion"] = std::move(e);
  }
  return doc;
}

DiscreteVectorMeasure parse_measure_text(const std::string& text,
                                         const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, origin + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("plates") || !doc["plates"].is_array())
    fail(Errc::schema_error, origin + ": expected {\"plates\": [{\"weights\": [...]}]}");
  DiscreteVectorMeasure mu;
  for (const auto& pv : doc["plates"]) {
    if (!pv.is_object() || !pv.contains("weights") || !pv["weights"].is_array())
      fail(Errc::schema_error, origin + ": plate entries need a weights array");
    std::vector<double> w;
    for (const auto& e : pv["weights"]) {
      if (!e.is_number()) fail(Errc::schema_error, origin + ": weights must be numbers");
      w.push_back(e.get<double>());
    }
    mu.weights.push_back(std::move(w));
  }
  return mu;
}

DiscreteVectorMeasure parse_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open measure file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measure_text(buf.str(), path);
}

nlohmann::ordered_json serialize_measure(const DiscreteVectorMeasure& mu) {
  ordered_json doc;
  ordered_json plates = ordered_json::array();
  for (const auto& row : mu.weights) {
    ordered_json pv;
    ordered_json w = ordered_json::array();
    for (double v : row) w.push_back(v);
    pv["weights"] = std::move(w);
    plates.push_back(std::move(pv));
  }
  doc["plates"] = std::move(plates);
  return doc;
}

std::string problem_hash(const ProblemFile& pf) {
  const std::string text = serialize_problem(pf).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace gvp
