#include "spheresep/json_io.hpp"

#include <cmath>
#include <limits>

namespace spheresep {

namespace {

// Non-finite doubles have no JSON literal; they travel as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double read_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw SchemaError(what + ": expected a number");
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

int read_int(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) throw SchemaError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> read_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(read_number(v, where));
  return out;
}

}  // namespace

const char* version() { return SPHERESEP_VERSION; }

Json form_to_json(const BivectorForm& form) {
  Json entries = Json::array();
  if (form.is_exact()) {
    for (const auto& q : form.exact_upper()) entries.push_back(format_rational(q));
  } else {
    for (double v : form.upper()) entries.push_back(number(v));
  }
  return Json{{"n", form.n()}, {"mode", form.is_exact() ? "exact" : "float"}, {"entries", entries}};
}

BivectorForm form_from_json(const Json& j) {
  const std::string where = "BivectorForm";
  const int n = read_int(j, "n", where);
  if (n < 1) throw SchemaError(where + ": n must be >= 1");
  const Json& mode = field(j, "mode", where);
  const Json& entries = field(j, "entries", where);
  if (!mode.is_string()) throw SchemaError(where + ": mode must be a string");
  if (!entries.is_array()) throw SchemaError(where + ": entries must be an array");
  const std::size_t pairs = static_cast<std::size_t>(pair_count(n + 1));
  if (entries.size() != pairs * (pairs + 1) / 2)
    throw SchemaError(where + ": expected " + std::to_string(pairs * (pairs + 1) / 2) + " entries for n = " +
                      std::to_string(n) + ", got " + std::to_string(entries.size()));
  const auto m = mode.get<std::string>();
  if (m == "exact") {
    std::vector<Rational> upper;
    for (const auto& e : entries) {
      try {
        if (e.is_string())
          upper.push_back(parse_rational(e.get<std::string>()));
        else if (e.is_number_integer())
          upper.emplace_back(e.get<long>());
        else
          throw SchemaError(where + ": exact entries must be \"p/q\" strings");
      } catch (const SchemaError&) {
        throw;
      } catch (const std::exception& ex) {
        throw SchemaError(where + ": " + ex.what());
      }
    }
    return BivectorForm::exact(n, std::move(upper));
  }
  if (m != "float") throw SchemaError(where + ": mode must be \"exact\" or \"float\"");
  Matrix b(static_cast<Eigen::Index>(pairs), static_cast<Eigen::Index>(pairs));
  std::size_t k = 0;
  for (std::size_t r = 0; r < pairs; ++r)
    for (std::size_t c = r; c < pairs; ++c) {
      const double v = read_number(entries[k++], where);
      b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      b(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  return BivectorForm(n, std::move(b));
}

Json stackel_to_json(const StackelSystem& system, const StackelMeta& meta) {
  Json basis = Json::array();
  for (const auto& f : system.basis()) basis.push_back(form_to_json(f));
  Json sv = Json::array();
  for (double s : system.singular_values) sv.push_back(number(s));
  return Json{{"n", system.n()},
              {"basis", basis},
              {"singular_values", sv},
              {"nullity", static_cast<int>(system.basis().size())},
              {"raw_nullity", system.raw_nullity},
              {"gap_ratio", number(system.gap_ratio)},
              {"seed", meta.seed},
              {"n_points", meta.n_points},
              {"source", meta.source},
              {"version", version()}};
}

StackelSystem stackel_from_json(const Json& j, StackelMeta* meta) {
  const std::string where = "StackelSystem";
  const int n = read_int(j, "n", where);
  const Json& basis = field(j, "basis", where);
  if (!basis.is_array()) throw SchemaError(where + ": basis must be an array");
  std::vector<BivectorForm> forms;
  for (const auto& f : basis) {
    forms.push_back(form_from_json(f));
    if (forms.back().n() != n) throw SchemaError(where + ": basis form of the wrong dimension");
  }
  if (read_int(j, "nullity", where) != static_cast<int>(forms.size()))
    throw SchemaError(where + ": nullity does not match the basis size");
  StackelSystem s = StackelSystem::unchecked(n, std::move(forms));
  s.singular_values = read_numbers(field(j, "singular_values", where), where);
  s.raw_nullity = read_int(j, "raw_nullity", where);
  s.gap_ratio = read_number(field(j, "gap_ratio", where), where);
  if (meta) {
    const Json& seed = field(j, "seed", where);
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw SchemaError(where + ": seed must be an integer");
    meta->seed = seed.get<std::uint64_t>();
    meta->n_points = read_int(j, "n_points", where);
    const Json& source = field(j, "source", where);
    if (!source.is_string()) throw SchemaError(where + ": source must be a string");
    meta->source = source.get<std::string>();
  }
  return s;
}

Json report_to_json(const ResidualReport& r) {
  return Json{{"killing_max", number(r.killing_max)},
              {"nijenhuis_max", Json::array({number(r.nijenhuis_max[0]), number(r.nijenhuis_max[1]),
                                             number(r.nijenhuis_max[2])})},
              {"commutation_max", number(r.commutation_max)},
              {"points_sampled", r.points_sampled},
              {"seed", r.seed},
              {"eigen_simple", r.eigen_simple},
              {"dimension_ok", r.dimension_ok},
              {"threshold", number(r.threshold)},
              {"verdict", r.pass ? "PASS" : "FAIL"},
              {"version", version()}};
}

ResidualReport report_from_json(const Json& j) {
  const std::string where = "ResidualReport";
  ResidualReport r;
  r.killing_max = read_number(field(j, "killing_max", where), where);
  const auto nij = read_numbers(field(j, "nijenhuis_max", where), where);
  if (nij.size() != 3) throw SchemaError(where + ": nijenhuis_max must have three entries");
  std::copy(nij.begin(), nij.end(), r.nijenhuis_max.begin());
  r.commutation_max = read_number(field(j, "commutation_max", where), where);
  r.points_sampled = read_int(j, "points_sampled", where);
  r.seed = field(j, "seed", where).get<std::uint64_t>();
  r.eigen_simple = field(j, "eigen_simple", where).get<bool>();
  r.dimension_ok = field(j, "dimension_ok", where).get<bool>();
  r.threshold = read_number(field(j, "threshold", where), where);
  const auto verdict = field(j, "verdict", where).get<std::string>();
  if (verdict != "PASS" && verdict != "FAIL") throw SchemaError(where + ": verdict must be PASS or FAIL");
  r.pass = verdict == "PASS";
  return r;
}

Json trees_to_json(int leaves, int inner_nonroot, const std::vector<RootedPlanarTree>& trees) {
  Json list = Json::array();
  for (const auto& t : trees) list.push_back(serialize_tree(t));
  return Json{{"L", leaves}, {"m", inner_nonroot}, {"trees", list}};
}

std::map<NodePath, EllipticParams> params_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("parameter map: expected an object");
  std::map<NodePath, EllipticParams> out;
  for (const auto& [key, value] : j.items()) {
    NodePath path;
    try {
      path = parse_path(key);
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(std::string("parameter map: ") + ex.what());
    }
    try {
      out.emplace(std::move(path), EllipticParams(read_numbers(value, "parameter map")));
    } catch (const SchemaError&) {
      throw;
    } catch (const std::invalid_argument& ex) {
      throw SchemaError("parameter map at '" + key + "': " + ex.what());
    }
  }
  return out;
}

Json params_to_json(const std::map<NodePath, EllipticParams>& params) {
  Json j = Json::object();
  for (const auto& [path, p] : params) {
    Json values = Json::array();
    if (p.arity() == 2) {
      values = Json::array({0.0, 1.0});
    } else {
      for (double v : p.values()) values.push_back(v);
    }
    j[format_path(path)] = values;
  }
  return j;
}

}  // namespace spheresep
