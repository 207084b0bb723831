// sepctl: command-line front end.
//
// Exit codes: 0 PASS, 1 verification FAIL, 2 usage or schema error.

#include "spheresep/chart.hpp"
#include "spheresep/errors.hpp"
#include "spheresep/integrability.hpp"
#include "spheresep/json_io.hpp"
#include "spheresep/tree.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace spheresep;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 0;
  std::optional<std::uint64_t> seed;
  int points = 0;
  Tolerances tol;
  std::string format;  ///< empty: the command default (csv for grid, json otherwise)
  std::string out;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "Sphere dimension");
  cmd->add_option("--seed", cfg.seed, "Sampling seed (fallback: $SEPCTL_SEED, then 42)");
  cmd->add_option("--points", cfg.points, "Number of sample points (0: command default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol-unit", cfg.tol.unit, "Unit-length tolerance")->capture_default_str();
  cmd->add_option("--tol-rank", cfg.tol.rank, "Relative singular-value cut")->capture_default_str();
  cmd->add_option("--tol-commute", cfg.tol.commute, "PASS threshold for residuals")->capture_default_str();
  cmd->add_option("--tol-nijenhuis", cfg.tol.nijenhuis, "Nijenhuis precondition threshold")->capture_default_str();
  cmd->add_option("--tol-eigen-gap", cfg.tol.eigen_gap, "Minimal eigenvalue separation")->capture_default_str();
  cmd->add_option("--tol-orthogonal", cfg.tol.orthogonal, "PASS threshold for orthogonality")->capture_default_str();
  cmd->add_option("--tol-identity-span", cfg.tol.identity_span, "Metric-in-span tolerance")->capture_default_str();
  cmd->add_option("--tol-gap-ratio", cfg.tol.gap_ratio, "Minimal singular-value gap ratio")->capture_default_str();
  cmd->add_option("--format", cfg.format, "Output format: json or csv (grid defaults to csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.out, "Output file (default: stdout)");
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("SEPCTL_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') throw UsageError("SEPCTL_SEED is not a non-negative integer");
    return v;
  }
  return 42;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + cfg.out + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + cfg.out + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("malformed number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Form sources shared by verify and stackel.

struct FormSource {
  std::string file;
  bool identity = false;
  bool random = false;
  std::string elliptic;
};

void add_form_source(CLI::App* cmd, FormSource& src) {
  cmd->add_option("--form", src.file, "BivectorForm JSON file");
  cmd->add_flag("--identity", src.identity, "The identity form (the metric); needs --n");
  cmd->add_flag("--random", src.random, "A seeded random symmetric form; needs --n");
  cmd->add_option("--elliptic", src.elliptic, "Elliptic normal form for e0,e1,...,en");
}

int count_sources(const FormSource& s) {
  return int(!s.file.empty()) + int(s.identity) + int(s.random) + int(!s.elliptic.empty());
}

BivectorForm load_form(const FormSource& src, const RunConfig& cfg, std::uint64_t seed) {
  if (count_sources(src) != 1) throw UsageError("give exactly one of --form, --identity, --random, --elliptic");
  if (!src.file.empty()) {
    BivectorForm f = form_from_json(read_json_file(src.file));
    if (cfg.n != 0 && cfg.n != f.n()) throw UsageError("--n does not match the form file");
    return f;
  }
  if (!src.elliptic.empty()) {
    const auto e = parse_list(src.elliptic);
    if (cfg.n != 0 && cfg.n + 1 != static_cast<int>(e.size())) throw UsageError("--n does not match --elliptic");
    try {
      return elliptic_form(e).form();
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
  }
  if (cfg.n < 1) throw UsageError("--n >= 1 is required");
  return src.identity ? BivectorForm::identity(cfg.n) : BivectorForm::random(cfg.n, seed);
}

// ---------------------------------------------------------------------------
// Tree sources shared by stackel, grid and compose.

struct TreeSource {
  std::string tree;
  std::string params_file;
  std::string params_inline;
};

void add_tree_source(CLI::App* cmd, TreeSource& src) {
  cmd->add_option("--tree", src.tree, "Tree text, e.g. ((*,*),*)");
  cmd->add_option("--params", src.params_file, "JSON parameter map file {node_path: [e...]}");
  cmd->add_option("--params-json", src.params_inline, "Inline JSON parameter map");
}

RootedPlanarTree parse_tree_arg(const std::string& text) {
  try {
    return parse_tree(text);
  } catch (const TreeParseError& e) {
    throw UsageError(std::string("tree parse error: ") + e.what());
  }
}

DressedTree load_tree(const TreeSource& src) {
  if (src.tree.empty()) throw UsageError("--tree is required");
  const RootedPlanarTree tree = parse_tree_arg(src.tree);
  if (tree.is_leaf()) throw UsageError("a single leaf has no chart");
  if (!src.params_file.empty() && !src.params_inline.empty())
    throw UsageError("give at most one of --params, --params-json");
  std::map<NodePath, EllipticParams> params;
  if (!src.params_file.empty()) params = params_from_json(read_json_file(src.params_file));
  if (!src.params_inline.empty()) {
    try {
      params = params_from_json(Json::parse(src.params_inline));
    } catch (const Json::parse_error& e) {
      throw SchemaError(std::string("--params-json is not valid JSON: ") + e.what());
    }
  }
  for (const auto& path : tree.internal_paths())
    if (!params.count(path)) params.emplace(path, EllipticParams::equally_spaced(tree.at(path).arity()));
  try {
    return DressedTree(tree, std::move(params));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

// ---------------------------------------------------------------------------

std::string report_csv(const ResidualReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "# sepctl " << version() << "\n"
     << "killing_max,nijenhuis_2a,nijenhuis_2b,nijenhuis_2c,commutation_max,points_sampled,seed,verdict\n"
     << r.killing_max << ',' << r.nijenhuis_max[0] << ',' << r.nijenhuis_max[1] << ',' << r.nijenhuis_max[2] << ','
     << r.commutation_max << ',' << r.points_sampled << ',' << r.seed << ',' << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

int cmd_verify(const RunConfig& cfg, const FormSource& src) {
  const std::uint64_t seed = resolve_seed(cfg);
  const BivectorForm form = load_form(src, cfg, seed);
  const int points = cfg.points > 0 ? cfg.points : 20;
  const ResidualReport report = verify_form(form, points, seed, cfg.tol);
  if (cfg.format == "csv") {
    emit(cfg, report_csv(report));
  } else {
    Json j = report_to_json(report);
    j["n"] = form.n();
    j["form"] = form_to_json(form);
    emit(cfg, dump(j));
  }
  return report.pass ? kPass : kFail;
}

Json failure_json(const std::string& stage, const std::string& message, std::uint64_t seed,
                  const std::vector<double>* spectrum = nullptr) {
  Json j{{"verdict", "FAIL"}, {"stage", stage}, {"error", message}, {"seed", seed}, {"version", version()}};
  if (spectrum) {
    Json sv = Json::array();
    for (double s : *spectrum) sv.push_back(s);
    j["singular_values"] = sv;
  }
  return j;
}

int cmd_stackel(const RunConfig& cfg, const FormSource& fsrc, const TreeSource& tsrc) {
  if (cfg.format != "json") throw UsageError("stackel emits JSON only");
  const std::uint64_t seed = resolve_seed(cfg);
  const bool from_tree = !tsrc.tree.empty();
  if (from_tree == (count_sources(fsrc) > 0)) throw UsageError("give either a form source or --tree");
  std::optional<StackelSystem> system;
  StackelMeta meta;
  meta.seed = seed;
  try {
    if (from_tree) {
      const DressedTree tree = load_tree(tsrc);
      if (cfg.n != 0 && cfg.n != tree.sphere_dim()) throw UsageError("--n does not match the tree");
      meta.n_points = cfg.points > 0 ? cfg.points : default_sample_count(tree.sphere_dim());
      meta.source = "chart";
      system = stackel_of_chart(tree, meta.n_points, seed, cfg.tol);
    } else {
      const BivectorForm form = load_form(fsrc, cfg, seed);
      meta.n_points = cfg.points > 0 ? cfg.points : default_sample_count(form.n());
      meta.source = "killing";
      system = stackel_from_killing(form, meta.n_points, seed, cfg.tol);
    }
  } catch (const RankError& e) {
    emit(cfg, dump(failure_json("extraction", e.what(), seed, &e.singular_values)));
    return kFail;
  } catch (const PreconditionError& e) {
    emit(cfg, dump(failure_json("precondition", e.what(), seed)));
    return kFail;
  } catch (const NumericalError& e) {
    emit(cfg, dump(failure_json("verification", e.what(), seed)));
    return kFail;
  }
  const ResidualReport report = verify_stackel(*system, 32, mix_seed(seed, 0xC0FFEE), cfg.tol);
  Json j{{"system", stackel_to_json(*system, meta)},
         {"report", report_to_json(report)},
         {"metric_distance", system->metric_distance()},
         {"verdict", report.pass ? "PASS" : "FAIL"},
         {"seed", seed},
         {"version", version()}};
  emit(cfg, dump(j));
  return report.pass ? kPass : kFail;
}

int cmd_trees(const RunConfig& cfg, int leaves, std::optional<int> m, bool classes) {
  if (leaves < 2) throw UsageError("--L must be >= 2");
  if (m && (*m < 0 || *m > leaves - 2)) throw UsageError("--m must lie in [0, L-2]");
  const bool csv = cfg.format == "csv";
  std::ostringstream os;
  if (csv) os << "# sepctl " << version() << "\n";
  if (classes) {
    const auto cls = dyslectic_classes(leaves);
    if (csv) {
      os << "class,tree\n";
      for (std::size_t i = 0; i < cls.size(); ++i) os << i << ',' << serialize_tree(cls[i]) << "\n";
    } else {
      Json list = Json::array();
      for (const auto& t : cls) list.push_back(serialize_tree(t));
      os << dump(Json{{"L", leaves}, {"classes", list}, {"count", cls.size()}, {"version", version()}});
    }
  } else if (m) {
    const auto trees = enumerate_trees(leaves, *m);
    if (csv) {
      os << "L,m,tree\n";
      for (const auto& t : trees) os << leaves << ',' << *m << ',' << serialize_tree(t) << "\n";
    } else {
      Json j = trees_to_json(leaves, *m, trees);
      j["count"] = trees.size();
      j["version"] = version();
      os << dump(j);
    }
  } else {
    const auto counts = count_faces(leaves);
    std::uint64_t total = 0;
    for (const auto& [mm, c] : counts) total += c;
    if (csv) {
      os << "L,m,dimension,count\n";
      for (const auto& [mm, c] : counts) os << leaves << ',' << mm << ',' << (leaves - 2 - mm) << ',' << c << "\n";
    } else {
      Json table = Json::array();
      for (const auto& [mm, c] : counts)
        table.push_back(Json{{"m", mm}, {"dimension", leaves - 2 - mm}, {"count", c}});
      os << dump(Json{{"L", leaves},
                      {"faces", table},
                      {"total", total},
                      {"vertices", counts.at(leaves - 2)},
                      {"version", version()}});
    }
  }
  emit(cfg, os.str());
  return kPass;
}

int cmd_grid(const RunConfig& cfg, const TreeSource& tsrc, int resolution, int lines, bool orthant) {
  const DressedTree tree = load_tree(tsrc);
  if (tree.sphere_dim() != 2) throw UsageError("grid needs a tree with 3 leaves (S^2 only)");
  if (resolution < 2 || lines < 1) throw UsageError("--resolution >= 2 and --lines >= 1 required");
  const Chart chart = chart_from_tree(tree);
  const PolylineSet set = emit_gridlines(chart, resolution, lines, !orthant);
  if (cfg.format == "csv") {
    emit(cfg, std::string("# sepctl ") + version() + " tree=" + serialize_tree(tree.tree()) + "\n" + set.to_csv());
  } else {
    Json curves = Json::array();
    for (const auto& c : set.curves) {
      Json pts = Json::array();
      for (const auto& p : c.points) pts.push_back(Json::array({p[0], p[1], p[2]}));
      curves.push_back(Json{{"family", c.family}, {"points", pts}});
    }
    emit(cfg, dump(Json{{"tree", serialize_tree(tree.tree())},
                        {"params", params_to_json(tree.params())},
                        {"curves", curves},
                        {"version", version()}}));
  }
  return kPass;
}

int cmd_compose(const RunConfig& cfg, const std::string& outer, const std::vector<std::string>& inner) {
  if (cfg.format != "json") throw UsageError("compose emits JSON only");
  const std::uint64_t seed = resolve_seed(cfg);
  if (outer.empty()) throw UsageError("--outer is required");
  const RootedPlanarTree y = parse_tree_arg(outer);
  std::vector<RootedPlanarTree> xs;
  for (const auto& t : inner) xs.push_back(parse_tree_arg(t));
  if (static_cast<int>(xs.size()) != y.leaf_count())
    throw UsageError("--outer has " + std::to_string(y.leaf_count()) + " leaves but " + std::to_string(xs.size()) +
                     " --inner trees were given");
  const RootedPlanarTree grafted = graft(y, xs);
  Json j{{"tree", serialize_tree(grafted)},
         {"leaves", grafted.leaf_count()},
         {"sphere_dim", grafted.leaf_count() - 1},
         {"moduli", grafted.moduli_count()},
         {"seed", seed},
         {"version", version()}};
  if (grafted.is_leaf()) {
    j["verdict"] = "PASS";
    emit(cfg, dump(j));
    return kPass;
  }
  const DressedTree dressed = DressedTree::with_random_params(grafted, seed);
  const OrthogonalityReport orth =
      verify_orthogonal(chart_from_tree(dressed), cfg.points > 0 ? cfg.points : 16, seed, cfg.tol);
  j["params"] = params_to_json(dressed.params());
  j["orthogonality"] = Json{{"max_off_diagonal", orth.max_off_diagonal},
                            {"min_rank_ratio", orth.min_rank_ratio},
                            {"points_sampled", orth.points_sampled},
                            {"threshold", orth.threshold},
                            {"verdict", orth.pass ? "PASS" : "FAIL"}};
  j["verdict"] = orth.pass ? "PASS" : "FAIL";
  emit(cfg, dump(j));
  return orth.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable coordinates and Staeckel systems on spheres"};
  app.set_version_flag("--version", std::string("sepctl ") + version());
  app.require_subcommand(1);

  RunConfig cfg;
  FormSource fsrc;
  TreeSource tsrc;

  auto* verify = app.add_subcommand("verify", "Killing, Nijenhuis and eigen-simplicity checks of one form");
  add_common(verify, cfg);
  add_form_source(verify, fsrc);

  auto* stackel = app.add_subcommand("stackel", "Staeckel system of a form or of a tree chart");
  add_common(stackel, cfg);
  add_form_source(stackel, fsrc);
  add_tree_source(stackel, tsrc);

  int leaves = 0;
  std::optional<int> m;
  bool classes = false;
  auto* trees = app.add_subcommand("trees", "Enumerate rooted planar trees (faces of the associahedron)");
  add_common(trees, cfg);
  trees->add_option("--L", leaves, "Number of leaves")->required();
  trees->add_option("--m", m, "Inner non-root nodes (omit for the full face table)");
  trees->add_flag("--classes", classes, "Report dyslectic classes");

  int resolution = 64;
  int lines = 8;
  bool orthant = false;
  auto* grid = app.add_subcommand("grid", "Coordinate grid lines of a chart on S^2 (CSV)");
  add_common(grid, cfg);
  add_tree_source(grid, tsrc);
  grid->add_option("--resolution", resolution, "Points per curve")->capture_default_str();
  grid->add_option("--lines", lines, "Curves per coordinate family")->capture_default_str();
  grid->add_flag("--orthant", orthant, "Only the positive orthant (no sign reflections)");

  std::string outer;
  std::vector<std::string> inner;
  auto* compose = app.add_subcommand("compose", "Graft trees and check the composed chart");
  add_common(compose, cfg);
  compose->add_option("--outer", outer, "Outer tree");
  compose->add_option("--inner", inner, "Inner trees, one per leaf of the outer tree (* for a leaf)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (cfg.format.empty()) cfg.format = *grid ? "csv" : "json";
  try {
    if (*verify) return cmd_verify(cfg, fsrc);
    if (*stackel) return cmd_stackel(cfg, fsrc, tsrc);
    if (*trees) return cmd_trees(cfg, leaves, m, classes);
    if (*grid) return cmd_grid(cfg, tsrc, resolution, lines, orthant);
    if (*compose) return cmd_compose(cfg, outer, inner);
  } catch (const UsageError& e) {
    std::cerr << "sepctl: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "sepctl: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "sepctl: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "sepctl: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
