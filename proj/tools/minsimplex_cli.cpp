// Command-line harness: volume queries, lifting and projection, the
// minimum-simplex finders, the exponent table, and experiment sweeps.
// Exit codes: 0 success, 2 precondition or usage error, 3 budget or
// degenerate-input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "minsimplex/minsimplex.hpp"

namespace ms = minsimplex;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string format = "text";
  std::string out;
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ms::PointSet load_ps(const std::string& path) {
  std::istringstream in(slurp(path));
  return ms::read_point_set(in);
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(g.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open output file: " + g.out);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::int64_t default_budget() {
  if (const char* env = std::getenv("MINSIMPLEX_BUDGET")) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("MINSIMPLEX_BUDGET is not an integer: " + std::string(env));
    }
  }
  return ms::kDefaultBudget;
}

ms::SplitSchedule parse_schedule(const std::string& s) {
  if (s.empty() || s == "exhaustive") return ms::SplitSchedule::Exhaustive();
  std::vector<int> splits;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      splits.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad schedule entry: " + item);
    }
  }
  if (splits.empty()) throw std::invalid_argument("empty schedule");
  return ms::SplitSchedule::Fixed(std::move(splits));
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad ") + what + " entry: " + item);
    }
  }
  if (vals.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
  return vals;
}

json selection_to_json(const ms::SimplexSelection& sel, int k) {
  json stages = json::array();
  for (const ms::StageRecord& s : sel.certificate)
    stages.push_back({{"split_l", s.split_l},
                      {"stage_value", s.value},
                      {"sub_indices", s.sub_indices}});
  return {{"k", k},
          {"value", sel.value},
          {"indices", sel.indices},
          {"certified_bound", sel.certified_bound},
          {"certificate", stages}};
}

std::string selection_text(const ms::SimplexSelection& sel, int k) {
  std::string out = ms::format_selection(sel, k);
  out += "certified_bound " + ms::format_real17(sel.certified_bound) + "\n";
  return out;
}

json point_set_to_json(const ms::PointSet& ps) {
  json pts = json::array();
  for (const ms::Vector& p : ps.points) {
    json row = json::array();
    for (int j = 0; j < p.size(); ++j) row.push_back(p[j]);
    pts.push_back(std::move(row));
  }
  return {{"dim", ps.dim},
          {"n", ps.size()},
          {"space_tag", ms::to_string(ps.space_tag)},
          {"points", std::move(pts)}};
}

void require_format(const GlobalOpts& g, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (g.format == a) return;
  throw std::invalid_argument("unsupported --format for this subcommand: " + g.format);
}

// --- subcommand bodies -----------------------------------------------------

void cmd_vol(const GlobalOpts& g, const std::string& file) {
  require_format(g, {"text", "json"});
  ms::PointSet ps = load_ps(file);
  ms::Volume v = ms::vol_k(ps.points);
  if (g.format == "json") {
    emit(g, json{{"k", v.k}, {"value", v.value}}.dump(2));
  } else {
    emit(g, "k " + std::to_string(v.k) + "\nvalue " + ms::format_real17(v.value) + "\n");
  }
}

void cmd_simplex_vol(const GlobalOpts& g, const std::string& file) {
  require_format(g, {"text", "json"});
  ms::PointSet ps = load_ps(file);
  ms::Volume v = ms::simplex_volume(ps.points);
  if (g.format == "json") {
    emit(g, json{{"k", v.k}, {"value", v.value}}.dump(2));
  } else {
    emit(g, "k " + std::to_string(v.k) + "\nvalue " + ms::format_real17(v.value) + "\n");
  }
}

void cmd_lift(const GlobalOpts& g, const std::string& file) {
  require_format(g, {"text", "json"});
  ms::PointSet ps = load_ps(file);
  ms::LiftResult lr = ms::lift_to_sphere(ps);
  if (g.format == "json") {
    json j = point_set_to_json(lr.sphere_points);
    j["norm_factors"] = lr.norm_factors;
    emit(g, j.dump(2));
    return;
  }
  std::string out = ms::point_set_to_string(lr.sphere_points);
  out += "factors";
  for (double f : lr.norm_factors) out += " " + ms::format_real17(f);
  out += "\n";
  emit(g, out);
}

void cmd_project(const GlobalOpts& g, const std::string& file) {
  require_format(g, {"text", "json"});
  ms::PointSet ps = load_ps(file);
  ms::ProjectionResult pr = ms::central_project(ps, g.seed);
  if (g.format == "json") {
    json j = point_set_to_json(pr.cube_points);
    j["retained_indices"] = pr.retained_indices;
    j["empty"] = pr.empty();
    emit(g, j.dump(2));
    return;
  }
  std::string out = ms::point_set_to_string(pr.cube_points);
  out += "retained";
  for (int i : pr.retained_indices) out += " " + std::to_string(i);
  out += "\n";
  emit(g, out);
}

void cmd_brute(const GlobalOpts& g, const std::string& file, int k, int m,
               std::int64_t budget, const std::string& prune) {
  require_format(g, {"text", "json"});
  ms::PruneMode mode;
  if (prune == "exact") mode = ms::PruneMode::Exact;
  else if (prune == "aggressive") mode = ms::PruneMode::Aggressive;
  else throw std::invalid_argument("bad --prune value: " + prune);
  ms::PointSet ps = load_ps(file);
  ms::SimplexSelection sel;
  int out_k;
  if (ps.space_tag == ms::SpaceTag::UnitSphere) {
    if (m < 1) throw std::invalid_argument("sphere input requires --m (tuple size)");
    sel = ms::brute_force_min_determinant(ps, m, budget, mode);
    out_k = m - 1;
  } else {
    if (k < 1) throw std::invalid_argument("cube input requires --k (simplex dimension)");
    sel = ms::brute_force_min_simplex(ps, k, budget, mode);
    out_k = k;
  }
  if (g.format == "json") emit(g, selection_to_json(sel, out_k).dump(2));
  else emit(g, selection_text(sel, out_k));
}

void cmd_find(const GlobalOpts& g, const std::string& file, int k,
              const std::string& schedule_str, std::int64_t budget) {
  require_format(g, {"text", "json"});
  ms::SplitSchedule schedule = parse_schedule(schedule_str);
  ms::PointSet ps = load_ps(file);
  if (k < 0) throw std::invalid_argument("find requires --k");
  ms::SimplexSelection sel;
  // Degenerate configurations are nudged and retried; the library itself
  // never perturbs.
  for (int attempt = 0;; ++attempt) {
    try {
      sel = ps.space_tag == ms::SpaceTag::UnitSphere
                ? ms::recursive_find(ps, k, schedule, budget)
                : ms::find_small_simplex(ps, k, schedule, budget);
      break;
    } catch (const ms::DegenerateInputError&) {
      if (attempt >= 5) throw;
      ps = ms::perturb(ps, ms::derive_seed(g.seed, 11 + static_cast<std::uint64_t>(attempt)), 1e-9);
    }
  }
  if (g.format == "json") emit(g, selection_to_json(sel, k).dump(2));
  else emit(g, selection_text(sel, k));
}

json derivation_tree_json(const ms::BoundTable& table, int k, int d) {
  const ms::TableEntry& e = table.at(k, d);
  json j{{"k", k},
         {"d", d},
         {"q", ms::format_rational(e.bound.q)},
         {"eps_coeff", e.bound.eps_coeff},
         {"rule", ms::rule_name(e.derivation)}};
  if (e.derivation.rule == ms::Rule::Recursion) {
    int l = e.derivation.split_l;
    j["children"] = json::array(
        {derivation_tree_json(table, l, d), derivation_tree_json(table, k - l - 1, d - l - 1)});
  }
  return j;
}

void derivation_tree_text(std::string& out, const ms::BoundTable& table, int k, int d,
                          int depth) {
  const ms::TableEntry& e = table.at(k, d);
  out += std::string(static_cast<size_t>(depth) * 2, ' ');
  out += "(" + std::to_string(k) + "," + std::to_string(d) + ") " +
         ms::format_bound(e.bound) + "  [" + ms::rule_name(e.derivation) + "]\n";
  if (e.derivation.rule == ms::Rule::Recursion) {
    int l = e.derivation.split_l;
    derivation_tree_text(out, table, l, d, depth + 1);
    derivation_tree_text(out, table, k - l - 1, d - l - 1, depth + 1);
  }
}

void cmd_exponents(const GlobalOpts& g, int max_dim, const std::string& cell,
                   bool derivation, bool check_log) {
  require_format(g, {"text", "json", "csv"});
  if (max_dim < 1) throw std::invalid_argument("--max-dim must be >= 1");
  ms::BoundTable table = ms::dp_table(max_dim);

  int cell_k = -1, cell_d = -1;
  if (!cell.empty()) {
    auto kd = parse_int_list(cell, "--cell");
    if (kd.size() != 2) throw std::invalid_argument("--cell expects k,d");
    cell_k = kd[0];
    cell_d = kd[1];
    if (!table.contains(cell_k, cell_d))
      throw std::invalid_argument("--cell outside table: need 0 <= k <= d <= max-dim");
  }

  std::vector<std::pair<int, int>> cells;  // (k,d) rows to report
  if (cell_k >= 0) cells.push_back({cell_k, cell_d});
  else
    for (int d = 1; d <= max_dim; ++d) cells.push_back({d, d});

  if (g.format == "csv") {
    std::string out = "k,d,q,eps_coeff,rule\n";
    for (auto [k, d] : cells) {
      const ms::TableEntry& e = table.at(k, d);
      out += std::to_string(k) + "," + std::to_string(d) + "," + ms::format_rational(e.bound.q) +
             "," + std::to_string(e.bound.eps_coeff) + "," + ms::rule_name(e.derivation) + "\n";
    }
    emit(g, out);
    return;
  }

  if (g.format == "json") {
    json j{{"max_dim", max_dim}};
    json rows = json::array();
    for (auto [k, d] : cells) {
      const ms::TableEntry& e = table.at(k, d);
      json row{{"k", k},
               {"d", d},
               {"q", ms::format_rational(e.bound.q)},
               {"eps_coeff", e.bound.eps_coeff},
               {"rule", ms::rule_name(e.derivation)}};
      if (derivation) {
        row["derivation"] = derivation_tree_json(table, k, d);
        json alts = json::array();
        for (const ms::CandidateEval& ce : ms::best_split(k, d, table))
          alts.push_back({{"rule", ms::rule_name(ce.derivation)},
                          {"q", ms::format_rational(ce.bound.q)},
                          {"eps_coeff", ce.bound.eps_coeff}});
        row["alternatives"] = std::move(alts);
      }
      rows.push_back(std::move(row));
    }
    j["cells"] = std::move(rows);
    if (check_log) {
      ms::LogBoundReport rep = ms::check_log_bound(table, 3, max_dim);
      json entries = json::array();
      for (const ms::LogBoundEntry& e : rep.entries)
        entries.push_back({{"d", e.d},
                           {"lhs", e.lhs},
                           {"rhs", e.rhs},
                           {"margin", e.margin},
                           {"pass", e.pass}});
      j["check_log"] = {{"note", rep.note}, {"all_pass", rep.all_pass}, {"entries", entries}};
    }
    emit(g, j.dump(2));
    return;
  }

  std::string out;
  if (cell_k < 0) out += "exponent lower bounds, diagonal cells, max dimension " +
                         std::to_string(max_dim) + "\n";
  for (auto [k, d] : cells) {
    const ms::TableEntry& e = table.at(k, d);
    if (cell_k < 0 && k == d) {
      out += "d=" + std::to_string(d) + "  delta >= " + ms::format_bound(e.bound) + "  [" +
             ms::rule_name(e.derivation) + "]\n";
    } else {
      out += "delta_{" + std::to_string(k) + "," + std::to_string(d) + "} >= " +
             ms::format_bound(e.bound) + "  [" + ms::rule_name(e.derivation) + "]\n";
    }
    if (derivation) {
      out += "derivation:\n";
      derivation_tree_text(out, table, k, d, 1);
      out += "alternatives:\n";
      for (const ms::CandidateEval& ce : ms::best_split(k, d, table))
        out += "  " + ms::rule_name(ce.derivation) + "  " + ms::format_bound(ce.bound) + "\n";
    }
  }
  if (check_log) {
    ms::LogBoundReport rep = ms::check_log_bound(table, 3, max_dim);
    out += "log-bound check: q(d,d) >= ln d - 6 + 10/sqrt(d)\n";
    out += "note: " + rep.note + "\n";
    for (const ms::LogBoundEntry& e : rep.entries) {
      out += "d=" + std::to_string(e.d) + "  lhs=" + ms::format_real17(e.lhs) +
             "  rhs=" + ms::format_real17(e.rhs) + "  margin=" + ms::format_real17(e.margin) +
             (e.pass ? "  pass" : "  FAIL") + "\n";
    }
    out += std::string("all pass: ") + (rep.all_pass ? "yes" : "NO") + "\n";
  }
  emit(g, out);
}

void cmd_experiment(const GlobalOpts& g, int d, int k, const std::string& n_list,
                    int num_seeds, const std::string& generator, const std::string& method,
                    const std::string& schedule_str, std::int64_t budget) {
  require_format(g, {"text", "json"});
  if (g.out.empty()) throw std::invalid_argument("experiment requires --out CSV path");
  if (num_seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
  ms::ExperimentConfig cfg;
  cfg.d = d;
  cfg.k = k;
  cfg.n_values = parse_int_list(n_list, "--n");
  for (int i = 0; i < num_seeds; ++i) cfg.seeds.push_back(g.seed + static_cast<std::uint64_t>(i));
  cfg.generator = ms::generator_from_string(generator);
  cfg.method = ms::method_from_string(method);
  cfg.schedule = parse_schedule(schedule_str);
  cfg.output_path = g.out;
  cfg.budget = budget;

  std::size_t before = ms::load_csv(cfg.output_path).size();
  std::vector<ms::ExperimentRecord> records = ms::run_experiment(cfg);
  std::size_t errors = 0;
  for (const ms::ExperimentRecord& r : records)
    if (!r.error.empty()) ++errors;

  if (g.format == "json") {
    json j{{"csv", cfg.output_path},
           {"rows_total", records.size()},
           {"rows_new", records.size() - before},
           {"rows_error", errors}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "csv " << cfg.output_path << "\n"
              << "rows_total " << records.size() << "\n"
              << "rows_new " << records.size() - before << "\n"
              << "rows_error " << errors << "\n";
  }
}

void cmd_fit(const GlobalOpts& g, const std::string& csv_path, bool no_reference) {
  require_format(g, {"text", "json"});
  std::vector<ms::ExperimentRecord> records = ms::parse_csv(slurp(csv_path));
  if (records.empty()) throw std::invalid_argument("no records in " + csv_path);
  ms::FitResult fit = ms::fit_exponent(records);

  std::string ref;
  if (!no_reference) {
    int k = records.front().k, d = records.front().d;
    ms::BoundTable table = ms::dp_table(std::max(1, d));
    if (table.contains(k, d))
      ref = "-" + ms::format_rational(table.at(k, d).bound.q);
  }

  if (g.format == "json") {
    json j{{"slope", fit.slope},
           {"intercept", fit.intercept},
           {"residual_rms", fit.residual_rms},
           {"distinct_n", fit.distinct_n},
           {"rows_used", fit.rows_used},
           {"rows_excluded", fit.rows_excluded}};
    if (!ref.empty()) j["reference_dp_exponent"] = ref;  // annotation, not an assertion
    emit(g, j.dump(2));
    return;
  }
  std::string out;
  out += "slope " + ms::format_real17(fit.slope) + "\n";
  out += "intercept " + ms::format_real17(fit.intercept) + "\n";
  out += "residual_rms " + ms::format_real17(fit.residual_rms) + "\n";
  out += "distinct_n " + std::to_string(fit.distinct_n) + "\n";
  out += "rows_used " + std::to_string(fit.rows_used) + "\n";
  out += "rows_excluded " + std::to_string(fit.rows_excluded) + "\n";
  if (!ref.empty()) out += "reference_dp_exponent " + ref + " (annotation, not an assertion)\n";
  emit(g, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-simplex search toolkit"};
  app.require_subcommand(1);
  app.fallthrough(true);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Random seed (default 0)");
  app.add_option("--format", g.format, "Output format: text|json|csv (default text)");
  app.add_option("--out", g.out, "Output path (default stdout)");

  std::string file, cell, schedule = "exhaustive", prune = "exact";
  std::string n_list, generator = "uniform-cube", method = "both", csv_path;
  int k = -1, m = -1, max_dim = 8, exp_d = 2, exp_k = 2, num_seeds = 1;
  std::int64_t budget = -1;
  bool derivation = false, check_log = false, no_reference = false;

  CLI::App* c_vol = app.add_subcommand("vol", "Volume of the parallelepiped spanned by all rows");
  c_vol->add_option("file", file, "Point-set file (- for stdin)")->required();

  CLI::App* c_svol = app.add_subcommand("simplex-vol", "Simplex volume of all rows as vertices");
  c_svol->add_option("file", file, "Point-set file (- for stdin)")->required();

  CLI::App* c_lift = app.add_subcommand("lift", "Lift a cube point set to unit vectors");
  c_lift->add_option("file", file, "Point-set file (- for stdin)")->required();

  CLI::App* c_proj = app.add_subcommand("project", "Centrally project a sphere set into the cube");
  c_proj->add_option("file", file, "Point-set file (- for stdin)")->required();

  CLI::App* c_brute = app.add_subcommand("brute", "Exhaustive minimum-volume subset search");
  c_brute->add_option("file", file, "Point-set file (- for stdin)")->required();
  c_brute->add_option("--k", k, "Simplex dimension (cube input)");
  c_brute->add_option("--m", m, "Tuple size (sphere input)");
  c_brute->add_option("--budget", budget, "Enumeration budget (default 5e7)");
  c_brute->add_option("--prune", prune, "exact|aggressive (default exact)");

  CLI::App* c_find = app.add_subcommand("find", "Recursive small-simplex search");
  c_find->add_option("file", file, "Point-set file (- for stdin)")->required();
  c_find->add_option("--k", k, "Simplex dimension")->required();
  c_find->add_option("--schedule", schedule, "Split schedule: 'exhaustive' or comma list");
  c_find->add_option("--budget", budget, "Stage-1 enumeration budget (default 5e7)");

  CLI::App* c_exp = app.add_subcommand("exponents", "Exact rational exponent lower bounds");
  c_exp->add_option("--max-dim", max_dim, "Largest dimension (default 8)");
  c_exp->add_option("--cell", cell, "Report a single cell k,d");
  c_exp->add_flag("--derivation", derivation, "Show derivation trees and alternatives");
  c_exp->add_flag("--check-log", check_log, "Verify the logarithmic diagonal bound");

  CLI::App* c_run = app.add_subcommand("experiment", "Seeded minimum-volume sweep to CSV");
  c_run->add_option("--d", exp_d, "Ambient dimension")->required();
  c_run->add_option("--k", exp_k, "Simplex dimension")->required();
  c_run->add_option("--n", n_list, "Comma list of point counts")->required();
  c_run->add_option("--seeds", num_seeds, "Number of seeds (base taken from --seed)");
  c_run->add_option("--generator", generator, "uniform-cube|uniform-sphere|grid");
  c_run->add_option("--method", method, "brute|recursive|both");
  c_run->add_option("--schedule", schedule, "Split schedule for the recursive method");
  c_run->add_option("--budget", budget, "Enumeration budget (default 5e7)");

  CLI::App* c_fit = app.add_subcommand("fit", "Log-log slope fit of an experiment CSV");
  c_fit->add_option("csv", csv_path, "Experiment CSV path (- for stdin)")->required();
  c_fit->add_flag("--no-reference", no_reference, "Skip the exponent-table annotation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (budget < 0) budget = default_budget();
    if (c_vol->parsed()) cmd_vol(g, file);
    else if (c_svol->parsed()) cmd_simplex_vol(g, file);
    else if (c_lift->parsed()) cmd_lift(g, file);
    else if (c_proj->parsed()) cmd_project(g, file);
    else if (c_brute->parsed()) cmd_brute(g, file, k, m, budget, prune);
    else if (c_find->parsed()) cmd_find(g, file, k, schedule, budget);
    else if (c_exp->parsed()) cmd_exponents(g, max_dim, cell, derivation, check_log);
    else if (c_run->parsed()) cmd_experiment(g, exp_d, exp_k, n_list, num_seeds, generator,
                                             method, schedule, budget);
    else if (c_fit->parsed()) cmd_fit(g, csv_path, no_reference);
    return 0;
  } catch (const ms::BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ms::DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
