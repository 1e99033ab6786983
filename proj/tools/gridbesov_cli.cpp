// Command-line front end: grid generation/validation, transforms, norms,
// particle and dipole expansions, and batch equivalence experiments.
// Exit codes: 0 pass, 1 contract violation, 2 usage or parse error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "gridbesov/besov.hpp"
#include "gridbesov/experiments.hpp"
#include "gridbesov/io.hpp"
#include "gridbesov/transform.hpp"

namespace {

using namespace gb;

struct GridOpts {
  std::string file;
  std::string type = "dyadic";
  int depth = 6;
  int arity = 2;
  int max_children = 3;
  std::string lambda = "0.75";
  std::string lambda_star = "0.25";
  uint64_t seed = 1;
};

void add_grid_opts(CLI::App* cmd, GridOpts& o) {
  cmd->add_option("--grid", o.file, "grid JSON file (overrides the generator flags)");
  cmd->add_option("--type", o.type, "generator: dyadic|triadic|uniform|random")
      ->check(CLI::IsMember({"dyadic", "triadic", "uniform", "random"}));
  cmd->add_option("--depth", o.depth, "generated grid depth");
  cmd->add_option("--arity", o.arity, "children per cell for --type uniform");
  cmd->add_option("--max-children", o.max_children, "random generator: max children");
  cmd->add_option("--lambda", o.lambda, "random generator: upper ratio bound");
  cmd->add_option("--lambda-star", o.lambda_star, "random generator: lower ratio bound");
  cmd->add_option("--grid-seed", o.seed, "random generator seed");
}

GoodGrid make_grid_from(const GridOpts& o, NumericMode mode) {
  if (!o.file.empty()) return load_grid(o.file, mode);
  if (o.type == "dyadic") return build_dyadic(o.depth);
  if (o.type == "triadic") return build_uniform(o.depth, 3);
  if (o.type == "uniform") return build_uniform(o.depth, o.arity);
  return build_random(o.seed, o.depth, o.max_children, rat_parse(o.lambda),
                      rat_parse(o.lambda_star));
}

NumericMode parse_mode(const std::string& m) {
  if (m == "rational") return NumericMode::rational;
  if (m == "float") return NumericMode::floating;
  fail(Errc::invalid_argument, "mode must be rational or float");
}

std::vector<uint32_t> parse_path(std::string text) {
  for (char& c : text)
    if (c == ',') c = '.';
  return string_to_path(text);
}

void deliver(const Json& j, const std::string& out) {
  const std::string text = j.dump(1) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

Json trunc_report(const GoodGrid& g, const TruncatedDist<Rational>& t, Json params) {
  Json rows = Json::array();
  rows.push_back(Json::array({-1, "", -1, rat_str(t.coeffs.constant)}));
  for (const auto& [w, v] : t.coeffs.terms)
    rows.push_back(Json::array(
        {w.level, path_to_string(g.path_of({w.level, w.cell})), w.pair, rat_str(v)}));
  return Json{{"schema", "gridbesov.dist/1"},
              {"params", std::move(params)},
              {"grid", grid_summary_json(g)},
              {"convention", "plain"},
              {"s", t.coeffs.s},
              {"level", t.level},
              {"norm_bminus", norm_minus(convert(t.coeffs, Convention::besov_minus))},
              {"tail_bound", t.tail},
              {"observed_tail", t.observed_tail},
              {"coeffs", std::move(rows)}};
}

Json trunc_report_f(const GoodGrid& g, const TruncatedDist<Cplx>& t, Json params) {
  Json rows = Json::array();
  rows.push_back(Json::array({-1, "", -1, t.coeffs.constant.real(), t.coeffs.constant.imag()}));
  for (const auto& [w, v] : t.coeffs.terms)
    rows.push_back(Json::array(
        {w.level, path_to_string(g.path_of({w.level, w.cell})), w.pair, v.real(), v.imag()}));
  return Json{{"schema", "gridbesov.dist/1"},
              {"params", std::move(params)},
              {"grid", grid_summary_json(g)},
              {"convention", "plain"},
              {"s", t.coeffs.s},
              {"level", t.level},
              {"norm_bminus", norm_minus(convert(t.coeffs, Convention::besov_minus))},
              {"tail_bound", t.tail},
              {"observed_tail", t.observed_tail},
              {"coeffs", std::move(rows)}};
}

AnchorRule parse_rule(const std::string& r) {
  if (r == "leftmost") return AnchorRule::leftmost;
  if (r == "random" || r == "seeded-random") return AnchorRule::seeded_random;
  fail(Errc::invalid_argument, "rule must be leftmost or random");
}

int run(int argc, char** argv) {
  CLI::App app{"dyadic-style harmonic analysis on good grids: unbalanced Haar transforms, "
               "Besov norms, Dirac/dipole expansions"};
  app.require_subcommand(1);

  std::string mode_name = "rational";
  std::string out;
  double s = 0.5;
  uint64_t seed = 1;

  // grid -------------------------------------------------------------
  auto* grid_cmd = app.add_subcommand("grid", "generate or validate grid files");
  grid_cmd->require_subcommand(1);
  auto* gen = grid_cmd->add_subcommand("gen", "generate a grid file");
  GridOpts gen_opts;
  add_grid_opts(gen, gen_opts);
  bool gen_validate = false;
  gen->add_flag("--validate", gen_validate, "print a validation report as well");
  gen->add_option("-o,--out", out, "output grid file")->required();
  auto* val = grid_cmd->add_subcommand("validate", "validate a grid file");
  std::string val_file;
  val->add_option("file", val_file, "grid JSON file")->required();
  val->add_option("--mode", mode_name, "rational|float");

  // analyze ----------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "wavelet analysis of a step function");
  GridOpts an_grid;
  add_grid_opts(an, an_grid);
  std::string an_step, an_conv = "bplus";
  an->add_option("--step", an_step, "step function JSON")->required();
  an->add_option("--s", s, "smoothness in (0,1)");
  an->add_option("--convention", an_conv, "dump convention: plain|bplus|bminus");
  an->add_option("--mode", mode_name, "rational|float");
  an->add_option("-o,--out", out, "output coefficient CSV")->required();

  // synthesize ---------------------------------------------------------
  auto* sy = app.add_subcommand("synthesize", "evaluate coefficients as a step function");
  GridOpts sy_grid;
  add_grid_opts(sy, sy_grid);
  std::string sy_coeffs;
  int sy_level = -1;
  sy->add_option("--coeffs", sy_coeffs, "coefficient CSV")->required();
  sy->add_option("--level", sy_level, "target level (default: grid depth)");
  sy->add_option("--mode", mode_name, "rational|float");
  sy->add_option("-o,--out", out, "output step JSON")->required();

  // norm ---------------------------------------------------------------
  auto* no = app.add_subcommand("norm", "norms of coefficient families and step functions");
  GridOpts no_grid;
  add_grid_opts(no, no_grid);
  std::string no_kind = "bminus", no_coeffs, no_step;
  int no_k = 0;
  no->add_option("--kind", no_kind, "bplus|bminus|holder|modulus")
      ->check(CLI::IsMember({"bplus", "bminus", "holder", "modulus"}));
  no->add_option("--coeffs", no_coeffs, "coefficient CSV (bplus/bminus/modulus)");
  no->add_option("--step", no_step, "step JSON (holder)");
  no->add_option("--k", no_k, "level threshold for --kind modulus");
  no->add_option("--s", s, "smoothness");
  no->add_option("--mode", mode_name, "rational|float");
  no->add_option("-o,--out", out, "report JSON (default stdout)");

  // dirac / dipole -------------------------------------------------------
  auto* di = app.add_subcommand("dirac", "truncated Dirac mass coefficients");
  GridOpts di_grid;
  add_grid_opts(di, di_grid);
  std::string di_path;
  int di_depth = -1;
  std::string di_csv;
  di->add_option("--path", di_path, "address path, e.g. 0,1,0")->required();
  di->add_option("--s", s, "smoothness");
  di->add_option("--trunc", di_depth, "truncation level (default: grid depth)");
  di->add_option("--csv", di_csv, "also dump the coefficients as CSV");
  di->add_option("--mode", mode_name, "rational|float");
  di->add_option("-o,--out", out, "report JSON (default stdout)");

  auto* dp = app.add_subcommand("dipole", "truncated dipole coefficients and norm bounds");
  GridOpts dp_grid;
  add_grid_opts(dp, dp_grid);
  std::string dp_x, dp_y, dp_csv;
  int dp_depth = -1;
  dp->add_option("--x", dp_x, "first address")->required();
  dp->add_option("--y", dp_y, "second address")->required();
  dp->add_option("--s", s, "smoothness");
  dp->add_option("--trunc", dp_depth, "truncation level (default: grid depth)");
  dp->add_option("--csv", dp_csv, "also dump the coefficients as CSV");
  dp->add_option("--mode", mode_name, "rational|float");
  dp->add_option("-o,--out", out, "report JSON (default stdout)");

  // dc / dd --------------------------------------------------------------
  auto* dc = app.add_subcommand("dc", "dipole-basis decomposition of a coefficient family");
  GridOpts dc_grid;
  add_grid_opts(dc, dc_grid);
  std::string dc_coeffs, dc_rule = "leftmost", dc_csv;
  int dc_depth = -1;
  dc->add_option("--coeffs", dc_coeffs, "besov_minus coefficient CSV")->required();
  dc->add_option("--rule", dc_rule, "anchor rule: leftmost|random");
  dc->add_option("--seed", seed, "anchor seed for --rule random");
  dc->add_option("--trunc", dc_depth, "truncation level (default: grid depth)");
  dc->add_option("--csv", dc_csv, "dump dipole coefficients as CSV");
  dc->add_option("--mode", mode_name, "rational|float");
  dc->add_option("-o,--out", out, "report JSON (default stdout)");

  auto* dd = app.add_subcommand("dd", "Dirac-dipole atomic representation and cost");
  GridOpts dd_grid;
  add_grid_opts(dd, dd_grid);
  std::string dd_coeffs, dd_rule = "leftmost";
  int dd_depth = -1;
  dd->add_option("--coeffs", dd_coeffs, "besov_minus coefficient CSV")->required();
  dd->add_option("--rule", dd_rule, "anchor rule: leftmost|random");
  dd->add_option("--seed", seed, "anchor seed for --rule random");
  dd->add_option("--trunc", dd_depth, "truncation level (default: grid depth)");
  dd->add_option("--mode", mode_name, "rational|float");
  dd->add_option("-o,--out", out, "report JSON (default stdout)");

  // experiment -------------------------------------------------------------
  auto* ex = app.add_subcommand("experiment", "batch norm-equivalence experiments");
  GridOpts ex_grid;
  add_grid_opts(ex, ex_grid);
  ExperimentSpec spec;
  ex->add_option("--kind", spec.kind,
                 "holder-equiv|duality|dirac-decay|dipole-ratio|riemann-convergence|"
                 "dc-equiv|dd-equiv")
      ->required();
  ex->add_option("--s", spec.s, "smoothness");
  ex->add_option("--exp-depth", spec.depth, "working depth (default: grid depth)");
  ex->add_option("--trials", spec.trials, "trials per sweep point");
  ex->add_option("--seed", spec.seed, "experiment seed");
  ex->add_option("--mode", mode_name, "rational|float");
  ex->add_option("-o,--out", out, "report JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);
  const NumericMode mode = parse_mode(mode_name);

  if (gen->parsed()) {
    GridOpts o = gen_opts;
    o.file.clear();
    const GoodGrid g = make_grid_from(o, mode);
    save_grid(g, out);
    if (gen_validate) std::cout << validate(g, mode).summary() << "\n";
    return 0;
  }
  if (val->parsed()) {
    const GoodGrid g = load_grid(val_file, mode, /*run_validate=*/false);
    const ValidationReport rep = validate(g, mode);
    std::cout << rep.summary() << "\n";
    return rep.pass ? 0 : 1;
  }
  if (an->parsed()) {
    const GoodGrid g = make_grid_from(an_grid, mode);
    const Convention conv = convention_parse(an_conv);
    Json summary{{"s", s}, {"convention", an_conv}, {"out", out}};
    if (mode == NumericMode::rational) {
      const auto psi = step_from_json<Rational>(g, Json::parse(read_text_file(an_step)));
      const auto coeffs = convert(analyze(psi, s), conv);
      save_coeffs_csv(coeffs, out);
      summary["terms"] = coeffs.terms.size();
      summary["norm_bplus"] = norm_plus(convert(coeffs, Convention::besov_plus));
    } else {
      const auto psi = step_from_json<Cplx>(g, Json::parse(read_text_file(an_step)));
      const auto coeffs = convert(analyze(psi, s), conv);
      save_coeffs_csv(coeffs, out);
      summary["terms"] = coeffs.terms.size();
      summary["norm_bplus"] = norm_plus(convert(coeffs, Convention::besov_plus));
    }
    std::cout << summary.dump(1) << "\n";
    return 0;
  }
  if (sy->parsed()) {
    const GoodGrid g = make_grid_from(sy_grid, mode);
    const int level = sy_level < 0 ? g.depth() : sy_level;
    if (mode == NumericMode::rational) {
      auto coeffs = load_coeffs_csv<Rational>(g, sy_coeffs);
      if (coeffs.conv == Convention::besov_minus) coeffs = convert(coeffs, Convention::plain);
      write_text_file(out, step_to_json(synthesize(coeffs, coeffs.s, level)).dump(1) + "\n");
    } else {
      auto coeffs = load_coeffs_csv<Cplx>(g, sy_coeffs);
      if (coeffs.conv == Convention::besov_minus) coeffs = convert(coeffs, Convention::plain);
      write_text_file(out, step_to_json(synthesize(coeffs, coeffs.s, level)).dump(1) + "\n");
    }
    return 0;
  }
  if (no->parsed()) {
    const GoodGrid g = make_grid_from(no_grid, mode);
    Json rep{{"kind", no_kind}, {"tail_bound", 0.0}, {"witness", ""}};
    auto with_coeffs = [&](auto tag) {
      using F = decltype(tag);
      auto c = load_coeffs_csv<F>(g, no_coeffs);
      rep["s"] = c.s;
      if (no_kind == "bplus") rep["norm"] = norm_plus(convert(c, Convention::besov_plus));
      if (no_kind == "bminus") rep["norm"] = norm_minus(convert(c, Convention::besov_minus));
      if (no_kind == "modulus")
        rep["norm"] = vanishing_modulus(convert(c, Convention::besov_plus), no_k);
    };
    if (no_kind == "holder") {
      if (no_step.empty()) fail(Errc::invalid_argument, "--kind holder needs --step");
      rep["s"] = s;
      HolderReport h;
      if (mode == NumericMode::rational)
        h = holder_norm(step_from_json<Rational>(g, Json::parse(read_text_file(no_step))), s);
      else
        h = holder_norm(step_from_json<Cplx>(g, Json::parse(read_text_file(no_step))), s);
      rep["norm"] = h.norm();
      rep["sup"] = h.sup;
      rep["seminorm"] = h.seminorm;
      rep["witness"] = path_to_string(h.witness_path);
    } else {
      if (no_coeffs.empty()) fail(Errc::invalid_argument, "--kind " + no_kind + " needs --coeffs");
      if (mode == NumericMode::rational)
        with_coeffs(Rational());
      else
        with_coeffs(Cplx());
    }
    deliver(rep, out);
    return 0;
  }
  if (di->parsed()) {
    const GoodGrid g = make_grid_from(di_grid, mode);
    const int n = di_depth < 0 ? g.depth() : di_depth;
    const Address x{parse_path(di_path)};
    const Json params{{"path", x.path}, {"s", s}, {"trunc", n}, {"extension", "first-child"}};
    Json rep;
    if (mode == NumericMode::rational) {
      const auto t = dirac_coeffs<Rational>(g, x, s, n);
      rep = trunc_report(g, t, params);
      if (!di_csv.empty()) save_coeffs_csv(convert(t.coeffs, Convention::besov_minus), di_csv);
    } else {
      const auto t = dirac_coeffs<Cplx>(g, x, s, n);
      rep = trunc_report_f(g, t, params);
      if (!di_csv.empty()) save_coeffs_csv(convert(t.coeffs, Convention::besov_minus), di_csv);
    }
    deliver(rep, out);
    return 0;
  }
  if (dp->parsed()) {
    const GoodGrid g = make_grid_from(dp_grid, mode);
    const int n = dp_depth < 0 ? g.depth() : dp_depth;
    const Address x{parse_path(dp_x)}, y{parse_path(dp_y)};
    const Json params{{"x", x.path}, {"y", y.path}, {"s", s}, {"trunc", n},
                      {"extension", "first-child"}};
    Json rep;
    if (mode == NumericMode::rational) {
      const auto t = dipole_coeffs<Rational>(g, x, y, s, n);
      rep = trunc_report(g, t, params);
      if (!dp_csv.empty()) save_coeffs_csv(convert(t.coeffs, Convention::besov_minus), dp_csv);
    } else {
      const auto t = dipole_coeffs<Cplx>(g, x, y, s, n);
      rep = trunc_report_f(g, t, params);
      if (!dp_csv.empty()) save_coeffs_csv(convert(t.coeffs, Convention::besov_minus), dp_csv);
    }
    const DipoleNormBounds b = dipole_norm_bounds(g, x, y, s);
    rep["norm_interval"] = Json::array({b.lower, b.upper});
    rep["separation_cell"] = path_to_string(g.path_of(b.separation));
    rep["ratio_to_separation"] = b.ratio;
    deliver(rep, out);
    return 0;
  }
  if (dc->parsed() || dd->parsed()) {
    const bool is_dd = dd->parsed();
    const GoodGrid g = make_grid_from(is_dd ? dd_grid : dc_grid, mode);
    const int n = (is_dd ? dd_depth : dc_depth) < 0 ? g.depth() : (is_dd ? dd_depth : dc_depth);
    const AnchorRule rule = parse_rule(is_dd ? dd_rule : dc_rule);
    const DipoleBasis basis = build_dipole_basis(g, rule, seed);
    if (mode != NumericMode::rational) fail(Errc::invalid_argument, "dc/dd run in rational mode");
    auto phi = load_coeffs_csv<Rational>(g, is_dd ? dd_coeffs : dc_coeffs);
    phi = convert(phi, Convention::besov_minus);
    const DCCoeffs<Rational> dcc = dc_decompose(phi, basis, n);
    Json rep{{"schema", is_dd ? "gridbesov.dd/1" : "gridbesov.dc/1"},
             {"params", Json{{"rule", anchor_rule_name(rule)}, {"seed", seed}, {"trunc", n},
                             {"s", phi.s}}},
             {"grid", grid_summary_json(g)},
             {"dc_norm", dc_norm(dcc)},
             {"tail_bound", dcc.tail},
             {"norm_bminus", norm_minus(phi)}};
    if (is_dd) {
      const DDRep<Rational> r = dd_decompose(phi, basis, n);
      Json diracs = Json::array(), dipoles = Json::array();
      for (const auto& a : r.diracs)
        diracs.push_back(Json{{"c", rat_str(a.c)}, {"path", a.z.path}});
      for (const auto& a : r.dipoles)
        dipoles.push_back(Json{{"b", rat_str(a.b)}, {"x", a.x.path}, {"y", a.y.path}});
      rep["diracs"] = std::move(diracs);
      rep["dipoles"] = std::move(dipoles);
      rep["cost"] = dd_cost(r);
    } else {
      Json rows = Json::array();
      for (const auto& [w, m] : dcc.terms)
        rows.push_back(Json::array(
            {path_to_string(g.path_of({w.level, w.cell})), w.pair, rat_str(m)}));
      rep["m0"] = rat_str(dcc.m0);
      rep["terms"] = std::move(rows);
      if (!dc_csv.empty()) {
        std::ostringstream csv;
        csv << "owner_path,pair_index,m_re,m_im\n";
        for (const auto& [w, m] : dcc.terms)
          csv << path_to_string(g.path_of({w.level, w.cell})) << ',' << w.pair << ','
              << fmt_double(m.get_d()) << ",0\n";
        write_text_file(dc_csv, csv.str());
      }
    }
    deliver(rep, out);
    return 0;
  }
  if (ex->parsed()) {
    const GoodGrid g = make_grid_from(ex_grid, mode);
    spec.mode = mode;
    if (!ex->count("--exp-depth")) spec.depth = g.depth();
    const Json rep = run_experiment(g, spec);
    deliver(rep, out);
    return rep.at("pass").get<bool>() ? 0 : 1;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == gb::Errc::parse_error || e.code() == gb::Errc::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
