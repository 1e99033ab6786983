#include "gridbesov/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "gridbesov/besov.hpp"
#include "gridbesov/parallel.hpp"

namespace gb {

using Json = nlohmann::json;

Json grid_summary_json(const GoodGrid& g) {
  return Json{{"depth", g.depth()},
              {"lambda", rat_str(g.lambda())},
              {"lambda_star", rat_str(g.lambda_star())},
              {"cgr", g.cgr()},
              {"max_pairs", g.max_pairs_per_cell()}};
}

double log_slope(const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0)) continue;
    const double x = static_cast<double>(i);
    const double ly = std::log(y[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::pair<Address, Address> random_separated_pair(const GoodGrid& g, int n, Rng& rng) {
  if (n >= g.depth()) fail(Errc::level_out_of_range, "separation level needs depth > n");
  const int64_t pi = static_cast<int64_t>(rng.below(static_cast<uint64_t>(g.cell_count(n))));
  const CellRef p{n, pi};
  const int nc = g.child_count(p);
  int i = static_cast<int>(rng.below(static_cast<uint64_t>(nc)));
  int j = static_cast<int>(rng.below(static_cast<uint64_t>(nc - 1)));
  if (j >= i) ++j;
  const std::vector<uint32_t> base = g.path_of(p);
  auto descend = [&](int first) {
    Address a;
    a.path = base;
    a.path.push_back(static_cast<uint32_t>(first));
    CellRef r = g.child(p, first);
    for (int k = n + 1; k < g.depth(); ++k) {
      const int c = static_cast<int>(rng.below(static_cast<uint64_t>(g.child_count(r))));
      a.path.push_back(static_cast<uint32_t>(c));
      r = g.child(r, c);
    }
    return a;
  };
  return {descend(i), descend(j)};
}

namespace {

struct Interval {
  double lo{0}, hi{0};
};

Interval minmax(const std::vector<double>& v) {
  Interval out{v.empty() ? 0 : v[0], v.empty() ? 0 : v[0]};
  for (double x : v) {
    out.lo = std::min(out.lo, x);
    out.hi = std::max(out.hi, x);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

bool drift_below(double a, double b, double rel) {
  return std::fabs(b - a) <= rel * std::fabs(a);
}

template <class F>
Json holder_equiv(const GoodGrid& g, const ExperimentSpec& spec) {
  const int d_hi = spec.depth;
  const int d_lo = std::max(1, spec.depth - 2);
  Json depths = Json::array();
  Interval iv[2];
  int which = 0;
  for (int d : {d_lo, d_hi}) {
    std::vector<double> ratios(static_cast<size_t>(spec.trials));
    parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
      Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), static_cast<uint64_t>(d)));
      double ratio = 0;
      for (int attempt = 0; attempt < 16 && ratio == 0; ++attempt) {
        const StepFunction<F> psi = random_step<F>(g, d, rng);
        const HolderReport h = holder_norm(psi, spec.s);
        if (h.norm() > 0) ratio = norm_plus(analyze(psi, spec.s)) / h.norm();
      }
      ratios[static_cast<size_t>(t)] = ratio;
    });
    const Interval iv_d = minmax(ratios);
    iv[which++] = iv_d;
    depths.push_back(Json{{"depth", d},
                          {"ratio_min", iv_d.lo},
                          {"ratio_max", iv_d.hi},
                          {"ratio_mean", mean(ratios)}});
  }
  const bool pass = iv[0].lo > 0 && drift_below(iv[0].lo, iv[1].lo, 0.10) &&
                    drift_below(iv[0].hi, iv[1].hi, 0.10);
  return Json{{"depths", std::move(depths)},
              {"summary",
               Json{{"drift_lo", iv[0].lo > 0 ? std::fabs(iv[1].lo - iv[0].lo) / iv[0].lo : 1.0},
                    {"drift_hi", iv[0].hi > 0 ? std::fabs(iv[1].hi - iv[0].hi) / iv[0].hi : 1.0}}},
              {"pass", pass}};
}

template <class F>
Json duality(const GoodGrid& g, const ExperimentSpec& spec) {
  const double bound = 2.0 / g.lambda_star_d();
  std::vector<double> ratios(static_cast<size_t>(spec.trials));
  parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
    Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), 0x0d));
    const DistCoeffs<F> phi = random_sparse_minus<F>(g, spec.s, spec.depth, 20, rng);
    DistCoeffs<F> psi = random_sparse_minus<F>(g, spec.s, spec.depth, 20, rng);
    psi.conv = Convention::besov_plus;
    ratios[static_cast<size_t>(t)] = duality_gap(phi, psi);
  });
  const Interval iv = minmax(ratios);
  int violations = 0;
  for (double r : ratios)
    if (r > bound * (1.0 + 1e-12)) ++violations;
  return Json{{"ratios", ratios},
              {"summary",
               Json{{"max_ratio", iv.hi}, {"bound", bound}, {"violations", violations}}},
              {"pass", violations == 0}};
}

template <class F>
Json dirac_decay(const GoodGrid& g, const ExperimentSpec& spec) {
  const int depth = std::min(spec.depth, g.depth());
  const double target = spec.s * std::log(g.lambda_d());
  std::vector<double> slopes(static_cast<size_t>(spec.trials));
  std::vector<double> norms(static_cast<size_t>(spec.trials));
  parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
    Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), 0x1d));
    const Address x = random_address(g, rng);
    slopes[static_cast<size_t>(t)] = log_slope(dirac_increment_norms<F>(g, x, spec.s, depth));
    const TruncatedDist<F> d = dirac_coeffs<F>(g, x, spec.s, depth);
    norms[static_cast<size_t>(t)] = norm_minus(d.coeffs);
  });
  bool pass = true;
  for (double sl : slopes) pass = pass && sl <= target + 0.05;
  return Json{{"slopes", slopes},
              {"truncated_norms", norms},
              {"summary", Json{{"slope_min", minmax(slopes).lo},
                               {"slope_max", minmax(slopes).hi},
                               {"target_slope", target}}},
              {"pass", pass}};
}

template <class F>
Json dipole_ratio(const GoodGrid& g, const ExperimentSpec& spec) {
  const int levels = std::min(6, g.depth() - 1);
  const double upper = 2.0 * g.cgr() / (1.0 - std::pow(g.lambda_d(), spec.s));
  Json per_level = Json::array();
  bool pass = true;
  double global_lo = 0, global_hi = 0;
  bool first = true;
  for (int n = 0; n <= levels; ++n) {
    std::vector<double> ratios(static_cast<size_t>(spec.trials));
    parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
      Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), 0x2d00 + static_cast<uint64_t>(n)));
      const auto [x, y] = random_separated_pair(g, n, rng);
      ratios[static_cast<size_t>(t)] = dipole_norm_bounds(g, x, y, spec.s).ratio;
    });
    const Interval iv = minmax(ratios);
    if (first || iv.lo < global_lo) global_lo = iv.lo;
    if (first || iv.hi > global_hi) global_hi = iv.hi;
    first = false;
    pass = pass && iv.lo >= 1.0 - 1e-9 && iv.hi <= upper * (1.0 + 1e-9);
    per_level.push_back(Json{{"level", n},
                             {"ratio_min", iv.lo},
                             {"ratio_max", iv.hi},
                             {"spread", iv.hi - iv.lo}});
  }
  const double c_hat = std::max(global_hi, global_lo > 0 ? 1.0 / global_lo : 0.0);
  return Json{{"per_level", std::move(per_level)},
              {"summary", Json{{"ratio_min", global_lo},
                               {"ratio_max", global_hi},
                               {"c_hat", c_hat},
                               {"upper_bound", upper}}},
              {"pass", pass}};
}

template <class F>
Json riemann_convergence(const GoodGrid& g, const ExperimentSpec& spec) {
  const int depth = std::min(spec.depth, g.depth());
  const int imax = std::min(8, depth);
  const double rate_bound = std::pow(g.lambda_d(), spec.s) + 0.05;
  Json rules = Json::array();
  bool pass = true;
  for (AnchorRule rule : {AnchorRule::leftmost, AnchorRule::seeded_random}) {
    const DipoleBasis basis = build_dipole_basis(g, rule, spec.seed);
    std::vector<std::vector<double>> err(static_cast<size_t>(spec.trials));
    parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
      Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), 0x3d));
      const StepFunction<F> psi = random_step<F>(g, depth, rng);
      const DistCoeffs<F> pc = analyze(psi, spec.s);
      const double np = norm_plus(pc);
      const F target = integral(psi);
      std::vector<double> e;
      for (int i = 0; i <= imax; ++i) {
        const ParticleConfig<F> cfg = riemann_config<F>(g, basis, FSet::cell({0, 0}), i);
        const TruncatedDist<F> tc = config_coeffs<F>(g, cfg, spec.s, depth);
        const F val = pairing(tc.coeffs, pc);
        e.push_back(ScalarOps<F>::abs_d(F(val - target)) / np);
      }
      err[static_cast<size_t>(t)] = std::move(e);
    });
    std::vector<double> eps(static_cast<size_t>(imax) + 1, 0.0);
    for (const auto& e : err)
      for (size_t i = 0; i < e.size(); ++i) eps[i] = std::max(eps[i], e[i]);
    const double rate = std::exp(log_slope(eps));
    const bool rule_pass = rate <= rate_bound && (imax < 5 || eps[5] <= 0.1);
    pass = pass && rule_pass;
    rules.push_back(Json{{"rule", anchor_rule_name(rule)},
                         {"normalized_errors", eps},
                         {"rate", rate},
                         {"rate_bound", rate_bound},
                         {"pass", rule_pass}});
  }
  return Json{{"rules", std::move(rules)}, {"pass", pass}};
}

template <class F>
Json dc_dd_equiv(const GoodGrid& g, const ExperimentSpec& spec, bool dd) {
  const int depth = std::min(spec.depth, g.depth());
  const double c_upper =
      1.0 + 2.0 * g.max_pairs_per_cell() / (1.0 - std::pow(g.lambda_d(), spec.s));
  const double c_lower = dc_to_minus_constant(g, spec.s);
  Json rules = Json::array();
  bool pass = true;
  Interval iv_rule[2];
  int which = 0;
  for (AnchorRule rule : {AnchorRule::leftmost, AnchorRule::seeded_random}) {
    const DipoleBasis basis = build_dipole_basis(g, rule, spec.seed);
    std::vector<double> ratios(static_cast<size_t>(spec.trials));
    std::vector<double> rt_err(static_cast<size_t>(spec.trials));
    std::vector<double> rt_bound(static_cast<size_t>(spec.trials));
    parallel_for(Exec::parallel, spec.trials, [&](int64_t t) {
      Rng rng(stream_seed(spec.seed, static_cast<uint64_t>(t), dd ? 0x5d : 0x4d));
      const DistCoeffs<F> phi = random_sparse_minus<F>(g, spec.s, depth, 15, rng);
      const double nm = norm_minus(phi);
      const DCCoeffs<F> dc = dc_decompose(phi, basis, depth);
      double cost;
      if (dd) {
        cost = dd_cost(dd_decompose(phi, basis, depth));
      } else {
        cost = dc_norm(dc);
      }
      ratios[static_cast<size_t>(t)] = cost / nm;
      const TruncatedDist<F> rt = dc_to_dist(dc, depth);
      const DistCoeffs<F> diff = plus(rt.coeffs, scaled(phi, F(-1)));
      rt_err[static_cast<size_t>(t)] = norm_minus(diff);
      rt_bound[static_cast<size_t>(t)] = rt.tail;
    });
    const Interval iv = minmax(ratios);
    iv_rule[which++] = iv;
    bool rule_pass =
        iv.lo >= 1.0 / c_lower * (1.0 - 1e-9) && iv.hi <= c_upper * (1.0 + 1e-9);
    double max_err = 0, max_bound = 0;
    for (size_t i = 0; i < rt_err.size(); ++i) {
      rule_pass = rule_pass && rt_err[i] <= rt_bound[i] + 1e-12;
      max_err = std::max(max_err, rt_err[i]);
      max_bound = std::max(max_bound, rt_bound[i]);
    }
    pass = pass && rule_pass;
    rules.push_back(Json{{"rule", anchor_rule_name(rule)},
                         {"ratio_min", iv.lo},
                         {"ratio_max", iv.hi},
                         {"ratio_mean", mean(ratios)},
                         {"c_hat", std::max(iv.hi, 1.0 / iv.lo)},
                         {"roundtrip_max_error", max_err},
                         {"roundtrip_max_bound", max_bound},
                         {"pass", rule_pass}});
  }
  const bool overlap = iv_rule[0].lo <= iv_rule[1].hi && iv_rule[1].lo <= iv_rule[0].hi;
  pass = pass && overlap;
  return Json{{"rules", std::move(rules)},
              {"summary", Json{{"rules_overlap", overlap},
                               {"explicit_upper", c_upper},
                               {"explicit_lower", 1.0 / c_lower}}},
              {"pass", pass}};
}

template <class F>
Json dispatch(const GoodGrid& g, const ExperimentSpec& spec) {
  if (spec.kind == "holder-equiv") return holder_equiv<F>(g, spec);
  if (spec.kind == "duality") return duality<F>(g, spec);
  if (spec.kind == "dirac-decay") return dirac_decay<F>(g, spec);
  if (spec.kind == "dipole-ratio") return dipole_ratio<F>(g, spec);
  if (spec.kind == "riemann-convergence") return riemann_convergence<F>(g, spec);
  if (spec.kind == "dc-equiv") return dc_dd_equiv<F>(g, spec, false);
  if (spec.kind == "dd-equiv") return dc_dd_equiv<F>(g, spec, true);
  fail(Errc::invalid_argument, "unknown experiment kind '" + spec.kind + "'");
}

}  // namespace

Json run_experiment(const GoodGrid& g, const ExperimentSpec& spec) {
  if (spec.trials < 1) fail(Errc::invalid_argument, "trials must be >= 1");
  if (!(spec.s > 0 && spec.s < 1)) fail(Errc::invalid_argument, "s must lie in (0,1)");
  if (spec.depth > g.depth()) fail(Errc::depth_insufficient, "spec depth exceeds grid depth");
  Json body = spec.mode == NumericMode::rational ? dispatch<Rational>(g, spec)
                                                 : dispatch<Cplx>(g, spec);
  Json report{{"schema", "gridbesov.report/1"},
              {"kind", spec.kind},
              {"params", Json{{"s", spec.s},
                              {"depth", spec.depth},
                              {"trials", spec.trials},
                              {"seed", spec.seed},
                              {"mode", spec.mode == NumericMode::rational ? "rational" : "float"}}},
              {"grid", grid_summary_json(g)}};
  report.update(body);
  return report;
}

}  // namespace gb
