// Copyright 2026 The smoothlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "common.hpp"

#include <smoothlab/best_constant.hpp>
#include <smoothlab/comparison.hpp>
#include <smoothlab/evolution_norms.hpp>
#include <smoothlab/expression.hpp>
#include <smoothlab/perturbation.hpp>
#include <smoothlab/spectral_density.hpp>

#include <algorithm>
#include <cmath>

namespace smoothlab::harness {

namespace {

WeightExponent read_s(Reader& r) { return WeightExponent{r.number("s", 0.0, 8.0)}; }

std::vector<double> spaced(const std::string& spacing, Interval range, std::size_t n, const std::string& path) {
  if (spacing == "log") {
    if (!(range.lo > 0.0)) Reader::error(path, "log spacing needs a positive range");
    return log_spaced(range.lo, range.hi, n);
  }
  if (spacing == "linear") return lin_spaced(range.lo, range.hi, n);
  Reader::error(path, "spacing must be 'log' or 'linear'");
}

// Half-width of a target interval widened by the tolerance scale.
std::pair<double, double> scaled_range(Interval r, const Common& c) {
  const double mid = 0.5 * (r.lo + r.hi), half = 0.5 * (r.hi - r.lo) * c.tolerance_scale;
  return {mid - half, mid + half};
}

void add_study(EstimateReport& rep, Table& t, const std::string& name, const RefinementStudy& st, double tol) {
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < st.levels.size(); ++k) {
    const auto& l = st.levels[k];
    t.row({name, std::to_string(k), fmt(l.time.t_max), std::to_string(l.time.m_points), std::to_string(l.eta_nodes),
           fmt(l.lhs), fmt(l.rhs), fmt(l.residual), fmt(l.truncation_tail_estimate), fmt(l.tail_exponent)});
    if (k > 0) worst_increase = std::max(worst_increase, l.residual - st.levels[k - 1].residual);
  }
  const auto& l0 = st.levels.front();
  rep.checks.push_back(residual_check(name + "-identity-residual", l0.lhs, l0.rhs, l0.residual, tol,
                                     "time side against spectral side at the base resolution"));
  if (st.levels.size() > 1) {
    CheckRecord m{name + "-identity-monotone", st.levels.back().residual, l0.residual, worst_increase, 1e-6,
                  st.monotone, "largest residual increase between consecutive refinement levels"};
    rep.checks.push_back(m);
  }
  json levels = json::array();
  for (const auto& l : st.levels) levels.push_back(l.residual);
  rep.summary[name + "_residuals"] = levels;
}

std::vector<GridFunction> packets(const SpatialGrid& g, std::size_t count, std::uint64_t seed) {
  return count ? random_wavepackets(g, count, seed) : std::vector<GridFunction>{};
}

}  // namespace

// ---------------------------------------------------------------------------

VerbBody plan_identity(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  const SpatialGrid g = model_grid(m);
  const GridFunction phi = sample_function(read_function(r, "functions.phi"), g, "functions.phi");
  const GridFunction psi = sample_function(read_function(r, "functions.psi"), g, "functions.psi");
  IdentityOptions base;
  base.time.t_max = r.positive("identity.t_max");
  base.eta_resolution = r.positive("identity.eta_resolution");
  base.lambda_tolerance = r.positive("identity.lambda_tolerance");
  base.tail_limit = r.positive("identity.tail_limit");
  const int levels = static_cast<int>(r.count("identity.levels", 1, 6));
  const double tol = c.tol(r.positive("identity.tolerance"));
  const bool scalar = r.boolean("identity.scalar");
  const bool dual = r.boolean("identity.dual");
  if (!scalar && !dual) Reader::error("identity", "enable at least one of 'scalar' and 'dual'");

  return [=](EstimateReport& rep) {
    const OperatorModel model = build_model(m, c.seed);
    Table t({"identity", "level", "t_max", "time_points", "eta_nodes", "lhs", "rhs", "residual", "tail_estimate",
             "tail_exponent"});
    if (scalar) add_study(rep, t, "scalar", refine_identity_scalar(model, sp.sf, phi, psi, levels, base), tol);
    if (dual) add_study(rep, t, "dual", refine_identity_dual(model, sp.sf, phi, s, levels, base), tol);
    rep.artifacts.push_back({"identity_levels.csv", t.csv()});

    // The scalar signal F(t) = (sigma(H) e^{ita(H)} E(J) phi, psi) at the base resolution.
    if (model.exact_route()) {
      const TimeGrid tg = TimeGrid::for_bandwidth(base.time.t_max, sp.sf.max_abs_a());
      const auto sig = evolve_signal(model, sp.sf, phi, psi, tg, base.eta_resolution);
      const std::size_t stride = std::max<std::size_t>(1, (sig.size() + 3999) / 4000);
      Table st({"t", "re", "im", "abs"});
      std::vector<double> ts, as;
      for (std::size_t j = 0; j < sig.size(); j += stride) {
        const double tj = tg.node(j);
        st.row({fmt(tj), fmt(sig[j].real()), fmt(sig[j].imag()), fmt(std::abs(sig[j]))});
        ts.push_back(tj);
        as.push_back(std::abs(sig[j]));
      }
      rep.artifacts.push_back({"time_signal.csv", st.csv()});
      rep.artifacts.push_back({"time_signal.dat", dat("t", "abs_F", ts, as)});
    }
  };
}

// ---------------------------------------------------------------------------

VerbBody plan_apriori(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  const SpatialGrid g = model_grid(m);
  AprioriOptions ao;
  ao.sup_points = r.count("apriori.sup_points", 32, 1 << 16);
  ao.slack = c.tol(r.positive("apriori.slack"));
  ao.time_side = r.boolean("apriori.time_side");
  const bool single = r.boolean("apriori.single");
  std::optional<GridFunction> phi;
  if (single) phi = sample_function(read_function(r, "functions.phi"), g, "functions.phi");
  const std::size_t count = r.count("batch.count", 0, 100000);

  struct Decay {
    std::vector<double> lambdas;
    double window = 0.0;
    std::pair<double, double> slope;
    bool resolvent = false;
    std::optional<std::size_t> points;
    std::optional<double> x_max;
  };
  std::optional<Decay> decay;
  if (r.has("decay")) {
    Decay d;
    const Interval range = r.interval("decay.range");
    d.lambdas = spaced(r.string("decay.spacing"), range, r.count("decay.points", 4, 100000), "decay.spacing");
    d.window = r.number("decay.window", 0.0);
    d.slope = scaled_range(r.interval("decay.slope"), c);
    d.resolvent = r.boolean("decay.resolvent");
    if (d.resolvent && m.kind != "free") Reader::error("decay.resolvent", "the free resolvent scan needs the free model");
    if (r.has("decay.points_grid")) d.points = r.count("decay.points_grid", 8, 1 << 16);
    if (r.has("decay.x_max")) d.x_max = r.positive("decay.x_max");
    decay = d;
  }
  if (!single && count == 0 && !decay) Reader::error("apriori", "nothing to run (single, batch and decay all off)");

  return [=](EstimateReport& rep) {
    const OperatorModel model = build_model(m, c.seed);
    const auto scan = weighted_density_sup(model, sp.sf, s, default_lambda_grid(sp.sf, ao.sup_points));
    Table st({"lambda", "factor"});
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i) st.row({fmt(scan.lambdas[i]), fmt(scan.factors[i])});
    rep.artifacts.push_back({"density_sup.csv", st.csv()});
    rep.artifacts.push_back({"density_sup.dat", dat("lambda", "factor", scan.lambdas, scan.factors)});
    rep.summary["sup_factor"] = scan.value;
    rep.summary["sup_argmax"] = scan.argmax;

    if (phi) {
      const auto a = apriori_check(model, sp.sf, s, *phi, ao);
      rep.checks.push_back(upper_check("apriori-single", a.lhs, a.bound, ao.slack,
                                       ao.time_side ? "time side of the weighted spacetime norm"
                                                    : "spectral side of the weighted spacetime norm"));
    }
    if (count) {
      const auto b = apriori_batch(model, sp.sf, s, packets(g, count, c.seed), ao.slack, ao.sup_points);
      Table bt({"index", "ratio"});
      for (std::size_t i = 0; i < b.ratios.size(); ++i) bt.row({std::to_string(i), fmt(b.ratios[i])});
      rep.artifacts.push_back({"apriori_batch.csv", bt.csv()});
      rep.checks.push_back(upper_check("apriori-batch", b.max_ratio, b.bound_constant, ao.slack,
                                       std::to_string(b.passed) + "/" + std::to_string(b.ratios.size()) +
                                           " functions within the bound"));
    }
    if (decay) {
      const OperatorModel dm = (decay->points || decay->x_max) ? build_model(m, c.seed, decay->points, decay->x_max)
                                                               : model;
      const auto scan_d = agmon_scan(dm, s, decay->lambdas);
      const auto fitted = decay->window > 0.0 ? envelope_fit(scan_d, decay->window) : scan_d;
      Table dt({"lambda", "density_norm"});
      for (std::size_t i = 0; i < scan_d.lambdas.size(); ++i) dt.row({fmt(scan_d.lambdas[i]), fmt(scan_d.norms[i])});
      rep.artifacts.push_back({"decay.csv", dt.csv()});
      rep.artifacts.push_back({"decay.dat", dat("lambda", "density_norm", scan_d.lambdas, scan_d.norms)});
      if (decay->window > 0.0) {
        rep.artifacts.push_back({"decay_envelope.dat", dat("lambda", "envelope", fitted.lambdas, fitted.norms)});
        rep.summary["decay_raw_slope"] = scan_d.fit.slope;
      }
      rep.checks.push_back(range_check("density-decay-slope", fitted.fit.slope, decay->slope.first,
                                       decay->slope.second,
                                       decay->window > 0.0 ? "log-log slope of the windowed upper envelope"
                                                           : "log-log slope of the density norm"));
      if (decay->resolvent) {
        std::vector<double> norms(decay->lambdas.size());
        for (std::size_t i = 0; i < norms.size(); ++i)
          norms[i] = free_resolvent_norm(decay->lambdas[i], Sign::Plus, dm.grid(), s);
        const auto fit = fit_power_law(decay->lambdas, norms);
        Table rt({"lambda", "resolvent_norm"});
        for (std::size_t i = 0; i < norms.size(); ++i) rt.row({fmt(decay->lambdas[i]), fmt(norms[i])});
        rep.artifacts.push_back({"resolvent_decay.csv", rt.csv()});
        rep.checks.push_back(range_check("resolvent-decay-slope", fit.slope, decay->slope.first, decay->slope.second,
                                         "log-log slope of the weighted free resolvent norm"));
      }
    }
  };
}

// ---------------------------------------------------------------------------

VerbBody plan_best_constant(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  CertifyOptions co;
  co.grid_points = r.count("certify.grid_points", 32, 1 << 16);
  co.rounds = static_cast<int>(r.count("certify.rounds", 0, 20));
  co.points_per_round = static_cast<int>(r.count("certify.points_per_round", 1, 1000));
  co.h_levels = static_cast<int>(r.count("certify.h_levels", 2, 40));
  co.h0_fraction = r.number("certify.h0_fraction", 1e-12, 0.5);
  co.tolerance = c.tol(r.positive("certify.tolerance"));
  std::optional<std::pair<double, double>> expected;
  if (r.has("certify.expected"))
    expected = std::pair{r.positive("certify.expected"), c.tol(r.positive("certify.expected_tolerance"))};
  const std::size_t count = r.count("batch.count", 0, 100000);
  double slack = 0.0;
  std::size_t sup_points = 256;
  std::optional<std::size_t> bpoints;
  std::optional<double> bx;
  if (count) {
    slack = c.tol(r.positive("batch.slack"));
    sup_points = r.count("batch.sup_points", 32, 1 << 16);
    if (r.has("batch.points")) bpoints = r.count("batch.points", 8, 1 << 16);
    if (r.has("batch.x_max")) bx = r.positive("batch.x_max");
  }

  return [=](EstimateReport& rep) {
    const OperatorModel model = build_model(m, c.seed);
    const auto b = certify(model, sp.sf, s, co);
    if (expected)
      rep.checks.push_back(residual_check("rhs-sup-reference", b.sup.value, expected->first,
                                          std::abs(b.sup.value - expected->first) / expected->first, expected->second,
                                          "sup of the weighted density against the configured closed form"));
    rep.checks.push_back(residual_check("lower-bound-gap", b.lhs_best, b.sup.value, b.gap, b.tolerance,
                                        "wave-packet lower bound against the sup"));
    rep.checks.push_back(flag_check("packet-upper-bound", b.upper_respected,
                                    "every packet value stays below the sup within 1%"));
    rep.summary["rhs_sup"] = b.sup.value;
    rep.summary["argmax"] = b.sup.argmax;
    rep.summary["at_edge"] = b.sup.at_edge;
    rep.summary["notes"] = b.notes;

    Table st({"lambda", "factor"});
    for (std::size_t i = 0; i < b.sup.lambdas.size(); ++i) st.row({fmt(b.sup.lambdas[i]), fmt(b.sup.factors[i])});
    rep.artifacts.push_back({"sup_scan.csv", st.csv()});
    rep.artifacts.push_back({"sup_scan.dat", dat("lambda", "factor", b.sup.lambdas, b.sup.factors)});
    Table kt({"h", "K_h", "sqrt_2pi_K_h"});
    std::vector<double> scaled;
    for (std::size_t i = 0; i < b.lower.h.size(); ++i) {
      kt.row({fmt(b.lower.h[i]), fmt(b.lower.k[i]), fmt(kSqrt2Pi * b.lower.k[i])});
      scaled.push_back(kSqrt2Pi * b.lower.k[i]);
    }
    rep.artifacts.push_back({"kh_sequence.csv", kt.csv()});
    rep.artifacts.push_back({"kh_sequence.dat", dat("h", "sqrt_2pi_K_h", b.lower.h, scaled)});

    if (count) {
      const OperatorModel bm = (bpoints || bx) ? build_model(m, c.seed, bpoints, bx) : model;
      const auto ab = apriori_batch(bm, sp.sf, s, packets(bm.grid(), count, c.seed), slack, sup_points);
      Table bt({"index", "ratio"});
      for (std::size_t i = 0; i < ab.ratios.size(); ++i) bt.row({std::to_string(i), fmt(ab.ratios[i])});
      rep.artifacts.push_back({"batch_ratios.csv", bt.csv()});
      rep.checks.push_back(upper_check("batch-upper-bound", ab.max_ratio, ab.bound_constant, slack,
                                       std::to_string(ab.passed) + "/" + std::to_string(ab.ratios.size()) +
                                           " random functions within the bound"));
    }
  };
}

// ---------------------------------------------------------------------------

namespace {

ComparisonOptions read_comparison_options(Reader& r) {
  ComparisonOptions o;
  o.rounds = static_cast<int>(r.count("lambda_grid.rounds", 0, 20));
  o.points_per_round = static_cast<int>(r.count("lambda_grid.points_per_round", 1, 1000));
  return o;
}

void add_condition(EstimateReport& rep, const std::string& name, const ConditionScan& scan, double slack) {
  CheckRecord ch{name, scan.min_margin, 0.0, -scan.min_margin, slack, scan.holds,
                 "smallest relative margin (left - right) / max, at lambda = " + fmt(scan.argmin)};
  rep.checks.push_back(ch);
}

Table condition_table(const ConditionScan& scan) {
  Table t({"lambda", "left", "right"});
  for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
    t.row({fmt(scan.lambdas[i]), fmt(scan.left[i]), fmt(scan.right[i])});
  return t;
}

SpectralFunction scaled_sigma(SpectralFunction sf, double f) {
  const auto sigma = sf.sigma;
  sf.sigma = [sigma, f](double l) { return f * sigma(l); };
  return sf;
}

}  // namespace

VerbBody plan_compare(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  std::optional<ModelSpec> mt;
  if (r.has("comparison.model")) mt = read_model(r, "comparison.model");
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  const SpatialGrid g = model_grid(m);
  if (mt && !(model_grid(*mt) == g)) Reader::error("comparison.model", "both models must share the grid");
  SpectralSpec tilde = sp;
  tilde.sigma = r.string("comparison.sigma");
  tilde.a = r.string("comparison.a");
  for (const auto& [field, text] : {std::pair{"comparison.sigma", tilde.sigma}, std::pair{"comparison.a", tilde.a}}) {
    try {
      Expression::parse(text);
    } catch (const Error& e) {
      Reader::error(field, e.what());
    }
  }
  tilde.sf = spectral_function_from_expressions(tilde.sigma, tilde.a, sp.window, sp.breakpoint_margin);
  try {
    tilde.sf.validate();
  } catch (const Error& e) {
    Reader::error("comparison.a", e.what());
  }
  const double slack = c.tol(r.positive("comparison.slack"));
  const double inflation = r.has("comparison.inflation") ? r.positive("comparison.inflation") : 0.0;
  const bool local = r.boolean("comparison.local");
  ComparisonOptions opts = read_comparison_options(r);
  opts.time_side = r.boolean("comparison.time_side");
  const std::size_t points = r.count("lambda_grid.points", 32, 1 << 16);
  const std::size_t count = r.count("batch.count", 0, 100000);
  std::optional<GridFunction> phi, psi;
  if (local) {
    phi = sample_function(read_function(r, "functions.phi"), g, "functions.phi");
    psi = sample_function(read_function(r, "functions.psi"), g, "functions.psi");
  }

  return [=](EstimateReport& rep) {
    const OperatorModel h = build_model(m, c.seed);
    const OperatorModel ht = mt ? build_model(*mt, c.seed + 1) : h;
    const ComparisonConfig cfg{sp.sf, tilde.sf};
    const auto lambdas = default_lambda_grid(sp.sf, points);
    const auto batch = packets(g, count, c.seed);
    const auto uni = check_uniform(h, ht, cfg, s, lambdas, batch, slack, opts);
    add_condition(rep, "uniform-condition", uni.condition, opts.condition_slack);
    if (count)
      rep.checks.push_back(upper_check("uniform-transfer", uni.max_ratio, uni.c0, slack,
                                       "largest batch ratio against the best constant of the first triple"));
    rep.summary["c0"] = uni.c0;
    rep.summary["note"] = uni.note;
    rep.artifacts.push_back({"condition.csv", condition_table(uni.condition).csv()});
    std::vector<double> quot;
    for (std::size_t i = 0; i < uni.condition.lambdas.size(); ++i)
      quot.push_back(uni.condition.left[i] > 0.0 ? uni.condition.right[i] / uni.condition.left[i] : 0.0);
    rep.artifacts.push_back({"condition.dat", dat("lambda", "right_over_left", uni.condition.lambdas, quot)});
    Table rt({"index", "ratio"});
    for (std::size_t i = 0; i < uni.ratios.size(); ++i) rt.row({std::to_string(i), fmt(uni.ratios[i])});
    rep.artifacts.push_back({"transfer_ratios.csv", rt.csv()});

    if (inflation > 0.0) {
      const ComparisonConfig bad{sp.sf, scaled_sigma(tilde.sf, inflation)};
      const auto inflated = check_uniform(h, ht, bad, s, lambdas, {}, slack, opts);
      rep.checks.push_back(flag_check("inflated-condition-flagged", !inflated.condition.holds,
                                      "sigma~ scaled by " + fmt(inflation) + " must fail; margin " +
                                          fmt(inflated.condition.min_margin)));
    }
    if (local) {
      const auto lr = check_local(h, ht, cfg, *phi, *psi, lambdas, opts);
      add_condition(rep, "local-condition", lr.condition, opts.condition_slack);
      rep.checks.push_back(CheckRecord{"local-conclusion", lr.lhs_norm, lr.rhs_norm,
                                       lr.lhs_norm > 0 ? lr.rhs_norm / lr.lhs_norm - 1.0 : 0.0,
                                       opts.conclusion_tolerance, lr.conclusion_holds,
                                       "scalar spacetime norms, first triple against second"});
      const auto gr = check_global(h, ht, cfg, *phi, s, lambdas, opts);
      add_condition(rep, "global-condition", gr.condition, opts.condition_slack);
      rep.checks.push_back(CheckRecord{"global-conclusion", gr.lhs_norm, gr.rhs_norm,
                                       gr.lhs_norm > 0 ? gr.rhs_norm / gr.lhs_norm - 1.0 : 0.0,
                                       opts.conclusion_tolerance, gr.conclusion_holds,
                                       "weighted spacetime norms, first triple against second"});
    }
  };
}

// ---------------------------------------------------------------------------

VerbBody plan_powers(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  const auto alphas = r.numbers("powers.alphas");
  if (alphas.empty()) Reader::error("powers.alphas", "needs at least one exponent");
  std::vector<SpectralFunction> tildes;
  for (double a : alphas) {
    if (!(a > 0.0)) Reader::error("powers.alphas", "exponents must be positive");
    try {
      tildes.push_back(powers_weight(sp.sf, power_map(a)));
    } catch (const Error& e) {
      Reader::error("spectral.a", e.what());
    }
  }
  const double slack = c.tol(r.positive("powers.slack"));
  ComparisonOptions opts = read_comparison_options(r);
  opts.time_side = false;
  const std::size_t points = r.count("lambda_grid.points", 32, 1 << 16);
  const std::size_t count = r.count("batch.count", 1, 100000);

  return [=](EstimateReport& rep) {
    const OperatorModel h = build_model(m, c.seed);
    const auto lambdas = default_lambda_grid(sp.sf, points);
    const auto batch = packets(h.grid(), count, c.seed);
    Table t({"alpha", "c0", "max_ratio", "min_margin", "prefactor_from_weight", "prefactor_quoted",
             "prefactor_ratio", "pass"});
    std::vector<double> rel;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const auto uni = check_uniform(h, h, {sp.sf, tildes[i]}, s, lambdas, batch, slack, opts);
      const auto pf = fractional_prefactor(alphas[i]);
      const std::string tag = "alpha=" + fmt(alphas[i]);
      add_condition(rep, tag + ": condition", uni.condition, opts.condition_slack);
      rep.checks.push_back(upper_check(tag + ": transfer", uni.max_ratio, uni.c0, slack,
                                       "sigma |a'|^{1/2} with a = lambda^alpha keeps the constant"));
      t.row({fmt(alphas[i]), fmt(uni.c0), fmt(uni.max_ratio), fmt(uni.condition.min_margin), fmt(pf.from_weight),
             fmt(pf.quoted), fmt(pf.ratio), uni.pass ? "1" : "0"});
      rel.push_back(uni.c0 > 0 ? uni.max_ratio / uni.c0 : 0.0);
    }
    rep.artifacts.push_back({"powers.csv", t.csv()});
    rep.artifacts.push_back({"powers.dat", dat("alpha", "max_ratio_over_c0", alphas, rel)});
    rep.summary["prefactor"] = "squaring alpha^{1/2} lambda^{(2 alpha - 1)/4} gives alpha; alpha^2 is reported "
                               "next to it as the quoted form";
    Table wt({"lambda", "alpha", "sigma", "a", "a_prime"});
    for (double l : default_lambda_grid(sp.sf, 32))
      for (std::size_t i = 0; i < alphas.size(); ++i)
        wt.row({fmt(l), fmt(alphas[i]), fmt(tildes[i].sigma(l)), fmt(tildes[i].a(l)), fmt(tildes[i].a_prime(l))});
    rep.artifacts.push_back({"weights.csv", wt.csv()});
  };
}

// ---------------------------------------------------------------------------

VerbBody plan_perturb(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  if (m.kind == "generic-hermitian") {
    const std::size_t pairs = r.count("perturb.pairs", 1, 1000);
    const auto lambdas = r.numbers("perturb.lambdas");
    if (lambdas.empty()) Reader::error("perturb.lambdas", "needs at least one energy");
    const double eps = r.positive("perturb.epsilon");
    const double scale = r.number("perturb.potential_scale");
    const double tol = c.tol(r.positive("perturb.tolerance"));
    const double zero_tol = c.tol(r.positive("perturb.zero_tolerance"));
    return [=](EstimateReport& rep) {
      const auto n = static_cast<Eigen::Index>(m.dimension);
      Table t({"pair", "lambda", "relative_error", "literal_relative_error", "intermediate_error",
               "zero_potential_error"});
      double worst = 0.0, worst_zero = 0.0, literal = 0.0;
      for (std::size_t p = 0; p < pairs; ++p) {
        const CMatrix h = seeded_hermitian(c.seed + 2 * p, n);
        const CMatrix v = scale * seeded_hermitian(c.seed + 2 * p + 1, n);
        for (double l : lambdas) {
          const auto k = perturbed_density_matrix(h, v, l, eps);
          const auto z = perturbed_density_matrix(h, CMatrix::Zero(n, n), l, eps);
          worst = std::max(worst, k.relative_error);
          worst_zero = std::max(worst_zero, z.relative_error);
          literal = std::max(literal, k.literal_relative_error);
          t.row({std::to_string(p), fmt(l), fmt(k.relative_error), fmt(k.literal_relative_error),
                 fmt(k.intermediate_error), fmt(z.relative_error)});
        }
      }
      rep.artifacts.push_back({"perturb_matrix.csv", t.csv()});
      rep.checks.push_back(residual_check("chain-vs-direct", worst, 0.0, worst, tol,
                                          "resolvent chain against the smoothed density of H + V"));
      rep.checks.push_back(residual_check("zero-potential", worst_zero, 0.0, worst_zero, zero_tol,
                                          "V = 0 reproduces the unperturbed density"));
      rep.summary["literal_form_error"] = literal;
    };
  }
  if (m.kind != "schrodinger") Reader::error("model.kind", "perturb needs 'schrodinger' or 'generic-hermitian'");
  const SpectralSpec sp = read_spectral(r);
  const WeightExponent s = read_s(r);
  SmoothingBatchOptions so;
  so.panels_per_unit_k = static_cast<int>(r.count("perturb.panels_per_unit_k", 1, 64));
  so.bound_points = static_cast<int>(r.count("perturb.bound_points", 8, 1 << 14));
  so.tolerance = c.tol(r.positive("perturb.slack"));
  const std::size_t refine = r.count("perturb.refine_points", 0, 1 << 14);
  const double stability = c.tol(r.positive("perturb.stability"));
  const std::size_t count = r.count("batch.count", 1, 100000);

  return [=](EstimateReport& rep) {
    const SpatialGrid g = model_grid(m);
    const auto base = perturbed_smoothing_check(*m.potential, g, sp.sf, s, packets(g, count, c.seed), so);
    rep.checks.push_back(upper_check("empirical-below-bound", base.empirical_constant, base.sup_bound,
                                     so.tolerance, "largest batch ratio against the perturbed sup bound"));
    rep.summary["argmax_lambda"] = base.argmax_lambda;
    rep.summary["max_norm_ratio"] = base.max_norm_ratio;
    Table t({"index", "ratio", "ratio_refined"});
    if (refine) {
      const SpatialGrid gr = model_grid(m, refine);
      const auto fine = perturbed_smoothing_check(*m.potential, gr, sp.sf, s, packets(gr, count, c.seed), so);
      rep.checks.push_back(upper_check("empirical-below-bound-refined", fine.empirical_constant, fine.sup_bound,
                                       so.tolerance, "same on the refined grid"));
      const double change = std::abs(base.empirical_constant - fine.empirical_constant) / fine.empirical_constant;
      rep.checks.push_back(residual_check("refinement-stability", base.empirical_constant, fine.empirical_constant,
                                          change, stability, "empirical constant, base grid against refined grid"));
      for (std::size_t i = 0; i < base.ratios.size(); ++i)
        t.row({std::to_string(i), fmt(base.ratios[i]), fmt(fine.ratios[i])});
    } else {
      for (std::size_t i = 0; i < base.ratios.size(); ++i)
        t.row({std::to_string(i), fmt(base.ratios[i]), "nan"});
    }
    rep.artifacts.push_back({"perturb_batch.csv", t.csv()});
  };
}

// ---------------------------------------------------------------------------

VerbBody plan_lap_scan(Reader& r, const Common& c) {
  const ModelSpec m = read_model(r);
  if (m.kind != "schrodinger") Reader::error("model.kind", "lap-scan needs the 'schrodinger' model");
  const Interval j = r.interval("spectral.window");
  if (!(j.lo > 0.0)) Reader::error("spectral.window", "the scan runs on positive energies");
  const WeightExponent s = read_s(r);
  const std::size_t points = r.count("lap.lambda_points", 4, 100000);
  const std::size_t refine = r.count("lap.refine_points", 0, 1 << 14);
  const double stability = c.tol(r.positive("lap.stability"));
  const double limit = r.positive("lap.top_decade_limit");
  LapScanOptions lo;
  lo.exclusion_threshold = r.positive("lap.exclusion_threshold");

  return [=](EstimateReport& rep) {
    const auto lambdas = log_spaced(j.lo, j.hi, points);
    const SpatialGrid g = model_grid(m);
    const auto base = lap_condition_scan(*m.potential, g, s, lambdas, lo);
    Table t({"grid_points", "lambda", "inv_norm_plus", "inv_norm_minus", "vr_norm_plus", "vr_norm_minus", "excluded"});
    auto rows = [&](const LapScanReport& rr, std::size_t n) {
      for (const auto& p : rr.points)
        t.row({std::to_string(n), fmt(p.lambda), fmt(p.inv_norm_plus), fmt(p.inv_norm_minus), fmt(p.vr_norm_plus),
               fmt(p.vr_norm_minus), p.excluded ? "1" : "0"});
    };
    rows(base, g.size());
    const bool finite = std::isfinite(base.sup_inv_norm) && base.sup_inv_norm < lo.exclusion_threshold;
    rep.checks.push_back(CheckRecord{"lap-sup-finite", base.sup_inv_norm, lo.exclusion_threshold, 0.0, 0.0, finite,
                                     std::to_string(base.exclusions.size()) + " excluded energies"});
    double top = base.top_decade_vr_norm;
    if (refine) {
      const SpatialGrid gr = model_grid(m, refine);
      const auto fine = lap_condition_scan(*m.potential, gr, s, lambdas, lo);
      rows(fine, gr.size());
      const double change = std::abs(base.sup_inv_norm - fine.sup_inv_norm) / fine.sup_inv_norm;
      rep.checks.push_back(residual_check("lap-refinement-stability", base.sup_inv_norm, fine.sup_inv_norm, change,
                                          stability, "sup of ||(I + V R)^{-1}||, base grid against refined grid"));
      top = std::max(top, fine.top_decade_vr_norm);
    }
    rep.checks.push_back(upper_check("top-decade-vr-below-limit", top, limit, 0.0,
                                     "max ||V R(lambda +- i0)||_{s,s} over the top decade of the window"));
    rep.summary["sup_inv_norm"] = base.sup_inv_norm;
    rep.summary["exclusions"] = base.exclusions;
    rep.artifacts.push_back({"lap.csv", t.csv()});
    std::vector<double> ls, inv;
    for (const auto& p : base.points) {
      ls.push_back(p.lambda);
      inv.push_back(p.inv_norm_plus);
    }
    rep.artifacts.push_back({"lap.dat", dat("lambda", "inv_norm_plus", ls, inv)});
  };
}

}  // namespace smoothlab::harness
