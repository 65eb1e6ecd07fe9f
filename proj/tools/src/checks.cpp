#include "epiconvex/cli/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "epiconvex/bblcheck.hpp"
#include "epiconvex/hopflax.hpp"
#include "epiconvex/sharpconst.hpp"
#include "epiconvex/transforms.hpp"

namespace epiconvex::cli {

namespace {

template <class T>
T opt(const CheckConfig& c, const char* key, T fallback) {
  if (!c.options.contains(key)) return fallback;
  try {
    return c.options.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("option '") + key + "' has the wrong type");
  }
}

EpigraphDomain make_domain(const ExperimentConfig& cfg) {
  return EpigraphDomain::from_spec(cfg.domain.kind, cfg.params.n, cfg.domain.params);
}

NormSpec make_norm(const ExperimentConfig& cfg) {
  return NormSpec::from_spec(cfg.norm.kind, cfg.norm.p, cfg.norm.weights);
}

BBLParams make_params(const ExperimentConfig& cfg) {
  return BBLParams::make(cfg.params.n, cfg.params.a, cfg.params.p);
}

QuadSpec level_quad(const ExperimentConfig& cfg, std::size_t level) {
  const double f = std::ldexp(1.0, static_cast<int>(level));
  QuadSpec q{cfg.quadrature.dx / f, cfg.quadrature.R * f, cfg.quadrature.S * f};
  q.validate();
  return q;
}

std::vector<double> bump_center(const ExperimentConfig& cfg) {
  std::vector<double> c = cfg.fixture.center;
  if (c.empty()) {
    c.assign(cfg.params.n, 0.0);
    c.back() = 0.5;
  }
  if (c.size() != cfg.params.n) throw InvalidInput("fixture center has the wrong dimension");
  return c;
}

SmoothFn trace_fixture(const ExperimentConfig& cfg, const BBLParams& P, const NormSpec& N) {
  if (cfg.fixture.kind == "extremal") return extremal_f(P, N).as_function();
  if (cfg.fixture.kind == "bump") return bump_function(bump_center(cfg), cfg.fixture.radius);
  throw InvalidInput("fixture kind 'grid' is not supported by this check");
}

SmoothFn shifted(const SmoothFn& W, std::size_t n) {
  SmoothFn g;
  g.value = [W, n](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    y[n - 1] += 1.0;
    return W.value(y);
  };
  g.grad = [W, n](std::span<const double> x, std::span<double> out) {
    std::vector<double> y(x.begin(), x.end());
    y[n - 1] += 1.0;
    W.grad(y, out);
  };
  return g;
}

SmoothFn plus(const SmoothFn& f, const SmoothFn& b, double amp) {
  SmoothFn g;
  g.value = [f, b, amp](std::span<const double> x) { return f.value(x) + amp * b.value(x); };
  g.grad = [f, b, amp](std::span<const double> x, std::span<double> out) {
    std::vector<double> t(out.size());
    f.grad(x, out);
    b.grad(x, t);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += amp * t[i];
  };
  return g;
}

// The transport pair: W the normalised power cost on Omega_1 and g = W(. + e),
// optionally perturbed by a bump and renormalised.
struct TransportPair {
  SmoothFn g, W;
  double C = 0.0;       // W = C |x|^q / q
  double g_scale = 1.0;  // g = g_scale * (W(. + e) + amp * bump)
  bool equality = true;
};

TransportPair transport_pair(const ExperimentConfig& cfg, const BBLParams& P, const EpigraphDomain& dom,
                             const NormSpec& N, const QuadSpec& quad) {
  TransportPair tp;
  tp.C = normalize_power_cost(dom, N, P.q, P.a, quad).C;
  tp.W = power_cost(tp.C, P.q, N);
  tp.g = shifted(tp.W, P.n);
  if (cfg.fixture.kind == "bump") {
    tp.equality = false;
    const SmoothFn raw = plus(tp.g, bump_function(bump_center(cfg), cfg.fixture.radius), cfg.fixture.amplitude);
    const double I = integrate_region(dom, Shear::omega(), quad.box(P.n),
                                      [&](std::span<const double> x) { return std::pow(raw.value(x), -P.a); });
    tp.g_scale = std::pow(I, 1.0 / P.a);
    tp.g = raw.scaled(tp.g_scale);
  } else if (cfg.fixture.kind != "extremal") {
    throw InvalidInput("fixture kind 'grid' is not supported by this check");
  }
  return tp;
}

DerivedTails pair_tails(const TransportPair& tp, const ExperimentConfig& cfg, const BBLParams& P,
                        const NormSpec& N) {
  if (N.kind != NormKind::euclidean) return {};
  const double q = P.q;
  const double A = tp.g_scale * tp.C / q;
  double A4 = tp.g_scale * tp.C * std::pow(2.0, std::max(q - 2.0, 0.0));
  if (!tp.equality) A4 += tp.g_scale * cfg.fixture.amplitude * 1.72 / cfg.fixture.radius;
  return power_tails(A, q, A4, tp.C, P);
}

Json constants_json(const SharpConstants& k) {
  return Json{{"C", k.C},         {"A", k.A},         {"B", k.B},
              {"B_identity", k.B_identity},         {"u", k.u},
              {"v", k.v},         {"D", k.D},         {"theta", k.theta},
              {"q_trace", k.q_trace},               {"lambda_star", k.lambda_star},
              {"D_npa", k.D_npa}, {"I_ap", k.I_ap},   {"I_pa1", k.I_pa1}};
}

void check_constants(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const auto P = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  const auto quad = level_quad(cfg, cfg.quadrature.levels - 1);
  const auto k = dom.homogeneous() ? gns_constants(P, dom, N, quad) : domain_constants(P, dom, N, quad);
  const double a = P.a, p = P.p, n = static_cast<double>(P.n);
  r.data["constants"] = constants_json(k);
  r.expect_le("uv_conjugacy", std::abs(1.0 / k.u + 1.0 / k.v - 1.0), 1e-12);
  r.expect_le("theta_formula", std::abs(k.theta - (a - p) / (p * (a - n - 1.0) + n)), 1e-12);
  const double D = std::pow(k.A, k.u) / (std::pow(k.B * k.v, k.u - 1.0) * k.u);
  r.expect_le("D_formula", std::abs(k.D - D) / std::abs(D), 1e-12);
  r.expect_le("q_trace_formula", std::abs(k.q_trace - p * (a - 1.0) / (a - p)), 1e-12);
  r.expect_le("B_routes", std::abs(k.B - k.B_identity) / k.B, opt(cc, "tolerance", 0.01));
  if (P.a == n) r.expect("theta_is_one", k.theta == 1.0);
}

void check_trace(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r, bool weighted) {
  const auto P = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  const SmoothFn f = trace_fixture(cfg, P, N);
  const bool extremal = cfg.fixture.kind == "extremal";
  const double tol = opt(cc, "tolerance", 0.02);
  Curve curve{"refinement", {"dx", "abs_ratio_minus_one"}, {}};
  std::vector<double> devs;
  TraceReport last;
  for (std::size_t l = 0; l < cfg.quadrature.levels; ++l) {
    const auto quad = level_quad(cfg, l);
    last = weighted ? weighted_trace_check(f, P, dom, N, quad, opt(cc, "growth_C", 1.0), opt(cc, "growth_R", 1.0))
                    : trace_gn_check(f, P, dom, N, quad);
    const std::string s = "level" + std::to_string(l) + "_";
    r.metric(s + "dx", quad.dx);
    r.metric(s + "ratio", last.ratio);
    r.metric(s + "quadrature_error", last.quadrature_error);
    r.expect_le(s + "ratio_excess", last.ratio - 1.0, last.quadrature_error);
    curve.rows.push_back({quad.dx, std::abs(last.ratio - 1.0)});
    devs.push_back(std::abs(last.ratio - 1.0));
  }
  if (extremal) {
    r.expect_le("extremal_abs_ratio_minus_one", devs.back(), tol);
    if (devs.size() >= 3 && opt(cc, "require_monotone", true)) {
      bool mono = true;
      for (std::size_t i = 1; i < devs.size(); ++i) mono = mono && devs[i] < devs[i - 1];
      r.expect("refinement_monotone", mono);
    }
  }
  r.data["constants"] = constants_json(last.constants);
  r.data["lhs"] = last.lhs_boundary;
  r.data["rhs"] = last.rhs_value;
  r.data["beta"] = last.beta;
  r.curves.push_back(std::move(curve));
}

void check_bbl_gap(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const auto P0 = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  const double a = P0.a, q = P0.q;
  std::vector<double> hs = cfg.params.h_list;
  if (hs.empty()) hs = {0.1, 0.25, 0.5, 1.0};
  const bool equality = cfg.fixture.kind == "extremal";
  if (!equality && cfg.fixture.kind != "bump") throw InvalidInput("fixture kind 'grid' is not supported by bbl_gap");
  const std::vector<double> center = equality ? std::vector<double>{} : bump_center(cfg);
  const SmoothFn bump = equality ? SmoothFn{} : bump_function(center, cfg.fixture.radius);
  const double cN = norm_lower_constant(N, P0.n);
  std::vector<std::vector<double>> eps(cfg.quadrature.levels);
  Curve curve{"gap", {"level", "dx", "h", "gap", "error"}, {}};
  for (std::size_t l = 0; l < cfg.quadrature.levels; ++l) {
    const auto quad = level_quad(cfg, l);
    const auto box = quad.box(P0.n);
    auto Wf = [&](std::span<const double> y) { return std::pow(norm(N, y), q) / q; };
    auto gf = [&](std::span<const double> x) {
      std::vector<double> y(x.begin(), x.end());
      y.back() += 1.0;
      return Wf(y) + (equality ? 0.0 : cfg.fixture.amplitude * bump.value(x));
    };
    const EpiGrid Wraw = EpiGrid::sample(dom, Shear::omega_shift(1.0), box, Wf);
    const EpiGrid graw = EpiGrid::sample(dom, Shear::omega(), box, gf);
    const double cW = std::pow(lr_mass(Wraw, a), 1.0 / a);
    const double cg = std::pow(lr_mass(graw, a), 1.0 / a);
    const EpiGrid W = Wraw.scaled(cW), g = graw.scaled(cg);
    const GrowthEnvelope env{std::min(cW, cg) * std::pow(cN, q) / q, q};
    for (double h : hs) {
      BBLParams P = BBLParams::make(P0.n, a, P0.p, h);
      const auto rep = bbl_gap(g, W, P, env);
      const std::string s = "level" + std::to_string(l) + "_h" + fmt_num(h) + "_";
      r.metric(s + "lhs", rep.lhs);
      r.metric(s + "rhs", rep.rhs);
      r.expect_ge(s + "gap", rep.gap, -rep.quadrature_error_estimate);
      if (equality) r.expect_le(s + "abs_gap", std::abs(rep.gap), rep.quadrature_error_estimate);
      eps[l].push_back(rep.quadrature_error_estimate);
      curve.rows.push_back({static_cast<double>(l), quad.dx, h, rep.gap, rep.quadrature_error_estimate});
    }
  }
  if (equality && cfg.quadrature.levels >= 2 && opt(cc, "require_shrink", true)) {
    bool shrink = true;
    for (std::size_t l = 1; l < eps.size(); ++l)
      for (std::size_t i = 0; i < hs.size(); ++i) shrink = shrink && eps[l][i] < eps[l - 1][i];
    r.expect("error_shrinks", shrink);
  }
  r.curves.push_back(std::move(curve));
}

void check_derived_gap(const ExperimentConfig& cfg, const CheckConfig&, CheckResult& r) {
  const auto P = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  for (std::size_t l = 0; l < cfg.quadrature.levels; ++l) {
    const auto quad = level_quad(cfg, l);
    const auto tp = transport_pair(cfg, P, dom, N, quad);
    auto conj = [&](std::span<const double> y) { return power_cost_conjugate(tp.C, P.q, N, y); };
    const auto rep = derived_gap(tp.g, tp.W, conj, P, dom, quad, pair_tails(tp, cfg, P, N));
    const std::string s = "level" + std::to_string(l) + "_";
    r.metric(s + "lhs", rep.lhs);
    r.metric(s + "rhs", rep.rhs);
    r.expect_ge(s + "gap", rep.gap, -rep.quadrature_error_estimate);
    if (tp.equality) r.expect_le(s + "abs_gap", std::abs(rep.gap), rep.quadrature_error_estimate);
    for (const auto& w : rep.warnings) r.note(w);
  }
}

void check_appendix(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const auto P = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  std::vector<double> hs = cfg.params.h_list;
  if (hs.empty()) hs = {0.1, 0.05, 0.025, 0.01};
  const auto quad = level_quad(cfg, cfg.quadrature.levels - 1);
  const auto tp = transport_pair(cfg, P, dom, N, quad);
  auto conj = [&](std::span<const double> y) { return power_cost_conjugate(tp.C, P.q, N, y); };
  const auto rep = appendix_limit_residual(tp.g, tp.W, conj, P, dom, hs, quad,
                                           opt(cc, "column_nodes", std::size_t{8}));
  r.metric("limit", rep.limit);
  r.metric("conj_term", rep.conj_term);
  r.metric("boundary_term", rep.boundary_term);
  Curve curve{"appendix", {"h", "term_i", "term_ii", "term_iii", "residual"}, {}};
  for (const auto& row : rep.rows) {
    curve.rows.push_back({row.h, row.term_i, row.term_ii, row.term_iii, row.residual});
    if (dom.homogeneous()) r.expect("term_iii_zero_h" + fmt_num(row.h), row.term_iii == 0.0);
  }
  auto smallest = std::min_element(rep.rows.begin(), rep.rows.end(),
                                   [](const AppendixTerms& x, const AppendixTerms& y) { return x.h < y.h; });
  auto largest = std::max_element(rep.rows.begin(), rep.rows.end(),
                                  [](const AppendixTerms& x, const AppendixTerms& y) { return x.h < y.h; });
  r.metric("term_ii_rel_boundary", std::abs(smallest->term_ii / rep.boundary_term - 1.0));
  if (cc.options.contains("boundary_tolerance"))
    r.expect_le("term_ii_rel_boundary_check", std::abs(smallest->term_ii / rep.boundary_term - 1.0),
                opt(cc, "boundary_tolerance", 0.02));
  if (rep.rows.size() >= 2)
    r.expect_le("residual_at_smallest_h", std::abs(smallest->residual), std::abs(largest->residual));
  r.curves.push_back(std::move(curve));
}

ExtGridFn quadratic_grid(std::size_t n, double L, double dx) {
  const auto res = static_cast<std::size_t>(std::llround(2.0 * L / dx)) + 1;
  GridSpec G(std::vector<double>(n, -L), std::vector<double>(n, L), std::vector<std::size_t>(n, res));
  return ExtGridFn::from_function(G, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s;
  });
}

void check_semigroup(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const std::size_t n = cfg.params.n;
  const double h = opt(cc, "h", 0.6), s = opt(cc, "s", 0.2);
  const double L = opt(cc, "half_width", 2.0), factor = opt(cc, "factor", 5.0);
  if (!(s > 0.0 && s < h)) throw InvalidInput("semigroup check needs 0 < s < h");
  std::vector<double> res;
  Curve curve{"semigroup", {"dx", "residual"}, {}};
  for (std::size_t l = 0; l < cfg.quadrature.levels; ++l) {
    const double dx = level_quad(cfg, l).dx;
    const ExtGridFn W = quadratic_grid(n, L, dx);
    ExtGridFn g = W;
    if (cfg.fixture.kind == "bump") {
      const auto b = bump_function(bump_center(cfg), cfg.fixture.radius);
      g = ExtGridFn::from_function(W.grid(), [&](std::span<const double> x) {
        double q = 0.0;
        for (double v : x) q += v * v;
        return 0.5 * q + cfg.fixture.amplitude * b.value(x);
      });
    } else if (cfg.fixture.kind == "grid") {
      std::filesystem::path p(cfg.fixture.path);
      if (p.is_relative()) p = std::filesystem::path(cfg.base_dir) / p;
      g = ExtGridFn::load(p.string());
      if (!g.grid().same_spacing(W.grid())) throw InvalidInput("grid fixture spacing differs from dx");
    }
    const auto rep = semigroup_residual(g, W, h, s);
    const std::string k = "level" + std::to_string(l) + "_";
    r.metric(k + "dx", dx);
    r.metric(k + "domain_mismatches", static_cast<double>(rep.domain_mismatches));
    r.expect_le(k + "residual", rep.max_abs_residual, factor * dx);
    res.push_back(rep.max_abs_residual);
    curve.rows.push_back({dx, rep.max_abs_residual});
  }
  if (res.size() >= 2) {
    bool shrink = true;
    for (std::size_t i = 1; i < res.size(); ++i) shrink = shrink && res[i] < res[i - 1];
    r.expect("residual_shrinks", shrink);
  }
  r.curves.push_back(std::move(curve));
}

void check_hj(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const std::size_t n = cfg.params.n;
  const double L = opt(cc, "half_width", 3.0);
  const auto count = opt(cc, "points", std::size_t{20});
  const double tol = opt(cc, "tolerance", 0.01);
  const double dx = opt(cc, "dx", level_quad(cfg, cfg.quadrature.levels - 1).dx);
  std::vector<double> hs = opt(cc, "h_list", cfg.params.h_list);
  if (hs.empty()) hs = {0.4, 0.2, 0.1, 0.05};
  const ExtGridFn W = quadratic_grid(n, L, dx);
  const YSet Y = YSet::from_grid(W);
  const double c = opt(cc, "offset", 1.0);
  SmoothFn g;
  g.value = [c](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return 0.5 * s + c;
  };
  g.grad = [](std::span<const double> x, std::span<double> out) { std::copy(x.begin(), x.end(), out.begin()); };
  double gmin = c;
  if (cfg.fixture.kind == "bump") {
    g = plus(g, bump_function(bump_center(cfg), cfg.fixture.radius), cfg.fixture.amplitude);
    gmin = c;  // the bump is nonnegative
  } else if (cfg.fixture.kind != "extremal") {
    throw InvalidInput("fixture kind 'grid' is not supported by hj_quotient");
  }
  const auto ev = make_function_evaluator(n, g.value, gmin);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-L / 2.0, L / 2.0);
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> x(n);
    for (auto& v : x) v = U(rng);
    pts.push_back(std::move(x));
  }
  // W must outgrow g on its box: the boundary slope L exceeds every |grad g|.
  double max_grad = 0.0, scale = 0.0;
  std::vector<double> gr(n);
  for (const auto& x : pts) {
    g.grad(x, gr);
    double s = 0.0;
    for (double v : gr) s += v * v;
    max_grad = std::max(max_grad, std::sqrt(s));
    scale = std::max(scale, 0.5 * s);
  }
  r.expect_le("max_grad_vs_boundary_slope", max_grad, L);
  double worst = 0.0;
  for (const auto& x : pts) {
    g.grad(x, gr);
    double s = 0.0;
    for (double v : gr) s += v * v;
    const auto dq = hj_difference_quotient(*ev, g.value(x), Y, x, hs, 0.5 * s);
    worst = std::max(worst, std::abs(dq.extrapolated - dq.reference));
  }
  r.metric("scale", scale);
  r.expect_le("max_abs_deviation", worst, tol * std::max(scale, 1e-300));
}

void check_admissibility(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const auto P = make_params(cfg);
  const auto dom = make_domain(cfg);
  const auto N = make_norm(cfg);
  const auto quad = level_quad(cfg, 0);
  const auto tp = transport_pair(cfg, P, dom, N, quad);
  AdmissibilityParams adm;
  adm.gamma = opt(cc, "gamma", P.q);
  adm.A1 = opt(cc, "A1", 0.0);
  adm.A2 = opt(cc, "A2", 0.0);
  adm.A3 = opt(cc, "A3", 0.0);
  adm.A4 = opt(cc, "A4", 0.0);
  adm.growth_C = opt(cc, "growth_C", 1.0);
  adm.growth_R = opt(cc, "growth_R", 1.0);
  const auto rep = admissibility_report(tp.g, tp.W, adm, P, dom, N, opt(cc, "samples", std::size_t{64}), cfg.seed);
  Json conds = Json::array();
  for (const auto& c : rep.conditions) {
    conds.push_back({{"name", c.name}, {"passes", c.passes}, {"declared", c.declared}, {"fitted", c.fitted},
                     {"witness", c.witness}});
    r.metric(c.name + "_fitted", c.fitted);
  }
  r.data["conditions"] = conds;
  r.data["seed"] = rep.seed;
  r.expect("report_matches_expectation", rep.all_pass() == opt(cc, "expect_pass", true));
}

void check_equivalence(const ExperimentConfig& cfg, const CheckConfig& cc, CheckResult& r) {
  const std::size_t n = cfg.params.n;
  const double nd = static_cast<double>(n);
  const double L = opt(cc, "half_width", 4.0);
  const double q = opt(cc, "q", 4.0);
  const double tol = opt(cc, "tolerance", 0.05);
  std::vector<double> hs = cfg.params.h_list;
  if (hs.empty()) hs = {0.0, 0.025, 0.05, 0.1, 0.2, 0.4};
  if (std::find(hs.begin(), hs.end(), 0.0) == hs.end()) hs.insert(hs.begin(), 0.0);
  const double dx = level_quad(cfg, cfg.quadrature.levels - 1).dx;
  const auto N = NormSpec::euclidean();
  std::vector<double> center;
  SmoothFn bump;
  const bool with_bump = cfg.fixture.kind == "bump";
  if (with_bump) {
    center = bump_center(cfg);
    bump = bump_function(center, cfg.fixture.radius);
  } else if (cfg.fixture.kind != "extremal") {
    throw InvalidInput("fixture kind 'grid' is not supported by equivalence_scan");
  }
  // W = c (1 + |y|^q / q); its conjugate is c^{1-p'} |y|^{p'} / p' - c.
  auto scan = [&](double step) {
    const auto res = static_cast<std::size_t>(std::llround(2.0 * L / step)) + 1;
    GridSpec G(std::vector<double>(n, -L), std::vector<double>(n, L), std::vector<std::size_t>(n, res));
    auto base = [&](std::span<const double> y) { return 1.0 + std::pow(norm(N, y), q) / q; };
    const ExtGridFn Wr = ExtGridFn::from_function(G, base);
    const double cW = std::pow(Wr.trapezoid([nd](double v) { return std::pow(v, -nd); }), 1.0 / nd);
    const ExtGridFn W = Wr.scaled(cW);
    const ExtGridFn gr = ExtGridFn::from_function(G, [&](std::span<const double> x) {
      return base(x) + (with_bump ? cfg.fixture.amplitude * bump.value(x) : 0.0);
    });
    const double cg = std::pow(gr.trapezoid([nd](double v) { return std::pow(v, -nd); }), 1.0 / nd);
    const ExtGridFn g = gr.scaled(cg);
    auto grad_g = [&](std::span<const double> x, std::span<double> out) {
      const double r0 = norm(N, x);
      for (std::size_t i = 0; i < n; ++i) out[i] = cg * std::pow(r0, q - 2.0) * x[i];
      if (with_bump) {
        std::vector<double> t(n);
        bump.grad(x, t);
        for (std::size_t i = 0; i < n; ++i) out[i] += cg * cfg.fixture.amplitude * t[i];
      }
    };
    auto conj = [&](std::span<const double> y) { return power_cost_conjugate(cW, q, N, y) - cW; };
    return equivalence_scan(g, W, grad_g, conj, hs);
  };
  const auto rep = scan(dx);
  const auto coarse = scan(2.0 * dx);
  Curve curve{"phi", {"h", "phi", "error"}, {}};
  double max_err = 0.0;
  for (std::size_t i = 0; i < rep.h.size(); ++i) {
    const double e = std::abs(rep.phi[i] - coarse.phi[i]);
    max_err = std::max(max_err, e);
    curve.rows.push_back({rep.h[i], rep.phi[i], e});
  }
  r.expect_le("phi0_minus_one", std::abs(rep.phi0 - 1.0), 1e-12);
  r.expect_ge("min_phi", rep.min_phi, 1.0 - max_err);
  r.metric("derivative_fd", rep.derivative_fd);
  r.metric("derivative_integral", rep.derivative_integral);
  r.expect_ge("derivative_integral_nonnegative", rep.derivative_integral, -tol * rep.derivative_scale);
  const double fd_err = std::abs(rep.derivative_fd - coarse.derivative_fd);
  r.expect_le("derivative_agreement", std::abs(rep.derivative_fd - rep.derivative_integral),
              std::max(tol * rep.derivative_scale, fd_err));
  r.curves.push_back(std::move(curve));
}

}  // namespace

CheckResult run_check(const ExperimentConfig& cfg, const CheckConfig& check, std::size_t index) {
  CheckResult r;
  r.id = std::to_string(index) + "_" + to_string(check.kind);
  r.name = to_string(check.kind);
  r.pass = true;
  r.data["options"] = check.options;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (check.kind) {
      case CheckKind::constants: check_constants(cfg, check, r); break;
      case CheckKind::trace_gn: check_trace(cfg, check, r, false); break;
      case CheckKind::weighted_trace: check_trace(cfg, check, r, true); break;
      case CheckKind::bbl_gap: check_bbl_gap(cfg, check, r); break;
      case CheckKind::derived_gap: check_derived_gap(cfg, check, r); break;
      case CheckKind::appendix_limit: check_appendix(cfg, check, r); break;
      case CheckKind::semigroup: check_semigroup(cfg, check, r); break;
      case CheckKind::hj_quotient: check_hj(cfg, check, r); break;
      case CheckKind::admissibility: check_admissibility(cfg, check, r); break;
      case CheckKind::equivalence_scan: check_equivalence(cfg, check, r); break;
    }
  } catch (const HypothesisViolation& e) {
    r.pass = false;
    r.failures.push_back(std::string("validation error: ") + e.what());
    if (!e.witness().empty()) r.data["witness"] = e.witness();
  } catch (const InvalidInput& e) {
    r.pass = false;
    r.failures.push_back(std::string("invalid input: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunReport run_config(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = "run";
  rep.name = cfg.name;
  rep.seed = cfg.seed;
  rep.config = cfg.source;
  for (std::size_t i = 0; i < cfg.checks.size(); ++i) rep.results.push_back(run_check(cfg, cfg.checks[i], i));
  return rep;
}

}  // namespace epiconvex::cli
