#include "epiconvex/cli/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>

#include "epiconvex/bblcheck.hpp"
#include "epiconvex/hopflax.hpp"
#include "epiconvex/sharpconst.hpp"
#include "epiconvex/transforms.hpp"

#ifndef EPICONVEX_SOURCE_DATA_DIR
#define EPICONVEX_SOURCE_DATA_DIR "data"
#endif

namespace epiconvex::cli {

namespace {

// Pinned acceptance tolerances.
constexpr double kLegendreSeconds = 1.0;
constexpr double kBiconjHalvingLo = 0.4, kBiconjHalvingHi = 0.6;
constexpr double kHopfLaxFactor = 5.0;        // max error <= 5 dx
constexpr double kSemigroupFactor = 5.0;      // residual <= 5 dx
constexpr double kHJRelative = 0.01;          // of the largest |W*(grad g)|
constexpr double kAppendixBoundaryRel = 0.02;
constexpr double kIAlphaRel = 0.005;
constexpr double kIAlphaSeconds = 10.0;
constexpr double kTraceEqualityRel = 0.02;
constexpr double kIdentityAbs = 1e-12;
constexpr double kBRoutesRel = 0.01;
constexpr double kNormalizationRel = 0.005;  // C against the polar closed form

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sq(double v) { return v * v; }

// --- 1: factored Legendre transform against the exhaustive maximum ----------
//
// Coordinates, slopes and coefficients are dyadic with few bits, so every
// product and sum is exact and the two evaluation orders must agree bit for bit.
void legendre_oracle(CheckResult& r) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20241);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::size_t value_mismatch = 0, argmax_mismatch = 0, compared = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t r0 = 4 + static_cast<std::size_t>(k * 12 / 19);
    const std::size_t r1 = 4 + static_cast<std::size_t>((k * 7) % 13);
    auto half = [](std::size_t r) { return static_cast<double>(r - 1) / 16.0; };
    const GridSpec G({-half(r0), -half(r1)}, {half(r0), half(r1)}, {r0, r1});
    const double a = pick(1, 8) / 4.0, c = pick(1, 8) / 4.0;
    double b = pick(-8, 8) / 8.0;
    if (b * b >= 4.0 * a * c) b = 0.0;
    const double d = pick(-8, 8) / 8.0, e = pick(0, 8) / 8.0;
    double al[3][2], be[3];
    for (int j = 0; j < 3; ++j) {
      al[j][0] = pick(-8, 8) / 8.0;
      al[j][1] = pick(-8, 8) / 8.0;
      be[j] = pick(-4, 4) / 8.0;
    }
    const bool restricted = k % 4 == 3;
    const double rad2 = sq(0.75 * std::min(half(r0), half(r1)));
    const ExtGridFn f = ExtGridFn::from_function(
        G,
        [&](std::span<const double> x) {
          if (restricted && sq(x[0]) + sq(x[1]) > rad2) return kInf;
          double m = al[0][0] * x[0] + al[0][1] * x[1] + be[0];
          for (int j = 1; j < 3; ++j) m = std::max(m, al[j][0] * x[0] + al[j][1] * x[1] + be[j]);
          return a * x[0] * x[0] + b * x[0] * x[1] + c * x[1] * x[1] + d * x[0] + e * std::abs(x[1]) + m;
        },
        Sign::any);
    const GridSpec D({-2.0 * half(r0), -2.0 * half(r1)}, {2.0 * half(r0), 2.0 * half(r1)}, {r0, r1});
    const auto conj = legendre_nd(f, D);
    std::vector<double> x(2), y(2);
    for (std::size_t j = 0; j < D.size(); ++j) {
      D.point(j, y);
      double best = -kInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < G.size(); ++i) {
        if (!f.is_finite(i)) continue;
        G.point(i, x);
        const double v = x[0] * y[0] + x[1] * y[1] - f[i];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      ++compared;
      if (conj.values[j] != best) ++value_mismatch;
      if (conj.argmax[j] != arg) ++argmax_mismatch;
    }
  }
  const double secs = seconds_since(t0);
  r.metric("fixtures", 20);
  r.metric("dual_nodes_compared", static_cast<double>(compared));
  r.expect_le("value_mismatches", static_cast<double>(value_mismatch), 0.0);
  r.expect_le("argmax_mismatches", static_cast<double>(argmax_mismatch), 0.0);
  r.metric("runtime_limit_seconds", kLegendreSeconds);
  if (secs >= kLegendreSeconds) {
    r.pass = false;
    r.failures.push_back("runtime " + fmt_num(secs) + " s exceeds " + fmt_num(kLegendreSeconds) + " s");
  }
}

// --- 2: biconjugation error against diam * max slope spacing ----------------
void biconjugacy(CheckResult& r) {
  std::mt19937_64 rng(20242);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::size_t failures = 0;
  double worst_ratio = 0.0, worst_halving_dev = 0.0;
  Curve curve{"biconjugacy", {"fixture", "resolution", "error", "bound"}, {}};
  for (int k = 0; k < 10; ++k) {
    const double a = 0.5 + 1.5 * U(rng), c = 0.5 + 1.5 * U(rng), b = 0.8 * (U(rng) - 0.5);
    const double l0 = U(rng) - 0.5, l1 = U(rng) - 0.5;
    auto fn = [=](std::span<const double> x) {
      double v = 0.5 * (a * x[0] * x[0] + 2.0 * b * x[0] * x[1] + c * x[1] * x[1]) + l0 * x[0] + l1 * x[1];
      if (k % 3 == 1) v += 0.5 * std::abs(x[0] - 0.2);
      if (k % 3 == 2) v += std::log(std::exp(x[0]) + std::exp(x[1]) + std::exp(-x[0] - x[1]));
      return v;
    };
    double prev_bound = 0.0;
    for (std::size_t res : {17u, 33u}) {
      const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {res, res});
      const ExtGridFn f = ExtGridFn::from_function(G, fn, Sign::any);
      const GridSpec dual = default_dual_box(f, {res, res});
      const auto fs = legendre_nd(f, dual);
      const auto fss = legendre_nd(fs.values, G);
      double err = 0.0;
      for (std::size_t i = 0; i < G.size(); ++i) err = std::max(err, std::abs(fss.values[i] - f[i]));
      const double diam = std::sqrt(8.0);
      const double bound = diam * std::max(dual.step(0), dual.step(1));
      if (!(err <= bound)) ++failures;
      worst_ratio = std::max(worst_ratio, err / bound);
      if (prev_bound > 0.0) {
        const double h = bound / prev_bound;
        if (!(h >= kBiconjHalvingLo && h <= kBiconjHalvingHi)) ++failures;
        worst_halving_dev = std::max(worst_halving_dev, std::abs(h - 0.5));
      }
      prev_bound = bound;
      curve.rows.push_back({static_cast<double>(k), static_cast<double>(res), err, bound});
    }
  }
  r.metric("worst_error_over_bound", worst_ratio);
  r.metric("worst_halving_deviation", worst_halving_dev);
  r.expect_le("violations", static_cast<double>(failures), 0.0);
  r.curves.push_back(std::move(curve));
}

// --- 3: Q_h(W) = (1+h) W(./(1+h)) for the normalised power cost ------------
void hopflax_equality(CheckResult& r) {
  const double a = 2.0, q = 3.0;
  const auto N = NormSpec::euclidean();
  const auto nc = normalize_power_cost(EpigraphDomain::halfspace(2), N, q, a, QuadSpec{0.05, 40.0, 0.0});
  const double oracle = q * std::sqrt(3.0 * std::numbers::pi / 32.0);
  r.metric("C", nc.C);
  r.expect_le("C_vs_polar_rel", std::abs(nc.C / oracle - 1.0), kNormalizationRel);
  auto W = [&](double x0, double x1) { return nc.C * std::pow(std::hypot(x0, x1), q) / q; };
  for (double dx : {0.1, 0.05}) {
    const auto nx = static_cast<std::size_t>(std::llround(4.0 / dx)) + 1;
    const auto ny = static_cast<std::size_t>(std::llround(2.0 / dx)) + 1;
    const GridSpec G({-2.0, 1.0}, {2.0, 3.0}, {nx, ny});
    const ExtGridFn Wg = ExtGridFn::from_function(G, [&](std::span<const double> x) { return W(x[0], x[1]); });
    for (double h : {0.25, 0.5}) {
      const auto Q = hopflax_apply(Wg, Wg, h);
      double err = 0.0;
      std::size_t spurious = 0, missing = 0;
      std::vector<double> x(2);
      for (std::size_t i = 0; i < G.size(); ++i) {
        G.point(i, x);
        if (x[1] < 1.0 + h - 1e-12) {
          if (Q.values.is_finite(i)) ++spurious;
          continue;
        }
        if (!Q.values.is_finite(i)) {
          ++missing;
          continue;
        }
        err = std::max(err, std::abs(Q.values[i] - (1.0 + h) * W(x[0] / (1.0 + h), x[1] / (1.0 + h))));
      }
      const std::string s = "dx" + fmt_num(dx) + "_h" + fmt_num(h) + "_";
      r.expect_le(s + "max_error", err, kHopfLaxFactor * dx);
      r.expect_le(s + "spurious_finite", static_cast<double>(spurious), 0.0);
      r.expect_le(s + "missing_finite", static_cast<double>(missing), 0.0);
    }
  }
}

ExtGridFn quadratic(double L, double dx) {
  const auto res = static_cast<std::size_t>(std::llround(2.0 * L / dx)) + 1;
  const GridSpec G({-L, -L}, {L, L}, {res, res});
  return ExtGridFn::from_function(G, [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
}

// --- 4: semigroup residual on the quadratic fixture -------------------------
void semigroup(CheckResult& r) {
  double prev = kInf;
  Curve curve{"semigroup", {"dx", "residual"}, {}};
  for (double dx : {0.1, 0.05}) {
    const ExtGridFn W = quadratic(2.0, dx);
    const auto rep = semigroup_residual(W, W, 0.6, 0.2);
    const std::string s = "dx" + fmt_num(dx) + "_";
    r.expect_le(s + "residual", rep.max_abs_residual, kSemigroupFactor * dx);
    r.metric(s + "domain_mismatches", static_cast<double>(rep.domain_mismatches));
    if (std::isfinite(prev)) r.expect_le(s + "residual_vs_coarser", rep.max_abs_residual, prev);
    prev = rep.max_abs_residual;
    curve.rows.push_back({dx, rep.max_abs_residual});
  }
  r.curves.push_back(std::move(curve));
}

// --- 5: Hamilton-Jacobi difference quotients --------------------------------
void hj_derivative(CheckResult& r) {
  const ExtGridFn W = quadratic(3.0, 0.05);
  const YSet Y = YSet::from_grid(W);
  const double c = 1.0;
  auto gfun = [c](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]) + c; };
  const auto ev = make_function_evaluator(2, gfun, c);
  std::mt19937_64 rng(20245);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  const double hs[] = {0.4, 0.2, 0.1, 0.05};
  double worst = 0.0, scale = 0.0, max_grad = 0.0;
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 20; ++k) pts.push_back({U(rng), U(rng)});
  for (const auto& x : pts) {
    const double g2 = x[0] * x[0] + x[1] * x[1];
    scale = std::max(scale, 0.5 * g2);
    max_grad = std::max(max_grad, std::sqrt(g2));
  }
  // W = |y|^2/2 has boundary slope 3 on its box, above every |grad g|.
  r.expect_le("max_grad_vs_boundary_slope", max_grad, 3.0);
  for (const auto& x : pts) {
    const double ref = 0.5 * (x[0] * x[0] + x[1] * x[1]);  // W*(grad g(x)) = |x|^2/2
    const auto dq = hj_difference_quotient(*ev, gfun(x), Y, x, hs, ref);
    worst = std::max(worst, std::abs(dq.extrapolated - dq.reference));
  }
  r.metric("points", 20);
  r.metric("scale", scale);
  r.expect_le("max_abs_deviation", worst, kHJRelative * scale);
}

// --- 6: dynamical BBL gap ---------------------------------------------------
void bbl(CheckResult& r) {
  const auto dom = EpigraphDomain::halfspace(2);
  const double a = 2.5, q = 3.0;
  const double hs[] = {0.1, 0.25, 0.5, 1.0};
  auto Wf = [q](std::span<const double> y) { return std::pow(std::hypot(y[0], y[1]), q) / q; };
  auto g_eq = [&](std::span<const double> x) {
    const double y[2] = {x[0], x[1] + 1.0};
    return Wf(y);
  };
  auto g_quad = [](std::span<const double> x) { return 1.0 + x[0] * x[0] + 2.0 * x[1] * x[1] + 0.5 * x[0] * x[1]; };
  const SmoothFn bump = bump_function({0.3, 0.5}, 1.0);
  auto g_bump = [&](std::span<const double> x) { return g_eq(x) + 0.2 * bump.value(x); };
  struct Fixture {
    const char* name;
    std::function<double(std::span<const double>)> fn;
    double env_coef;  // raw g >= env_coef |x|^env_gamma on the half-space
    double env_gamma;
    bool equality;
  };
  // The quadratic form has smallest eigenvalue 1.5 - sqrt(0.3125) > 0.94.
  const Fixture fixtures[] = {{"equality", g_eq, 1.0 / q, q, true},
                              {"quadratic", g_quad, 0.94, 2.0, false},
                              {"bump", g_bump, 1.0 / q, q, false}};
  const std::pair<double, double> levels[] = {{0.2, 8.0}, {0.1, 8.0}};
  Curve curve{"gap", {"fixture", "dx", "h", "gap", "error"}, {}};
  std::vector<double> eq_eps[2];
  for (std::size_t l = 0; l < 2; ++l) {
    const auto [dx, R] = levels[l];
    const auto box = ShearBox::symmetric(2, R, R, dx);
    const EpiGrid Wraw = EpiGrid::sample(dom, Shear::omega_shift(1.0), box, Wf);
    const double cW = std::pow(lr_mass(Wraw, a), 1.0 / a);
    const EpiGrid W = Wraw.scaled(cW);
    for (std::size_t fi = 0; fi < 3; ++fi) {
      const auto& fx = fixtures[fi];
      const EpiGrid graw = EpiGrid::sample(dom, Shear::omega(), box, fx.fn);
      const double cg = std::pow(lr_mass(graw, a), 1.0 / a);
      const EpiGrid g = graw.scaled(cg);
      // Envelope used for the tails: both g and W dominate A |x|^gamma.
      const double gamma = std::min(fx.env_gamma, q);
      const GrowthEnvelope env{std::min(cg * fx.env_coef, cW / q), gamma};
      for (double h : hs) {
        const auto rep = bbl_gap(g, W, BBLParams::make(2, a, 1.5, h), env);
        const std::string s = std::string(fx.name) + "_dx" + fmt_num(dx) + "_h" + fmt_num(h) + "_";
        r.expect_ge(s + "gap", rep.gap, -rep.quadrature_error_estimate);
        if (fx.equality) {
          r.expect_le(s + "abs_gap", std::abs(rep.gap), rep.quadrature_error_estimate);
          eq_eps[l].push_back(rep.quadrature_error_estimate);
        }
        curve.rows.push_back({static_cast<double>(fi), dx, h, rep.gap, rep.quadrature_error_estimate});
      }
    }
  }
  for (std::size_t i = 0; i < eq_eps[0].size(); ++i)
    r.expect_le("equality_error_refined_h" + fmt_num(hs[i]), eq_eps[1][i], eq_eps[0][i]);
  r.curves.push_back(std::move(curve));
}

// --- 7: cone dichotomy and the essential domain of Q_h ----------------------
void cone_dichotomy(CheckResult& r) {
  const std::pair<const char*, EpigraphDomain> doms[] = {
      {"halfspace", EpigraphDomain::halfspace(2)},
      {"abs", EpigraphDomain::cone(2, 1.0)},
      {"skew", EpigraphDomain::affine_max(2, {{{0.5}, 0.0}, {{-1.0}, 0.0}})},
      {"paraboloid", EpigraphDomain::paraboloid(2, 1.0)},
  };
  const GridSpec G({-3.0, -1.0}, {3.0, 5.0}, {61, 61});
  const GridSpec Gy({-3.0, 1.0}, {3.0, 7.0}, {61, 61});
  for (const auto& [name, d] : doms) {
    const bool expect_cone = std::string(name) != "paraboloid";
    const auto ct = d.is_cone(2000, 1e-9);
    r.expect(std::string(name) + "_is_cone_matches", ct.is_cone == expect_cone);
    if (!expect_cone) r.expect(std::string(name) + "_has_witness", !ct.witness.empty());
    const ExtGridFn g = d.sample_grid(G, [](std::span<const double> x) { return 1.0 + x[0] * x[0] + x[1] * x[1]; });
    const ExtGridFn W =
        d.sample_grid(Gy, [](std::span<const double> y) { return 0.5 * (y[0] * y[0] + y[1] * y[1]); }, 1.0);
    for (double h : {0.25, 0.5}) {
      const auto Q = hopflax_apply(g, W, h);
      NodeSet dom{G, std::vector<std::uint8_t>(G.size())};
      for (std::size_t i = 0; i < G.size(); ++i) dom.mask[i] = Q.values.is_finite(i) ? 1 : 0;
      const NodeSet ref = expect_cone ? d.omega_h_nodes(G, h) : d.bh_nodes(G, h);
      const auto cmp = compare_node_sets(dom, ref);
      const std::string s = std::string(name) + "_h" + fmt_num(h) + "_";
      r.metric(s + "mismatches", static_cast<double>(cmp.mismatches));
      r.expect_le(s + "mismatches_beyond_one_cell", static_cast<double>(cmp.mismatches_beyond_one_cell), 0.0);
    }
  }
}

// --- 8: the three-term split of the appendix limit --------------------------
void appendix(CheckResult& r) {
  const auto N = NormSpec::euclidean();
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const QuadSpec quad{0.1, 10.0, 0.0};
  struct Case {
    const char* name;
    EpigraphDomain dom;
    double h;
  };
  const Case cases[] = {{"halfspace", EpigraphDomain::halfspace(2), 0.01},
                        {"cone", EpigraphDomain::cone(2, 1.0), 0.25},
                        {"paraboloid", EpigraphDomain::paraboloid(2, 1.0), 0.25}};
  for (std::size_t ci = 0; ci < 3; ++ci) {
    const auto& cs = cases[ci];
    const double C = normalize_power_cost(cs.dom, N, P.q, P.a, QuadSpec{0.05, 40.0, 0.0}).C;
    const SmoothFn W = power_cost(C, P.q, N);
    SmoothFn g = W;
    g.value = [W](std::span<const double> x) {
      const double y[2] = {x[0], x[1] + 1.0};
      return W.value(y);
    };
    g.grad = [W](std::span<const double> x, std::span<double> out) {
      const double y[2] = {x[0], x[1] + 1.0};
      W.grad(y, out);
    };
    auto conj = [&](std::span<const double> y) { return power_cost_conjugate(C, P.q, N, y); };
    const double hl[] = {cs.h};
    const auto rep = appendix_limit_residual(g, W, conj, P, cs.dom, hl, quad);
    const auto& row = rep.rows.front();
    const std::string s = std::string(cs.name) + "_h" + fmt_num(cs.h) + "_";
    r.metric(s + "boundary_term", rep.boundary_term);
    r.metric(s + "term_ii", row.term_ii);
    r.metric(s + "residual", row.residual);
    if (ci == 0) r.expect_le(s + "term_ii_rel_boundary", std::abs(row.term_ii / rep.boundary_term - 1.0), kAppendixBoundaryRel);
    if (cs.dom.homogeneous()) r.expect(s + "term_iii_zero", row.term_iii == 0.0);
    else r.expect_ge(s + "term_iii_positive", row.term_iii, std::nextafter(0.0, 1.0));
    r.curves.push_back(Curve{std::string("appendix_") + cs.name,
                             {"h", "term_i", "term_ii", "term_iii", "residual"},
                             {{row.h, row.term_i, row.term_ii, row.term_iii, row.residual}}});
  }
}

// --- 9: I_alpha against the polar reduction ---------------------------------
void i_alpha_oracle(CheckResult& r) {
  const auto dom = EpigraphDomain::halfspace(2);
  const auto N = NormSpec::euclidean();
  const std::pair<double, double> cases[] = {{4.0, std::numbers::pi / 4.0}, {6.0, 3.0 * std::numbers::pi / 32.0}};
  for (const auto& [alpha, exact] : cases) {
    const auto t0 = Clock::now();
    const auto res = i_alpha(dom, N, alpha, QuadSpec{0.05, 40.0, 0.0});
    const double secs = seconds_since(t0);
    const std::string s = "alpha" + fmt_num(alpha) + "_";
    r.metric(s + "value", res.value);
    r.metric(s + "exact", exact);
    r.expect_le(s + "rel_error", std::abs(res.value / exact - 1.0), kIAlphaRel);
    if (secs >= kIAlphaSeconds) {
      r.pass = false;
      r.failures.push_back(s + "runtime " + fmt_num(secs) + " s exceeds " + fmt_num(kIAlphaSeconds) + " s");
    }
  }
}

// --- 10: trace equality for the extremal, strict inequality for bumps -------
void trace_equality(CheckResult& r) {
  const auto N = NormSpec::euclidean();
  struct Case {
    const char* name;
    EpigraphDomain dom;
    double a;
  };
  const Case cases[] = {{"halfspace", EpigraphDomain::halfspace(2), 2.0}, {"cone", EpigraphDomain::cone(2, 1.0), 2.5}};
  for (const auto& cs : cases) {
    const auto P = BBLParams::make(2, cs.a, 1.5);
    const SmoothFn f = extremal_f(P, N).as_function();
    Curve curve{std::string("refinement_") + cs.name, {"dx", "abs_ratio_minus_one"}, {}};
    std::vector<double> dev;
    for (int lv = 0; lv < 3; ++lv) {
      const double dx = 0.2 / (1 << lv), R = 20.0 * (1 << lv);
      const auto rep = trace_gn_check(f, P, cs.dom, N, QuadSpec{dx, R, 0.0});
      const std::string s = std::string(cs.name) + "_dx" + fmt_num(dx) + "_";
      r.metric(s + "ratio", rep.ratio);
      r.metric(s + "quadrature_error", rep.quadrature_error);
      dev.push_back(std::abs(rep.ratio - 1.0));
      curve.rows.push_back({dx, dev.back()});
    }
    r.expect_le(std::string(cs.name) + "_abs_ratio_minus_one", dev.back(), kTraceEqualityRel);
    r.expect(std::string(cs.name) + "_decreasing", dev[1] < dev[0] && dev[2] < dev[1]);
    r.curves.push_back(std::move(curve));
    for (const auto& c : std::vector<std::vector<double>>{{0.3, 0.5}, {-0.8, 0.9}}) {
      const auto rep = trace_gn_check(bump_function(c, 1.0), P, cs.dom, N, QuadSpec{0.1, 40.0, 0.0});
      const std::string s = std::string(cs.name) + "_bump_" + fmt_num(c[0]) + "_" + fmt_num(c[1]) + "_";
      r.expect_le(s + "ratio", rep.ratio, std::nextafter(1.0, 0.0));
    }
  }
}

// --- 11: weighted trace on a polyhedral domain ------------------------------
void weighted_trace(CheckResult& r) {
  const auto N = NormSpec::euclidean();
  const auto dom = EpigraphDomain::affine_max(2, {{{0.0}, 0.0}, {{1.0}, -0.5}, {{-1.0}, -0.5}});
  const auto P = BBLParams::make(2, 2.5, 1.5);
  const auto ext = weighted_trace_check(extremal_f(P, N).as_function(), P, dom, N, QuadSpec{0.1, 40.0, 0.0});
  r.metric("extremal_ratio", ext.ratio);
  r.expect_le("extremal_abs_ratio_minus_one", std::abs(ext.ratio - 1.0), kTraceEqualityRel);
  for (const auto& c : std::vector<std::vector<double>>{{0.0, 0.2}, {0.7, 0.5}, {-1.5, 1.2}, {1.5, 1.5}}) {
    const auto rep = weighted_trace_check(bump_function(c, 1.0), P, dom, N, QuadSpec{0.1, 20.0, 0.0});
    const std::string s = "bump_" + fmt_num(c[0]) + "_" + fmt_num(c[1]) + "_";
    r.expect_le(s + "ratio", rep.ratio, 1.0 + rep.quadrature_error);
  }
  bool rejected = false;
  try {
    weighted_trace_check(extremal_f(P, N).as_function(), P, EpigraphDomain::paraboloid(2, 1.0), N,
                         QuadSpec{0.1, 20.0, 0.0});
  } catch (const HypothesisViolation& e) {
    rejected = !e.witness().empty();
    r.note(std::string("paraboloid rejected: ") + e.what());
    r.data["paraboloid_witness"] = e.witness();
  }
  r.expect("paraboloid_rejected_with_witness", rejected);
}

// --- 12: constant identities ------------------------------------------------
void constant_identities(CheckResult& r) {
  const auto N = NormSpec::euclidean();
  struct Case {
    const char* name;
    EpigraphDomain dom;
    double a;
  };
  const Case cases[] = {{"halfspace_a2", EpigraphDomain::halfspace(2), 2.0},
                        {"cone_a2.5", EpigraphDomain::cone(2, 1.0), 2.5},
                        {"cone_a2", EpigraphDomain::cone(2, 1.0), 2.0}};
  auto identities = [&](const std::string& s, const SharpConstants& k, const BBLParams& P) {
    const double a = P.a, p = P.p, n = static_cast<double>(P.n);
    r.expect_le(s + "uv", std::abs(1.0 / k.u + 1.0 / k.v - 1.0), kIdentityAbs);
    r.expect_le(s + "u_formula", std::abs(k.u - (a - 1.0) / (a - p)), kIdentityAbs);
    r.expect_le(s + "v_formula", std::abs(k.v - (a - 1.0) / (p - 1.0)), kIdentityAbs);
    r.expect_le(s + "theta_formula", std::abs(k.theta - (a - p) / (p * (a - n - 1.0) + n)), kIdentityAbs);
    r.expect(s + "theta_in_unit_interval", k.theta > 0.0 && k.theta <= 1.0);
    const double D = std::pow(k.A, k.u) / (std::pow(k.B * k.v, k.u - 1.0) * k.u);
    r.expect_le(s + "D_formula_rel", std::abs(k.D - D) / std::abs(D), kIdentityAbs);
    r.expect_le(s + "C_identity_rel", std::abs(k.C - P.q * std::pow(k.I_ap, 1.0 / a)) / k.C, kIdentityAbs);
    if (a == n) {
      r.expect(s + "theta_exactly_one", k.theta == 1.0);
      r.expect_le(s + "D_npa_rel", std::abs(k.D_npa - std::pow(k.D, 1.0 / k.q_trace)) / k.D_npa, kIdentityAbs);
    }
  };
  for (const auto& cs : cases) {
    const auto P = BBLParams::make(2, cs.a, 1.5);
    const auto k = gns_constants(P, cs.dom, N, QuadSpec{0.1, 40.0, 0.0});
    const std::string s = std::string(cs.name) + "_";
    identities(s, k, P);
    r.expect_le(s + "B_routes_rel", std::abs(k.B - k.B_identity) / k.B, kBRoutesRel);
  }
  // n = 3 exponent bookkeeping from the pure assembly.
  const auto P3 = BBLParams::make(3, 4.0, 2.0);
  const auto k3 = assemble_constants(P3, 0.75, 1.25, 2.0);
  identities("n3_", k3, P3);
  r.expect_le("n3_theta_two_thirds", std::abs(k3.theta - 2.0 / 3.0), kIdentityAbs);
  r.expect_le("n3_q_trace_three", std::abs(k3.q_trace - 3.0), kIdentityAbs);
  const auto P33 = BBLParams::make(3, 3.0, 2.0);
  identities("n3_a3_", assemble_constants(P33, 0.75, 1.25, 2.0), P33);
}

// --- 13: the discontinuous infimal convolution ------------------------------
void counterexample(CheckResult& r, const std::string& data_dir) {
  const auto dir = std::filesystem::path(data_dir) / "counterexample";
  const ExtGridFn f = ExtGridFn::load((dir / "f.grid").string());
  const ExtGridFn g = ExtGridFn::load((dir / "g.grid").string());
  const auto res = infconv(f, g);
  const auto ref = infconv_reference(f, g);
  // The displayed piecewise table.
  auto table = [](double x1, double x2) {
    if (x1 > 0.0 && x1 <= 1.0 && x2 >= 0.0 && x2 <= 1.0) return 1.0;
    if (x1 == 0.0 && x2 >= 0.0 && x2 <= 1.0) return 1.0 - x2;
    if (x1 == 0.0 && x2 >= 1.0 && x2 <= 2.0) return 0.0;
    return kInf;
  };
  std::size_t bad = 0, ref_bad = 0;
  std::vector<double> x(2);
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    res.values.grid().point(i, x);
    if (res.values[i] != table(x[0], x[1])) ++bad;
    if (res.values[i] != ref.values[i] || res.argmin[i] != ref.argmin[i]) ++ref_bad;
  }
  r.metric("nodes", static_cast<double>(res.values.size()));
  r.expect_le("table_mismatches", static_cast<double>(bad), 0.0);
  r.expect_le("reference_mismatches", static_cast<double>(ref_bad), 0.0);
  r.expect_le("domain_sum_mismatches", static_cast<double>(domain_sum_check(f, g).mismatches), 0.0);
}

}  // namespace

std::string default_data_dir() {
  if (const char* env = std::getenv("EPICONVEX_DATA_DIR"); env && *env) return env;
  return EPICONVEX_SOURCE_DATA_DIR;
}

RunReport run_paper_suite(const SuiteOptions& opt) {
  const std::string data_dir = opt.data_dir.empty() ? default_data_dir() : opt.data_dir;
  struct Entry {
    int id;
    const char* name;
    std::function<void(CheckResult&)> run;
  };
  const std::vector<Entry> entries = {
      {1, "legendre_oracle", legendre_oracle},
      {2, "biconjugacy", biconjugacy},
      {3, "hopflax_equality", hopflax_equality},
      {4, "semigroup", semigroup},
      {5, "hj_derivative", hj_derivative},
      {6, "bbl_gap", bbl},
      {7, "cone_dichotomy", cone_dichotomy},
      {8, "appendix_limit", appendix},
      {9, "i_alpha_oracle", i_alpha_oracle},
      {10, "trace_equality", trace_equality},
      {11, "weighted_trace", weighted_trace},
      {12, "constant_identities", constant_identities},
      {13, "counterexample", [&data_dir](CheckResult& r) { counterexample(r, data_dir); }},
  };
  RunReport rep;
  rep.kind = "suite";
  rep.name = "paper";
  rep.seed = 20240;
  for (const auto& e : entries) {
    if (!opt.only.empty() && !opt.only.count(e.id)) continue;
    CheckResult r;
    r.id = (e.id < 10 ? "C0" : "C") + std::to_string(e.id);
    r.name = e.name;
    r.pass = true;
    const auto t0 = Clock::now();
    try {
      e.run(r);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.failures.push_back(std::string("exception: ") + ex.what());
    }
    r.seconds = seconds_since(t0);
    if (opt.on_result) opt.on_result(r);
    rep.results.push_back(std::move(r));
  }
  return rep;
}

}  // namespace epiconvex::cli
