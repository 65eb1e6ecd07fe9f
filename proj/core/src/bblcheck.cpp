#include "epiconvex/bblcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "epiconvex/parallel.hpp"

namespace epiconvex {

namespace {

void require_normalised(double mass, const char* what) {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw InvalidInput(std::string(what) + " is not normalisable on the grid");
  if (std::abs(mass - 1.0) > 0.01)
    throw InvalidInput(std::string(what) + " must satisfy the -a normalisation within 1% (rescale first)");
}

// Every other node of a sheared grid.
EpiGrid subsample(const EpiGrid& g) {
  const GridSpec& G = g.grid();
  std::vector<std::size_t> res(G.dim());
  for (std::size_t d = 0; d < G.dim(); ++d) {
    if (G.res[d] < 3 || (G.res[d] - 1) % 2 != 0) throw InvalidInput("refinement estimate needs odd resolutions >= 3");
    res[d] = (G.res[d] - 1) / 2 + 1;
  }
  GridSpec C(G.lo, G.hi, res);
  const auto fst = G.strides();
  std::vector<double> vals(C.size());
  for (std::size_t i = 0; i < C.size(); ++i) {
    const auto idx = C.unravel(i);
    std::size_t f = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) f += 2 * idx[d] * fst[d];
    vals[i] = g.values()[f];
  }
  return EpiGrid(g.domain(), g.shear(), ExtGridFn(C, std::move(vals), g.values().sign()));
}

struct GapValues {
  double lhs = 0.0, rhs = 0.0;
};

GapValues gap_values(const EpiGrid& g, const EpiGrid& W, const BBLParams& P) {
  const double a = P.a, h = P.h;
  const std::size_t n = P.n;
  auto pw = [a](double v) { return std::pow(v, 1.0 - a); };
  const double Tg = g.integrate(pw);
  const double Tw = W.integrate(pw);
  GapValues out;
  out.rhs = Tg + h * Tw;
  if (h == 0.0) {
    out.lhs = Tg;
    return out;
  }
  // Quadrature nodes over B_h: images of W's nodes under z -> (1+h) z - e.
  const GridSpec& WG = W.grid();
  std::vector<double> xs(WG.size() * n);
  for (std::size_t i = 0; i < WG.size(); ++i) {
    std::span<double> x(xs.data() + i * n, n);
    W.node_point(i, x);
    for (auto& v : x) v *= (1.0 + h);
    x[n - 1] -= 1.0;
  }
  const auto ev = make_epigrid_evaluator(g);
  const YSet Y = YSet::from_epigrid(W);
  const auto Q = hopflax_points(*ev, Y, h, xs);
  double s = 0.0;
  for (std::size_t i = 0; i < Q.size(); ++i)
    if (Q[i].value < kInf) s += WG.trapezoid_weight(i) * std::pow(Q[i].value, 1.0 - a);
  const double jac = std::pow(1.0 + h, static_cast<double>(n));
  out.lhs = std::pow(1.0 + h, a - static_cast<double>(n)) * jac * s;
  return out;
}

}  // namespace

double lr_mass(const EpiGrid& g, double a) {
  return g.integrate([a](double v) { return std::pow(v, -a); });
}

EpiGrid normalize_epigrid(const EpiGrid& g, double a) {
  const double m = lr_mass(g, a);
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("function is not normalisable on the grid");
  // (c g)^{-a} integrates to c^{-a} m, so c = m^{1/a}.
  return g.scaled(std::pow(m, 1.0 / a));
}

GapReport bbl_gap(const EpiGrid& g, const EpiGrid& W, const BBLParams& params, const GrowthEnvelope& env) {
  params.validate();
  if (g.dim() != params.n || W.dim() != params.n) throw InvalidInput("bbl_gap: dimension mismatch");
  if (g.shear().kind != Shear::Kind::shift || g.shear().param != 0.0)
    throw InvalidInput("bbl_gap: g must be sampled over Omega");
  if (W.shear().kind != Shear::Kind::shift || W.shear().param != 1.0)
    throw InvalidInput("bbl_gap: W must be sampled over Omega_1");
  require_normalised(lr_mass(g, params.a), "g");
  require_normalised(lr_mass(W, params.a), "W");

  const GapValues fine = gap_values(g, W, params);
  GapReport r;
  r.h = params.h;
  r.lhs = fine.lhs;
  r.rhs = fine.rhs;
  r.gap = r.lhs - r.rhs;
  if (params.h == 0.0) return r;

  const GapValues coarse = gap_values(subsample(g), subsample(W), params);
  r.refinement_diff = std::abs(fine.lhs - coarse.lhs) + std::abs(fine.rhs - coarse.rhs);
  if (env.A > 0.0) {
    const double a = params.a, h = params.h;
    const std::size_t n = params.n;
    const double beta = env.gamma * (a - 1.0);
    // Box radii for Omega and Omega_1 grids (psi >= 0 on both).
    ShearBox gb;
    gb.x1_lo.assign(g.grid().lo.begin(), g.grid().lo.end() - 1);
    gb.x1_hi.assign(g.grid().hi.begin(), g.grid().hi.end() - 1);
    gb.s_max = g.grid().hi.back();
    ShearBox wb;
    wb.x1_lo.assign(W.grid().lo.begin(), W.grid().lo.end() - 1);
    wb.x1_hi.assign(W.grid().hi.begin(), W.grid().hi.end() - 1);
    wb.s_max = W.grid().hi.back();
    const double rho_g = box_outer_radius(gb);
    const double rho_w = box_outer_radius(wb);
    const TailModel tg{std::pow(env.A, 1.0 - a), beta};
    // Q >= A (1+h)^{1-gamma} |x|^gamma, the Hopf-Lax transform of the envelopes.
    const TailModel tq{std::pow(env.A * std::pow(1.0 + h, 1.0 - env.gamma), 1.0 - a), beta};
    const double rho_b = (1.0 + h) * rho_w - 1.0;
    r.tail_bound = power_tail_bound(tg, n, rho_g) + h * power_tail_bound(tg, n, rho_w) +
                   std::pow(1.0 + h, a - static_cast<double>(n)) * power_tail_bound(tq, n, rho_b);
  }
  r.quadrature_error_estimate = r.refinement_diff + r.tail_bound;
  return r;
}

DerivedTails power_tails(double A, double gamma, double A4, double C, const BBLParams& P) {
  DerivedTails t;
  const double a = P.a, p = P.p;
  const double b = gamma * (a - 1.0);
  t.g_pow = {std::pow(A, 1.0 - a), b};
  t.w_pow = {std::pow(A, 1.0 - a), b};
  t.boundary = {std::pow(A, 1.0 - a), b};
  // For |x| >= 1, |grad g| <= 2 A4 |x|^{gamma-1}; W* <= C^{1-p} |y|^p / p.
  t.conj = {std::pow(C, 1.0 - p) * std::pow(2.0 * A4, p) / p * std::pow(A, -a), gamma * a - (gamma - 1.0) * p};
  return t;
}

namespace {

struct DerivedParts {
  double g_pow = 0.0, conj = 0.0, boundary = 0.0, w_pow = 0.0;
};

DerivedParts derived_parts(const SmoothFn& g, const SmoothFn& W,
                           const std::function<double(std::span<const double>)>& W_conj, const BBLParams& P,
                           const EpigraphDomain& dom, const ShearBox& box) {
  const std::size_t n = dom.n();
  const double a = P.a;
  std::vector<double> gr(n);
  auto vol = integrate_region_multi(dom, Shear::omega(), box, 2, [&](std::span<const double> x, std::span<double> out) {
    const double v = g.value(x);
    g.grad(x, gr);
    out[0] = std::pow(v, 1.0 - a);
    out[1] = W_conj(gr) / std::pow(v, a);
  });
  std::vector<double> pt(n);
  const double bnd = integrate_boundary(box, [&](std::span<const double> x1) {
    std::copy(x1.begin(), x1.end(), pt.begin());
    pt[n - 1] = dom.phi(x1);
    return std::pow(g.value(pt), 1.0 - a) * boundary_weight(dom, x1);
  });
  const double wv = integrate_region(dom, Shear::omega_shift(1.0), box,
                                     [&](std::span<const double> y) { return std::pow(W.value(y), 1.0 - a); });
  return {vol[0], vol[1], bnd, wv};
}

}  // namespace

GapReport derived_gap(const SmoothFn& g, const SmoothFn& W,
                      const std::function<double(std::span<const double>)>& W_conj, const BBLParams& params,
                      const EpigraphDomain& dom, const QuadSpec& quad, const DerivedTails& tails) {
  params.validate();
  const ShearBox box = quad.box(dom.n());
  const double a = params.a, nd = static_cast<double>(params.n);
  auto assemble = [&](const DerivedParts& d, double& lhs, double& rhs) {
    lhs = (a - nd) * d.g_pow + (a - 1.0) * d.conj - d.boundary;
    rhs = d.w_pow;
  };
  GapReport r;
  assemble(derived_parts(g, W, W_conj, params, dom, box), r.lhs, r.rhs);
  double lc = 0.0, rc = 0.0;
  assemble(derived_parts(g, W, W_conj, params, dom, box.coarsened()), lc, rc);
  r.gap = r.lhs - r.rhs;
  r.refinement_diff = std::abs(r.lhs - lc) + std::abs(r.rhs - rc);
  const std::size_t n = params.n;
  const double rho = box_outer_radius(box);
  const double rho1 = boundary_outer_radius(box);
  r.tail_bound = (a - nd) * power_tail_bound(tails.g_pow, n, rho) +
                 (a - 1.0) * power_tail_bound(tails.conj, n, rho) +
                 power_tail_bound(tails.boundary, n - 1, rho1) + power_tail_bound(tails.w_pow, n, rho);
  r.quadrature_error_estimate = r.refinement_diff + r.tail_bound;
  return r;
}

AppendixReport appendix_limit_residual(const SmoothFn& g, const SmoothFn& W,
                                       const std::function<double(std::span<const double>)>& W_conj,
                                       const BBLParams& params, const EpigraphDomain& dom,
                                       std::span<const double> h_list, const QuadSpec& quad,
                                       std::size_t column_nodes) {
  params.validate();
  const std::size_t n = dom.n();
  const double a = params.a;
  const ShearBox box = quad.box(n);

  SmoothFn gO = g, WO = W;
  gO.value = [&g, &dom](std::span<const double> x) { return dom.contains(x) ? g.value(x) : kInf; };
  WO.value = [&W, &dom](std::span<const double> y) { return dom.contains(y, 1.0) ? W.value(y) : kInf; };

  const EpiGrid gg = EpiGrid::sample(dom, Shear::omega(), box, gO.value);
  const EpiGrid Wg = EpiGrid::sample(dom, Shear::omega_shift(1.0), box, WO.value);
  const auto ev = make_epigrid_evaluator(gg);
  const YSet Y = YSet::from_epigrid(Wg);

  // Q at a batch of points: grid search, then a Newton polish with closed forms.
  auto Qbatch = [&](double h, const std::vector<double>& xs) {
    const auto pts = hopflax_points(*ev, Y, h, xs);
    std::vector<double> out(pts.size(), kInf);
    parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        if (pts[i].argmin == kNoIndex) continue;
        const auto y0 = Wg.node_point(pts[i].argmin);
        out[i] = hopflax_polish(gO, WO, h, std::span<const double>(xs.data() + i * n, n), y0, pts[i].value);
      }
    });
    return out;
  };

  AppendixReport rep;
  std::vector<double> gr(n);
  rep.conj_term = (a - 1.0) * integrate_region(dom, Shear::omega(), box, [&](std::span<const double> x) {
                    g.grad(x, gr);
                    return W_conj(gr) / std::pow(g.value(x), a);
                  });
  std::vector<double> pt(n);
  rep.boundary_term = integrate_boundary(box, [&](std::span<const double> x1) {
    std::copy(x1.begin(), x1.end(), pt.begin());
    pt[n - 1] = dom.phi(x1);
    return std::pow(g.value(pt), 1.0 - a) * boundary_weight(dom, x1);
  });
  rep.limit = rep.conj_term - rep.boundary_term;

  std::vector<double> gl_x, gl_w;
  gauss_legendre(column_nodes, gl_x, gl_w);
  const std::size_t m = n - 1;
  std::vector<std::size_t> bres(box.res.begin(), box.res.begin() + static_cast<std::ptrdiff_t>(m));
  const GridSpec bgrid(box.x1_lo, box.x1_hi, bres);

  for (double h : h_list) {
    if (!(h > 0.0)) throw InvalidInput("appendix residual needs h > 0");
    AppendixTerms row;
    row.h = h;
    // (i): nodes of the Omega_h grid.
    {
      const GridSpec G = box.grid();
      std::vector<double> xs(G.size() * n);
      for (std::size_t i = 0; i < G.size(); ++i) {
        std::span<double> x(xs.data() + i * n, n);
        G.point(i, x);
        x[n - 1] += dom.phi(x.first(m)) + h;
      }
      const auto Q = Qbatch(h, xs);
      double s = 0.0;
      for (std::size_t i = 0; i < G.size(); ++i) {
        const double gv = g.value(std::span<const double>(xs.data() + i * n, n));
        const double qv = Q[i] < kInf ? std::pow(Q[i], 1.0 - a) : 0.0;
        s += G.trapezoid_weight(i) * (qv - std::pow(gv, 1.0 - a));
      }
      row.term_i = s / h;
    }
    // (ii) and (iii): column integrals in x_n by Gauss-Legendre.
    {
      const std::size_t cols = bgrid.size();
      const std::size_t k = column_nodes;
      std::vector<double> ii(cols, 0.0), lo3(cols), hi3(cols);
      std::vector<double> xs3;
      std::vector<std::size_t> col_of;
      std::vector<double> x1(m);
      for (std::size_t c = 0; c < cols; ++c) {
        bgrid.point(c, x1);
        const double ph = dom.phi(x1);
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          std::copy(x1.begin(), x1.end(), pt.begin());
          pt[n - 1] = ph + 0.5 * h * (gl_x[j] + 1.0);
          s += 0.5 * h * gl_w[j] * std::pow(g.value(pt), 1.0 - a);
        }
        ii[c] = s;
        lo3[c] = dom.bh_boundary(x1, h);
        hi3[c] = ph + h;
        if (hi3[c] > lo3[c]) {
          for (std::size_t j = 0; j < k; ++j) {
            xs3.insert(xs3.end(), x1.begin(), x1.end());
            xs3.push_back(lo3[c] + 0.5 * (hi3[c] - lo3[c]) * (gl_x[j] + 1.0));
            col_of.push_back(c);
          }
        }
      }
      std::vector<double> iii(cols, 0.0);
      if (!xs3.empty()) {
        const auto Q = Qbatch(h, xs3);
        for (std::size_t t = 0; t < Q.size(); ++t) {
          const std::size_t c = col_of[t];
          const std::size_t j = t % k;
          if (Q[t] < kInf) iii[c] += 0.5 * (hi3[c] - lo3[c]) * gl_w[j] * std::pow(Q[t], 1.0 - a);
        }
      }
      double s2 = 0.0, s3 = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        const double w = bgrid.trapezoid_weight(c);
        s2 += w * ii[c];
        s3 += w * iii[c];
      }
      row.term_ii = s2 / h;
      row.term_iii = s3 / h;
    }
    row.total = row.term_i - row.term_ii + row.term_iii;
    row.residual = row.total - rep.limit;
    rep.rows.push_back(row);
  }
  return rep;
}

bool AdmissibilityReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passes; });
}

namespace {

// Sample points of Omega on radial fans from the origin plus points of the
// boundary graph, radii geometric in [1e-3, 1e3].
std::vector<std::vector<double>> fan_points(const EpigraphDomain& dom, std::size_t count, std::uint64_t seed,
                                            bool jitter) {
  const std::size_t n = dom.n();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> Z(0.0, 1.0);
  const std::size_t dirs = 16;
  std::vector<std::vector<double>> U_dirs, V_dirs;
  for (std::size_t k = 0; k < dirs; ++k) {
    std::vector<double> u(n);
    if (n == 2) {
      const double th = std::numbers::pi * (static_cast<double>(k) + (jitter ? U(rng) : 0.5)) / dirs;
      u = {std::cos(th), std::sin(th)};
    } else {
      double s = 0.0;
      for (auto& v : u) {
        v = Z(rng);
        s += v * v;
      }
      s = std::sqrt(s);
      for (auto& v : u) v /= s;
      u[n - 1] = std::abs(u[n - 1]);
    }
    U_dirs.push_back(u);
    std::vector<double> v(n - 1);
    if (n == 2) {
      v[0] = k % 2 == 0 ? 1.0 : -1.0;
    } else {
      double s = 0.0;
      for (auto& c : v) {
        c = Z(rng);
        s += c * c;
      }
      s = std::sqrt(s);
      for (auto& c : v) c /= s;
    }
    V_dirs.push_back(v);
  }
  std::vector<std::vector<double>> pts;
  const double l0 = std::log(1e-3), l1 = std::log(1e3);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count > 1 ? (static_cast<double>(i) + (jitter ? U(rng) - 0.5 : 0.0)) / (count - 1) : 0.5;
    const double r = std::exp(l0 + std::clamp(frac, 0.0, 1.0) * (l1 - l0));
    for (std::size_t k = 0; k < dirs; ++k) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = r * U_dirs[k][d];
      if (dom.contains(x)) pts.push_back(x);
      std::vector<double> b(n);
      for (std::size_t d = 0; d + 1 < n; ++d) b[d] = r * V_dirs[k][d];
      b[n - 1] = dom.phi(std::span<const double>(b.data(), n - 1));
      pts.push_back(b);
    }
  }
  return pts;
}

struct Extreme {
  double value = 0.0;
  std::vector<double> at;
};

template <class F>
Extreme extreme_over(const std::vector<std::vector<double>>& pts, bool minimum, F f) {
  Extreme e;
  e.value = minimum ? kInf : -kInf;
  for (const auto& x : pts) {
    const double v = f(x);
    if (!std::isfinite(v)) continue;
    if (minimum ? v < e.value : v > e.value) {
      e.value = v;
      e.at = x;
    }
  }
  return e;
}

}  // namespace

AdmissibilityReport admissibility_report(const SmoothFn& g, const SmoothFn& W, const AdmissibilityParams& adm,
                                         const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                                         std::size_t sample_count, std::uint64_t seed) {
  params.validate();
  if (sample_count < 2) throw InvalidInput("admissibility fans need at least 2 radii");
  const std::size_t n = dom.n();
  const double gam = adm.gamma;
  AdmissibilityReport rep;
  rep.seed = seed;

  ConditionResult c0;
  c0.name = "C0";
  c0.fitted = std::max(params.a / (static_cast<double>(n) - 1.0), 1.0);
  c0.declared = gam;
  c0.passes = gam > c0.fitted;
  rep.conditions.push_back(c0);

  const auto fanA = fan_points(dom, sample_count, seed, false);
  const auto fanB = fan_points(dom, sample_count, seed + 1, true);
  auto shift = [n](std::vector<std::vector<double>> pts) {
    for (auto& x : pts) x[n - 1] += 1.0;
    return pts;
  };
  const auto fanA1 = shift(fanA), fanB1 = shift(fanB);
  std::vector<double> gr(n);

  auto c1 = [&](const std::vector<double>& x) { return W.value(x) / std::pow(norm(N, x), gam); };
  auto c2 = [&](const std::vector<double>& x) { return W.value(x) / (1.0 + std::pow(norm(N, x), gam)); };
  auto c3 = [&](const std::vector<double>& x) { return g.value(x) / (1.0 + std::pow(norm(N, x), gam)); };
  auto c4 = [&](const std::vector<double>& x) {
    g.grad(x, gr);
    return dual_norm(N, gr) / (1.0 + std::pow(norm(N, x), gam - 1.0));
  };

  auto check = [&](const char* name, double declared, bool lower, const std::vector<std::vector<double>>& A,
                   const std::vector<std::vector<double>>& B, auto f) {
    ConditionResult c;
    c.name = name;
    const Extreme ea = extreme_over(A, lower, f);
    c.fitted = ea.value;
    Extreme verify;
    if (declared > 0.0) {
      c.declared = declared;
      const Extreme eb = extreme_over(B, lower, f);
      verify = (lower ? eb.value < ea.value : eb.value > ea.value) ? eb : ea;
    } else {
      c.declared = lower ? 0.99 * ea.value : 1.01 * ea.value;
      verify = extreme_over(B, lower, f);
    }
    c.witness = verify.at;
    c.passes = std::isfinite(c.declared) && (lower ? (c.declared > 0.0 && c.declared <= verify.value)
                                                   : c.declared >= verify.value);
    rep.conditions.push_back(c);
  };
  check("C1", adm.A1, true, fanA1, fanB1, c1);
  check("C2", adm.A2, false, fanA1, fanB1, c2);
  check("C3", adm.A3, true, fanA, fanB, c3);
  check("C4", adm.A4, false, fanA, fanB, c4);

  const GrowthScan gs = dom.growth_scan(adm.growth_C, adm.growth_R);
  ConditionResult cg;
  cg.name = "growth";
  cg.declared = adm.growth_C;
  cg.fitted = gs.fitted_C;
  cg.passes = gs.passes;
  cg.witness = gs.witness;
  rep.conditions.push_back(cg);
  return rep;
}

EquivalenceReport equivalence_scan(const ExtGridFn& g, const ExtGridFn& W,
                                   const std::function<void(std::span<const double>, std::span<double>)>& grad_g,
                                   const std::function<double(std::span<const double>)>& W_conj,
                                   std::span<const double> h_grid) {
  const std::size_t n = g.dim();
  const double nd = static_cast<double>(n);
  if (W.dim() != n) throw InvalidInput("equivalence scan: dimension mismatch");
  auto mass = [nd](const ExtGridFn& f) { return f.trapezoid([nd](double v) { return std::pow(v, -nd); }); };
  require_normalised(mass(g), "g");
  require_normalised(mass(W), "W");
  EquivalenceReport rep;
  rep.phi0 = mass(g);
  rep.min_phi = kInf;
  double h_small = kInf, phi_small = 0.0;
  for (double h : h_grid) {
    if (!(h >= 0.0)) throw InvalidInput("equivalence scan needs h >= 0");
    const double ph = h == 0.0 ? rep.phi0 : mass(hopflax_apply(g, W, h).values);
    rep.h.push_back(h);
    rep.phi.push_back(ph);
    rep.min_phi = std::min(rep.min_phi, ph);
    if (h > 0.0 && h < h_small) {
      h_small = h;
      phi_small = ph;
    }
  }
  if (std::isfinite(h_small)) rep.derivative_fd = (phi_small - rep.phi0) / h_small;
  std::vector<double> x(n), gr(n);
  double s = 0.0, sa = 0.0;
  for (auto i : g.finite_indices()) {
    g.grid().point(i, x);
    grad_g(x, gr);
    const double v = W_conj(gr) / std::pow(g[i], nd + 1.0);
    const double w = g.grid().trapezoid_weight(i);
    s += w * v;
    sa += w * std::abs(v);
  }
  rep.derivative_integral = nd * s;
  rep.derivative_scale = nd * sa;
  return rep;
}

}  // namespace epiconvex
