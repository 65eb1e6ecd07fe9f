#include "epiconvex/sharpconst.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace epiconvex {

namespace {

void require_integrable(double alpha, std::size_t n) {
  if (!(alpha > static_cast<double>(n)))
    throw InvalidInput("moment integral diverges: alpha must exceed n");
}

double rel(double err, double value) { return value != 0.0 ? std::abs(err / value) : kInf; }

// Tail model of f^r (r-th power of the value envelope) outside radius rho; K = 0
// when the support lies inside, K = inf when no envelope is known.
TailModel value_tail(const Decay& d, double r, double rho) {
  if (d.support_radius <= rho) return {0.0, 0.0};
  if (d.K_value == 0.0) return {kInf, d.kappa * r};
  return {std::pow(d.K_value, r), d.kappa * r};
}

TailModel grad_tail(const Decay& d, double p, double rho) {
  if (d.support_radius <= rho) return {0.0, 0.0};
  if (d.K_grad == 0.0) return {kInf, (d.kappa + 1.0) * p};
  return {std::pow(d.K_grad, p), (d.kappa + 1.0) * p};
}

struct Moments {
  QuadResult I_ap, I_pa1, B;
};

Moments moments(const BBLParams& P, const EpigraphDomain& dom, const NormSpec& N, const ShearBox& box) {
  const std::size_t n = dom.n();
  const double alpha_ap = P.a * P.p / (P.p - 1.0);
  const double alpha_pa1 = P.p * (P.a - 1.0) / (P.p - 1.0);
  const double c = norm_lower_constant(N, n);
  const TailModel tails[2] = {{std::pow(c, -alpha_ap), alpha_ap}, {std::pow(c, -alpha_pa1), alpha_pa1}};
  auto I = integrate_region_multi_est(
      dom, Shear::omega(), box, 2,
      [&](std::span<const double> x, std::span<double> out) {
        double buf[8];
        std::vector<double> heap;
        double* xe = buf;
        if (n > 8) {
          heap.resize(n);
          xe = heap.data();
        }
        std::copy(x.begin(), x.end(), xe);
        xe[n - 1] += 1.0;
        const double r = norm(N, std::span<const double>(xe, n));
        out[0] = std::pow(r, -alpha_ap);
        out[1] = std::pow(r, -alpha_pa1);
      },
      tails);
  Moments m;
  m.I_ap = I[0];
  m.I_pa1 = I[1];
  // B = integral over Omega_1 of W^{1-a} with W = C |x|^q / q, taken directly on
  // a grid of half the spacing so that it shares no quadrature with I_pa1.
  const double C = P.q * std::pow(m.I_ap.value, 1.0 / P.a);
  const double coef = std::pow(C / P.q, 1.0 - P.a);
  const double expo = P.q * (1.0 - P.a);
  m.B = integrate_region_est(
      dom, Shear::omega_shift(1.0), box.refined(),
      [&](std::span<const double> x) { return coef * std::pow(norm(N, x), expo); },
      TailModel{coef * std::pow(c, expo), -expo});
  return m;
}

double rel_err(const QuadResult& r) { return rel(r.error_estimate(), r.value); }

SharpConstants constants_with_error(const BBLParams& P, const EpigraphDomain& dom, const NormSpec& N,
                                    const QuadSpec& quad) {
  P.validate();
  const Moments m = moments(P, dom, N, quad.box(dom.n()));
  SharpConstants k = assemble_constants(P, m.I_ap.value, m.I_pa1.value, m.B.value);
  k.error_estimate = rel_err(m.I_ap) + rel_err(m.I_pa1) + rel_err(m.B);
  return k;
}

}  // namespace

QuadResult i_alpha(const EpigraphDomain& dom, const NormSpec& N, double alpha, const QuadSpec& quad) {
  const std::size_t n = dom.n();
  require_integrable(alpha, n);
  const ShearBox box = quad.box(n);
  std::vector<double> xe(n);
  const double c = norm_lower_constant(N, n);
  return integrate_region_est(
      dom, Shear::omega(), box,
      [&](std::span<const double> x) {
        std::copy(x.begin(), x.end(), xe.begin());
        xe[n - 1] += 1.0;
        return std::pow(norm(N, xe), -alpha);
      },
      TailModel{std::pow(c, -alpha), alpha});
}

PowerCostNormalization normalize_power_cost(const EpigraphDomain& dom, const NormSpec& N, double q,
                                            double a, const QuadSpec& quad) {
  if (!(q > 1.0)) throw InvalidInput("power cost needs q > 1");
  const std::size_t n = dom.n();
  const QuadResult I = i_alpha(dom, N, q * a, quad);
  PowerCostNormalization out;
  out.I = I.value;
  out.C = q * std::pow(I.value, 1.0 / a);
  const double C = out.C;
  out.direct = integrate_region(dom, Shear::omega_shift(1.0), quad.box(n), [&](std::span<const double> x) {
    return std::pow(C * std::pow(norm(N, x), q) / q, -a);
  });
  out.error_estimate = rel(I.error_estimate(), I.value) / a;
  return out;
}

SmoothFn power_cost(double C, double q, const NormSpec& N) {
  if (!(C > 0.0) || !(q > 1.0)) throw InvalidInput("power cost needs C > 0 and q > 1");
  SmoothFn W;
  W.value = [C, q, N](std::span<const double> x) { return C * std::pow(norm(N, x), q) / q; };
  W.grad = [C, q, N](std::span<const double> x, std::span<double> g) {
    const double r = norm(N, x);
    if (r == 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return;
    }
    const auto ng = norm_gradient(N, x);
    const double s = C * std::pow(r, q - 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = s * ng[i];
  };
  return W;
}

SharpConstants assemble_constants(const BBLParams& P, double I_ap, double I_pa1, double B_direct) {
  P.validate();
  const double a = P.a, p = P.p, nd = static_cast<double>(P.n);
  SharpConstants k;
  k.I_ap = I_ap;
  k.I_pa1 = I_pa1;
  k.C = P.q * std::pow(I_ap, 1.0 / a);
  k.A = std::pow(k.C, 1.0 - p) * (a - 1.0) / p * std::pow(p / (a - p), p);
  k.B = B_direct;
  k.B_identity = std::pow(I_ap, (1.0 - a) / a) * I_pa1;
  k.u = (a - 1.0) / (a - p);
  k.v = (a - 1.0) / (p - 1.0);
  k.D = std::pow(k.A, k.u) / (std::pow(k.B * k.v, k.u - 1.0) * k.u);
  k.theta = (a - p) / (p * (a - nd - 1.0) + nd);
  k.q_trace = p * (a - 1.0) / (a - p);
  k.s = (a - nd) * (p - 1.0) / (a - p);
  const double ratio = (a - p) / (p - 1.0);
  if (a > nd) {
    // For the extremal, |grad f|^p integrates to ratio^p I_pa1 and f^q_trace to I_pa1.
    const double G = std::pow(ratio, p) * I_pa1;
    k.lambda_star = lambda_star(k.s, k.D * std::pow(G, k.u), (a - nd) * I_pa1);
    k.D_npa = std::pow(std::pow(ratio, 1.0 - k.theta) * std::pow(k.D, k.theta) / k.theta, 1.0 / k.q_trace);
  } else {
    k.lambda_star = 1.0;
    k.theta = 1.0;
    k.D_npa = std::pow(k.D, 1.0 / k.q_trace);
  }
  return k;
}

SharpConstants gns_constants(const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                             const QuadSpec& quad) {
  const ConeTestResult ct = dom.is_cone(256, 1e-9);
  if (!ct.is_cone) throw HypothesisViolation("requires a convex cone domain (" + ct.witness_kind + ")", ct.witness);
  return constants_with_error(params, dom, N, quad);
}

SharpConstants domain_constants(const BBLParams& params, const EpigraphDomain& dom, const NormSpec& N,
                                const QuadSpec& quad) {
  return constants_with_error(params, dom, N, quad);
}

double lambda_star(double s, double K1, double K2) {
  if (!(s > 0.0) || !(K1 > 0.0) || !(K2 > 0.0)) throw InvalidInput("lambda optimisation needs s, K1, K2 > 0");
  return std::pow(K2 / (s * K1), 1.0 / (s + 1.0));
}

double lambda_minimum(double s, double K1, double K2) {
  const double l = lambda_star(s, K1, K2);
  return std::pow(l, s) * K1 + K2 / l;
}

double ExtremalSpec::value(std::span<const double> x) const {
  std::vector<double> xe(x.begin(), x.end());
  xe[n - 1] += 1.0;
  return std::pow(epiconvex::norm(norm, xe), exponent);
}

void ExtremalSpec::grad(std::span<const double> x, std::span<double> g) const {
  std::vector<double> xe(x.begin(), x.end());
  xe[n - 1] += 1.0;
  const double r = epiconvex::norm(norm, xe);
  const auto ng = norm_gradient(norm, xe);
  const double s = exponent * std::pow(r, exponent - 1.0);
  for (std::size_t i = 0; i < n; ++i) g[i] = s * ng[i];
}

SmoothFn ExtremalSpec::as_function() const {
  SmoothFn f;
  const ExtremalSpec self = *this;
  f.value = [self](std::span<const double> x) { return self.value(x); };
  f.grad = [self](std::span<const double> x, std::span<double> g) { self.grad(x, g); };
  const double kappa = -exponent;
  const double c = norm_lower_constant(norm, n);
  f.decay.kappa = kappa;
  f.decay.K_value = std::pow(c, -kappa);
  f.decay.K_grad = kappa * std::pow(c, -kappa - 1.0);
  return f;
}

ExtremalSpec extremal_f(const BBLParams& params, const NormSpec& N) {
  if (!(params.a > params.p)) throw HypothesisViolation("extremal needs a > p");
  ExtremalSpec e;
  e.exponent = -(params.a - params.p) / (params.p - 1.0);
  e.n = params.n;
  e.norm = N;
  return e;
}

SmoothFn bump_function(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("bump radius must be positive");
  SmoothFn f;
  const double r2 = radius * radius;
  f.value = [center, r2](std::span<const double> x) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
    const double t = 1.0 - d2 / r2;
    return t > 0.0 ? t * t * t : 0.0;
  };
  f.grad = [center, r2](std::span<const double> x, std::span<double> g) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
    const double t = 1.0 - d2 / r2;
    const double s = t > 0.0 ? -6.0 * t * t / r2 : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = s * (x[i] - center[i]);
  };
  double c2 = 0.0;
  for (double v : center) c2 += v * v;
  f.decay.support_radius = std::sqrt(c2) + radius;
  return f;
}

ClaimCheck gradient_norm_claim_check(double gamma, const NormSpec& N, std::size_t n,
                                     std::size_t sample_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const bool kinky = N.kind != NormKind::euclidean && (N.p == 1.0 || std::isinf(N.p));
  ClaimCheck out;
  std::vector<double> x(n), xp(n), g(n);
  auto h = [&](std::span<const double> z) { return std::pow(norm(N, z), gamma); };
  std::size_t done = 0;
  while (done < sample_count) {
    for (auto& v : x) v = U(rng);
    if (norm(N, x) < 0.1) continue;
    if (kinky) {
      // resample near coordinate zeros (p = 1) or ties of the largest entry (p = inf)
      std::vector<double> a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(x[i]);
      std::sort(a.begin(), a.end());
      if (N.p == 1.0 && a.front() < 1e-3) continue;
      if (std::isinf(N.p) && n > 1 && a[n - 1] - a[n - 2] < 1e-3) continue;
    }
    const double step = 1e-6 * (1.0 + norm(N, x));
    for (std::size_t i = 0; i < n; ++i) {
      xp = x;
      xp[i] = x[i] + step;
      const double fp = h(xp);
      xp[i] = x[i] - step;
      const double fm = h(xp);
      g[i] = (fp - fm) / (2.0 * step);
    }
    const double lhs = dual_norm(N, g);
    const double rhs = std::abs(gamma) * std::pow(norm(N, x), gamma - 1.0);
    const double r = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    if (r > out.max_residual || out.worst_point.empty()) {
      out.max_residual = r;
      out.worst_point = x;
    }
    ++done;
  }
  return out;
}

namespace {

struct FIntegrals {
  QuadResult L, G, M, Beta;
};

FIntegrals f_integrals(const SmoothFn& f, const BBLParams& P, const EpigraphDomain& dom, const NormSpec& N,
                       const ShearBox& box, bool weighted) {
  const std::size_t n = dom.n();
  const double qt = P.p * (P.a - 1.0) / (P.a - P.p);
  const double rb = P.p * P.a / (P.a - P.p);
  const double rho = box_outer_radius(box);
  const double rho1 = boundary_outer_radius(box);
  const TailModel vt[3] = {grad_tail(f.decay, P.p, rho), value_tail(f.decay, qt, rho), value_tail(f.decay, rb, rho)};
  auto vol = integrate_region_multi_est(
      dom, Shear::omega(), box, 3,
      [&](std::span<const double> x, std::span<double> out) {
        std::vector<double> g(n);
        const double v = f.value(x);
        f.grad(x, g);
        out[0] = std::pow(dual_norm(N, g), P.p);
        out[1] = std::pow(v, qt);
        out[2] = std::pow(v, rb);
      },
      vt);
  const TailModel bt = value_tail(f.decay, qt, rho1);
  const auto bnd = integrate_boundary_est(
      dom, box,
      [&](std::span<const double> x1) {
        std::vector<double> pt(x1.begin(), x1.end());
        pt.push_back(dom.phi(x1));
        const double w = weighted ? boundary_weight(dom, x1) : 1.0;
        return std::pow(f.value(pt), qt) * w;
      },
      bt);
  return {bnd, vol[0], vol[1], vol[2]};
}

TraceReport trace_eval(const SmoothFn& f, const BBLParams& P, const EpigraphDomain& dom, const NormSpec& N,
                       const ShearBox& box, bool weighted) {
  const Moments m = moments(P, dom, N, box);
  SharpConstants k = assemble_constants(P, m.I_ap.value, m.I_pa1.value, m.B.value);
  k.error_estimate = rel_err(m.I_ap) + rel_err(m.I_pa1) + rel_err(m.B);
  const FIntegrals I = f_integrals(f, P, dom, N, box, weighted);
  TraceReport t;
  t.constants = k;
  t.G = I.G.value;
  t.M = I.M.value;
  t.L = I.L.value;
  t.beta = std::pow(I.Beta.value, (P.a - P.p) / (P.a * P.p));
  const double qt = k.q_trace;
  // Log-sensitivity of D to its quadrature inputs.
  const double relD = k.u * (P.p - 1.0) / P.a * rel_err(m.I_ap) + (k.u - 1.0) * rel_err(m.B);
  // The boundary error enters additively so that L = 0 keeps a finite estimate.
  const double errL = I.L.error_estimate();
  double rel_rhs = 0.0;
  if (!weighted) {
    t.lhs_boundary = std::pow(t.L, 1.0 / qt);
    t.rhs_value = k.D_npa * std::pow(t.G, k.theta / P.p) * std::pow(t.M, (1.0 - k.theta) / qt);
    rel_rhs = k.theta / P.p * rel_err(I.G) + (1.0 - k.theta) / qt * rel_err(I.M) + k.theta / qt * relD;
    t.ratio = t.lhs_boundary / t.rhs_value;
    t.quadrature_error =
        (std::pow(std::abs(t.L) + errL, 1.0 / qt) - t.lhs_boundary) / t.rhs_value + std::abs(t.ratio) * rel_rhs;
  } else {
    const double nd = static_cast<double>(P.n);
    const double t1 = k.D * std::pow(t.G, k.u);
    const double t2 = (P.a - nd) * t.M;
    t.lhs_boundary = t.L;
    t.rhs_value = t1 + t2;
    const double err_rhs = t1 * (k.u * rel_err(I.G) + relD) + (P.a - nd) * I.M.error_estimate();
    t.ratio = t.lhs_boundary / t.rhs_value;
    t.quadrature_error = errL / t.rhs_value + std::abs(t.ratio) * rel(err_rhs, t.rhs_value);
  }
  return t;
}

TraceReport trace_with_error(const SmoothFn& f, const BBLParams& P, const EpigraphDomain& dom,
                             const NormSpec& N, const QuadSpec& quad, bool weighted) {
  const ShearBox box = quad.box(dom.n());
  TraceReport r = trace_eval(f, P, dom, N, box, weighted);
  r.coarse_ratio = trace_eval(f, P, dom, N, box.coarsened(), weighted).ratio;
  return r;
}

}  // namespace

TraceReport trace_gn_check(const SmoothFn& f, const BBLParams& params, const EpigraphDomain& dom,
                           const NormSpec& N, const QuadSpec& quad) {
  params.validate();
  const ConeTestResult ct = dom.is_cone(256, 1e-9);
  if (!ct.is_cone)
    throw HypothesisViolation("trace check requires a convex cone domain; use the weighted check (" +
                                  ct.witness_kind + " witness)",
                              ct.witness);
  return trace_with_error(f, params, dom, N, quad, false);
}

TraceReport weighted_trace_check(const SmoothFn& f, const BBLParams& params, const EpigraphDomain& dom,
                                 const NormSpec& N, const QuadSpec& quad, double growth_C, double growth_R) {
  params.validate();
  const GrowthScan gs = dom.growth_scan(growth_C, growth_R);
  if (!gs.passes) {
    std::vector<double> w = gs.witness;
    w.push_back(gs.fitted_C);
    throw HypothesisViolation("growth condition fails: fitted ratio " + std::to_string(gs.fitted_C) +
                                  " exceeds C = " + std::to_string(growth_C),
                              w);
  }
  return trace_with_error(f, params, dom, N, quad, true);
}

YoungResidual young_equality_residual(const SmoothFn& f, const SharpConstants& k, const BBLParams& params,
                                      const EpigraphDomain& dom, const NormSpec& N, const QuadSpec& quad) {
  params.validate();
  const FIntegrals I = f_integrals(f, params, dom, N, quad.box(dom.n()), false);
  const double a = params.a, p = params.p;
  YoungResidual y;
  y.lhs = k.A / (k.B * k.v) * I.G.value;
  const double beta = std::pow(I.Beta.value, (a - p) / (a * p));
  y.rhs = std::pow(beta, p * (p - 1.0) * (k.v - 1.0) / (a - p));
  y.rhs_identity = std::pow(k.I_ap, (a - p) / a);
  y.residual = std::abs(y.lhs - y.rhs) / std::max(std::abs(y.lhs), std::abs(y.rhs));
  y.identity_residual = std::abs(y.rhs - y.rhs_identity) / std::max(std::abs(y.rhs), std::abs(y.rhs_identity));
  return y;
}

SmoothFn normalize_lr(const SmoothFn& f, double r, const EpigraphDomain& dom, const QuadSpec& quad) {
  const double I = integrate_region(dom, Shear::omega(), quad.box(dom.n()),
                                    [&](std::span<const double> x) { return std::pow(f.value(x), r); });
  if (!(I > 0.0) || !std::isfinite(I)) throw InvalidInput("function is not normalisable on the grid");
  return f.scaled(std::pow(I, -1.0 / r));
}

ApproxFamily approx_family(const SmoothFn& f, double eps, const BBLParams& params, double gamma,
                           const EpigraphDomain& dom, const NormSpec& N, const QuadSpec& quad) {
  params.validate();
  const std::size_t n = dom.n();
  const double a = params.a, p = params.p;
  if (!(gamma > std::max(1.0, a / (static_cast<double>(n) - 1.0))))
    throw HypothesisViolation("requires gamma > max(1, a/(n-1))");
  if (!(eps >= 0.0)) throw InvalidInput("eps must be nonnegative");
  const double r = a * p / (a - p);
  const double tail_pow = -gamma * (a - p) / p;
  const ShearBox box = quad.box(n);
  auto tail_fn = [N, n, tail_pow](std::span<const double> x) {
    std::vector<double> xe(x.begin(), x.end());
    xe[n - 1] += 1.0;
    return std::pow(norm(N, xe), tail_pow);
  };
  const EpiGrid Fg = EpiGrid::sample(dom, Shear::omega(), box, [&](std::span<const double> x) { return f.value(x); });
  const EpiGrid Tg = EpiGrid::sample(dom, Shear::omega(), box, tail_fn);
  const GridSpec& grid = Fg.grid();
  std::vector<double> wts(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) wts[i] = grid.trapezoid_weight(i);
  const double f_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += wts[i] * std::pow(Fg.values()[i], r);
    return s;
  }();
  if (std::abs(f_norm - 1.0) > 0.01) throw InvalidInput("approximation family needs the L^r norm of f equal to 1 within 1%");
  auto integral = [&](double C) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += wts[i] * std::pow(eps * Tg.values()[i] + C * Fg.values()[i], r);
    return s;
  };
  if (integral(0.0) >= 1.0) throw HypothesisViolation("eps too large: no C_eps exists");
  double lo = 0.0, hi = 1.0;
  while (integral(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw InvalidInput("approximation family: bracket search failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = integral(mid);
    if (v < 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * hi) break;
  }
  const double C = 0.5 * (lo + hi);
  SmoothFn fe;
  auto fv = f.value;
  auto fgrad = f.grad;
  fe.value = [fv, tail_fn, eps, C](std::span<const double> x) { return eps * tail_fn(x) + C * fv(x); };
  fe.grad = [fgrad, eps, C, N, n, tail_pow](std::span<const double> x, std::span<double> g) {
    fgrad(x, g);
    std::vector<double> xe(x.begin(), x.end());
    xe[n - 1] += 1.0;
    const double rr = norm(N, xe);
    const auto ng = norm_gradient(N, xe);
    const double s = eps * tail_pow * std::pow(rr, tail_pow - 1.0);
    for (std::size_t i = 0; i < n; ++i) g[i] = C * g[i] + s * ng[i];
  };
  // Envelope valid outside the support of f, which the box must cover.
  const double kap = -tail_pow, cN = norm_lower_constant(N, n);
  fe.decay.kappa = kap;
  fe.decay.K_value = eps * std::pow(cN, -kap);
  fe.decay.K_grad = eps * kap * std::pow(cN, -kap - 1.0);
  ApproxFamily out{eps, C, gamma, fe, EpiGrid::sample(dom, Shear::omega(), box, fe.value)};
  return out;
}

}  // namespace epiconvex
