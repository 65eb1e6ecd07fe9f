#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "epiconvex/sharpconst.hpp"

using namespace epiconvex;

namespace {

const NormSpec kEuc = NormSpec::euclidean();

// Polar reduction on the half-plane: I_alpha = (1/(alpha-2)) * int_0^pi sin^{alpha-2}.
double polar_i_alpha(double alpha) {
  std::vector<double> nodes, weights;
  gauss_legendre(64, nodes, weights);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = 0.5 * std::numbers::pi * (nodes[i] + 1.0);
    s += 0.5 * std::numbers::pi * weights[i] * std::pow(std::sin(t), alpha - 2.0);
  }
  return s / (alpha - 2.0);
}

}  // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, RichardsonRemovesLinearError) {
  const std::vector<double> h = {0.4, 0.2, 0.1};
  std::vector<double> v;
  for (double t : h) v.push_back(3.0 + 2.0 * t + t * t);
  const auto e = richardson(h, v);
  EXPECT_NEAR(e.limit, 3.0, 1e-12);
}

TEST(Quadrature, SpecValidation) {
  EXPECT_NO_THROW((QuadSpec{0.1, 10.0, 0.0}.validate()));
  EXPECT_THROW((QuadSpec{0.3, 1.0, 0.0}.validate()), InvalidInput);
  EXPECT_THROW((QuadSpec{0.2, 10.0, 0.0}.validate()), InvalidInput);  // 2R/dx = 100 but S/dx = 50
  EXPECT_THROW((QuadSpec{0.0, 10.0, 0.0}.validate()), InvalidInput);
}

TEST(Quadrature, PolarOracleAgreesWithClosedForms) {
  EXPECT_NEAR(polar_i_alpha(4.0), std::numbers::pi / 4.0, 1e-13);
  EXPECT_NEAR(polar_i_alpha(6.0), 3.0 * std::numbers::pi / 32.0, 1e-13);
}

TEST(IAlpha, HalfPlaneMatchesPolarOracle) {
  const auto dom = EpigraphDomain::halfspace(2);
  for (double alpha : {4.0, 6.0}) {
    const auto r = i_alpha(dom, kEuc, alpha, QuadSpec{0.1, 20.0, 0.0});
    EXPECT_LE(std::abs(r.value / polar_i_alpha(alpha) - 1.0), 0.005) << alpha;
    EXPECT_LE(std::abs(r.value - polar_i_alpha(alpha)), r.error_estimate() + 1e-6);
  }
}

TEST(IAlpha, ConeIsSmallerThanHalfPlane) {
  const QuadSpec quad{0.1, 20.0, 0.0};
  const double half = i_alpha(EpigraphDomain::halfspace(2), kEuc, 4.0, quad).value;
  const double cone = i_alpha(EpigraphDomain::cone(2, 1.0), kEuc, 4.0, quad).value;
  const double narrow = i_alpha(EpigraphDomain::cone(2, 2.0), kEuc, 4.0, quad).value;
  EXPECT_LT(cone, half);
  EXPECT_LT(narrow, cone);
  EXPECT_THROW(i_alpha(EpigraphDomain::halfspace(2), kEuc, 2.0, quad), InvalidInput);
}

TEST(PowerCost, NormalisationOnHalfPlane) {
  const auto nc = normalize_power_cost(EpigraphDomain::halfspace(2), kEuc, 3.0, 2.0, QuadSpec{0.05, 40.0, 0.0});
  const double oracle = 3.0 * std::sqrt(3.0 * std::numbers::pi / 32.0);
  EXPECT_LE(std::abs(nc.C / oracle - 1.0), 0.005);
  EXPECT_NEAR(nc.direct, 1.0, 0.01);
}

TEST(PowerCost, WiderConeHasLargerConstant) {
  const QuadSpec quad{0.1, 20.0, 0.0};
  const double wide = normalize_power_cost(EpigraphDomain::cone(2, 0.5), kEuc, 3.0, 2.0, quad).C;
  const double narrow = normalize_power_cost(EpigraphDomain::cone(2, 2.0), kEuc, 3.0, 2.0, quad).C;
  EXPECT_GT(wide, narrow);
}

TEST(Constants, AssemblyInDimensionThree) {
  const auto P = BBLParams::make(3, 4.0, 2.0);
  const auto k = assemble_constants(P, 0.5, 0.25, 1.0);
  EXPECT_NEAR(k.theta, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(k.q_trace, 3.0, 1e-15);
  EXPECT_NEAR(k.u, 1.5, 1e-15);
  EXPECT_NEAR(k.v, 3.0, 1e-15);
  EXPECT_NEAR(1.0 / k.u + 1.0 / k.v, 1.0, 1e-15);
}

TEST(Constants, ThetaIsOneAtCriticalExponent) {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto k = assemble_constants(BBLParams::make(2, 2.0, p), 0.3, 0.7, 1.1);
    EXPECT_EQ(k.theta, 1.0);
    EXPECT_EQ(k.lambda_star, 1.0);
  }
  const auto k3 = assemble_constants(BBLParams::make(3, 3.0, 2.0), 0.3, 0.7, 1.1);
  EXPECT_EQ(k3.theta, 1.0);
}

TEST(Constants, BothRoutesForBAgree) {
  const auto P = BBLParams::make(2, 2.5, 1.5);
  const auto k = gns_constants(P, EpigraphDomain::cone(2, 1.0), kEuc, QuadSpec{0.1, 40.0, 0.0});
  EXPECT_LE(std::abs(k.B - k.B_identity) / k.B, 0.01);
  EXPECT_THROW(gns_constants(P, EpigraphDomain::paraboloid(2, 1.0), kEuc, QuadSpec{0.1, 10.0, 0.0}),
               HypothesisViolation);
}

TEST(Constants, LambdaStarMinimises) {
  const double s = 0.7, K1 = 1.3, K2 = 0.4;
  const double l = lambda_star(s, K1, K2);
  const double m = lambda_minimum(s, K1, K2);
  for (double t : {0.9, 1.1}) EXPECT_GT(std::pow(l * t, s) * K1 + K2 / (l * t), m);
  EXPECT_NEAR(std::pow(l, s) * K1 + K2 / l, m, 1e-14);
}

TEST(Extremal, ExponentAndGradient) {
  const auto e = extremal_f(BBLParams::make(3, 3.0, 2.0), kEuc);
  EXPECT_DOUBLE_EQ(e.exponent, -1.0);
  const double x[3] = {0.3, -0.4, 0.2};
  EXPECT_NEAR(e.value(x), 1.0 / std::sqrt(0.09 + 0.16 + 1.44), 1e-15);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-2.0, 2.0), V(0.0, 3.0);
  for (const auto& N : {kEuc, NormSpec::p_norm(3.0)}) {
    const auto f = extremal_f(BBLParams::make(2, 2.5, 1.5), N).as_function();
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> p = {U(rng), V(rng)};
      const auto g = f.gradient(p);
      for (std::size_t d = 0; d < 2; ++d) {
        const double step = 1e-5 * (1.0 + std::abs(p[d]));
        auto a = p, b = p;
        a[d] += step;
        b[d] -= step;
        const double fd = (f.value(a) - f.value(b)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - g[d]) / std::max(std::abs(g[d]), 1e-3));
      }
    }
    EXPECT_LE(worst, 1e-5) << N.describe();
  }
}

TEST(Extremal, GradientIntegralIdentity) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto dom = EpigraphDomain::halfspace(2);
  const QuadSpec quad{0.1, 20.0, 0.0};
  const auto f = extremal_f(P, kEuc).as_function();
  const double lhs = integrate_region(dom, Shear::omega(), quad.box(2), [&](std::span<const double> x) {
    const auto g = f.gradient(x);
    return std::pow(dual_norm(kEuc, g), P.p);
  });
  const double ratio = (P.a - P.p) / (P.p - 1.0);
  const double I = i_alpha(dom, kEuc, P.p * (P.a - 1.0) / (P.p - 1.0), quad).value;
  // |grad f|^p = ratio^p |x+e|^{-3} here. Outside [-R,R] x [0,R] the polar integral of
  // r^{-3} is (1/R) times the integral of max(|cos t|, sin t) over [0, pi], i.e. 2 sqrt(2)/R.
  const double tail = std::pow(ratio, P.p) * 2.0 * std::sqrt(2.0) / quad.R;
  EXPECT_LE(std::abs((lhs + tail) / (std::pow(ratio, P.p) * I) - 1.0), 0.01);
}

TEST(GradientClaim, PowerNorms) {
  EXPECT_LE(gradient_norm_claim_check(2.0, kEuc, 2, 50).max_residual, 1e-6);
  EXPECT_LE(gradient_norm_claim_check(-1.0, NormSpec::p_norm(3.0), 2, 50).max_residual, 1e-6);
  EXPECT_LE(gradient_norm_claim_check(1.0, NormSpec::p_norm(1.5), 3, 50).max_residual, 1e-6);
}

TEST(Trace, ExtremalEqualityOnHalfPlane) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto r = trace_gn_check(extremal_f(P, kEuc).as_function(), P, EpigraphDomain::halfspace(2), kEuc,
                                QuadSpec{0.1, 40.0, 0.0});
  EXPECT_NEAR(r.ratio, 1.0, 0.02);
  EXPECT_LE(r.ratio - 1.0, r.quadrature_error);
}

TEST(Trace, BumpIsStrict) {
  const auto P = BBLParams::make(2, 2.5, 1.5);
  const auto r = trace_gn_check(bump_function({0.2, 0.4}, 1.0), P, EpigraphDomain::cone(2, 1.0), kEuc,
                                QuadSpec{0.1, 10.0, 0.0});
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_LT(r.ratio, 1.0);
}

TEST(Trace, ScalingInvarianceOnCones) {
  const auto P = BBLParams::make(2, 2.5, 1.5);
  const auto dom = EpigraphDomain::cone(2, 1.0);
  const QuadSpec quad{0.05, 10.0, 0.0};
  const auto f = bump_function({0.3, 0.8}, 1.0);
  const auto base = trace_gn_check(f, P, dom, kEuc, quad);
  for (double lambda : {0.5, 2.0}) {
    const auto r = trace_gn_check(f.dilated(lambda), P, dom, kEuc, quad);
    EXPECT_LE(std::abs(r.ratio - base.ratio), r.quadrature_error + base.quadrature_error + 1e-3) << lambda;
  }
}

TEST(Trace, RejectsNonCones) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  try {
    trace_gn_check(bump_function({0.0, 1.0}, 1.0), P, EpigraphDomain::paraboloid(2, 1.0), kEuc,
                   QuadSpec{0.1, 10.0, 0.0});
    FAIL() << "expected a hypothesis violation";
  } catch (const HypothesisViolation& e) {
    EXPECT_FALSE(e.witness().empty());
  }
}

TEST(WeightedTrace, HalfPlaneReducesToUnweighted) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto f = bump_function({0.4, 0.3}, 1.0);
  const QuadSpec quad{0.1, 10.0, 0.0};
  const auto a = trace_gn_check(f, P, EpigraphDomain::halfspace(2), kEuc, quad);
  const auto b = weighted_trace_check(f, P, EpigraphDomain::halfspace(2), kEuc, quad);
  // At a = n the additive form L <= D G^u has u = q_trace/p, so its ratio is the
  // q_trace-th power of the multiplicative one.
  EXPECT_NEAR(a.ratio, std::pow(b.ratio, 1.0 / a.constants.q_trace), 1e-12);
}

TEST(WeightedTrace, ConeAtCriticalExponentMatchesTraceCheck) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto f = bump_function({-0.3, 0.6}, 1.0);
  const QuadSpec quad{0.1, 10.0, 0.0};
  const auto a = trace_gn_check(f, P, EpigraphDomain::cone(2, 1.0), kEuc, quad);
  const auto b = weighted_trace_check(f, P, EpigraphDomain::cone(2, 1.0), kEuc, quad);
  EXPECT_NEAR(a.ratio, std::pow(b.ratio, 1.0 / a.constants.q_trace), 1e-12);
}

TEST(WeightedTrace, ParaboloidFailsGrowthGate) {
  const auto P = BBLParams::make(2, 2.5, 1.5);
  try {
    weighted_trace_check(bump_function({0.0, 1.0}, 1.0), P, EpigraphDomain::paraboloid(2, 1.0), kEuc,
                         QuadSpec{0.1, 10.0, 0.0});
    FAIL() << "expected a hypothesis violation";
  } catch (const HypothesisViolation& e) {
    ASSERT_EQ(e.witness().size(), 2u);
    EXPECT_NE(std::string(e.what()).find("fitted ratio"), std::string::npos);
  }
}

TEST(Young, ExtremalResidualSmallAndBumpPositive) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto dom = EpigraphDomain::halfspace(2);
  const QuadSpec quad{0.1, 40.0, 0.0};
  const auto k = gns_constants(P, dom, kEuc, quad);
  const auto ext = young_equality_residual(extremal_f(P, kEuc).as_function(), k, P, dom, kEuc, quad);
  EXPECT_LE(ext.residual, 0.02);
  EXPECT_LE(ext.identity_residual, 0.01);
  const auto bump = normalize_lr(bump_function({0.0, 0.5}, 1.0), P.a * P.p / (P.a - P.p), dom, quad);
  const auto b = young_equality_residual(bump, k, P, dom, kEuc, QuadSpec{0.1, 10.0, 0.0});
  EXPECT_GT(b.residual, 0.02);
}

TEST(ApproxFamily, ConstantsIncreaseTowardOne) {
  const auto P = BBLParams::make(2, 2.0, 1.5);
  const auto dom = EpigraphDomain::halfspace(2);
  const QuadSpec quad{0.1, 10.0, 0.0};
  const auto f = normalize_lr(bump_function({0.0, 0.5}, 1.0), P.a * P.p / (P.a - P.p), dom, quad);
  const double gamma = 3.0;
  EXPECT_NEAR(approx_family(f, 0.0, P, gamma, dom, kEuc, quad).C_eps, 1.0, 1e-6);
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.01}) {
    const double c = approx_family(f, eps, P, gamma, dom, kEuc, quad).C_eps;
    EXPECT_GT(c, prev);
    EXPECT_LT(c, 1.0);
    prev = c;
  }
}

TEST(Params, HypothesesAreEnforced) {
  try {
    BBLParams::make(2, 2.0, 3.0);
    FAIL();
  } catch (const HypothesisViolation& e) {
    EXPECT_NE(std::string(e.what()).find("n > p > 1"), std::string::npos);
  }
  try {
    BBLParams::make(3, 2.5, 1.5);
    FAIL();
  } catch (const HypothesisViolation& e) {
    EXPECT_NE(std::string(e.what()).find("a >= n"), std::string::npos);
  }
  EXPECT_THROW(BBLParams::make(2, 2.0, 1.0), HypothesisViolation);
  EXPECT_THROW(BBLParams::from_t(2, 2.0, 1.5, 1.0), HypothesisViolation);
  const auto P = BBLParams::from_t(2, 2.0, 1.5, 0.5);
  EXPECT_DOUBLE_EQ(P.h, 1.0);
  EXPECT_DOUBLE_EQ(P.q, 3.0);
}
