#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epiconvex/transforms.hpp"

using namespace epiconvex;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Exhaustive conjugate with the smallest maximiser.
Legendre1DResult brute_1d(std::span<const double> x, std::span<const double> f, std::span<const double> s) {
  Legendre1DResult r;
  for (double y : s) {
    double best = -kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(f[i] < kInf)) continue;
      const double v = x[i] * y - f[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    r.values.push_back(best);
    r.argmax.push_back(arg);
  }
  return r;
}

}  // namespace

TEST(Legendre1D, QuadraticIsSelfDual) {
  const auto x = linspace(-2.0, 2.0, 81);
  std::vector<double> f;
  for (double v : x) f.push_back(0.5 * v * v);
  const auto s = linspace(-1.0, 1.0, 41);
  const auto r = legendre_1d(x, f, s);
  const double dx = x[1] - x[0];
  for (std::size_t j = 0; j < s.size(); ++j) EXPECT_LE(std::abs(r.values[j] - 0.5 * s[j] * s[j]), dx * dx / 2.0);
}

TEST(Legendre1D, AbsoluteValueOnBoundedGrid) {
  const auto x = linspace(-2.0, 2.0, 9);
  std::vector<double> f;
  for (double v : x) f.push_back(std::abs(v));
  const std::vector<double> s = {0.5, 1.5, -1.5};
  const auto r = legendre_1d(x, f, s);
  EXPECT_EQ(r.values[0], 0.0);
  EXPECT_EQ(r.values[1], 1.0);  // (|y| - 1) * 2
  EXPECT_EQ(r.values[2], 1.0);
  const auto b = brute_1d(x, f, s);
  EXPECT_EQ(r.values, b.values);
  EXPECT_EQ(r.argmax, b.argmax);
}

TEST(Legendre1D, LinearFunctionTiesPickSmallestIndex) {
  const auto x = linspace(0.0, 1.0, 5);
  const auto r = legendre_1d(x, x, std::vector<double>{1.0});
  EXPECT_EQ(r.values[0], 0.0);
  EXPECT_EQ(r.argmax[0], 0u);
}

TEST(Legendre1D, MatchesBruteForceOnDyadicData) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> I(-16, 16);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(k % 11);
    std::vector<double> x(n), f(n), s;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(i) / 8.0 - 0.5;
      f[i] = k % 5 == 0 && i % 3 == 1 ? kInf : I(rng) / 16.0;  // nonconvex on purpose
    }
    for (int j = -12; j <= 12; ++j) s.push_back(j / 4.0);
    const auto r = legendre_1d(x, f, s);
    const auto b = brute_1d(x, f, s);
    EXPECT_EQ(r.values, b.values) << "fixture " << k;
    EXPECT_EQ(r.argmax, b.argmax) << "fixture " << k;
  }
}

TEST(Legendre1D, RejectsBadInput) {
  const std::vector<double> x = {0.0, 1.0}, bad = {1.0, 0.0};
  const std::vector<double> s = {0.0};
  EXPECT_THROW(legendre_1d(bad, x, s), InvalidInput);
  EXPECT_THROW(legendre_1d(x, std::vector<double>{kInf, kInf}, s), InvalidInput);
  EXPECT_THROW(legendre_1d(x, std::vector<double>{0.0, std::nan("")}, s), InvalidInput);
  EXPECT_THROW(legendre_1d(x, std::vector<double>{0.0}, s), InvalidInput);
}

TEST(LegendreND, QuadraticIsSelfDual) {
  const GridSpec G({-2.0, -2.0}, {2.0, 2.0}, {41, 41});
  const auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
  const GridSpec D({-1.0, -1.0}, {1.0, 1.0}, {21, 21});
  const auto r = legendre_nd(f, D);
  for (std::size_t j = 0; j < D.size(); ++j) {
    const auto y = D.point(j);
    EXPECT_LE(std::abs(r.values[j] - 0.5 * (y[0] * y[0] + y[1] * y[1])), 0.01);
  }
}

TEST(LegendreND, IndicatorOfOriginHasZeroConjugate) {
  const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {5, 5});
  const auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return x[0] == 0.0 && x[1] == 0.0 ? 0.0 : kInf; });
  const auto r = legendre_nd(f, GridSpec({-3.0, -3.0}, {3.0, 3.0}, {7, 7}));
  for (std::size_t j = 0; j < r.values.size(); ++j) {
    EXPECT_EQ(r.values[j], 0.0);
    EXPECT_EQ(r.argmax[j], 12u);
  }
}

TEST(LegendreND, MatchesExhaustiveOracleOn8x8) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> I(1, 8);
  for (int k = 0; k < 10; ++k) {
    const GridSpec G({-7.0 / 16.0, -7.0 / 16.0}, {7.0 / 16.0, 7.0 / 16.0}, {8, 8});
    const double a = I(rng) / 4.0, c = I(rng) / 4.0, d = (I(rng) - 4) / 8.0;
    const auto f = ExtGridFn::from_function(
        G, [&](std::span<const double> x) { return a * x[0] * x[0] + c * x[1] * x[1] + d * x[0]; }, Sign::any);
    const GridSpec D({-7.0 / 8.0, -7.0 / 8.0}, {7.0 / 8.0, 7.0 / 8.0}, {8, 8});
    const auto r = legendre_nd(f, D);
    for (std::size_t j = 0; j < D.size(); ++j) {
      const auto y = D.point(j);
      double best = -kInf;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < G.size(); ++i) {
        const auto x = G.point(i);
        const double v = x[0] * y[0] + x[1] * y[1] - f[i];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      EXPECT_EQ(r.values[j], best);
      EXPECT_EQ(r.argmax[j], arg);
    }
  }
}

TEST(LegendreND, FenchelYoungAndOrderReversal) {
  const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {21, 21});
  auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return x[0] * x[0] + 0.5 * std::abs(x[1]); });
  auto g = ExtGridFn::from_function(G, [](std::span<const double> x) { return x[0] * x[0] + 0.5 * std::abs(x[1]) + 0.1 * x[0] * x[0]; });
  const GridSpec D = default_dual_box(f, {21, 21});
  const auto fs = legendre_nd(f, D), gs = legendre_nd(g, D);
  for (std::size_t j = 0; j < D.size(); ++j) {
    EXPECT_GE(fs.values[j], gs.values[j]);  // f <= g implies f* >= g*
    const auto y = D.point(j);
    for (std::size_t i = 0; i < G.size(); i += 37) {
      const auto x = G.point(i);
      EXPECT_GE(f[i] + fs.values[j], x[0] * y[0] + x[1] * y[1] - 1e-12);
    }
  }
}

TEST(LegendreND, BiconjugateRecoversConvexWithinTolerance) {
  for (std::size_t res : {17u, 33u}) {
    const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {res, res});
    const auto f = ExtGridFn::from_function(
        G, [](std::span<const double> x) { return std::log(std::exp(x[0]) + std::exp(x[1])) + 0.3 * std::abs(x[0]); },
        Sign::any);
    const GridSpec D = default_dual_box(f, {res, res});
    const auto fss = legendre_nd(legendre_nd(f, D).values, G);
    const double tau = std::sqrt(8.0) * std::max(D.step(0), D.step(1));
    for (std::size_t i = 0; i < G.size(); ++i) {
      EXPECT_LE(fss.values[i], f[i] + 1e-12);  // f** <= f always
      EXPECT_LE(f[i] - fss.values[i], tau);
    }
  }
}

TEST(LegendreND, BiconjugateIsConvexEnvelopeOfNonconvexData) {
  const GridSpec G({-1.0}, {1.0}, {21});
  const auto f = ExtGridFn::from_function(G, [](std::span<const double> x) { return std::pow(x[0] * x[0] - 0.5, 2); }, Sign::any);
  const auto fss = legendre_nd(legendre_nd(f, default_dual_box(f, {201})).values, G);
  EXPECT_TRUE(fss.values.grid_convex(1e-9));
  const double mid[1] = {0.0};
  EXPECT_LT(fss.values.interpolate(mid), f.interpolate(mid) - 0.2);
}

TEST(Norms, DualNormExamples) {
  const std::vector<double> y = {3.0, 4.0}, z = {3.0, -4.0}, o = {1.0, 1.0};
  EXPECT_DOUBLE_EQ(dual_norm(NormSpec::euclidean(), y), 5.0);
  EXPECT_DOUBLE_EQ(dual_norm(NormSpec::p_norm(1.0), z), 4.0);
  EXPECT_NEAR(dual_norm(NormSpec::p_norm(3.0), o), std::pow(2.0, 1.0 / 1.5), 1e-14);
  const auto s = dual_norm_sampled(NormSpec::p_norm(3.0), o, 4096);
  EXPECT_LE(s.lower_bound, dual_norm(NormSpec::p_norm(3.0), o) + 1e-12);
  EXPECT_GE(s.lower_bound + s.gap_estimate, dual_norm(NormSpec::p_norm(3.0), o));
}

TEST(Norms, DualOfDualIsOriginal) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (const auto& N : {NormSpec::p_norm(1.0), NormSpec::p_norm(1.5), NormSpec::p_norm(4.0),
                        NormSpec::weighted(2.5, {1.0, 3.0})}) {
    const auto D = dual_spec(N);
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> x = {U(rng), U(rng)};
      EXPECT_NEAR(dual_norm(D, x), norm(N, x), 1e-12 * (1.0 + norm(N, x))) << N.describe();
    }
  }
}

TEST(Norms, DualNormAgreesWithSphereSampling) {
  const std::vector<double> y = {0.7, -1.3};
  for (const auto& N : {NormSpec::euclidean(), NormSpec::p_norm(1.0), NormSpec::p_norm(4.0),
                        NormSpec::weighted(2.0, {1.0, 4.0})}) {
    const auto s = dual_norm_sampled(N, y, 20000);
    const double d = dual_norm(N, y);
    EXPECT_LE(s.lower_bound, d + 1e-12);
    EXPECT_GE(s.lower_bound, d - 1e-3) << N.describe();
  }
}

TEST(Norms, Validation) {
  EXPECT_THROW(NormSpec::p_norm(0.5), InvalidInput);
  EXPECT_THROW(NormSpec::weighted(2.0, {1.0, 0.0}), InvalidInput);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(norm_gradient(NormSpec::euclidean(), zero), InvalidInput);
}

TEST(PowerCost, ConjugateExamples) {
  const std::vector<double> e1 = {1.0, 0.0}, two = {2.0, 0.0};
  EXPECT_DOUBLE_EQ(power_cost_conjugate(1.0, 2.0, NormSpec::euclidean(), e1), 0.5);
  EXPECT_DOUBLE_EQ(power_cost_conjugate(2.0, 2.0, NormSpec::euclidean(), two), 1.0);
  // sup over r >= 0 of r - r^3/3 is attained at r = 1.
  double sup = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double r = i * 1e-5;
    sup = std::max(sup, r - r * r * r / 3.0);
  }
  EXPECT_NEAR(power_cost_conjugate(1.0, 3.0, NormSpec::euclidean(), e1), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(sup, 2.0 / 3.0, 1e-9);
  EXPECT_THROW(power_cost_conjugate(1.0, 1.0, NormSpec::euclidean(), e1), InvalidInput);
}
