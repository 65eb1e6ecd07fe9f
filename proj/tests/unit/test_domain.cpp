#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epiconvex/domain.hpp"

using namespace epiconvex;

namespace {

std::vector<double> pt(double a, double b) { return {a, b}; }

// Brute-force support set: x in B_h iff x - h y lies in Omega for some y in Omega_1.
bool bh_brute(const EpigraphDomain& dom, std::span<const double> x, double h) {
  for (double y1 = -10.0; y1 <= 10.0; y1 += 0.0025) {
    const double y1v[1] = {y1};
    const double y2 = 1.0 + dom.phi(y1v);  // lowest y over this column minimises x2 - h y2
    const double z[2] = {x[0] - h * y1, x[1] - h * y2};
    if (dom.contains(z)) return true;
  }
  return false;
}

}  // namespace

TEST(Domain, ContainsExamples) {
  const auto half = EpigraphDomain::halfspace(2);
  EXPECT_TRUE(half.contains(pt(0.5, 0.2), 0.0));
  EXPECT_FALSE(half.contains(pt(0.5, 0.2), 0.3));
  const auto par = EpigraphDomain::paraboloid(2, 1.0);
  EXPECT_TRUE(par.contains(pt(1.0, 1.5), 0.4));
  EXPECT_FALSE(par.contains(pt(1.0, 1.3), 0.4));
}

TEST(Domain, SupportSetAtZeroIsOmega) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (const auto& d : {EpigraphDomain::halfspace(2), EpigraphDomain::cone(2), EpigraphDomain::paraboloid(2)}) {
    for (int k = 0; k < 200; ++k) {
      const auto x = pt(U(rng), U(rng));
      EXPECT_EQ(d.bh_membership(x, 0.0), d.contains(x));
    }
  }
}

TEST(Domain, ParaboloidSupportSetMatchesBruteForce) {
  const auto par = EpigraphDomain::paraboloid(2, 1.0);
  // 0.5 + 1.5 (1.2/1.5)^2 = 1.46 > 0.9: the point lies in neither set.
  const auto x = pt(1.2, 0.9);
  EXPECT_FALSE(par.bh_membership(x, 0.5));
  EXPECT_FALSE(par.contains(x, 0.5));
  EXPECT_EQ(par.bh_membership(x, 0.5), bh_brute(par, x, 0.5));
  // Between the boundaries: in B_h, not in Omega_h.
  const auto y = pt(1.2, 1.6);
  EXPECT_TRUE(par.bh_membership(y, 0.5));
  EXPECT_FALSE(par.contains(y, 0.5));
  EXPECT_TRUE(bh_brute(par, y, 0.5));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0), V(0.0, 4.0);
  int agree = 0, total = 0;
  for (int k = 0; k < 60; ++k) {
    const auto z = pt(U(rng), V(rng));
    const double b = par.bh_boundary(std::span<const double>(z.data(), 1), 0.5);
    if (std::abs(z[1] - b) < 1e-2) continue;  // too close for the brute-force step
    ++total;
    agree += par.bh_membership(z, 0.5) == bh_brute(par, z, 0.5);
  }
  EXPECT_EQ(agree, total);
}

TEST(Domain, ConeSupportSetEqualsShift) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0), H(0.0, 2.0);
  const auto cone = EpigraphDomain::cone(2, 1.0);
  for (int k = 0; k < 500; ++k) {
    const auto x = pt(U(rng), U(rng));
    const double h = H(rng);
    EXPECT_EQ(cone.bh_membership(x, h), cone.contains(x, h));
  }
}

TEST(Domain, ConeDichotomy) {
  EXPECT_TRUE(EpigraphDomain::halfspace(2).is_cone(500, 1e-9).is_cone);
  EXPECT_TRUE(EpigraphDomain::cone(2, 1.0).is_cone(500, 1e-9).is_cone);
  EXPECT_TRUE(EpigraphDomain::affine_max(2, {{{0.5}, 0.0}, {{-1.0}, 0.0}}).is_cone(500, 1e-9).is_cone);
  const auto r = EpigraphDomain::paraboloid(2, 1.0).is_cone(500, 1e-9);
  EXPECT_FALSE(r.is_cone);
  EXPECT_FALSE(r.witness.empty());
  EXPECT_GT(r.worst_violation, 0.0);
  // Offsets break homogeneity even though phi stays piecewise linear.
  EXPECT_FALSE(EpigraphDomain::affine_max(2, {{{0.0}, 0.0}, {{1.0}, -0.5}}).is_cone(500, 1e-9).is_cone);
}

TEST(Domain, ConeTestIsDeterministic) {
  const auto d = EpigraphDomain::paraboloid(2, 0.5);
  const auto a = d.is_cone(300, 1e-9, 11), b = d.is_cone(300, 1e-9, 11);
  EXPECT_EQ(a.worst_violation, b.worst_violation);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(Domain, WeightP) {
  const double x1[1] = {0.7}, neg[1] = {-2.5};
  EXPECT_DOUBLE_EQ(EpigraphDomain::cone(2, 1.0).weight_P(x1).value, 1.0);
  EXPECT_DOUBLE_EQ(EpigraphDomain::cone(2, 1.0).weight_P(neg).value, 1.0);
  EXPECT_DOUBLE_EQ(EpigraphDomain::halfspace(2).weight_P(x1).value, 1.0);
  const auto par = EpigraphDomain::paraboloid(2, 1.0);
  const double half[1] = {0.5}, two[1] = {2.0};
  EXPECT_DOUBLE_EQ(par.weight_P(half).value, 0.75);
  EXPECT_DOUBLE_EQ(par.weight_P(two).value, -3.0);
  const auto par3 = EpigraphDomain::paraboloid(3, 1.0);
  const double v[2] = {0.3, 0.4};
  EXPECT_NEAR(par3.weight_P(v).value, 0.75, 1e-15);
}

TEST(Domain, WeightPFlagsKinks) {
  const double zero[1] = {0.0};
  EXPECT_TRUE(EpigraphDomain::cone(2, 1.0).weight_P(zero).flagged);
  const auto poly = EpigraphDomain::affine_max(2, {{{0.0}, 0.0}, {{1.0}, -0.5}});
  const double kink[1] = {0.5}, smooth[1] = {2.0};
  EXPECT_TRUE(poly.weight_P(kink).flagged);
  EXPECT_FALSE(poly.weight_P(smooth).flagged);
  // 1 + phi - x phi' = 1 + 1.5 - 2 = 0.5 on the sloped piece.
  EXPECT_DOUBLE_EQ(poly.weight_P(smooth).value, 0.5);
}

TEST(Domain, SampleGridCounts) {
  const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {5, 5});
  const auto one = [](std::span<const double>) { return 1.0; };
  EXPECT_EQ(EpigraphDomain::halfspace(2).sample_grid(G, one).finite_indices().size(), 15u);
  EXPECT_EQ(EpigraphDomain::halfspace(2).sample_grid(G, one, 0.5).finite_indices().size(), 10u);

  const GridSpec H({-2.0, -1.0}, {2.0, 3.0}, {9, 9});
  const auto cone = EpigraphDomain::cone(2, 1.0);
  const auto f = cone.sample_grid(H, [](std::span<const double> x) { return std::hypot(x[0], x[1] + 1.0); });
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto p = H.point(i);
    EXPECT_EQ(f.is_finite(i), p[1] >= std::abs(p[0])) << p[0] << "," << p[1];
  }
  const auto holes = cone.sample_grid(H, [](std::span<const double> x) { return x[0] > 0.9 ? kInf : 1.0; });
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto p = H.point(i);
    if (p[0] > 0.9) EXPECT_FALSE(holes.is_finite(i));
  }
  const GridSpec below({-1.0, -3.0}, {1.0, -2.0}, {3, 3});
  EXPECT_THROW(cone.sample_grid(below, one), InvalidInput);
}

TEST(Domain, NodeSetsMatchMembership) {
  const GridSpec G({-2.0, -1.0}, {2.0, 4.0}, {21, 26});
  const auto par = EpigraphDomain::paraboloid(2, 1.0);
  const auto a = par.omega_h_nodes(G, 0.3), b = par.bh_nodes(G, 0.3);
  for (std::size_t i = 0; i < G.size(); ++i) {
    const auto p = G.point(i);
    EXPECT_EQ(a.mask[i] != 0, par.contains(p, 0.3));
    EXPECT_EQ(b.mask[i] != 0, par.bh_membership(p, 0.3));
    if (a.mask[i]) EXPECT_TRUE(b.mask[i]);  // Omega_h is inside B_h
  }
}

TEST(Domain, PerspectiveIsExactOnCones) {
  const auto cone = EpigraphDomain::cone(2, 2.0);
  const double x1[1] = {-1.5};
  EXPECT_DOUBLE_EQ(cone.perspective(x1, 3.0), cone.phi(x1));
  const auto par = EpigraphDomain::paraboloid(2, 1.0);
  EXPECT_DOUBLE_EQ(par.perspective(x1, 3.0), 0.75);
  EXPECT_THROW(par.perspective(x1, 0.0), InvalidInput);
}

TEST(Domain, Validation) {
  EXPECT_THROW(EpigraphDomain::halfspace(1), InvalidInput);
  EXPECT_THROW(EpigraphDomain::paraboloid(2, -1.0), InvalidInput);
  EXPECT_THROW(EpigraphDomain::affine_max(2, {{{1.0}, 0.5}}), InvalidInput);
  EXPECT_THROW(EpigraphDomain::affine_max(2, {}), InvalidInput);
  EXPECT_THROW(EpigraphDomain::from_spec("sphere", 2, {}), InvalidInput);
  const auto d = EpigraphDomain::from_spec("affine_max", 2, {0.0, 0.0, 1.0, -0.5});
  EXPECT_EQ(d.kind(), DomainKind::affine_max);
  const double x1[1] = {2.0};
  EXPECT_DOUBLE_EQ(d.phi(x1), 1.5);
}

TEST(Domain, GrowthScan) {
  const auto par = EpigraphDomain::paraboloid(2, 1.0).growth_scan(1.0, 1.0);
  EXPECT_FALSE(par.passes);
  EXPECT_NEAR(par.fitted_C, 2.0, 1e-3);
  EXPECT_FALSE(par.witness.empty());
  EXPECT_TRUE(EpigraphDomain::paraboloid(2, 1.0).growth_scan(2.0, 1.0).passes);
  const auto cone = EpigraphDomain::cone(2, 1.0).growth_scan(1.0, 1.0);
  EXPECT_TRUE(cone.passes);
  EXPECT_LE(cone.fitted_C, 1.0);
}
