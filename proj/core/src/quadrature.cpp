#include "epiconvex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epiconvex/parallel.hpp"

namespace epiconvex {

double Shear::psi(const EpigraphDomain& dom, std::span<const double> x1) const {
  if (kind == Kind::shift) return dom.phi(x1) + param;
  return dom.bh_boundary(x1, param);
}

std::vector<double> Shear::subgrad(const EpigraphDomain& dom, std::span<const double> x1) const {
  if (kind == Kind::shift) return dom.grad_phi(x1).grad;
  std::vector<double> z(x1.begin(), x1.end());
  for (auto& v : z) v /= (1.0 + param);
  return dom.grad_phi(z).grad;
}

ShearBox ShearBox::symmetric(std::size_t n, double R, double S, double dx) {
  if (n < 2) throw InvalidInput("sheared box needs n >= 2");
  if (!(R > 0.0) || !(S > 0.0) || !(dx > 0.0)) throw InvalidInput("sheared box needs R, S, dx > 0");
  ShearBox b;
  b.x1_lo.assign(n - 1, -R);
  b.x1_hi.assign(n - 1, R);
  b.s_max = S;
  const auto rx = static_cast<std::size_t>(std::llround(2.0 * R / dx)) + 1;
  const auto rs = static_cast<std::size_t>(std::llround(S / dx)) + 1;
  b.res.assign(n - 1, rx);
  b.res.push_back(rs);
  return b;
}

GridSpec ShearBox::grid() const {
  std::vector<double> lo = x1_lo, hi = x1_hi;
  lo.push_back(0.0);
  hi.push_back(s_max);
  return GridSpec(lo, hi, res);
}

ShearBox ShearBox::refined() const {
  ShearBox b = *this;
  for (auto& r : b.res) r = 2 * (r - 1) + 1;
  return b;
}

ShearBox ShearBox::coarsened() const {
  ShearBox b = *this;
  for (auto& r : b.res) {
    if (r < 3 || (r - 1) % 2 != 0) throw InvalidInput("coarsening needs odd resolutions >= 3");
    r = (r - 1) / 2 + 1;
  }
  return b;
}

ShearBox ShearBox::scaled(double factor) const {
  ShearBox b = *this;
  for (auto& v : b.x1_lo) v *= factor;
  for (auto& v : b.x1_hi) v *= factor;
  b.s_max *= factor;
  return b;
}

bool ShearBox::can_shrink(std::size_t k) const {
  return std::all_of(res.begin(), res.end(), [k](std::size_t r) { return r > k && (r - 1) % k == 0; });
}

ShearBox ShearBox::shrunk(std::size_t k) const {
  if (!can_shrink(k)) throw InvalidInput("shrinking needs resolutions r with (r - 1) divisible by k");
  ShearBox b = scaled(1.0 / static_cast<double>(k));
  for (auto& r : b.res) r = (r - 1) / k + 1;
  return b;
}

double ShearBox::dx() const { return grid().step(0); }

EpiGrid::EpiGrid(EpigraphDomain dom, Shear shear, ExtGridFn values)
    : dom_(std::move(dom)), shear_(shear), values_(std::move(values)) {
  if (values_.dim() != dom_.n()) throw InvalidInput("sheared grid dimension does not match domain");
}

EpiGrid EpiGrid::sample(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                        const std::function<double(std::span<const double>)>& fn) {
  const GridSpec g = box.grid();
  std::vector<double> vals(g.size());
  const std::size_t n = g.dim();
  parallel_for(g.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> p(n);
    for (std::size_t i = b; i < e; ++i) {
      g.point(i, p);
      p[n - 1] += shear.psi(dom, std::span<const double>(p.data(), n - 1));
      vals[i] = fn(p);
    }
  });
  return EpiGrid(dom, shear, ExtGridFn(g, std::move(vals)));
}

void EpiGrid::node_point(std::size_t flat, std::span<double> x) const {
  const std::size_t n = dim();
  grid().point(flat, x);
  x[n - 1] += shear_.psi(dom_, std::span<const double>(x.data(), n - 1));
}

std::vector<double> EpiGrid::node_point(std::size_t flat) const {
  std::vector<double> x(dim());
  node_point(flat, x);
  return x;
}

double EpiGrid::eval(std::span<const double> x) const {
  const std::size_t n = dim();
  double buf[8];
  std::vector<double> heap;
  double* p = buf;
  if (n > 8) {
    heap.resize(n);
    p = heap.data();
  }
  std::copy(x.begin(), x.end(), p);
  p[n - 1] = x[n - 1] - shear_.psi(dom_, std::span<const double>(p, n - 1));
  return values_.interpolate(std::span<const double>(p, n));
}

double EpiGrid::integrate(const std::function<double(double)>& F) const {
  return values_.trapezoid(F);
}

EpiGrid EpiGrid::scaled(double c) const { return EpiGrid(dom_, shear_, values_.scaled(c)); }

double power_tail_bound(const TailModel& t, std::size_t dim, double rho) {
  if (t.K == 0.0) return 0.0;
  const double d = static_cast<double>(dim);
  if (!(t.beta > d) || !(rho > 0.0)) return kInf;
  const double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
  return t.K * sphere * std::pow(rho, d - t.beta) / (t.beta - d);
}

double box_outer_radius(const ShearBox& box) {
  double rho = box.s_max;
  for (std::size_t d = 0; d < box.x1_lo.size(); ++d) {
    if (box.x1_lo[d] > 0.0 || box.x1_hi[d] < 0.0) return 0.0;
    rho = std::min({rho, -box.x1_lo[d], box.x1_hi[d]});
  }
  return rho;
}

double boundary_outer_radius(const ShearBox& box) {
  double rho = kInf;
  for (std::size_t d = 0; d < box.x1_lo.size(); ++d) {
    if (box.x1_lo[d] > 0.0 || box.x1_hi[d] < 0.0) return 0.0;
    rho = std::min({rho, -box.x1_lo[d], box.x1_hi[d]});
  }
  return rho;
}

namespace {

// Trapezoid sum with per-outer-row partials added in row order, so the result
// does not depend on the thread count.
double tensor_sum(const GridSpec& g, const std::function<double(std::span<const double>)>& F,
                  const std::function<void(std::span<double>)>& lift) {
  const std::size_t rows = g.res[0];
  const std::size_t per_row = g.size() / rows;
  std::vector<double> partial(rows, 0.0);
  parallel_for(rows, [&](std::size_t b, std::size_t e) {
    std::vector<double> p(g.dim());
    for (std::size_t r = b; r < e; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < per_row; ++k) {
        const std::size_t flat = r * per_row + k;
        g.point(flat, p);
        lift(p);
        const double w = g.trapezoid_weight(flat);
        if (w != 0.0) s += w * F(p);
      }
      partial[r] = s;
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

std::vector<double> tensor_sum_multi(
    const GridSpec& g, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F,
    const std::function<void(std::span<double>)>& lift) {
  const std::size_t rows = g.res[0];
  const std::size_t per_row = g.size() / rows;
  std::vector<double> partial(rows * count, 0.0);
  parallel_for(rows, [&](std::size_t b, std::size_t e) {
    std::vector<double> p(g.dim()), vals(count);
    for (std::size_t r = b; r < e; ++r) {
      double* acc = partial.data() + r * count;
      for (std::size_t k = 0; k < per_row; ++k) {
        const std::size_t flat = r * per_row + k;
        const double w = g.trapezoid_weight(flat);
        if (w == 0.0) continue;
        g.point(flat, p);
        lift(p);
        F(p, vals);
        for (std::size_t c = 0; c < count; ++c) acc[c] += w * vals[c];
      }
    }
  });
  std::vector<double> total(count, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < count; ++c) total[c] += partial[r * count + c];
  return total;
}

GridSpec x1_grid(const ShearBox& box) {
  const std::size_t m = box.x1_lo.size();
  std::vector<std::size_t> res(box.res.begin(), box.res.begin() + static_cast<std::ptrdiff_t>(m));
  return GridSpec(box.x1_lo, box.x1_hi, res);
}

}  // namespace

std::vector<double> integrate_region_multi(
    const EpigraphDomain& dom, Shear shear, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F) {
  if (box.res.size() != dom.n()) throw InvalidInput("box dimension does not match domain");
  const std::size_t n = dom.n();
  return tensor_sum_multi(box.grid(), count, F, [&](std::span<double> p) {
    p[n - 1] += shear.psi(dom, std::span<const double>(p.data(), n - 1));
  });
}

std::vector<double> integrate_boundary_multi(
    const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F) {
  return tensor_sum_multi(x1_grid(box), count, F, [](std::span<double>) {});
}

double integrate_region(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                        const std::function<double(std::span<const double>)>& F) {
  if (box.res.size() != dom.n()) throw InvalidInput("box dimension does not match domain");
  const std::size_t n = dom.n();
  return tensor_sum(box.grid(), F, [&](std::span<double> p) {
    p[n - 1] += shear.psi(dom, std::span<const double>(p.data(), n - 1));
  });
}

double integrate_boundary(const ShearBox& box, const std::function<double(std::span<const double>)>& F) {
  return tensor_sum(x1_grid(box), F, [](std::span<double>) {});
}

namespace {

bool far_field_applies(const EpigraphDomain& dom, const TailModel& t, std::size_t dim) {
  return dom.kind() != DomainKind::paraboloid && t.K > 0.0 && t.beta > static_cast<double>(dim);
}

using SumFn = std::function<std::vector<double>(const ShearBox&)>;

// Trapezoid sums on the box and its 2dx subgrid give a Richardson value. For
// the far field, sums on homothetic boxes of size 1, 1/2, 1/4, 1/8 are
// extrapolated under I(rho) = I - sum_j K_j rho^{-k-j}; the higher orders come
// from the offset e and the non-homogeneous part of the region.
std::vector<QuadResult> estimate(const SumFn& sum, const ShearBox& box, std::span<const TailModel> tails,
                                 std::size_t dim, double rho, const EpigraphDomain& dom) {
  const auto fine = sum(box);
  const auto coarse = sum(box.coarsened());
  if (tails.size() != fine.size()) throw InvalidInput("one tail model per integrand is required");
  bool any = false;
  for (const auto& t : tails) any = any || far_field_applies(dom, t, dim);
  std::vector<std::vector<double>> nested{fine};
  for (std::size_t k : {2u, 4u, 8u}) {
    if (!any || !box.can_shrink(k)) break;
    nested.push_back(sum(box.shrunk(k)));
  }
  std::vector<QuadResult> out(fine.size());
  for (std::size_t c = 0; c < fine.size(); ++c) {
    QuadResult& r = out[c];
    r.refinement_diff = std::abs(fine[c] - coarse[c]);
    r.value = fine[c] + (fine[c] - coarse[c]) / 3.0;
    if (!far_field_applies(dom, tails[c], dim) || nested.size() < 2) {
      r.tail_bound = power_tail_bound(tails[c], dim, rho);
      continue;
    }
    const double k = tails[c].beta - static_cast<double>(dim);
    std::vector<double> col(nested.size());
    for (std::size_t j = 0; j < nested.size(); ++j) col[j] = nested[j][c];
    double prev = col[0];
    for (std::size_t l = 1; l < nested.size(); ++l) {
      const double g = std::pow(2.0, k + static_cast<double>(l - 1));
      prev = col[0];
      for (std::size_t j = 0; j + l < nested.size(); ++j) col[j] = col[j] + (col[j] - col[j + 1]) / (g - 1.0);
    }
    r.far_field = col[0] - fine[c];
    r.value += r.far_field;
    r.tail_bound = std::abs(col[0] - prev);
  }
  return out;
}

}  // namespace

std::vector<QuadResult> integrate_region_multi_est(
    const EpigraphDomain& dom, Shear shear, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F, std::span<const TailModel> tails) {
  return estimate([&](const ShearBox& b) { return integrate_region_multi(dom, shear, b, count, F); }, box, tails,
                  dom.n(), box_outer_radius(box), dom);
}

std::vector<QuadResult> integrate_boundary_multi_est(
    const EpigraphDomain& dom, const ShearBox& box, std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& F, std::span<const TailModel> tails) {
  return estimate([&](const ShearBox& b) { return integrate_boundary_multi(b, count, F); }, box, tails, dom.n() - 1,
                  boundary_outer_radius(box), dom);
}

QuadResult integrate_region_est(const EpigraphDomain& dom, Shear shear, const ShearBox& box,
                                const std::function<double(std::span<const double>)>& F, const TailModel& tail) {
  return integrate_region_multi_est(
      dom, shear, box, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = F(x); },
      std::span<const TailModel>(&tail, 1))[0];
}

QuadResult integrate_boundary_est(const EpigraphDomain& dom, const ShearBox& box,
                                  const std::function<double(std::span<const double>)>& F, const TailModel& tail) {
  return integrate_boundary_multi_est(
      dom, box, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = F(x); },
      std::span<const TailModel>(&tail, 1))[0];
}

void gauss_legendre(std::size_t m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m == 0) throw InvalidInput("Gauss-Legendre needs at least one node");
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  const double md = static_cast<double>(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (md + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = md * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[m - 1 - i] = w;
  }
}

Extrapolation richardson(std::span<const double> h, std::span<const double> values) {
  if (h.size() != values.size() || h.empty()) throw InvalidInput("extrapolation needs matching, nonempty inputs");
  const std::size_t m = h.size();
  std::vector<double> P(values.begin(), values.end());
  Extrapolation out;
  out.limit = P[m - 1];
  // After pass k, P[i] holds the value at 0 of the interpolant through points i-k..i.
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = m - 1; i >= k; --i) {
      const double hi = h[i - k], hj = h[i];
      if (hi == hj) throw InvalidInput("extrapolation needs distinct step sizes");
      P[i] = (hi * P[i] - hj * P[i - 1]) / (hi - hj);
      if (i == k) break;
    }
  }
  out.limit = P[m - 1];
  out.last_correction = m >= 2 ? std::abs(P[m - 1] - P[m - 2]) : 0.0;
  return out;
}

}  // namespace epiconvex
