#include <algorithm>
#include <cmath>

#include "epiconvex/hopflax.hpp"

namespace epiconvex {

namespace {

GridSpec sum_grid(const GridSpec& a, const GridSpec& b) {
  if (a.dim() != b.dim()) throw InvalidInput("infconv: dimension mismatch");
  if (!a.same_spacing(b)) throw InvalidInput("infconv: grids must share spacing");
  std::vector<double> lo(a.dim()), hi(a.dim());
  std::vector<std::size_t> res(a.dim());
  for (std::size_t d = 0; d < a.dim(); ++d) {
    res[d] = a.res[d] + b.res[d] - 1;
    lo[d] = a.lo[d] + b.lo[d];
    hi[d] = lo[d] + static_cast<double>(res[d] - 1) * a.step(d);
  }
  return GridSpec(lo, hi, res);
}

// Offset of a node of `src` inside the sum grid, so that out = off_f + off_g.
std::vector<std::size_t> offsets(const GridSpec& src, const GridSpec& out,
                                 const std::vector<std::size_t>& nodes) {
  const auto st = out.strides();
  std::vector<std::size_t> off(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto idx = src.unravel(nodes[k]);
    std::size_t o = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) o += idx[d] * st[d];
    off[k] = o;
  }
  return off;
}

InfConvResult finish(GridSpec grid, std::vector<double> vals, std::vector<std::size_t> arg, Sign sign) {
  InfConvResult r;
  r.all_infinite = std::none_of(vals.begin(), vals.end(), [](double v) { return v < kInf; });
  r.values = ExtGridFn(std::move(grid), std::move(vals), sign);
  r.argmin = std::move(arg);
  return r;
}

Sign result_sign(const ExtGridFn& f, const ExtGridFn& g) {
  return f.sign() == Sign::nonnegative && g.sign() == Sign::nonnegative ? Sign::nonnegative : Sign::any;
}

// 1-D case with g convex on a contiguous finite interval [c, d]: the cost
// f[i] + g[k - i] is Monge, so the leftmost argmin is nondecreasing in k.
void monge_rows(const ExtGridFn& f, const ExtGridFn& g, std::size_t c, std::size_t d,
                std::vector<double>& out, std::vector<std::size_t>& arg, std::size_t klo,
                std::size_t khi, std::size_t ilo, std::size_t ihi) {
  if (klo > khi) return;
  const std::size_t k = klo + (khi - klo) / 2;
  const std::size_t rf = f.size();
  // valid i: k - d <= i <= k - c
  std::size_t a = k >= d ? k - d : 0;
  a = std::max(a, ilo);
  std::size_t b = std::min(ihi, rf - 1);
  if (k < c) b = 0;  // empty below
  const bool nonempty = k >= c && a <= std::min(b, k - c);
  if (nonempty) b = std::min(b, k - c);
  double best = kInf;
  std::size_t bi = kNoIndex;
  if (nonempty) {
    for (std::size_t i = a; i <= b; ++i) {
      const double v = f[i] + g[k - i];
      if (v < best) {
        best = v;
        bi = i;
      }
    }
  }
  out[k] = best;
  arg[k] = bi;
  const std::size_t left_hi = bi == kNoIndex ? ihi : bi;
  const std::size_t right_lo = bi == kNoIndex ? ilo : bi;
  if (k > klo) monge_rows(f, g, c, d, out, arg, klo, k - 1, ilo, left_hi);
  monge_rows(f, g, c, d, out, arg, k + 1, khi, right_lo, ihi);
}

bool contiguous_finite(const ExtGridFn& g, std::size_t& c, std::size_t& d) {
  const auto& fin = g.finite_indices();
  if (fin.empty()) return false;
  c = fin.front();
  d = fin.back();
  return d - c + 1 == fin.size();
}

}  // namespace

InfConvResult infconv_reference(const ExtGridFn& f, const ExtGridFn& g) {
  GridSpec out = sum_grid(f.grid(), g.grid());
  std::vector<double> vals(out.size(), kInf);
  std::vector<std::size_t> arg(out.size(), kNoIndex);
  const auto& ff = f.finite_indices();
  const auto& gf = g.finite_indices();
  const auto of = offsets(f.grid(), out, ff);
  const auto og = offsets(g.grid(), out, gf);
  for (std::size_t a = 0; a < ff.size(); ++a) {
    const double fv = f[ff[a]];
    for (std::size_t b = 0; b < gf.size(); ++b) {
      const std::size_t k = of[a] + og[b];
      const double v = fv + g[gf[b]];
      if (v < vals[k]) {
        vals[k] = v;
        arg[k] = ff[a];
      }
    }
  }
  return finish(std::move(out), std::move(vals), std::move(arg), result_sign(f, g));
}

InfConvResult infconv(const ExtGridFn& f, const ExtGridFn& g) {
  std::size_t c = 0, d = 0;
  if (f.dim() == 1 && g.dim() == 1 && !f.finite_indices().empty() && contiguous_finite(g, c, d) &&
      g.grid_convex(0.0)) {
    GridSpec out = sum_grid(f.grid(), g.grid());
    std::vector<double> vals(out.size(), kInf);
    std::vector<std::size_t> arg(out.size(), kNoIndex);
    monge_rows(f, g, c, d, vals, arg, 0, out.size() - 1, 0, f.size() - 1);
    return finish(std::move(out), std::move(vals), std::move(arg), result_sign(f, g));
  }
  return infconv_reference(f, g);
}

DomainSumReport domain_sum_check(const ExtGridFn& f, const ExtGridFn& g) {
  const InfConvResult r = infconv(f, g);
  const GridSpec& out = r.values.grid();
  std::vector<std::uint8_t> sum(out.size(), 0);
  const auto of = offsets(f.grid(), out, f.finite_indices());
  const auto og = offsets(g.grid(), out, g.finite_indices());
  for (auto a : of)
    for (auto b : og) sum[a + b] = 1;
  DomainSumReport rep;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const bool fin = r.values.is_finite(k);
    if (fin != (sum[k] != 0)) {
      if (rep.mismatches == 0) rep.witness = out.point(k);
      ++rep.mismatches;
    }
  }
  return rep;
}

}  // namespace epiconvex
