#include "epiconvex/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epiconvex/parallel.hpp"

namespace epiconvex {

NormSpec NormSpec::p_norm(double p) {
  if (!(p >= 1.0)) throw InvalidInput("p_norm: p must be in [1, inf]");
  NormSpec N;
  N.kind = NormKind::p_norm;
  N.p = p;
  return N;
}

NormSpec NormSpec::weighted(double p, std::vector<double> w) {
  if (!(p >= 1.0)) throw InvalidInput("weighted_p_norm: p must be in [1, inf]");
  for (double v : w)
    if (!(v > 0.0 && v < kInf)) throw InvalidInput("weighted_p_norm: weights must be positive");
  NormSpec N;
  N.kind = NormKind::weighted_p_norm;
  N.p = p;
  N.weights = std::move(w);
  return N;
}

NormSpec NormSpec::from_spec(const std::string& kind, double p, std::vector<double> w) {
  if (kind == "euclidean") return euclidean();
  if (kind == "p_norm") return p_norm(p);
  if (kind == "weighted_p_norm") return weighted(p, std::move(w));
  throw InvalidInput("unknown norm kind '" + kind + "'");
}

std::string NormSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case NormKind::euclidean: os << "euclidean"; break;
    case NormKind::p_norm: os << "p_norm(p=" << p << ")"; break;
    case NormKind::weighted_p_norm: {
      os << "weighted_p_norm(p=" << p << ", w=[";
      for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? "," : "") << weights[i];
      os << "])";
      break;
    }
  }
  return os.str();
}

double NormSpec::dual_exponent() const {
  if (kind == NormKind::euclidean) return 2.0;
  if (p == 1.0) return kInf;
  if (!(p < kInf)) return 1.0;
  return p / (p - 1.0);
}

namespace {

double weight_of(const NormSpec& N, std::size_t i) {
  if (N.kind != NormKind::weighted_p_norm) return 1.0;
  if (i >= N.weights.size()) throw InvalidInput("weighted_p_norm: weight dimension mismatch");
  return N.weights[i];
}

double lp(std::span<const double> x, double p, const std::vector<double>* w) {
  auto wt = [&](std::size_t i) { return w ? (*w)[i] : 1.0; };
  if (!(p < kInf)) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, wt(i) * std::abs(x[i]));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += wt(i) * std::abs(x[i]);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += wt(i) * x[i] * x[i];
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += wt(i) * std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

NormSpec dual_spec(const NormSpec& N) {
  switch (N.kind) {
    case NormKind::euclidean: return NormSpec::euclidean();
    case NormKind::p_norm: return NormSpec::p_norm(N.dual_exponent());
    case NormKind::weighted_p_norm: {
      std::vector<double> w(N.weights.size());
      const double pd = N.dual_exponent();
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (N.p == 1.0 || !(N.p < kInf))
          w[i] = 1.0 / N.weights[i];
        else
          w[i] = std::pow(N.weights[i], -pd / N.p);
      }
      return NormSpec::weighted(pd, std::move(w));
    }
  }
  return NormSpec::euclidean();
}

double norm(const NormSpec& N, std::span<const double> x) {
  switch (N.kind) {
    case NormKind::euclidean: return lp(x, 2.0, nullptr);
    case NormKind::p_norm: return lp(x, N.p, nullptr);
    case NormKind::weighted_p_norm:
      if (N.weights.size() != x.size()) throw InvalidInput("weighted_p_norm: weight dimension mismatch");
      return lp(x, N.p, &N.weights);
  }
  return 0.0;
}

double dual_norm(const NormSpec& N, std::span<const double> y) {
  if (N.kind == NormKind::weighted_p_norm && N.weights.size() != y.size())
    throw InvalidInput("weighted_p_norm: weight dimension mismatch");
  return norm(dual_spec(N), y);
}

std::vector<double> norm_gradient(const NormSpec& N, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  const double r = norm(N, x);
  if (!(r > 0.0)) throw InvalidInput("norm_gradient: x = 0");
  const double p = N.kind == NormKind::euclidean ? 2.0 : N.p;
  auto sgn = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
  if (!(p < kInf)) {
    std::size_t k = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = weight_of(N, i) * std::abs(x[i]);
      if (v > best) {
        best = v;
        k = i;
      }
    }
    g[k] = weight_of(N, k) * sgn(x[k]);
    return g;
  }
  if (p == 1.0) {
    for (std::size_t i = 0; i < n; ++i) g[i] = weight_of(N, i) * sgn(x[i]);
    return g;
  }
  const double rp = std::pow(r, p - 1.0);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = weight_of(N, i) * sgn(x[i]) * std::pow(std::abs(x[i]), p - 1.0) / rp;
  return g;
}

SampledDual dual_norm_sampled(const NormSpec& N, std::span<const double> y, std::size_t directions) {
  const std::size_t n = y.size();
  if (n != 2 && n != 3) throw InvalidInput("dual_norm_sampled: dimension must be 2 or 3");
  if (directions < 8) throw InvalidInput("dual_norm_sampled: need at least 8 directions");
  SampledDual out;
  out.lower_bound = -kInf;
  std::vector<std::vector<double>> pts;
  pts.reserve(directions);
  for (std::size_t k = 0; k < directions; ++k) {
    std::vector<double> u(n);
    if (n == 2) {
      const double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(directions);
      u = {std::cos(a), std::sin(a)};
    } else {
      const double golden = M_PI * (3.0 - std::sqrt(5.0));
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(directions);
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * static_cast<double>(k);
      u = {rr * std::cos(a), rr * std::sin(a), z};
    }
    const double s = norm(N, u);
    for (auto& v : u) v /= s;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += u[i] * y[i];
    out.lower_bound = std::max(out.lower_bound, d);
    pts.push_back(std::move(u));
  }
  // Slack: |y|_2 times the largest Euclidean distance from any sample to its
  // nearest neighbour (the unit sphere of N is covered to that resolution).
  double gap = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    double nearest = kInf;
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (a == b) continue;
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (pts[a][i] - pts[b][i]) * (pts[a][i] - pts[b][i]);
      nearest = std::min(nearest, d2);
    }
    gap = std::max(gap, std::sqrt(nearest));
  }
  double y2 = 0.0;
  for (double v : y) y2 += v * v;
  out.gap_estimate = std::sqrt(y2) * gap;
  return out;
}

double power_cost_conjugate(double C, double q, const NormSpec& N, std::span<const double> y) {
  if (!(q > 1.0)) throw InvalidInput("power_cost_conjugate: q must be > 1");
  if (!(C > 0.0)) throw InvalidInput("power_cost_conjugate: C must be > 0");
  const double p = q / (q - 1.0);
  return std::pow(C, 1.0 - p) * std::pow(dual_norm(N, y), p) / p;
}

namespace {

// Core 1-D walk. Samples equal to +inf are skipped; when no finite sample
// exists every output is -inf and argmax is `none`.
void legendre_line(std::span<const double> x, std::span<const double> f, std::span<const double> slopes,
                   std::span<const std::size_t> order, std::vector<std::size_t>& hull,
                   std::span<double> out, std::span<std::size_t> arg, std::size_t none) {
  hull.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(f[i] < kInf)) continue;
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2], a = hull.back();
      const double cross = (x[a] - x[o]) * (f[i] - f[o]) - (f[a] - f[o]) * (x[i] - x[o]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  if (hull.empty()) {
    for (std::size_t j = 0; j < slopes.size(); ++j) {
      out[j] = -kInf;
      arg[j] = none;
    }
    return;
  }
  std::size_t k = 0;
  for (std::size_t jj = 0; jj < order.size(); ++jj) {
    const std::size_t j = order[jj];
    const double y = slopes[j];
    double vk = x[hull[k]] * y - f[hull[k]];
    while (k + 1 < hull.size()) {
      const double vn = x[hull[k + 1]] * y - f[hull[k + 1]];
      if (vn > vk) {
        ++k;
        vk = vn;
      } else {
        break;
      }
    }
    out[j] = vk;
    arg[j] = hull[k];
  }
}

std::vector<std::size_t> sorted_order(std::span<const double> s) {
  std::vector<std::size_t> o(s.size());
  std::iota(o.begin(), o.end(), 0);
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  return o;
}

}  // namespace

Legendre1DResult legendre_1d(std::span<const double> x, std::span<const double> f,
                             std::span<const double> slopes) {
  if (x.size() != f.size()) throw InvalidInput("legendre_1d: x and f sizes differ");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i])) throw InvalidInput("legendre_1d: x must be strictly increasing");
  for (double v : f)
    if (std::isnan(v) || v == -kInf) throw InvalidInput("legendre_1d: invalid sample");
  if (std::none_of(f.begin(), f.end(), [](double v) { return v < kInf; }))
    throw InvalidInput("legendre_1d: all samples are +inf (conjugate would be -inf)");
  Legendre1DResult r;
  r.values.resize(slopes.size());
  r.argmax.resize(slopes.size());
  std::vector<std::size_t> hull;
  const auto order = sorted_order(slopes);
  legendre_line(x, f, slopes, order, hull, r.values, r.argmax, x.size());
  return r;
}

ConjugateResult legendre_nd(const ExtGridFn& f, const GridSpec& dual) {
  const GridSpec& G = f.grid();
  const std::size_t n = G.dim();
  if (dual.dim() != n) throw InvalidInput("legendre_nd: dual dimension mismatch");
  if (f.finite_indices().empty()) throw InvalidInput("legendre_nd: f has no finite sample");
  for (std::size_t d = 0; d < n; ++d)
    if (G.res[d] > 1 && !(G.step(d) > 0.0)) throw InvalidInput("legendre_nd: degenerate primal axis");

  // Stage arrays: after processing axis d, axes < d are primal and axes >= d dual.
  std::vector<std::size_t> shape(G.res);
  std::vector<double> cur(f.values().begin(), f.values().end());
  std::vector<std::vector<std::size_t>> stage_arg(n);
  std::vector<std::vector<std::size_t>> stage_shape(n);
  const std::size_t none = static_cast<std::size_t>(-1);

  for (std::size_t d = n; d-- > 0;) {
    std::vector<std::size_t> nshape(shape);
    nshape[d] = dual.res[d];
    std::size_t total = 1;
    for (auto s : nshape) total *= s;
    std::vector<double> next(total);
    std::vector<std::size_t> arg(total);

    std::size_t inner = 1;  // stride of axis d (same in both shapes)
    for (std::size_t e = d + 1; e < n; ++e) inner *= shape[e];
    std::size_t outer = 1;
    for (std::size_t e = 0; e < d; ++e) outer *= shape[e];

    std::vector<double> xs(G.res[d]), ys(dual.res[d]);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = G.coord(d, i);
    for (std::size_t j = 0; j < ys.size(); ++j) ys[j] = dual.coord(d, j);
    const auto order = sorted_order(ys);
    const bool first = (d == n - 1);
    const std::size_t lines = outer * inner;

    parallel_for(lines, [&](std::size_t b, std::size_t e) {
      std::vector<double> line(xs.size()), out(ys.size());
      std::vector<std::size_t> la(ys.size()), hull;
      for (std::size_t l = b; l < e; ++l) {
        const std::size_t o = l / inner, in = l % inner;
        const std::size_t src = o * shape[d] * inner + in;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double v = cur[src + i * inner];
          line[i] = first ? v : -v;  // later stages maximise x y + B = x y - (-B)
        }
        legendre_line(xs, line, ys, order, hull, out, la, none);
        const std::size_t dst = o * nshape[d] * inner + in;
        for (std::size_t j = 0; j < ys.size(); ++j) {
          next[dst + j * inner] = out[j];
          arg[dst + j * inner] = la[j];
        }
      }
    });
    cur.swap(next);
    shape = nshape;
    stage_arg[d] = std::move(arg);
    stage_shape[d] = shape;
  }

  ConjugateResult r{ExtGridFn(dual, cur, Sign::any), dual, std::vector<std::size_t>(dual.size())};
  const auto pstr = G.strides();
  std::vector<std::size_t> jidx(n), cur_idx(n);
  for (std::size_t flat = 0; flat < dual.size(); ++flat) {
    jidx = dual.unravel(flat);
    cur_idx = jidx;  // mixed index: primal for axes < d, dual for axes >= d
    std::size_t primal_flat = 0;
    for (std::size_t d = 0; d < n; ++d) {
      const auto& shp = stage_shape[d];
      std::size_t s = 0;
      for (std::size_t e = 0; e < n; ++e) s = s * shp[e] + cur_idx[e];
      const std::size_t i = stage_arg[d][s];
      cur_idx[d] = i;
      primal_flat += i * pstr[d];
    }
    r.argmax[flat] = primal_flat;
  }
  return r;
}

ConjugateResult legendre_nd(const ExtGridFn& f, const std::vector<double>& dual_lo,
                            const std::vector<double>& dual_hi, const std::vector<std::size_t>& dual_res) {
  return legendre_nd(f, GridSpec(dual_lo, dual_hi, dual_res));
}

GridSpec default_dual_box(const ExtGridFn& f, const std::vector<std::size_t>& dual_res, double pad) {
  const GridSpec& G = f.grid();
  const std::size_t n = G.dim();
  if (dual_res.size() != n) throw InvalidInput("default_dual_box: resolution dimension mismatch");
  const auto st = G.strides();
  std::vector<double> lo(n, kInf), hi(n, -kInf);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.is_finite(i)) continue;
    const auto idx = G.unravel(i);
    for (std::size_t d = 0; d < n; ++d) {
      if (idx[d] + 1 >= G.res[d]) continue;
      const std::size_t j = i + st[d];
      if (!f.is_finite(j)) continue;
      const double s = (f[j] - f[i]) / G.step(d);
      lo[d] = std::min(lo[d], s);
      hi[d] = std::max(hi[d], s);
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (!(lo[d] <= hi[d])) {
      lo[d] = -1.0;
      hi[d] = 1.0;
    }
    const double span = std::max(hi[d] - lo[d], 1e-12);
    lo[d] -= pad * span;
    hi[d] += pad * span;
  }
  return GridSpec(lo, hi, dual_res);
}

double axis_convexity_defect(const ExtGridFn& f) {
  const GridSpec& G = f.grid();
  const auto st = G.strides();
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = G.unravel(i);
    for (std::size_t d = 0; d < G.dim(); ++d) {
      if (idx[d] == 0 || idx[d] + 1 >= G.res[d]) continue;
      const double a = f[i - st[d]], b = f[i], c = f[i + st[d]];
      if (!(a < kInf && b < kInf && c < kInf)) continue;
      if (std::isinf(a) || std::isinf(b) || std::isinf(c)) continue;
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
      worst = std::max(worst, -(a - 2.0 * b + c) / scale);
    }
  }
  return worst;
}

}  // namespace epiconvex
