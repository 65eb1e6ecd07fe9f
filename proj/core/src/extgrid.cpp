#include "epiconvex/extgrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace epiconvex {

ExtValue::ExtValue(double v) : v_(v) {
  if (std::isnan(v)) throw InvalidInput("ExtValue: NaN");
  if (v < 0.0) throw InvalidInput("ExtValue: negative value " + std::to_string(v));
}

GridSpec::GridSpec(std::vector<double> lo_, std::vector<double> hi_, std::vector<std::size_t> res_)
    : lo(std::move(lo_)), hi(std::move(hi_)), res(std::move(res_)) {
  if (lo.size() != hi.size() || lo.size() != res.size() || res.empty())
    throw InvalidInput("GridSpec: inconsistent dimensions");
  for (std::size_t d = 0; d < res.size(); ++d) {
    if (res[d] == 0) throw InvalidInput("GridSpec: zero resolution");
    if (!(hi[d] >= lo[d])) throw InvalidInput("GridSpec: hi < lo");
    if (res[d] == 1 && hi[d] != lo[d]) throw InvalidInput("GridSpec: single node needs lo == hi");
  }
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (auto r : res) s *= r;
  return s;
}

std::vector<std::size_t> GridSpec::strides() const {
  std::vector<std::size_t> st(dim(), 1);
  for (std::size_t d = dim(); d-- > 1;) st[d - 1] = st[d] * res[d];
  return st;
}

std::vector<std::size_t> GridSpec::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t d = dim(); d-- > 0;) {
    idx[d] = flat % res[d];
    flat /= res[d];
  }
  return idx;
}

std::size_t GridSpec::ravel(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dim(); ++d) flat = flat * res[d] + idx[d];
  return flat;
}

std::vector<double> GridSpec::point(std::size_t flat) const {
  std::vector<double> x(dim());
  point(flat, x);
  return x;
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t d = dim(); d-- > 0;) {
    out[d] = coord(d, flat % res[d]);
    flat /= res[d];
  }
}

double GridSpec::trapezoid_weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t d = dim(); d-- > 0;) {
    const std::size_t i = flat % res[d];
    flat /= res[d];
    if (res[d] == 1) continue;
    const double h = step(d);
    w *= (i == 0 || i + 1 == res[d]) ? 0.5 * h : h;
  }
  return w;
}

bool GridSpec::same_spacing(const GridSpec& other, double rel_tol) const {
  if (other.dim() != dim()) return false;
  for (std::size_t d = 0; d < dim(); ++d) {
    const double a = step(d), b = other.step(d);
    if (res[d] == 1 || other.res[d] == 1) continue;
    if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
  }
  return true;
}

ExtGridFn::ExtGridFn(GridSpec grid, std::vector<double> values, Sign sign)
    : grid_(std::move(grid)), values_(std::move(values)), sign_(sign) {
  if (values_.size() != grid_.size())
    throw InvalidInput("ExtGridFn: values.size() != product of resolutions");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isnan(v) || v == -kInf || (sign_ == Sign::nonnegative && v < 0.0)) {
      std::ostringstream msg;
      msg << "ExtGridFn: invalid value " << v << " at node (";
      auto x = grid_.point(i);
      for (std::size_t d = 0; d < x.size(); ++d) msg << (d ? ", " : "") << x[d];
      msg << ")";
      throw InvalidInput(msg.str());
    }
  }
  rebuild_finite();
}

ExtGridFn ExtGridFn::from_function(const GridSpec& grid,
                                   const std::function<double(std::span<const double>)>& fn,
                                   Sign sign) {
  std::vector<double> vals(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    grid.point(i, x);
    vals[i] = fn(x);
  }
  return ExtGridFn(grid, std::move(vals), sign);
}

void ExtGridFn::rebuild_finite() {
  finite_.clear();
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] < kInf) finite_.push_back(i);
}

double ExtGridFn::interpolate(std::span<const double> x) const {
  const std::size_t n = grid_.dim();
  if (x.size() != n) throw InvalidInput("interpolate: dimension mismatch");
  constexpr std::size_t kMaxDim = 8;
  if (n > kMaxDim) throw InvalidInput("interpolate: dimension too large");
  std::size_t base[kMaxDim];
  double t[kMaxDim];
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t r = grid_.res[d];
    const double lo = grid_.lo[d];
    if (r == 1) {
      if (std::abs(x[d] - lo) > 1e-12 * (1.0 + std::abs(lo))) return kInf;
      base[d] = 0;
      t[d] = 0.0;
      continue;
    }
    const double h = grid_.step(d);
    double u = (x[d] - lo) / h;
    const double slack = 1e-9;
    if (u < -slack || u > static_cast<double>(r - 1) + slack) return kInf;
    u = std::clamp(u, 0.0, static_cast<double>(r - 1));
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= r - 1) i = r - 2;
    base[d] = i;
    t[d] = u - static_cast<double>(i);
  }
  const auto st = grid_.strides();
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t d = 0; d < n; ++d) {
      const bool up = (c >> (n - 1 - d)) & 1u;
      if (up && grid_.res[d] == 1) {
        w = 0.0;
        break;
      }
      w *= up ? t[d] : 1.0 - t[d];
      flat += (base[d] + (up ? 1 : 0)) * st[d];
    }
    if (w == 0.0) continue;
    const double v = values_[flat];
    if (!(v < kInf)) return kInf;
    acc += w * v;
  }
  return acc;
}

ExtGridFn ExtGridFn::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidInput("scaled: factor must be positive");
  std::vector<double> v(values_);
  for (auto& x : v)
    if (x < kInf) x *= c;
  return ExtGridFn(grid_, std::move(v), sign_);
}

double ExtGridFn::trapezoid(const std::function<double(double)>& F) const {
  double s = 0.0;
  for (auto i : finite_) s += grid_.trapezoid_weight(i) * F(values_[i]);
  return s;
}

bool ExtGridFn::grid_convex(double tol) const {
  const std::size_t n = dim();
  const auto st = grid_.strides();
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t r = grid_.res[d];
    if (r < 3) continue;
    const std::size_t lines = size() / r;
    for (std::size_t l = 0; l < lines; ++l) {
      // start index of line l along axis d
      std::size_t rem = l, start = 0;
      for (std::size_t e = n; e-- > 0;) {
        if (e == d) continue;
        start += (rem % grid_.res[e]) * st[e];
        rem /= grid_.res[e];
      }
      bool seen = false, closed = false;
      for (std::size_t i = 0; i < r; ++i) {
        const bool fin = values_[start + i * st[d]] < kInf;
        if (fin && closed) return false;
        if (!fin && seen) closed = true;
        seen = seen || fin;
      }
      for (std::size_t i = 1; i + 1 < r; ++i) {
        const double a = values_[start + (i - 1) * st[d]];
        const double b = values_[start + i * st[d]];
        const double c = values_[start + (i + 1) * st[d]];
        if (!(a < kInf && b < kInf && c < kInf)) continue;
        const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
        if (a - 2.0 * b + c < -tol * scale) return false;
      }
    }
  }
  return true;
}

namespace {

std::string format_value(double v) {
  if (!(v < kInf)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_value(const std::string& tok) {
  std::string s;
  for (char c : tok)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) throw InvalidInput("grid file: bad value '" + tok + "'");
  return v;
}

}  // namespace

void ExtGridFn::write(std::ostream& os) const {
  nlohmann::json header;
  header["dim"] = dim();
  nlohmann::json box = nlohmann::json::array();
  for (std::size_t d = 0; d < dim(); ++d) box.push_back({grid_.lo[d], grid_.hi[d]});
  header["box"] = box;
  header["resolution"] = grid_.res;
  os << header.dump() << '\n';
  const std::size_t row = grid_.res.back();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    os << format_value(values_[i]);
    os << (((i + 1) % row == 0) ? '\n' : ',');
  }
}

ExtGridFn ExtGridFn::read(std::istream& is, Sign sign) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("grid file: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("grid file: bad header: ") + e.what());
  }
  const std::size_t dim = header.at("dim").get<std::size_t>();
  std::vector<double> lo, hi;
  for (const auto& b : header.at("box")) {
    lo.push_back(b.at(0).get<double>());
    hi.push_back(b.at(1).get<double>());
  }
  auto res = header.at("resolution").get<std::vector<std::size_t>>();
  if (lo.size() != dim || res.size() != dim) throw InvalidInput("grid file: dim mismatch");
  GridSpec grid(lo, hi, res);
  std::vector<double> vals;
  vals.reserve(grid.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(parse_value(tok));
  }
  if (vals.size() != grid.size()) throw InvalidInput("grid file: value count mismatch");
  return ExtGridFn(std::move(grid), std::move(vals), sign);
}

void ExtGridFn::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path);
  write(os);
}

ExtGridFn ExtGridFn::load(const std::string& path, Sign sign) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read " + path);
  return read(is, sign);
}

std::size_t NodeSet::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

NodeSetComparison compare_node_sets(const NodeSet& a, const NodeSet& b) {
  if (!(a.grid == b.grid)) throw InvalidInput("compare_node_sets: grids differ");
  NodeSetComparison out;
  const auto& g = a.grid;
  const std::size_t n = g.dim();
  const auto st = g.strides();
  for (std::size_t i = 0; i < a.mask.size(); ++i) {
    if (a.mask[i] == b.mask[i]) continue;
    ++out.mismatches;
    const auto idx = g.unravel(i);
    bool near = false;
    const std::size_t nb = static_cast<std::size_t>(std::pow(3, n));
    for (std::size_t c = 0; c < nb && !near; ++c) {
      std::size_t rem = c, flat = 0;
      bool ok = true;
      for (std::size_t d = n; d-- > 0;) {
        const long off = static_cast<long>(rem % 3) - 1;
        rem /= 3;
        const long j = static_cast<long>(idx[d]) + off;
        if (j < 0 || j >= static_cast<long>(g.res[d])) {
          ok = false;
          break;
        }
        flat += static_cast<std::size_t>(j) * st[d];
      }
      if (ok && b.mask[flat] != b.mask[i]) near = true;
    }
    if (!near) {
      ++out.mismatches_beyond_one_cell;
      if (out.witness.empty()) out.witness = g.point(i);
    }
  }
  return out;
}

}  // namespace epiconvex
