// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/uq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dirom/linalg.hpp"
#include "dirom/transport.hpp"

namespace dirom {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (stream + 1));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<ParamPoint> sample_uniform(std::size_t n, std::uint64_t seed,
                                       const ParamDomain& domain) {
  require(n >= 1, "sample count must be positive");
  std::vector<ParamPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].mu1 = domain.mu1_lo + (domain.mu1_hi - domain.mu1_lo) * uniform01(seed, i, 0);
    out[i].mu2 = domain.mu2_lo + (domain.mu2_hi - domain.mu2_lo) * uniform01(seed, i, 1);
  }
  return out;
}

double relative_error(const Trajectory& hfm, const Trajectory& rom) {
  if (hfm.snapshots.size() != rom.snapshots.size() || !(hfm.grid == rom.grid))
    fail(ErrorKind::invalid_argument, "trajectory mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < hfm.snapshots.size(); ++k) {
    const Snapshot& a = hfm.snapshots[k];
    const Snapshot& b = rom.snapshots[k];
    if (std::abs(a.t - b.t) > 1e-9) fail(ErrorKind::invalid_argument, "trajectory times differ");
    if (a.t <= 0.0) continue;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      if (std::abs(a.cells[i]) < 1e-13) continue;
      worst = std::max(worst, std::abs(a.cells[i] - b.cells[i]) / std::abs(a.cells[i]));
    }
  }
  return worst;
}

FieldStats field_statistics(const std::vector<const Snapshot*>& snapshots) {
  if (snapshots.size() < 2) fail(ErrorKind::invalid_argument, "field statistics need two samples");
  const std::size_t n = snapshots.front()->cells.size();
  FieldStats st;
  st.count = snapshots.size();
  st.mean.assign(n, 0.0);
  st.var.assign(n, 0.0);
  for (const Snapshot* s : snapshots) {
    require(s->cells.size() == n, "snapshot length mismatch");
    for (std::size_t i = 0; i < n; ++i) st.mean[i] += s->cells[i];
  }
  for (double& m : st.mean) m /= static_cast<double>(st.count);
  for (const Snapshot* s : snapshots)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = s->cells[i] - st.mean[i];
      st.var[i] += d * d;
    }
  for (double& v : st.var) v /= static_cast<double>(st.count - 1);
  return st;
}

ShockQoi shock_qois(const Snapshot& s, const Grid1D& grid, double tol_rel) {
  // Interior profile only: the inflow jump carries no shock information.
  require(!s.cells.empty(), "empty snapshot");
  const auto pieces = decompose(differentiate(s, grid, s.cells.front()), tol_rel);
  // Neighbouring pieces of equal sign are one feature split by a flat cell.
  struct Run {
    int sign;
    double mass, moment;
  };
  std::vector<Run> runs;
  for (const Piece& p : pieces) {
    if (!runs.empty() && runs.back().sign == p.sign) {
      runs.back().mass += p.mass;
      runs.back().moment += p.mass * p.centroid;
    } else {
      runs.push_back({p.sign, p.mass, p.mass * p.centroid});
    }
  }
  if (runs.size() != 3 || runs[0].sign != 1 || runs[1].sign != -1 || runs[2].sign != 1)
    fail(ErrorKind::numerical, "no unique shock piece: signature " + signature_of(pieces).str());
  return {runs[1].moment / runs[1].mass, std::abs(runs[1].mass)};
}

double Kde2D::integral() const {
  if (xs.size() < 2 || ys.size() < 2) return 0.0;
  const double cell = (xs[1] - xs[0]) * (ys[1] - ys[0]);
  double s = 0.0;
  for (double v : density.data) s += v;
  return s * cell;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

Kde2D kde2d(const std::vector<std::array<double, 2>>& samples, std::size_t nx, std::size_t ny) {
  require(samples.size() >= 2, "KDE needs at least two samples");
  require(nx >= 2 && ny >= 2, "KDE grid needs at least two points per axis");
  std::vector<double> a, b;
  for (const auto& s : samples) {
    a.push_back(s[0]);
    b.push_back(s[1]);
  }
  const double sa = stddev_of(a), sb = stddev_of(b);
  if (!(sa > 0.0) || !(sb > 0.0)) fail(ErrorKind::numerical, "degenerate KDE dimension");
  const double factor = std::pow(static_cast<double>(samples.size()), -1.0 / 6.0);
  Kde2D k;
  k.hx = sa * factor;
  k.hy = sb * factor;
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double x0 = *amin - 3.0 * k.hx, x1 = *amax + 3.0 * k.hx;
  const double y0 = *bmin - 3.0 * k.hy, y1 = *bmax + 3.0 * k.hy;
  for (std::size_t i = 0; i < nx; ++i)
    k.xs.push_back(x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx - 1));
  for (std::size_t j = 0; j < ny; ++j)
    k.ys.push_back(y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny - 1));
  k.density = Matrix(nx, ny);
  std::vector<double> gx(nx), gy(ny);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double z = (k.xs[i] - s[0]) / k.hx;
      gx[i] = std::exp(-0.5 * z * z);
    }
    for (std::size_t j = 0; j < ny; ++j) {
      const double z = (k.ys[j] - s[1]) / k.hy;
      gy[j] = std::exp(-0.5 * z * z);
    }
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) k.density(i, j) += gx[i] * gy[j];
  }
  const double total = k.integral();
  for (double& v : k.density.data) v /= total;
  return k;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "correlation needs paired samples");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

std::vector<CorrelationWindow> windowed_correlation(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    std::size_t windows) {
  require(x.size() == y.size(), "correlation needs paired samples");
  require(windows >= 1 && x.size() >= 2 * windows, "too few samples for the window count");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<CorrelationWindow> out;
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t lo = w * idx.size() / windows, hi = (w + 1) * idx.size() / windows;
    std::vector<double> wx, wy;
    for (std::size_t k = lo; k < hi; ++k) {
      wx.push_back(x[idx[k]]);
      wy.push_back(y[idx[k]]);
    }
    out.push_back({wx.front(), wx.back(), wx.size(), pearson(wx, wy)});
  }
  return out;
}

namespace {

std::array<double, 2> to_unit(const ParamPoint& p, const ParamDomain& box) {
  return {2.0 * (p.mu1 - box.mu1_lo) / (box.mu1_hi - box.mu1_lo) - 1.0,
          2.0 * (p.mu2 - box.mu2_lo) / (box.mu2_hi - box.mu2_lo) - 1.0};
}

double monomial(const std::array<double, 2>& z, int a, int b) {
  return std::pow(z[0], a) * std::pow(z[1], b);
}

}  // namespace

double Poly2Surrogate::evaluate(const ParamPoint& p) const {
  const auto z = to_unit(p, box);
  double s = 0.0;
  for (std::size_t c = 0; c < coefficients.size(); ++c)
    s += coefficients[c] * monomial(z, exponents[c].first, exponents[c].second);
  return s;
}

Poly2Surrogate polyfit2d(const std::vector<ParamPoint>& mu, const std::vector<double>& y,
                         int degree, const ParamDomain& box) {
  require(degree >= 0, "degree must be non-negative");
  require(mu.size() == y.size(), "sample/target count mismatch");
  Poly2Surrogate s;
  s.degree = degree;
  s.box = box;
  for (int t = 0; t <= degree; ++t)
    for (int a = t; a >= 0; --a) s.exponents.emplace_back(a, t - a);
  const std::size_t n = mu.size(), p = s.exponents.size();
  if (n < p) fail(ErrorKind::invalid_argument, "fewer samples than polynomial coefficients");
  Matrix design(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = to_unit(mu[i], box);
    for (std::size_t c = 0; c < p; ++c)
      design(i, c) = monomial(z, s.exponents[c].first, s.exponents[c].second);
  }
  s.coefficients = HouseholderQr(design).solve(y);
  const double ym = mean_of(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - s.evaluate(mu[i]);
    ss_res += r * r;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  s.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return s;
}

}  // namespace dirom
