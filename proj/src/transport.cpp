// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "dirom/common.hpp"

namespace dirom {

double Density::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return dx * s;
}

Density Piece::restricted(const Density& like) const {
  Density d{like.dx, like.x0, std::vector<double>(like.values.size(), 0.0)};
  for (std::size_t k = first; k <= last; ++k) d.values[k] = values[k - first];
  return d;
}

std::string Signature::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (i) s += ",";
    s += signs[i] > 0 ? "+" : "-";
  }
  return s + "]";
}

double Quantile::at(double q) const {
  if (q <= levels.front()) return positions.front();
  if (q >= levels.back()) return positions.back();
  const auto it = std::upper_bound(levels.begin(), levels.end(), q);
  const std::size_t j = static_cast<std::size_t>(it - levels.begin()) - 1;
  const double w = (q - levels[j]) / (levels[j + 1] - levels[j]);
  return positions[j] + w * (positions[j + 1] - positions[j]);
}

double inflow_value(const Snapshot& s) {
  return s.t > 0.0 ? s.mu.mu1 : (s.cells.empty() ? 0.0 : s.cells.front());
}

Density differentiate(const Snapshot& s, const Grid1D& grid, double u_boundary) {
  const std::size_t n = grid.n_cells;
  require(s.cells.size() == n, "snapshot length does not match grid");
  const double dx = grid.dx();
  Density d{dx, grid.x_lo, std::vector<double>(n + 1, 0.0)};
  d.values[0] = (s.cells[0] - u_boundary) / dx;
  for (std::size_t k = 1; k < n; ++k) d.values[k] = (s.cells[k] - s.cells[k - 1]) / dx;
  return d;
}

Density differentiate(const Snapshot& s, const Grid1D& grid) {
  return differentiate(s, grid, inflow_value(s));
}

std::vector<Piece> decompose(const Density& d, double tol_rel) {
  require(tol_rel > 0.0 && tol_rel < 1.0, "tol_rel must lie in (0, 1)");
  double peak = 0.0;
  for (double v : d.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return {};
  const double cut = tol_rel * peak;
  auto sgn = [&](double v) { return std::abs(v) <= cut ? 0 : (v > 0.0 ? 1 : -1); };

  std::vector<Piece> runs;
  double total = 0.0;
  const std::size_t n = d.values.size();
  for (std::size_t i = 0; i < n;) {
    const int s = sgn(d.values[i]);
    if (s == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && sgn(d.values[j + 1]) == s) ++j;
    Piece p;
    p.sign = s;
    p.first = i;
    p.last = j;
    p.values.assign(d.values.begin() + static_cast<std::ptrdiff_t>(i),
                    d.values.begin() + static_cast<std::ptrdiff_t>(j + 1));
    double sum = 0.0, moment = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
      sum += d.values[k];
      moment += d.position(k) * d.values[k];
    }
    p.mass = d.dx * sum;
    p.centroid = moment / sum;
    total += std::abs(p.mass);
    runs.push_back(std::move(p));
    i = j + 1;
  }
  std::vector<Piece> out;
  for (auto& p : runs)
    if (std::abs(p.mass) >= tol_rel * total) out.push_back(std::move(p));
  std::stable_sort(out.begin(), out.end(),
                   [](const Piece& a, const Piece& b) { return a.centroid < b.centroid; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].ordinal = static_cast<int>(i + 1);
  return out;
}

Signature signature_of(const std::vector<Piece>& pieces) {
  Signature s;
  for (const auto& p : pieces) s.signs.push_back(p.sign);
  return s;
}

Signature signature(const Snapshot& s, const Grid1D& grid, double tol_rel) {
  return signature_of(decompose(differentiate(s, grid), tol_rel));
}

Quantile to_quantile(const Piece& p, const Density& like, std::size_t K) {
  require(K >= 2, "quantile needs at least two levels");
  const std::size_t len = p.last - p.first + 1;
  double total = 0.0;
  for (double v : p.values) total += std::abs(v);
  if (total == 0.0) fail(ErrorKind::invalid_argument, "zero-mass piece has no quantile");

  std::vector<double> cdf(len + 1, 0.0), edge(len + 1);
  for (std::size_t j = 0; j <= len; ++j)
    edge[j] = like.x0 + (static_cast<double>(p.first + j) - 0.5) * like.dx;
  for (std::size_t j = 0; j < len; ++j) cdf[j + 1] = cdf[j] + std::abs(p.values[j]) / total;
  cdf[len] = 1.0;

  Quantile q;
  q.sign = p.sign;
  q.mass = std::abs(p.mass);
  q.levels = cdf;
  for (std::size_t k = 0; k < K; ++k)
    q.levels.push_back(static_cast<double>(k) / static_cast<double>(K - 1));
  std::sort(q.levels.begin(), q.levels.end());
  q.levels.erase(std::unique(q.levels.begin(), q.levels.end()), q.levels.end());

  q.positions.resize(q.levels.size());
  for (std::size_t i = 0; i < q.levels.size(); ++i) {
    const double lv = q.levels[i];
    auto it = std::upper_bound(cdf.begin(), cdf.end(), lv);
    std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    j = j == 0 ? 0 : std::min(j - 1, len - 1);
    const double width = cdf[j + 1] - cdf[j];
    const double frac = width > 0.0 ? std::clamp((lv - cdf[j]) / width, 0.0, 1.0) : 0.0;
    q.positions[i] = edge[j] + frac * like.dx;
  }
  for (std::size_t i = 1; i < q.positions.size(); ++i)
    q.positions[i] = std::max(q.positions[i], q.positions[i - 1]);
  return q;
}

void check_convex(const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= -1e-12)) fail(ErrorKind::invalid_argument, "weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10) fail(ErrorKind::invalid_argument, "weights must sum to 1");
}

Quantile interpolate_quantiles(const std::vector<const Quantile*>& qs,
                               const std::vector<double>& weights) {
  require(!qs.empty() && qs.size() == weights.size(), "quantile/weight count mismatch");
  check_convex(weights);
  const int sign = qs.front()->sign;
  for (const Quantile* q : qs)
    if (q->sign != sign) fail(ErrorKind::invalid_argument, "mixed signs in displacement interpolation");

  Quantile out;
  out.sign = sign;
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (weights[j] <= 0.0) continue;
    active.push_back(j);
    out.levels.insert(out.levels.end(), qs[j]->levels.begin(), qs[j]->levels.end());
    out.mass += weights[j] * qs[j]->mass;
  }
  std::sort(out.levels.begin(), out.levels.end());
  out.levels.erase(std::unique(out.levels.begin(), out.levels.end()), out.levels.end());
  out.positions.assign(out.levels.size(), 0.0);

  for (std::size_t j : active) {
    const Quantile& q = *qs[j];
    const double w = weights[j];
    std::size_t s = 0;
    for (std::size_t i = 0; i < out.levels.size(); ++i) {
      const double lv = out.levels[i];
      while (s + 2 < q.levels.size() && q.levels[s + 1] <= lv) ++s;
      const double width = q.levels[s + 1] - q.levels[s];
      const double frac = std::clamp((lv - q.levels[s]) / width, 0.0, 1.0);
      out.positions[i] += w * (q.positions[s] + frac * (q.positions[s + 1] - q.positions[s]));
    }
  }
  for (std::size_t i = 1; i < out.positions.size(); ++i)
    out.positions[i] = std::max(out.positions[i], out.positions[i - 1]);
  return out;
}

Density rasterize(const Quantile& q, double dx, double x0, std::size_t n_points) {
  Density d{dx, x0, std::vector<double>(n_points, 0.0)};
  const double left = x0 - 0.5 * dx;
  auto cell_of = [&](double x) {
    const double c = std::floor((x - left) / dx);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n_points - 1)));
  };
  for (std::size_t s = 0; s + 1 < q.levels.size(); ++s) {
    const double m = q.mass * (q.levels[s + 1] - q.levels[s]);
    if (m == 0.0) continue;
    const double a = q.positions[s], b = q.positions[s + 1];
    const std::size_t ka = cell_of(a), kb = cell_of(b);
    if (ka == kb || b - a <= 1e-14 * dx) {
      d.values[ka] += m;
      continue;
    }
    for (std::size_t k = ka; k <= kb; ++k) {
      const double lo = std::max(a, left + static_cast<double>(k) * dx);
      const double hi = std::min(b, left + static_cast<double>(k + 1) * dx);
      if (hi > lo) d.values[k] += m * (hi - lo) / (b - a);
    }
  }
  for (double& v : d.values) v *= q.sign / dx;
  return d;
}

Density displacement_interp(const std::vector<const Quantile*>& qs,
                            const std::vector<double>& weights, double dx, double x0,
                            std::size_t n_points) {
  return rasterize(interpolate_quantiles(qs, weights), dx, x0, n_points);
}

PieceSet analyze(const Snapshot& s, const Grid1D& grid, double tol_rel, std::size_t K) {
  PieceSet ps;
  const Density d = differentiate(s, grid);
  ps.pieces = decompose(d, tol_rel);
  ps.signature = signature_of(ps.pieces);
  for (const auto& p : ps.pieces) ps.quantiles.push_back(to_quantile(p, d, K));
  return ps;
}

std::vector<BasisCandidate> interp_by_pieces(const std::vector<const PieceSet*>& sets,
                                             const std::vector<double>& weights,
                                             const Grid1D& grid) {
  require(!sets.empty() && sets.size() == weights.size(), "snapshot/weight count mismatch");
  check_convex(weights);
  const Signature& sig = sets.front()->signature;
  for (const PieceSet* s : sets)
    if (!(s->signature == sig)) fail(ErrorKind::invalid_argument, "signature mismatch");
  if (sig.empty()) fail(ErrorKind::invalid_argument, "empty piece list");

  const std::size_t n = grid.n_cells;
  const double dx = grid.dx();
  std::vector<BasisCandidate> out;
  for (std::size_t j = 0; j < sig.signs.size(); ++j) {
    std::vector<const Quantile*> qs;
    for (const PieceSet* s : sets) qs.push_back(&s->quantiles[j]);
    const Quantile q = interpolate_quantiles(qs, weights);
    const Density d = rasterize(q, dx, grid.x_lo, n + 1);
    BasisCandidate c;
    c.ordinal = static_cast<int>(j + 1);
    c.sign = q.sign;
    c.mass = q.sign * q.mass;
    c.values.resize(n);
    // Cell center i is the right edge of dual cell i.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += dx * d.values[i];
      c.values[i] = acc;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BasisCandidate> interp_by_pieces(const std::vector<const Snapshot*>& snapshots,
                                             const std::vector<double>& weights,
                                             const Grid1D& grid, double tol_rel,
                                             std::size_t K) {
  std::vector<PieceSet> sets;
  sets.reserve(snapshots.size());
  for (const Snapshot* s : snapshots) sets.push_back(analyze(*s, grid, tol_rel, K));
  std::vector<const PieceSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  return interp_by_pieces(ptrs, weights, grid);
}

void write_pieces_csv(const std::string& path, const std::vector<Piece>& pieces,
                      const Density& d) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os << std::setprecision(17) << "k,x,density,ordinal\n";
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    int ordinal = 0;
    for (const auto& p : pieces)
      if (k >= p.first && k <= p.last) ordinal = p.ordinal;
    os << k << "," << d.position(k) << "," << d.values[k] << "," << ordinal << "\n";
  }
}

}  // namespace dirom
