// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dirom/hfm.hpp"

namespace dirom {

/// Values on a uniform point grid x_k = x0 + k*dx. Entry k stands for the
/// dual cell [x_k - dx/2, x_k + dx/2].
struct Density {
  double dx = 1.0;
  double x0 = 0.0;
  std::vector<double> values;

  double mass() const;
  double position(std::size_t k) const { return x0 + static_cast<double>(k) * dx; }
};

struct Piece {
  int ordinal = 0;
  int sign = 0;
  std::size_t first = 0;  // inclusive support bounds on the density grid
  std::size_t last = 0;
  std::vector<double> values;  // density on [first, last]
  double mass = 0.0;           // signed
  double centroid = 0.0;

  Density restricted(const Density& like) const;
};

struct Signature {
  std::vector<int> signs;

  bool operator==(const Signature&) const = default;
  bool empty() const { return signs.empty(); }
  std::string str() const;
};

/// Inverse CDF of a normalized piece, piecewise linear between levels.
struct Quantile {
  std::vector<double> levels;     // increasing, levels.front() == 0, back() == 1
  std::vector<double> positions;  // non-decreasing
  double mass = 0.0;              // |mass|
  int sign = 1;

  double at(double q) const;
};

/// Interface differences of a snapshot, with the inflow jump at interface 0
/// and a zero outflow entry at interface N.
Density differentiate(const Snapshot& s, const Grid1D& grid, double u_boundary);
/// Inflow trace of a snapshot: mu1 for t > 0, the first cell value at t = 0.
double inflow_value(const Snapshot& s);
Density differentiate(const Snapshot& s, const Grid1D& grid);

std::vector<Piece> decompose(const Density& d, double tol_rel);
Signature signature_of(const std::vector<Piece>& pieces);
Signature signature(const Snapshot& s, const Grid1D& grid, double tol_rel);

/// The CDF breakpoints of the piece are always included, so the stored
/// inverse is exact; K uniform levels are merged in on top.
Quantile to_quantile(const Piece& p, const Density& like, std::size_t K);

Quantile interpolate_quantiles(const std::vector<const Quantile*>& qs,
                               const std::vector<double>& weights);
/// Conservative binning of a quantile's push-forward onto a density grid.
Density rasterize(const Quantile& q, double dx, double x0, std::size_t n_points);
Density displacement_interp(const std::vector<const Quantile*>& qs,
                            const std::vector<double>& weights, double dx, double x0,
                            std::size_t n_points);

/// Precomputed pieces and quantiles of one snapshot.
struct PieceSet {
  Signature signature;
  std::vector<Piece> pieces;
  std::vector<Quantile> quantiles;
};

PieceSet analyze(const Snapshot& s, const Grid1D& grid, double tol_rel, std::size_t K);

struct BasisCandidate {
  int ordinal = 0;
  int sign = 0;
  double mass = 0.0;
  std::vector<double> values;  // sampled at cell centers
};

std::vector<BasisCandidate> interp_by_pieces(const std::vector<const PieceSet*>& sets,
                                             const std::vector<double>& weights,
                                             const Grid1D& grid);
std::vector<BasisCandidate> interp_by_pieces(const std::vector<const Snapshot*>& snapshots,
                                             const std::vector<double>& weights,
                                             const Grid1D& grid, double tol_rel,
                                             std::size_t K);

void check_convex(const std::vector<double>& weights);

void write_pieces_csv(const std::string& path, const std::vector<Piece>& pieces,
                      const Density& d);

}  // namespace dirom
