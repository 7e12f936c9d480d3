// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dirom/common.hpp"
#include "dirom/hfm.hpp"

namespace dirom {

/// Counter-based uniform variate in [0, 1) keyed by (seed, index, stream).
double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

std::vector<ParamPoint> sample_uniform(std::size_t n, std::uint64_t seed,
                                       const ParamDomain& domain = {});

/// Max over t > 0 and cells of |u_hfm - u_rom| / |u_hfm|, skipping cells
/// with |u_hfm| < 1e-13.
double relative_error(const Trajectory& hfm, const Trajectory& rom);

struct FieldStats {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> var;  // unbiased
};

FieldStats field_statistics(const std::vector<const Snapshot*>& snapshots);

struct ShockQoi {
  double location = 0.0;
  double height = 0.0;
};

ShockQoi shock_qois(const Snapshot& s, const Grid1D& grid, double tol_rel);

struct QoiSample {
  ParamPoint mu;
  std::size_t ell = 0;
  double shock_location = 0.0;
  double shock_height = 0.0;
  std::optional<double> e_rel;
};

struct Kde2D {
  std::vector<double> xs;
  std::vector<double> ys;
  Matrix density;  // xs.size() x ys.size()
  double hx = 0.0;
  double hy = 0.0;

  double integral() const;
};

/// Product-Gaussian KDE with Scott bandwidths on a grid spanning the data
/// plus three bandwidths on each side.
Kde2D kde2d(const std::vector<std::array<double, 2>>& samples, std::size_t nx, std::size_t ny);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationWindow {
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t count = 0;
  double correlation = 0.0;
};

/// Equal-count windows along x; Pearson correlation of (x, y) in each.
std::vector<CorrelationWindow> windowed_correlation(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    std::size_t windows);

struct Poly2Surrogate {
  int degree = 0;
  std::vector<std::pair<int, int>> exponents;
  std::vector<double> coefficients;
  ParamDomain box;
  double r2 = 0.0;

  double evaluate(const ParamPoint& p) const;
};

Poly2Surrogate polyfit2d(const std::vector<ParamPoint>& mu, const std::vector<double>& y,
                         int degree, const ParamDomain& box = {});

}  // namespace dirom
