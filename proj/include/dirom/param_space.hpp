// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dirom/hfm.hpp"

namespace dirom {

class Triangulation {
public:
  std::vector<ParamPoint> anchors;
  /// Counter-clockwise vertex triples, smallest index first.
  std::vector<std::array<std::size_t, 3>> triangles;
  /// Affine map to [0,1]^2 used for all geometric predicates.
  ParamPoint origin;
  ParamPoint span{1.0, 1.0};

  std::array<double, 2> normalized(const ParamPoint& p) const;
  std::array<double, 3> barycentric(std::size_t ell, const ParamPoint& p) const;
  bool contains(std::size_t ell, const ParamPoint& p, double tol = 1e-12) const;
  /// Smallest triangle index containing p.
  std::size_t locate(const ParamPoint& p) const;
  double signed_area(std::size_t ell) const;
  std::string to_json() const;
};

Triangulation delaunay(const std::vector<ParamPoint>& points);

/// Signed incircle determinant in normalized coordinates; positive when d is
/// strictly inside the circumcircle of the counter-clockwise triangle abc.
double incircle(const std::array<double, 2>& a, const std::array<double, 2>& b,
                const std::array<double, 2>& c, const std::array<double, 2>& d);

/// Slab 0 holds only step 0; slab m > 0 holds steps 1+s(m-1) .. s*m.
struct TimePartition {
  std::size_t steps_per_slab = 20;

  std::size_t time_slab(std::size_t n) const {
    return n == 0 ? 0 : 1 + (n - 1) / steps_per_slab;
  }
  std::size_t slab_start(std::size_t m) const {
    return m == 0 ? 0 : 1 + steps_per_slab * (m - 1);
  }
};

struct ElementNode {
  std::size_t anchor = 0;
  std::size_t step = 0;
  ParamPoint mu;
  double t = 0.0;
};

struct Alpha {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double t = 0.0;
};

/// Triangle ell times the closed slab [t_{n_m}, t_{n_{m+1}}].
struct Element {
  std::size_t ell = 0;
  std::size_t m = 0;
  std::array<std::size_t, 3> vertices{};
  std::array<ParamPoint, 3> corners{};
  std::size_t n0 = 0, n1 = 0;
  double t0 = 0.0, t1 = 0.0;
  ParamPoint origin;
  ParamPoint span{1.0, 1.0};

  /// Nodes ordered vertex-major within each time level: lower level first.
  std::array<ElementNode, 6> nodes() const;
  std::array<double, 3> triangle_weights(double mu1, double mu2) const;
};

Element make_element(const Triangulation& tri, const TimePartition& part, double dt,
                     std::size_t ell, std::size_t m);

/// Six convex weights (triangle coordinates times linear-in-t weights),
/// in the order of Element::nodes().
std::array<double, 6> barycentric(const Element& e, const Alpha& alpha);

}  // namespace dirom
