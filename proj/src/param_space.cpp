// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dirom/common.hpp"

namespace dirom {

namespace {

using P2 = std::array<double, 2>;
using Tri = std::array<std::size_t, 3>;

constexpr double kCocircularTol = 1e-12;

double orient(const P2& a, const P2& b, const P2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

Tri canonical(Tri t, const std::vector<P2>& pts) {
  std::sort(t.begin(), t.end());
  if (orient(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0) std::swap(t[1], t[2]);
  return t;
}

std::array<double, 3> bary2(const P2& a, const P2& b, const P2& c, const P2& p) {
  const double det = orient(a, b, c);
  const double l0 = orient(p, b, c) / det;
  const double l1 = orient(a, p, c) / det;
  return {l0, l1, 1.0 - l0 - l1};
}

// Bowyer-Watson with ghost triangles: vertex n stands for a point at infinity
// and (a, b, n) is stored for every hull edge a->b that has the hull on its
// right, so no finite super triangle distorts the hull.
std::vector<Tri> bowyer_watson(const std::vector<P2>& pts, std::size_t n) {
  const std::size_t ghost = n;
  auto in_conflict = [&](Tri t, const P2& p) {
    if (t[0] == ghost) t = {t[1], t[2], t[0]};
    if (t[1] == ghost) t = {t[2], t[0], t[1]};
    if (t[2] != ghost) return incircle(pts[t[0]], pts[t[1]], pts[t[2]], p) > kCocircularTol;
    const P2& a = pts[t[0]];
    const P2& b = pts[t[1]];
    const double o = orient(a, b, p);
    if (o > kCocircularTol) return true;
    if (o < -kCocircularTol) return false;
    // On the hull line: only the open segment ab is in conflict.
    const double s = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
    const double len = (b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]);
    return s > 0.0 && s < len;
  };

  // Seed with the first non-collinear triple.
  std::size_t third = 2;
  while (std::abs(orient(pts[0], pts[1], pts[third])) < kCocircularTol) ++third;
  Tri seed{0, 1, third};
  if (orient(pts[0], pts[1], pts[third]) < 0.0) std::swap(seed[1], seed[2]);
  std::vector<Tri> tris{seed,
                        {seed[1], seed[0], ghost},
                        {seed[2], seed[1], ghost},
                        {seed[0], seed[2], ghost}};

  for (std::size_t p = 1; p < n; ++p) {
    if (p == 1 || p == third) continue;
    std::vector<Tri> keep;
    std::map<std::pair<std::size_t, std::size_t>, int> directed;
    for (const Tri& t : tris) {
      if (in_conflict(t, pts[p])) {
        for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
      } else {
        keep.push_back(t);
      }
    }
    if (directed.empty()) fail(ErrorKind::numerical, "delaunay insertion found no cavity");
    // Cavity boundary: directed edges whose reverse is not in the cavity.
    for (const auto& [edge, count] : directed) {
      if (directed.count({edge.second, edge.first})) continue;
      keep.push_back({edge.first, edge.second, p});
    }
    tris = std::move(keep);
  }
  std::vector<Tri> out;
  for (const Tri& t : tris)
    if (t[0] != ghost && t[1] != ghost && t[2] != ghost) out.push_back(t);
  return out;
}

// Cocircular quads admit two Delaunay diagonals; keep the one that touches the
// smallest vertex index of the quad.
void resolve_cocircular(std::vector<Tri>& tris, const std::vector<P2>& pts) {
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> owner;
    for (std::size_t i = 0; i < tris.size(); ++i)
      for (int e = 0; e < 3; ++e) {
        std::size_t a = tris[i][e], b = tris[i][(e + 1) % 3];
        if (a > b) std::swap(a, b);
        owner[{a, b}].push_back(i);
      }
    for (const auto& [edge, ts] : owner) {
      if (ts.size() != 2) continue;
      const auto [a, b] = edge;
      auto opposite = [&](const Tri& t) {
        for (std::size_t v : t)
          if (v != a && v != b) return v;
        return a;
      };
      const std::size_t c = opposite(tris[ts[0]]);
      const std::size_t d = opposite(tris[ts[1]]);
      Tri abc = canonical({a, b, c}, pts);
      if (std::abs(incircle(pts[abc[0]], pts[abc[1]], pts[abc[2]], pts[d])) > kCocircularTol)
        continue;
      if (std::min(c, d) > std::min(a, b)) continue;
      // Both triangles of the flipped quad must stay non-degenerate.
      if (std::abs(orient(pts[c], pts[d], pts[a])) < kCocircularTol ||
          std::abs(orient(pts[c], pts[d], pts[b])) < kCocircularTol)
        continue;
      tris[ts[0]] = canonical({c, d, a}, pts);
      tris[ts[1]] = canonical({c, d, b}, pts);
      changed = true;
      break;
    }
  }
}

}  // namespace

double incircle(const P2& a, const P2& b, const P2& c, const P2& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

std::array<double, 2> Triangulation::normalized(const ParamPoint& p) const {
  return {(p.mu1 - origin.mu1) / span.mu1, (p.mu2 - origin.mu2) / span.mu2};
}

std::array<double, 3> Triangulation::barycentric(std::size_t ell, const ParamPoint& p) const {
  const Tri& t = triangles.at(ell);
  return bary2(normalized(anchors[t[0]]), normalized(anchors[t[1]]),
               normalized(anchors[t[2]]), normalized(p));
}

bool Triangulation::contains(std::size_t ell, const ParamPoint& p, double tol) const {
  const auto w = barycentric(ell, p);
  return w[0] >= -tol && w[1] >= -tol && w[2] >= -tol;
}

std::size_t Triangulation::locate(const ParamPoint& p) const {
  for (std::size_t ell = 0; ell < triangles.size(); ++ell)
    if (contains(ell, p)) return ell;
  std::ostringstream os;
  os << "parameter out of range: (" << p.mu1 << ", " << p.mu2 << ")";
  fail(ErrorKind::invalid_argument, os.str());
}

double Triangulation::signed_area(std::size_t ell) const {
  const Tri& t = triangles.at(ell);
  return 0.5 * orient(normalized(anchors[t[0]]), normalized(anchors[t[1]]),
                      normalized(anchors[t[2]]));
}

std::string Triangulation::to_json() const {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& p : anchors) j["points"].push_back({p.mu1, p.mu2});
  j["triangles"] = triangles;
  return j.dump(2);
}

Triangulation delaunay(const std::vector<ParamPoint>& points) {
  if (points.size() < 3) fail(ErrorKind::invalid_argument, "delaunay needs at least 3 points");
  Triangulation tri;
  tri.anchors = points;
  ParamPoint lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo.mu1 = std::min(lo.mu1, p.mu1);
    lo.mu2 = std::min(lo.mu2, p.mu2);
    hi.mu1 = std::max(hi.mu1, p.mu1);
    hi.mu2 = std::max(hi.mu2, p.mu2);
  }
  if (!(hi.mu1 > lo.mu1) || !(hi.mu2 > lo.mu2))
    fail(ErrorKind::invalid_argument, "collinear input to delaunay");
  tri.origin = lo;
  tri.span = {hi.mu1 - lo.mu1, hi.mu2 - lo.mu2};
  std::vector<P2> pts;
  for (const auto& p : points) pts.push_back(tri.normalized(p));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i][0] - pts[j][0]) < kCocircularTol &&
          std::abs(pts[i][1] - pts[j][1]) < kCocircularTol)
        fail(ErrorKind::invalid_argument, "duplicate point in delaunay input");

  bool collinear = true;
  for (std::size_t k = 2; k < pts.size() && collinear; ++k)
    collinear = std::abs(orient(pts[0], pts[1], pts[k])) < kCocircularTol;
  if (collinear) fail(ErrorKind::invalid_argument, "collinear input to delaunay");
  auto tris = bowyer_watson(pts, pts.size());
  resolve_cocircular(tris, pts);
  for (auto& t : tris) t = canonical(t, pts);
  std::sort(tris.begin(), tris.end(), [](const Tri& a, const Tri& b) {
    Tri sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa < sb;
  });
  tri.triangles = std::move(tris);
  return tri;
}

std::array<ElementNode, 6> Element::nodes() const {
  std::array<ElementNode, 6> out;
  for (int level = 0; level < 2; ++level)
    for (int v = 0; v < 3; ++v) {
      ElementNode& node = out[3 * level + v];
      node.anchor = vertices[v];
      node.mu = corners[v];
      node.step = level == 0 ? n0 : n1;
      node.t = level == 0 ? t0 : t1;
    }
  return out;
}

std::array<double, 3> Element::triangle_weights(double mu1, double mu2) const {
  auto norm = [&](const ParamPoint& p) -> P2 {
    return {(p.mu1 - origin.mu1) / span.mu1, (p.mu2 - origin.mu2) / span.mu2};
  };
  return bary2(norm(corners[0]), norm(corners[1]), norm(corners[2]), norm({mu1, mu2}));
}

Element make_element(const Triangulation& tri, const TimePartition& part, double dt,
                     std::size_t ell, std::size_t m) {
  Element e;
  e.ell = ell;
  e.m = m;
  e.vertices = tri.triangles.at(ell);
  for (int v = 0; v < 3; ++v) e.corners[v] = tri.anchors[e.vertices[v]];
  e.n0 = part.slab_start(m);
  e.n1 = part.slab_start(m + 1);
  e.t0 = static_cast<double>(e.n0) * dt;
  e.t1 = static_cast<double>(e.n1) * dt;
  e.origin = tri.origin;
  e.span = tri.span;
  return e;
}

std::array<double, 6> barycentric(const Element& e, const Alpha& alpha) {
  constexpr double tol = 1e-12;
  auto lam = e.triangle_weights(alpha.mu1, alpha.mu2);
  const double tau = (alpha.t - e.t0) / (e.t1 - e.t0);
  if (lam[0] < -tol || lam[1] < -tol || lam[2] < -tol || tau < -tol || tau > 1.0 + tol) {
    std::ostringstream os;
    os << "alpha (" << alpha.mu1 << ", " << alpha.mu2 << ", " << alpha.t
       << ") outside element (" << e.ell << ", " << e.m << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }
  double sum = 0.0;
  for (double& l : lam) {
    l = std::max(l, 0.0);
    sum += l;
  }
  for (double& l : lam) l /= sum;
  const double tc = std::clamp(tau, 0.0, 1.0);
  std::array<double, 6> w;
  for (int v = 0; v < 3; ++v) {
    w[v] = lam[v] * (1.0 - tc);
    w[3 + v] = lam[v] * tc;
  }
  return w;
}

}  // namespace dirom
