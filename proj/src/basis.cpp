// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

namespace dirom {

std::string SignatureReport::describe() const {
  std::string s = ok ? "ok:" : "mismatch:";
  for (const auto& sig : node_signatures) s += " " + sig.str();
  return s;
}

SignatureReport check_signature_condition(const std::array<const PieceSet*, 6>& nodes) {
  SignatureReport r;
  for (std::size_t i = 0; i < 6; ++i) {
    if (!nodes[i]) fail(ErrorKind::invalid_argument, "missing node snapshot");
    r.node_signatures[i] = nodes[i]->signature;
  }
  r.ok = !r.node_signatures[0].empty();
  for (const auto& s : r.node_signatures) r.ok = r.ok && s == r.node_signatures[0];
  return r;
}

SignatureReport check_signature_condition(const Element&,
                                          const std::array<const Snapshot*, 6>& nodes,
                                          const Grid1D& grid, double tol_rel) {
  SignatureReport r;
  for (std::size_t i = 0; i < 6; ++i) {
    if (!nodes[i]) fail(ErrorKind::invalid_argument, "missing node snapshot");
    r.node_signatures[i] = signature(*nodes[i], grid, tol_rel);
  }
  r.ok = !r.node_signatures[0].empty();
  for (const auto& s : r.node_signatures) r.ok = r.ok && s == r.node_signatures[0];
  return r;
}

std::vector<Alpha> sample_element(const Element& e, std::size_t p_t, std::size_t p_mu1,
                                  std::size_t p_mu2) {
  require(p_t >= 2 && p_mu1 >= 2 && p_mu2 >= 2, "sampling counts must be at least 2");
  double lo1 = e.corners[0].mu1, hi1 = lo1, lo2 = e.corners[0].mu2, hi2 = lo2;
  for (const auto& c : e.corners) {
    lo1 = std::min(lo1, c.mu1);
    hi1 = std::max(hi1, c.mu1);
    lo2 = std::min(lo2, c.mu2);
    hi2 = std::max(hi2, c.mu2);
  }
  auto lin = [](double a, double b, std::size_t k, std::size_t n) {
    return k + 1 == n ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  std::vector<Alpha> out;
  auto seen = [&](const Alpha& a) {
    for (const auto& b : out)
      if (std::abs(a.mu1 - b.mu1) <= 1e-12 * e.span.mu1 &&
          std::abs(a.mu2 - b.mu2) <= 1e-12 * e.span.mu2 &&
          std::abs(a.t - b.t) <= 1e-12 * (e.t1 - e.t0))
        return true;
    return false;
  };
  for (const auto& node : e.nodes()) out.push_back({node.mu.mu1, node.mu.mu2, node.t});
  for (std::size_t it = 0; it < p_t; ++it) {
    const double t = lin(e.t0, e.t1, it, p_t);
    for (std::size_t i1 = 0; i1 < p_mu1; ++i1) {
      const double mu1 = lin(lo1, hi1, i1, p_mu1);
      for (std::size_t i2 = 0; i2 < p_mu2; ++i2) {
        const double mu2 = lin(lo2, hi2, i2, p_mu2);
        const auto w = e.triangle_weights(mu1, mu2);
        if (w[0] < -1e-12 || w[1] < -1e-12 || w[2] < -1e-12) continue;
        const Alpha a{mu1, mu2, t};
        if (!seen(a)) out.push_back(a);
      }
    }
  }
  return out;
}

double GramSchmidt::dot(const std::vector<double>& a, const std::vector<double>& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += a[i] * b[i];
  return dx_ * s;
}

bool GramSchmidt::add(std::vector<double> v) {
  require(v.size() == n_, "candidate length does not match grid");
  const double norm0 = std::sqrt(dot(v, v));
  if (!(norm0 > 0.0) || !std::isfinite(norm0)) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : cols_) {
      const double c = dot(q, v);
      for (std::size_t i = 0; i < n_; ++i) v[i] -= c * q[i];
    }
  const double norm1 = std::sqrt(dot(v, v));
  if (norm1 < tol_ * norm0) return false;
  for (double& x : v) x /= norm1;
  cols_.push_back(std::move(v));
  return true;
}

Matrix GramSchmidt::matrix() const {
  Matrix w(n_, cols_.size());
  for (std::size_t j = 0; j < cols_.size(); ++j)
    std::copy(cols_[j].begin(), cols_[j].end(), w.col(j));
  return w;
}

namespace {

LocalBasis finish(const Element& e, const GramSchmidt& gs, std::size_t candidates) {
  LocalBasis b;
  b.ell = e.ell;
  b.m = e.m;
  b.W = gs.matrix();
  b.candidate_count = candidates;
  if (b.W.cols == 0) fail(ErrorKind::numerical, "element produced zero basis candidates");
  return b;
}

}  // namespace

LocalBasis build_local_basis(const Element& e, const std::array<const PieceSet*, 6>& nodes,
                             const std::vector<Alpha>& samples, const Grid1D& grid,
                             double gs_tol) {
  const SignatureReport report = check_signature_condition(nodes);
  if (!report.ok)
    fail(ErrorKind::numerical, "signature condition fails on element (" +
                                   std::to_string(e.ell) + ", " + std::to_string(e.m) +
                                   "): " + report.describe());
  GramSchmidt gs(grid.n_cells, grid.dx(), gs_tol);
  std::size_t count = 1;
  gs.add(std::vector<double>(grid.n_cells, 1.0));
  const std::vector<const PieceSet*> sets(nodes.begin(), nodes.end());
  for (const Alpha& a : samples) {
    const auto w6 = barycentric(e, a);
    for (auto& c : interp_by_pieces(sets, std::vector<double>(w6.begin(), w6.end()), grid)) {
      ++count;
      gs.add(std::move(c.values));
    }
  }
  LocalBasis b = finish(e, gs, count);
  b.signature = report.node_signatures[0];
  b.signature_ok = true;
  return b;
}

LocalBasis build_fallback_basis(const Element& e, const std::array<const PieceSet*, 6>& nodes,
                                const std::vector<const Snapshot*>& raw,
                                const std::vector<Alpha>& samples, const Grid1D& grid,
                                double gs_tol) {
  const SignatureReport report = check_signature_condition(nodes);
  GramSchmidt gs(grid.n_cells, grid.dx(), gs_tol);
  std::size_t count = 1;
  gs.add(std::vector<double>(grid.n_cells, 1.0));

  // Groups in order of first appearance among the nodes.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < 6; ++i) {
    if (report.node_signatures[i].empty()) continue;
    bool placed = false;
    for (auto& g : groups)
      if (report.node_signatures[g.front()] == report.node_signatures[i]) {
        g.push_back(i);
        placed = true;
        break;
      }
    if (!placed) groups.push_back({i});
  }
  for (const auto& g : groups) {
    std::vector<const PieceSet*> sets;
    for (std::size_t i : g) sets.push_back(nodes[i]);
    for (const Alpha& a : samples) {
      const auto w6 = barycentric(e, a);
      double total = 0.0;
      for (std::size_t i : g) total += w6[i];
      if (total <= 1e-12) continue;
      std::vector<double> w;
      for (std::size_t i : g) w.push_back(w6[i] / total);
      for (auto& c : interp_by_pieces(sets, w, grid)) {
        ++count;
        gs.add(std::move(c.values));
      }
    }
  }
  for (const Snapshot* s : raw) {
    ++count;
    gs.add(s->cells);
  }
  LocalBasis b = finish(e, gs, count);
  b.signature_ok = report.ok;
  b.fallback = true;
  return b;
}

Matrix transition_matrix(const LocalBasis& from, const LocalBasis& to, double dx) {
  if (from.W.rows != to.W.rows) fail(ErrorKind::invalid_argument, "grid mismatch in transition");
  return multiply_tn(to.W, from.W, dx);
}

namespace {

constexpr char kBasisMagic[8] = {'D', 'I', 'R', 'O', 'M', 'B', 'A', 'S'};
constexpr std::uint32_t kBasisVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::store, "truncated basis file " + path);
  return v;
}

}  // namespace

// Layout: magic[8], u32 version, u32 flags (bit0 reduced, bit1 fallback,
// bit2 signature ok), u32 ell, u32 m, u32 N, u32 M, then N*M f64 column-major.
void write_basis(const std::string& path, const LocalBasis& b) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os.write(kBasisMagic, sizeof(kBasisMagic));
  put<std::uint32_t>(os, kBasisVersion);
  const std::uint32_t flags = (b.reduced ? 1u : 0u) | (b.fallback ? 2u : 0u) |
                              (b.signature_ok ? 4u : 0u);
  put<std::uint32_t>(os, flags);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(b.ell));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(b.m));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(b.W.rows));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(b.W.cols));
  os.write(reinterpret_cast<const char*>(b.W.data.data()),
           static_cast<std::streamsize>(b.W.data.size() * sizeof(double)));
  if (!os) fail(ErrorKind::io, "write failed for " + path);
}

LocalBasis read_basis(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::store, "missing basis file " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kBasisMagic, sizeof(magic)) != 0)
    fail(ErrorKind::store, path + ": not a basis file");
  if (get<std::uint32_t>(is, path) != kBasisVersion)
    fail(ErrorKind::store, path + ": unsupported basis version");
  LocalBasis b;
  const auto flags = get<std::uint32_t>(is, path);
  b.reduced = flags & 1u;
  b.fallback = flags & 2u;
  b.signature_ok = flags & 4u;
  b.ell = get<std::uint32_t>(is, path);
  b.m = get<std::uint32_t>(is, path);
  const auto n = get<std::uint32_t>(is, path);
  const auto mcols = get<std::uint32_t>(is, path);
  b.W = Matrix(n, mcols);
  is.read(reinterpret_cast<char*>(b.W.data.data()),
          static_cast<std::streamsize>(b.W.data.size() * sizeof(double)));
  if (!is) fail(ErrorKind::store, "truncated basis file " + path);
  return b;
}

}  // namespace dirom
