// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "dirom/basis.hpp"
#include "dirom/common.hpp"
#include "dirom/hfm.hpp"
#include "dirom/linalg.hpp"
#include "dirom/param_space.hpp"
#include "dirom/transport.hpp"

using namespace dirom;

namespace {

constexpr double kTol = 1e-8;
constexpr std::size_t kLevels = 401;
constexpr double kDt = 0.0125;

struct Fixture {
  Grid1D grid;
  Triangulation tri;
  TimePartition part{20};
  std::vector<Trajectory> runs;  // per anchor, every step up to t = 3

  Fixture() {
    std::vector<ParamPoint> anchors;
    for (double b : {0.02, 0.05, 0.075})
      for (double a : {3.0, 6.0, 9.0}) anchors.push_back({a, b});
    tri = delaunay(anchors);
    for (const auto& mu : anchors) {
      HfmConfig c;
      c.mu = mu;
      c.t_final = 3.0;
      runs.push_back(hfm_solve(c));
    }
  }

  std::array<PieceSet, 6> node_sets(const Element& e) const {
    std::array<PieceSet, 6> out;
    const auto nodes = e.nodes();
    for (std::size_t k = 0; k < 6; ++k)
      out[k] = analyze(runs[nodes[k].anchor].snapshots[nodes[k].step], grid, kTol, kLevels);
    return out;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

std::array<const PieceSet*, 6> ptrs(const std::array<PieceSet, 6>& s) {
  std::array<const PieceSet*, 6> p{};
  for (std::size_t k = 0; k < 6; ++k) p[k] = &s[k];
  return p;
}

double gram_defect(const Matrix& W, double dx) {
  const Matrix g = multiply_tn(W, W, dx);
  return max_abs_diff(g, Matrix::identity(W.cols));
}

double l2(const std::vector<double>& v, double dx) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(dx * s);
}

std::vector<double> projection(const Matrix& W, const std::vector<double>& u, double dx) {
  std::vector<double> r(W.cols, 0.0);
  for (std::size_t j = 0; j < W.cols; ++j) {
    for (std::size_t i = 0; i < W.rows; ++i) r[j] += W(i, j) * u[i];
    r[j] *= dx;
  }
  return multiply(W, r);
}

Snapshot hat(const Grid1D& g, double c) {
  Snapshot s;
  s.cells.resize(g.n_cells);
  for (std::size_t i = 0; i < g.n_cells; ++i) s.cells[i] = std::max(0.0, 1.0 - std::abs(g.center(i) - c) / 20.0);
  return s;
}

}  // namespace

TEST_CASE("signature condition on HFM elements") {
  const Fixture& f = fixture();
  const Element e = make_element(f.tri, f.part, kDt, 3, 5);
  const auto sets = f.node_sets(e);
  const auto rep = check_signature_condition(ptrs(sets));
  CHECK(rep.ok);
  for (const auto& s : rep.node_signatures) CHECK(s.str() == "[+,-,+]");

  // Slab 0 mixes the null initial state with nothing else; a prism across t = 0 fails.
  Element across = make_element(f.tri, f.part, kDt, 3, 0);
  across.n1 = 40;
  across.t1 = 40 * kDt;
  const auto mixed = f.node_sets(across);
  const auto bad = check_signature_condition(ptrs(mixed));
  CHECK_FALSE(bad.ok);
  CHECK(bad.node_signatures[0].empty());
  CHECK(bad.describe().find("mismatch") == 0);
}

TEST_CASE("signature condition on translated hats") {
  const Grid1D g;
  const PieceSet p1 = analyze(hat(g, 40.0), g, kTol, kLevels);
  const PieceSet p2 = analyze(hat(g, 60.0), g, kTol, kLevels);
  const PieceSet p3 = analyze(hat(g, 110.0), g, kTol, kLevels);
  CHECK(check_signature_condition({&p1, &p2, &p1, &p2, &p1, &p2}).ok);
  CHECK_FALSE(check_signature_condition({&p1, &p3, &p1, &p3, &p1, &p3}).ok);
  CHECK_THROWS_AS(check_signature_condition({&p1, nullptr, &p1, &p1, &p1, &p1}), Error);
}

TEST_CASE("element sampling") {
  const Fixture& f = fixture();
  const Element e = make_element(f.tri, f.part, kDt, 2, 8);
  const auto s2 = sample_element(e, 2, 2, 2);
  CHECK(s2.size() >= 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(s2[k].mu1 == e.nodes()[k].mu.mu1);
    CHECK(s2[k].t == e.nodes()[k].t);
  }
  std::size_t prev = 0;
  for (std::size_t p : {2, 3, 4, 5, 7}) {
    const auto s = sample_element(e, p, p, p);
    CHECK(s.size() >= prev);
    prev = s.size();
    for (const auto& a : s) CHECK_NOTHROW(barycentric(e, a));
  }
  CHECK_THROWS_AS(sample_element(e, 1, 3, 3), Error);
}

TEST_CASE("local basis contract") {
  const Fixture& f = fixture();
  const double dx = f.grid.dx();
  for (std::size_t ell : {0, 5, 7}) {
    const Element e = make_element(f.tri, f.part, kDt, ell, 7);
    const auto sets = f.node_sets(e);
    const auto samples = sample_element(e, 3, 3, 3);
    const LocalBasis b = build_local_basis(e, ptrs(sets), samples, f.grid, 1e-10);
    CHECK(b.ell == ell);
    CHECK(b.m == 7);
    CHECK(b.M() <= b.candidate_count);
    CHECK(gram_defect(b.W, dx) <= 1e-10);
    CHECK(b.signature.str() == "[+,-,+]");
    const auto nodes = e.nodes();
    for (std::size_t k = 0; k < 6; ++k) {
      const auto& u = f.runs[nodes[k].anchor].snapshots[nodes[k].step].cells;
      const auto pu = projection(b.W, u, dx);
      std::vector<double> r(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) r[i] = pu[i] - u[i];
      CHECK(l2(r, dx) / l2(u, dx) <= 1e-3);
    }
  }
}

TEST_CASE("one sample at a node gives at most four columns") {
  const Fixture& f = fixture();
  const Element e = make_element(f.tri, f.part, kDt, 1, 6);
  const auto sets = f.node_sets(e);
  const auto n = e.nodes()[2];
  const LocalBasis b = build_local_basis(e, ptrs(sets), {{n.mu.mu1, n.mu.mu2, n.t}}, f.grid, 1e-10);
  CHECK(b.M() <= 4);
  CHECK(b.M() >= 2);
  CHECK(gram_defect(b.W, f.grid.dx()) <= 1e-10);
}

TEST_CASE("failing elements are refused by the standard builder") {
  const Fixture& f = fixture();
  Element e = make_element(f.tri, f.part, kDt, 0, 0);
  e.n1 = 30;
  e.t1 = 30 * kDt;
  const auto sets = f.node_sets(e);
  CHECK_THROWS_AS(build_local_basis(e, ptrs(sets), sample_element(e, 2, 2, 2), f.grid, 1e-10), Error);

  std::vector<const Snapshot*> raw;
  for (std::size_t n = e.n0; n <= e.n1; ++n)
    for (std::size_t v : e.vertices) raw.push_back(&f.runs[v].snapshots[n]);
  const LocalBasis fb = build_fallback_basis(e, ptrs(sets), raw, sample_element(e, 2, 3, 5), f.grid, 1e-10);
  CHECK(fb.fallback);
  CHECK_FALSE(fb.signature_ok);
  CHECK(gram_defect(fb.W, f.grid.dx()) <= 1e-10);
  for (const Snapshot* s : raw) {
    if (l2(s->cells, f.grid.dx()) == 0.0) continue;
    const auto pu = projection(fb.W, s->cells, f.grid.dx());
    std::vector<double> r(pu.size());
    for (std::size_t i = 0; i < pu.size(); ++i) r[i] = pu[i] - s->cells[i];
    CHECK(l2(r, f.grid.dx()) / l2(s->cells, f.grid.dx()) <= 1e-8);
  }
}

TEST_CASE("gram-schmidt drops dependent candidates and is order invariant in span") {
  const std::size_t n = 40;
  const double dx = 0.4;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> base(5, std::vector<double>(n));
  for (auto& v : base)
    for (double& x : v) x = nd(rng);
  std::vector<std::vector<double>> cands = base;
  cands.push_back(base[1]);  // exact duplicate
  std::vector<double> combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = 2.0 * base[0][i] - base[3][i];
  cands.push_back(combo);

  GramSchmidt a(n, dx, 1e-10), b(n, dx, 1e-10);
  for (const auto& c : cands) a.add(c);
  for (auto it = cands.rbegin(); it != cands.rend(); ++it) b.add(*it);
  CHECK(a.size() == 5);
  CHECK(b.size() == 5);
  const Matrix wa = a.matrix(), wb = b.matrix();
  CHECK(gram_defect(wa, dx) <= 1e-12);
  // Equal spans: projectors agree on random vectors.
  for (int k = 0; k < 10; ++k) {
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    const auto pa = projection(wa, v, dx), pb = projection(wb, v, dx);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(pa[i] - pb[i]) <= 1e-10);
  }
  CHECK_FALSE(a.add(std::vector<double>(n, 0.0)));
}

TEST_CASE("transition matrices") {
  const Fixture& f = fixture();
  const double dx = f.grid.dx();
  const Element e4 = make_element(f.tri, f.part, kDt, 6, 4), e5 = make_element(f.tri, f.part, kDt, 6, 5);
  const auto s4 = f.node_sets(e4), s5 = f.node_sets(e5);
  const LocalBasis b4 = build_local_basis(e4, ptrs(s4), sample_element(e4, 3, 3, 3), f.grid, 1e-10);
  const LocalBasis b5 = build_local_basis(e5, ptrs(s5), sample_element(e5, 3, 3, 3), f.grid, 1e-10);

  const Matrix id = transition_matrix(b4, b4, dx);
  CHECK(max_abs_diff(id, Matrix::identity(b4.M())) <= 1e-12);

  const Matrix T = transition_matrix(b4, b5, dx);
  CHECK(T.rows == b5.M());
  CHECK(T.cols == b4.M());
  const Svd svd = jacobi_svd(T);
  CHECK(svd.sigma.front() <= 1.0 + 1e-10);

  // The transferred state is the best approximation of W_from r in span(W_to).
  const auto nodes = e5.nodes();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& u = f.runs[nodes[k].anchor].snapshots[nodes[k].step].cells;
    std::vector<double> r(b4.M(), 0.0);
    for (std::size_t j = 0; j < b4.M(); ++j) {
      for (std::size_t i = 0; i < u.size(); ++i) r[j] += b4.W(i, j) * u[i];
      r[j] *= dx;
    }
    const auto from = multiply(b4.W, r);
    const auto to = multiply(b5.W, multiply(T, r));
    const auto best = projection(b5.W, from, dx);
    std::vector<double> d1(u.size()), d2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      d1[i] = to[i] - from[i];
      d2[i] = best[i] - from[i];
    }
    CHECK(l2(d1, dx) <= l2(d2, dx) * (1.0 + 1e-10) + 1e-12);
  }

  LocalBasis other = b4;
  other.W = Matrix(10, 2, 0.1);
  CHECK_THROWS_AS(transition_matrix(other, b4, dx), Error);
}

TEST_CASE("parallel element builds are bitwise equal to serial ones") {
  const Fixture& f = fixture();
  std::vector<Element> elems;
  for (std::size_t ell = 0; ell < 8; ++ell) elems.push_back(make_element(f.tri, f.part, kDt, ell, 8));
  auto build = [&](std::size_t i) {
    const auto sets = f.node_sets(elems[i]);
    return build_local_basis(elems[i], ptrs(sets), sample_element(elems[i], 2, 3, 3), f.grid, 1e-10);
  };
  std::vector<LocalBasis> serial(elems.size()), parallel(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) serial[i] = build(i);
  parallel_for(elems.size(), 4, [&](std::size_t i) { parallel[i] = build(i); });
  for (std::size_t i = 0; i < elems.size(); ++i) CHECK(serial[i].W.data == parallel[i].W.data);
}

TEST_CASE("basis file round trip") {
  const Fixture& f = fixture();
  const Element e = make_element(f.tri, f.part, kDt, 4, 9);
  const auto sets = f.node_sets(e);
  LocalBasis b = build_local_basis(e, ptrs(sets), sample_element(e, 2, 2, 2), f.grid, 1e-10);
  const auto dir = std::filesystem::temp_directory_path() / "dirom_test_basis";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "b.bas").string();
  write_basis(path, b);
  const LocalBasis r = read_basis(path);
  CHECK(r.ell == b.ell);
  CHECK(r.m == b.m);
  CHECK(r.W.rows == b.W.rows);
  CHECK(r.W.data == b.W.data);
  CHECK(r.signature_ok == b.signature_ok);
  CHECK(r.fallback == b.fallback);
  b.reduced = true;
  b.fallback = true;
  write_basis(path, b);
  CHECK(read_basis(path).reduced);
  CHECK(read_basis(path).fallback);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK_THROWS_AS(read_basis(path), Error);
  CHECK_THROWS_AS(read_basis((dir / "absent.bas").string()), Error);
  std::filesystem::remove_all(dir);
}
