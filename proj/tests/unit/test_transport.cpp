// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dirom/common.hpp"
#include "dirom/hfm.hpp"
#include "dirom/transport.hpp"

using namespace dirom;

namespace {

Snapshot snapshot_of(std::vector<double> cells, double t = 0.0) {
  Snapshot s;
  s.t = t;
  s.cells = std::move(cells);
  return s;
}

Snapshot hfm_at(double mu1, double mu2, double t) {
  HfmConfig c;
  c.mu = {mu1, mu2};
  c.t_final = t;
  return hfm_solve(c).snapshots.back();
}

Density gaussian(double center, double width, double dx, std::size_t n) {
  Density d{dx, 0.0, std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const double z = (d.position(k) - center) / width;
    d.values[k] = std::exp(-0.5 * z * z);
  }
  return d;
}

double l1(const Density& a, const Density& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::abs(a.values[k] - b.values[k]);
  return s * a.dx;
}

double peak(const Density& d) {
  double m = 0.0;
  for (double v : d.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> random_convex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& v : w) s += (v = e(rng));
  for (double& v : w) v /= s;
  return w;
}

}  // namespace

TEST_CASE("differentiate basics") {
  Grid1D g{10, 0.0, 5.0};
  const Density z = differentiate(snapshot_of(std::vector<double>(10, 2.5)), g, 2.5);
  REQUIRE(z.values.size() == 11);
  for (double v : z.values) CHECK(v == 0.0);

  std::vector<double> ramp(10);
  for (std::size_t i = 0; i < 10; ++i) ramp[i] = 1.0 + 0.3 * g.center(i);
  const Density r = differentiate(snapshot_of(ramp), g, 0.0);
  for (std::size_t k = 1; k < 10; ++k) CHECK(r.values[k] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.values[10] == 0.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> u(10);
    for (double& v : u) v = n(rng);
    const double ub = n(rng);
    const Density d = differentiate(snapshot_of(u), g, ub);
    CHECK(std::abs(d.mass() - (u.back() - ub)) <= 1e-12 * (1.0 + std::abs(u.back() - ub)));
  }
}

TEST_CASE("inflow value at and after the initial time") {
  Snapshot s = snapshot_of({0.0, 1.0});
  s.mu = {7.0, 0.03};
  CHECK(inflow_value(s) == 0.0);
  s.t = 0.0125;
  CHECK(inflow_value(s) == 7.0);
}

TEST_CASE("hand-built density decomposes into three pieces") {
  const Density d{1.0, 0.0, {0.0, 1.0, 1.0, -2.0, 0.0, 3.0}};
  const auto p = decompose(d, 1e-8);
  REQUIRE(p.size() == 3);
  CHECK(p[0].sign == 1);
  CHECK(p[0].first == 1);
  CHECK(p[0].last == 2);
  CHECK(p[0].mass == doctest::Approx(2.0));
  CHECK(p[0].centroid == doctest::Approx(1.5));
  CHECK(p[1].sign == -1);
  CHECK(p[1].first == 3);
  CHECK(p[1].last == 3);
  CHECK(p[1].mass == doctest::Approx(-2.0));
  CHECK(p[2].sign == 1);
  CHECK(p[2].first == 5);
  CHECK(p[2].mass == doctest::Approx(3.0));
  for (int j = 0; j < 3; ++j) CHECK(p[j].ordinal == j + 1);
  CHECK(signature_of(p).str() == "[+,-,+]");
}

TEST_CASE("decompose piece properties") {
  const Density bump = gaussian(20.0, 2.0, 0.4, 101);
  const auto p = decompose(bump, 1e-8);
  REQUIRE(p.size() == 1);
  CHECK(p[0].sign == 1);
  CHECK(p[0].centroid == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(p[0].centroid >= bump.position(p[0].first));
  CHECK(p[0].centroid <= bump.position(p[0].last));

  CHECK(decompose(Density{1.0, 0.0, std::vector<double>(8, 0.0)}, 1e-8).empty());

  // A run below the relative mass cut is dropped; one below the value cut is zeroed.
  const Density d{1.0, 0.0, {5.0, 5.0, 0.0, -1e-9, -1e-9, 0.0, 4.0}};
  const auto q = decompose(d, 1e-8);
  REQUIRE(q.size() == 2);
  CHECK(signature_of(q).str() == "[+,+]");
  const Density e{1.0, 0.0, {5.0, 5.0, 0.0, -1e-7, 0.0, 4.0}};
  const auto r = decompose(e, 1e-7);
  CHECK(r.size() == 2);
  CHECK_THROWS_AS(decompose(d, 0.0), Error);
  CHECK_THROWS_AS(decompose(d, 1.0), Error);
}

TEST_CASE("HFM snapshot signatures") {
  const Grid1D g;
  CHECK(signature(hfm_at(3.0, 0.05, 5.0), g, 1e-8).str() == "[+,-,+]");
  CHECK(signature(hfm_at(3.0, 0.05, 0.0), g, 1e-8).empty());
}

TEST_CASE("a hat leaving the domain loses its falling piece") {
  const Grid1D g;
  auto hat = [&](double c) {
    std::vector<double> u(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) u[i] = std::max(0.0, 1.0 - std::abs(g.center(i) - c) / 20.0);
    return snapshot_of(u);
  };
  CHECK(signature(hat(50.0), g, 1e-8).str() == "[+,-]");
  CHECK(signature(hat(110.0), g, 1e-8).str() == "[+]");
}

TEST_CASE("quantile of a uniform density is linear") {
  const Density d{0.5, 0.0, [] {
                    std::vector<double> v(40, 0.0);
                    for (int k = 10; k < 20; ++k) v[k] = 2.0;
                    return v;
                  }()};
  const auto p = decompose(d, 1e-8);
  REQUIRE(p.size() == 1);
  const Quantile q = to_quantile(p[0], d, 401);
  CHECK(q.mass == doctest::Approx(10.0));
  for (double lv : {0.0, 0.1, 0.37, 0.5, 0.999, 1.0})
    CHECK(q.at(lv) == doctest::Approx(4.75 + 5.0 * lv).epsilon(1e-12));
}

TEST_CASE("quantile of a one-cell density spans that cell") {
  const Density d{0.4, 0.0, {0.0, 0.0, -3.0, 0.0}};
  const auto p = decompose(d, 1e-8);
  const Quantile q = to_quantile(p[0], d, 11);
  CHECK(q.sign == -1);
  for (double lv : {0.0, 0.25, 1.0}) CHECK(q.at(lv) == doctest::Approx(0.6 + 0.4 * lv).epsilon(1e-12));
}

TEST_CASE("quantile positions and zero-mass pieces") {
  const Density d = gaussian(30.0, 3.0, 0.4, 200);
  const auto p = decompose(d, 1e-8);
  const Quantile q = to_quantile(p[0], d, 401);
  CHECK(q.levels.front() == 0.0);
  CHECK(q.levels.back() == 1.0);
  for (std::size_t i = 1; i < q.positions.size(); ++i) CHECK(q.positions[i] >= q.positions[i - 1]);
  CHECK(q.positions.front() >= d.position(p[0].first) - 0.5 * d.dx);
  CHECK(q.positions.back() <= d.position(p[0].last) + 0.5 * d.dx);

  Piece zero = p[0];
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK_THROWS_AS(to_quantile(zero, d, 11), Error);
}

TEST_CASE("quantile round trip through rasterization") {
  const Density d = gaussian(40.0, 5.0, 0.4, 250);
  const auto p = decompose(d, 1e-8);
  const Quantile q = to_quantile(p[0], d, 401);
  const Density back = rasterize(q, d.dx, d.x0, d.values.size());
  const auto p2 = decompose(back, 1e-8);
  REQUIRE(p2.size() == 1);
  const Quantile q2 = to_quantile(p2[0], back, 401);
  double sup = 0.0;
  for (int k = 0; k <= 1000; ++k) sup = std::max(sup, std::abs(q.at(k / 1000.0) - q2.at(k / 1000.0)));
  CHECK(sup <= 2.0 * d.dx);
}

TEST_CASE("identity at unit weights within the rasterization bound") {
  const std::size_t K = 401;
  const Density a = gaussian(30.0, 4.0, 0.4, 251), b = gaussian(55.0, 2.0, 0.4, 251);
  const Quantile qa = to_quantile(decompose(a, 1e-8)[0], a, K);
  const Quantile qb = to_quantile(decompose(b, 1e-8)[0], b, K);
  const Density out = displacement_interp({&qa, &qb}, {1.0, 0.0}, a.dx, a.x0, a.values.size());
  CHECK(l1(out, a) <= 2.0 * qa.mass / (K - 1) + 2.0 * a.dx * peak(a));
}

TEST_CASE("translated bumps interpolate to the intermediate translate") {
  const double dx = 0.4, width = 3.0, offset = 24.0;
  const std::size_t n = 251;
  const Density a = gaussian(30.0, width, dx, n), b = gaussian(30.0 + offset, width, dx, n);
  const Quantile qa = to_quantile(decompose(a, 1e-8)[0], a, 401);
  const Quantile qb = to_quantile(decompose(b, 1e-8)[0], b, 401);
  for (double alpha : {0.1, 0.25, 0.5, 0.8}) {
    const Density out = displacement_interp({&qa, &qb}, {1.0 - alpha, alpha}, dx, 0.0, n);
    const Density ref = gaussian(30.0 + alpha * offset, width, dx, n);
    CHECK(l1(out, ref) <= 4.0 * dx * peak(ref));
  }
}

TEST_CASE("interpolated mass is linear in the weights") {
  Density a = gaussian(30.0, 4.0, 0.4, 251), b = gaussian(60.0, 2.0, 0.4, 251);
  const double ma = a.mass(), mb = b.mass();
  for (double& v : a.values) v /= ma;
  for (double& v : b.values) v *= 3.0 / mb;
  const Quantile qa = to_quantile(decompose(a, 1e-8)[0], a, 401);
  const Quantile qb = to_quantile(decompose(b, 1e-8)[0], b, 401);
  // Piece masses exclude the Gaussian tails below the value cut.
  CHECK(qa.mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(qb.mass == doctest::Approx(3.0).epsilon(1e-8));
  const Density mid = displacement_interp({&qa, &qb}, {0.5, 0.5}, 0.4, 0.0, 251);
  CHECK(std::abs(mid.mass() - 0.5 * (qa.mass + qb.mass)) <= 1e-12);

  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const auto w = random_convex(rng, 2);
    const Density d = displacement_interp({&qa, &qb}, w, 0.4, 0.0, 251);
    CHECK(std::abs(d.mass() - (w[0] * qa.mass + w[1] * qb.mass)) <= 1e-12);
  }
}

TEST_CASE("signed pieces keep their sign and reject mixing") {
  const Density a{0.4, 0.0, {0.0, -1.0, -2.0, -1.0, 0.0}};
  const Density b{0.4, 0.0, {0.0, 1.0, 2.0, 1.0, 0.0}};
  const Quantile qa = to_quantile(decompose(a, 1e-8)[0], a, 21);
  const Quantile qb = to_quantile(decompose(b, 1e-8)[0], b, 21);
  const Density back = rasterize(qa, 0.4, 0.0, 5);
  CHECK(l1(back, a) <= 1e-12);
  CHECK_THROWS_AS(interpolate_quantiles({&qa, &qb}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(interpolate_quantiles({&qa, &qa}, {0.7, 0.7}), Error);
  CHECK_THROWS_AS(interpolate_quantiles({&qa, &qa}, {1.5, -0.5}), Error);
}

TEST_CASE("interpolated quantiles stay monotone for random convex weights") {
  std::vector<Density> ds;
  std::vector<Quantile> qs;
  for (int j = 0; j < 6; ++j) ds.push_back(gaussian(20.0 + 9.0 * j, 1.0 + 0.7 * j, 0.4, 251));
  for (const auto& d : ds) qs.push_back(to_quantile(decompose(d, 1e-8)[0], d, 401));
  std::vector<const Quantile*> ptrs;
  for (const auto& q : qs) ptrs.push_back(&q);
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = random_convex(rng, 6);
    const Quantile q = interpolate_quantiles(ptrs, w);
    // Recompute the combination pointwise from the node quantiles.
    double prev = -1e300;
    for (double lv : q.levels) {
      double x = 0.0;
      for (int j = 0; j < 6; ++j) x += w[j] * qs[j].at(lv);
      REQUIRE(x >= prev - 1e-12);
      prev = x;
    }
    for (std::size_t i = 1; i < q.positions.size(); ++i) REQUIRE(q.positions[i] >= q.positions[i - 1]);
  }
}

TEST_CASE("interp by pieces on HFM snapshots") {
  const Grid1D g;
  const std::vector<Snapshot> snaps = {hfm_at(3.0, 0.02, 5.0), hfm_at(6.0, 0.02, 5.0),
                                       hfm_at(6.0, 0.05, 5.0)};
  std::vector<PieceSet> sets;
  for (const auto& s : snaps) sets.push_back(analyze(s, g, 1e-8, 401));
  std::vector<const PieceSet*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);

  SUBCASE("single snapshot gives the CDFs of its own pieces") {
    const auto c = interp_by_pieces({ptrs[0]}, {1.0}, g);
    REQUIRE(c.size() == 3);
    const Density d = differentiate(snaps[0], g);
    for (std::size_t j = 0; j < 3; ++j) {
      const Piece& p = sets[0].pieces[j];
      const Density own = p.restricted(d);
      double acc = 0.0, err = 0.0;
      for (std::size_t i = 0; i < g.n_cells; ++i) {
        acc += g.dx() * own.values[i];
        err = std::max(err, std::abs(acc - c[j].values[i]));
      }
      CHECK(err <= 1e-9 * std::abs(p.mass));
      CHECK(c[j].mass == doctest::Approx(p.mass).epsilon(1e-12));
      CHECK(c[j].sign == p.sign);
    }
  }

  SUBCASE("candidates are monotone for random weights") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 100; ++rep) {
      const auto c = interp_by_pieces(ptrs, random_convex(rng, 3), g);
      REQUIRE(c.size() == 3);
      for (const auto& cand : c)
        for (std::size_t i = 1; i < cand.values.size(); ++i)
          REQUIRE(cand.sign * (cand.values[i] - cand.values[i - 1]) >= -1e-12);
    }
  }

  SUBCASE("weight continuity") {
    // |dI| <= 2 L sum_j max_m |m_j| |dw|_1 with L the domain length.
    double bound = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      double mmax = 0.0;
      for (const auto& s : sets) mmax = std::max(mmax, std::abs(s.pieces[j].mass));
      bound += 2.0 * (g.x_hi - g.x_lo) * mmax;
    }
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 30; ++rep) {
      const auto w = random_convex(rng, 3);
      auto w2 = w;
      const double eps = 1e-3 * (rep + 1);
      w2[0] = std::max(0.0, w2[0] - eps);
      w2[1] += w[0] - w2[0];
      double dw = 0.0;
      for (int k = 0; k < 3; ++k) dw += std::abs(w[k] - w2[k]);
      const auto a = interp_by_pieces(ptrs, w, g), b = interp_by_pieces(ptrs, w2, g);
      double diff = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < g.n_cells; ++i) diff += g.dx() * std::abs(a[j].values[i] - b[j].values[i]);
      CHECK(diff <= bound * dw + 1e-12);
    }
  }

  SUBCASE("signature mismatch and empty signatures are rejected") {
    const PieceSet zero = analyze(hfm_at(3.0, 0.02, 0.0), g, 1e-8, 401);
    CHECK_THROWS_AS(interp_by_pieces({ptrs[0], &zero}, {0.5, 0.5}, g), Error);
    CHECK_THROWS_AS(interp_by_pieces({&zero}, {1.0}, g), Error);
  }
}
