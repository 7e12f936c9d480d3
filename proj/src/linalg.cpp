// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dirom {

HouseholderQr::HouseholderQr(Matrix a) {
  const std::size_t m = a.rows, n = a.cols;
  require(m >= n && n > 0, "QR needs a non-empty tall matrix");
  v_ = Matrix(m, n);
  beta_.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double* ck = a.col(k);
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += ck[i] * ck[i];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = ck[k] > 0.0 ? -norm : norm;
    double* vk = v_.col(k);
    for (std::size_t i = k; i < m; ++i) vk[i] = ck[i];
    vk[k] -= alpha;
    double vv = 0.0;
    for (std::size_t i = k; i < m; ++i) vv += vk[i] * vk[i];
    beta_[k] = 2.0 / vv;
    for (std::size_t j = k; j < n; ++j) {
      double* cj = a.col(j);
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += vk[i] * cj[i];
      s *= beta_[k];
      for (std::size_t i = k; i < m; ++i) cj[i] -= s * vk[i];
    }
  }
  r_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) r_(i, j) = a(i, j);
}

Matrix HouseholderQr::r() const { return r_; }

Matrix HouseholderQr::apply_q(const Matrix& x) const {
  const std::size_t m = v_.rows, n = v_.cols;
  require(x.rows == n, "apply_q dimension mismatch");
  Matrix y(m, x.cols);
  for (std::size_t c = 0; c < x.cols; ++c) {
    double* yc = y.col(c);
    std::copy(x.col(c), x.col(c) + n, yc);
    for (std::size_t k = n; k-- > 0;) {
      if (beta_[k] == 0.0) continue;
      const double* vk = v_.col(k);
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += vk[i] * yc[i];
      s *= beta_[k];
      for (std::size_t i = k; i < m; ++i) yc[i] -= s * vk[i];
    }
  }
  return y;
}

double HouseholderQr::diagonal_ratio() const {
  double lo = std::abs(r_(0, 0)), hi = lo;
  for (std::size_t i = 1; i < r_.rows; ++i) {
    lo = std::min(lo, std::abs(r_(i, i)));
    hi = std::max(hi, std::abs(r_(i, i)));
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

std::vector<double> HouseholderQr::solve(const std::vector<double>& b) const {
  const std::size_t m = v_.rows, n = v_.cols;
  require(b.size() == m, "right-hand side length mismatch");
  if (diagonal_ratio() <= 1e-12)
    fail(ErrorKind::numerical, "rank-deficient least-squares design");
  std::vector<double> y = b;
  for (std::size_t k = 0; k < n; ++k) {
    if (beta_[k] == 0.0) continue;
    const double* vk = v_.col(k);
    double s = 0.0;
    for (std::size_t i = k; i < m; ++i) s += vk[i] * y[i];
    s *= beta_[k];
    for (std::size_t i = k; i < m; ++i) y[i] -= s * vk[i];
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r_(ii, j) * x[j];
    x[ii] = s / r_(ii, ii);
  }
  return x;
}

SymmetricEigen jacobi_eigen(Matrix a, double tol_rel) {
  const std::size_t n = a.rows;
  require(a.cols == n, "eigenproblem needs a square matrix");
  SymmetricEigen out;
  out.vectors = Matrix::identity(n);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += std::abs(a(i, i));
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off_norm() > tol_rel * trace; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = out.vectors(k, p), vkq = out.vectors(k, q);
          out.vectors(k, p) = c * vkp - s * vkq;
          out.vectors(k, q) = s * vkp + c * vkq;
        }
      }
  }
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  return out;
}

namespace {

// Orthogonalizes the columns of g in place, accumulating rotations into v.
void hestenes(Matrix& g, Matrix& v) {
  const std::size_t m = g.rows, n = g.cols;
  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double* gp = g.col(p);
        double* gq = g.col(q);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += gp[i] * gp[i];
          beta += gq[i] * gq[i];
          gamma += gp[i] * gq[i];
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = gp[i], y = gq[i];
          gp[i] = c * x - s * y;
          gq[i] = s * x + c * y;
        }
        double* vp = v.col(p);
        double* vq = v.col(q);
        for (std::size_t i = 0; i < v.rows; ++i) {
          const double x = vp[i], y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    if (!rotated) return;
  }
}

}  // namespace

Svd jacobi_svd(const Matrix& a) {
  require(a.rows > 0 && a.cols > 0, "SVD of an empty matrix");
  const bool wide = a.cols > a.rows;
  // Work on the tall orientation B; after QR only the small R factor is rotated.
  const Matrix b = wide ? transpose(a) : a;
  const HouseholderQr qr(b);
  Matrix g = qr.r();
  const std::size_t k = g.cols;
  Matrix v = Matrix::identity(k);
  hestenes(g, v);

  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.rows; ++i) s += g(i, j) * g(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  // B = Q R and R V = G, so B V = Q G; the right factor of B is V.
  Svd out;
  out.sigma.resize(k);
  Matrix right_b(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    out.sigma[c] = sigma[order[c]];
    std::copy(v.col(order[c]), v.col(order[c]) + k, right_b.col(c));
  }
  // Left vectors of B: Q g / sigma.
  Matrix g_sorted(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    if (out.sigma[c] == 0.0) continue;
    const double* gc = g.col(order[c]);
    for (std::size_t i = 0; i < k; ++i) g_sorted(i, c) = gc[i] / out.sigma[c];
  }
  Matrix left_b = qr.apply_q(g_sorted);
  if (wide) {
    out.u = std::move(right_b);
    out.v = std::move(left_b);
  } else {
    out.u = std::move(left_b);
    out.v = std::move(right_b);
  }
  return out;
}

}  // namespace dirom
