// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace dirom {

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t j = 0; j < a.cols; ++j)
    for (std::size_t i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matrix dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (std::size_t j = 0; j < b.cols; ++j) {
    double* cj = c.col(j);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const double* ak = a.col(k);
      for (std::size_t i = 0; i < a.rows; ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b, double scale) {
  require(a.rows == b.rows, "matrix dimension mismatch");
  Matrix c(a.cols, b.cols);
  for (std::size_t j = 0; j < b.cols; ++j) {
    const double* bj = b.col(j);
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double* ai = a.col(i);
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows; ++k) s += ai[k] * bj[k];
      c(i, j) = scale * s;
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
  require(a.cols == x.size(), "matrix-vector dimension mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t j = 0; j < a.cols; ++j) {
    const double xj = x[j];
    const double* aj = a.col(j);
    for (std::size_t i = 0; i < a.rows; ++i) y[i] += aj[i] * xj;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, "matrix dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    d = std::max(d, std::abs(a.data[i] - b.data[i]));
  return d;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(resolve_threads(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::size_t first_index = n;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        // Report the lowest failing index so errors are reproducible too.
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dirom
