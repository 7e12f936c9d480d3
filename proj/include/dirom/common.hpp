// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirom {

enum class ErrorKind { invalid_argument, config, numerical, store, io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

/// Dense column-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double v = 0.0)
      : rows(r), cols(c), data(r * c, v) {}

  double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
  bool empty() const { return data.empty(); }

  static Matrix identity(std::size_t n);
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
/// a^T b scaled by `scale`.
Matrix multiply_tn(const Matrix& a, const Matrix& b, double scale = 1.0);
std::vector<double> multiply(const Matrix& a, const std::vector<double>& x);
double max_abs_diff(const Matrix& a, const Matrix& b);

bool all_finite(const std::vector<double>& v);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
/// Callers write results into per-index slots, so output never depends on
/// scheduling.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

std::size_t resolve_threads(std::size_t requested);

}  // namespace dirom
