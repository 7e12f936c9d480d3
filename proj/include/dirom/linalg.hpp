// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "dirom/common.hpp"

namespace dirom {

/// Householder QR of a tall matrix, kept in compact form.
class HouseholderQr {
public:
  explicit HouseholderQr(Matrix a);

  Matrix r() const;
  /// Minimizes ||A x - b||_2; throws when A is numerically rank deficient.
  std::vector<double> solve(const std::vector<double>& b) const;
  /// Q [x; 0] for x with n rows.
  Matrix apply_q(const Matrix& x) const;
  /// min |R_ii| / max |R_ii|.
  double diagonal_ratio() const;

private:
  Matrix r_;                   // n x n upper triangle
  Matrix v_;                   // m x n Householder vectors
  std::vector<double> beta_;
};

struct SymmetricEigen {
  std::vector<double> values;  // unsorted, paired with columns of vectors
  Matrix vectors;
};

/// Cyclic Jacobi; stops once the off-diagonal Frobenius norm is below
/// tol_rel times the trace magnitude.
SymmetricEigen jacobi_eigen(Matrix a, double tol_rel = 1e-14);

struct Svd {
  std::vector<double> sigma;  // descending
  Matrix u;                   // rows x k, unit columns
  Matrix v;                   // cols x k
};

/// One-sided (Hestenes) Jacobi SVD, A V = U Sigma, for any shape.
Svd jacobi_svd(const Matrix& a);

}  // namespace dirom
