// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "dirom/common.hpp"
#include "dirom/param_space.hpp"
#include "dirom/transport.hpp"

namespace dirom {

struct SamplingSpec {
  std::size_t p_t = 3;
  std::size_t p_mu1 = 5;
  std::size_t p_mu2 = 5;
};

struct SignatureReport {
  bool ok = false;
  std::array<Signature, 6> node_signatures;
  std::string describe() const;
};

SignatureReport check_signature_condition(const Element& e,
                                          const std::array<const Snapshot*, 6>& nodes,
                                          const Grid1D& grid, double tol_rel);
SignatureReport check_signature_condition(const std::array<const PieceSet*, 6>& nodes);

/// Prism nodes first, then the bounding-box grid points inside the prism;
/// time is the outer loop.
std::vector<Alpha> sample_element(const Element& e, std::size_t p_t, std::size_t p_mu1,
                                  std::size_t p_mu2);

struct LocalBasis {
  std::size_t ell = 0;
  std::size_t m = 0;
  Matrix W;  // N x M, orthonormal under dx * sum(a*b)
  Signature signature;
  bool signature_ok = true;
  bool fallback = false;
  bool reduced = false;
  SamplingSpec sampling;
  std::size_t candidate_count = 0;

  std::size_t M() const { return W.cols; }
};

/// Modified Gram-Schmidt with one re-orthogonalization pass.
class GramSchmidt {
public:
  GramSchmidt(std::size_t n, double dx, double tol) : n_(n), dx_(dx), tol_(tol) {}
  bool add(std::vector<double> v);
  std::size_t size() const { return cols_.size(); }
  Matrix matrix() const;

private:
  double dot(const std::vector<double>& a, const std::vector<double>& b) const;
  std::size_t n_;
  double dx_;
  double tol_;
  std::vector<std::vector<double>> cols_;
};

LocalBasis build_local_basis(const Element& e, const std::array<const PieceSet*, 6>& nodes,
                             const std::vector<Alpha>& samples, const Grid1D& grid,
                             double gs_tol);

/// Basis for elements whose nodes disagree in signature: nodes sharing a
/// signature are interpolated among themselves, and the raw trajectory
/// snapshots of the slab are added.
LocalBasis build_fallback_basis(const Element& e, const std::array<const PieceSet*, 6>& nodes,
                                const std::vector<const Snapshot*>& raw,
                                const std::vector<Alpha>& samples, const Grid1D& grid,
                                double gs_tol);

/// dx * W_to^T W_from.
Matrix transition_matrix(const LocalBasis& from, const LocalBasis& to, double dx);

void write_basis(const std::string& path, const LocalBasis& b);
LocalBasis read_basis(const std::string& path);

}  // namespace dirom
