// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirom/basis.hpp"
#include "dirom/common.hpp"
#include "dirom/rom.hpp"

namespace dirom {

struct SnapshotMatrix {
  std::size_t ell = 0;
  std::size_t m = 0;
  Matrix columns;  // M x S

  void append(const std::vector<double>& r);
};

enum class SvdMethod { one_sided_jacobi, gram_jacobi };

struct Spectrum {
  std::vector<double> sigma;  // descending, min(M, S) entries
  Matrix left;                // M x min(M, S)
};

Spectrum svd_spectrum(const Matrix& a, SvdMethod method = SvdMethod::one_sided_jacobi);

/// Number of singular values with sigma_n / sigma_1 > threshold.
std::size_t truncation_rank(const std::vector<double>& sigma, double threshold);

/// Reduced basis W U_k; throws when every singular value vanishes.
LocalBasis pod_truncate(const Spectrum& spectrum, double threshold, const LocalBasis& basis);

using ElementKey = std::pair<std::size_t, std::size_t>;

/// Runs the reduced model for every sample and gathers its coefficient
/// vectors by element, in sample order. Never calls the full solver.
std::map<ElementKey, SnapshotMatrix> collect_sweep(const std::vector<ParamPoint>& samples,
                                                   const OfflineDb& db, double t_final,
                                                   std::size_t threads);

void write_spectrum_csv(const std::string& path, const std::vector<double>& sigma);

}  // namespace dirom
