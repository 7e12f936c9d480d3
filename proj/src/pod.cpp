// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/pod.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "dirom/linalg.hpp"

namespace dirom {

void SnapshotMatrix::append(const std::vector<double>& r) {
  if (columns.cols == 0) columns.rows = r.size();
  require(r.size() == columns.rows, "snapshot column length mismatch");
  columns.data.insert(columns.data.end(), r.begin(), r.end());
  ++columns.cols;
}

namespace {

void fix_signs(Matrix& u) {
  for (std::size_t c = 0; c < u.cols; ++c) {
    double* uc = u.col(c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < u.rows; ++i)
      if (std::abs(uc[i]) > std::abs(uc[best])) best = i;
    if (uc[best] < 0.0)
      for (std::size_t i = 0; i < u.rows; ++i) uc[i] = -uc[i];
  }
}

Spectrum gram_spectrum(const Matrix& a) {
  const SymmetricEigen eig = jacobi_eigen(multiply_tn(a, a), 1e-14);
  const std::size_t s = a.cols;
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return eig.values[x] > eig.values[y];
  });
  const std::size_t k = std::min(a.rows, s);
  Spectrum out;
  out.sigma.resize(k);
  out.left = Matrix(a.rows, k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t j = order[c];
    out.sigma[c] = std::sqrt(std::max(eig.values[j], 0.0));
    if (out.sigma[c] == 0.0) continue;
    const std::vector<double> v(eig.vectors.col(j), eig.vectors.col(j) + s);
    const std::vector<double> av = multiply(a, v);
    for (std::size_t i = 0; i < a.rows; ++i) out.left(i, c) = av[i] / out.sigma[c];
  }
  return out;
}

}  // namespace

Spectrum svd_spectrum(const Matrix& a, SvdMethod method) {
  require(a.rows > 0 && a.cols > 0, "snapshot matrix must be non-empty");
  Spectrum out;
  if (method == SvdMethod::gram_jacobi) {
    out = gram_spectrum(a);
  } else {
    Svd svd = jacobi_svd(a);
    out.sigma = std::move(svd.sigma);
    out.left = std::move(svd.u);
  }
  fix_signs(out.left);
  return out;
}

std::size_t truncation_rank(const std::vector<double>& sigma, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "POD threshold must lie in (0, 1)");
  if (sigma.empty() || !(sigma.front() > 0.0)) return 0;
  std::size_t k = 0;
  for (double s : sigma)
    if (s / sigma.front() > threshold) ++k;
  return k;
}

LocalBasis pod_truncate(const Spectrum& spectrum, double threshold, const LocalBasis& basis) {
  const std::size_t k = truncation_rank(spectrum.sigma, threshold);
  if (k == 0)
    fail(ErrorKind::numerical, "all-zero snapshot matrix on element (" +
                                   std::to_string(basis.ell) + ", " +
                                   std::to_string(basis.m) + ")");
  require(spectrum.left.rows == basis.M(), "spectrum does not match basis dimension");
  Matrix modes(spectrum.left.rows, k);
  std::copy(spectrum.left.data.begin(),
            spectrum.left.data.begin() + static_cast<std::ptrdiff_t>(k * spectrum.left.rows),
            modes.data.begin());
  LocalBasis out = basis;
  out.W = multiply(basis.W, modes);
  out.reduced = true;
  return out;
}

std::map<ElementKey, SnapshotMatrix> collect_sweep(const std::vector<ParamPoint>& samples,
                                                   const OfflineDb& db, double t_final,
                                                   std::size_t threads) {
  std::map<ElementKey, SnapshotMatrix> out;
  RomOptions opts;
  opts.record = false;
  opts.collect = true;
  // Batches bound memory while keeping the merge in sample order.
  const std::size_t batch = std::max<std::size_t>(1, 4 * resolve_threads(threads));
  for (std::size_t start = 0; start < samples.size(); start += batch) {
    const std::size_t count = std::min(batch, samples.size() - start);
    std::vector<RomResult> results(count);
    parallel_for(count, threads, [&](std::size_t i) {
      results[i] = rom_solve(db, samples[start + i], t_final, opts);
    });
    for (const RomResult& res : results)
      for (const CoefficientRecord& rec : res.coefficients) {
        SnapshotMatrix& sm = out[{res.ell, rec.m}];
        sm.ell = res.ell;
        sm.m = rec.m;
        sm.append(rec.r);
      }
  }
  return out;
}

void write_spectrum_csv(const std::string& path, const std::vector<double>& sigma) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os << std::setprecision(17) << "n,sigma,ratio\n";
  for (std::size_t i = 0; i < sigma.size(); ++i)
    os << i + 1 << "," << sigma[i] << "," << (sigma[0] > 0 ? sigma[i] / sigma[0] : 0.0) << "\n";
}

}  // namespace dirom
