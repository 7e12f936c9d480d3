// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dirom/basis.hpp"
#include "dirom/common.hpp"
#include "dirom/hfm.hpp"
#include "dirom/param_space.hpp"

namespace dirom {

/// M x M x M tensor symmetric in its last two indices, stored packed.
class SymmetricTensor3 {
public:
  SymmetricTensor3() = default;
  explicit SymmetricTensor3(std::size_t m)
      : m_(m), pairs_(m * (m + 1) / 2), data_(m * pairs_, 0.0) {}

  std::size_t dim() const { return m_; }
  std::size_t pairs() const { return pairs_; }
  static std::size_t pair_index(std::size_t k, std::size_t p) {
    if (k > p) std::swap(k, p);
    return p * (p + 1) / 2 + k;
  }
  double operator()(std::size_t j, std::size_t k, std::size_t p) const {
    return data_[j * pairs_ + pair_index(k, p)];
  }
  double& at(std::size_t j, std::size_t pair) { return data_[j * pairs_ + pair]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  /// out_j = sum_{k,p} T_jkp r_k r_p.
  void contract(const double* r, double* out) const;

private:
  std::size_t m_ = 0;
  std::size_t pairs_ = 0;
  std::vector<double> data_;
};

/// F_jkp = 1/2 dx sum_i W_ij W_ik W_ip.
SymmetricTensor3 build_flux_tensor(const Matrix& W, double dx);
/// Projection of the upwind flux difference: F minus its one-cell shift.
SymmetricTensor3 build_upwind_flux_tensor(const Matrix& W, double dx);
/// S_jq = amplitude * dx * sum_i W_ij x_i^q / q!.
Matrix build_source_matrix(const Matrix& W, const Grid1D& grid, std::size_t Q,
                           double amplitude);

enum class FluxMode { automatic, tensor, reconstruct };

struct RomOperators {
  std::size_t ell = 0;
  std::size_t m = 0;
  std::size_t M = 0;
  std::size_t Q = 0;
  bool has_tensor = false;
  SymmetricTensor3 flux;
  std::vector<double> boundary;  // b_j = 1/2 dx W_0j, multiplies mu1^2
  Matrix source;                 // M x Q
  Matrix entry_map;              // M x M_prev; empty on the first slab
};

RomOperators build_operators(const LocalBasis& basis, const Grid1D& grid, std::size_t Q,
                             double amplitude, FluxMode mode, const LocalBasis* previous);

struct RomState {
  std::vector<double> r;
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t m = 0;
};

/// One reduced step. `basis` is only needed when the operators carry no
/// tensor; the tensor route never touches grid-sized data.
void rom_step(RomState& state, const RomOperators& ops, const ParamPoint& mu, double dt,
              double dx, const Matrix* basis = nullptr);

std::vector<double> reconstruct(const Matrix& W, const std::vector<double>& r);
std::vector<double> project(const Matrix& W, const std::vector<double>& u, double dx);

struct ElementModel {
  LocalBasis basis;
  RomOperators ops;
};

/// Read-only view of the offline data used by online solves.
class OfflineDb {
public:
  using Loader = std::function<std::shared_ptr<const ElementModel>(std::size_t, std::size_t)>;

  Grid1D grid;
  double dt = 0.0125;
  TimePartition partition;
  Triangulation tri;
  ParamDomain domain;
  std::size_t horizon_steps = 0;

  void set_loader(Loader loader) { loader_ = std::move(loader); }
  void insert(std::size_t ell, std::size_t m, std::shared_ptr<const ElementModel> model);
  std::shared_ptr<const ElementModel> element(std::size_t ell, std::size_t m) const;
  void clear_cache();

private:
  Loader loader_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const ElementModel>>
      cache_;
};

struct RomOptions {
  std::size_t record_stride = 1;
  bool record = true;
  bool collect = false;
  bool allow_extrapolation = false;
};

struct CoefficientRecord {
  std::size_t m = 0;
  std::vector<double> r;
};

struct RomResult {
  std::size_t ell = 0;
  Trajectory trajectory;
  std::vector<CoefficientRecord> coefficients;
};

std::size_t steps_for(double t_final, double dt);

RomResult rom_solve(const OfflineDb& db, const ParamPoint& mu, double t_final,
                    const RomOptions& opts = {});

void write_operators(const std::string& path, const RomOperators& ops);
RomOperators read_operators(const std::string& path);

}  // namespace dirom
