// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dirom {

struct Grid1D {
  std::size_t n_cells = 250;
  double x_lo = 0.0;
  double x_hi = 100.0;

  double dx() const { return (x_hi - x_lo) / static_cast<double>(n_cells); }
  double center(std::size_t i) const {
    return x_lo + (static_cast<double>(i) + 0.5) * dx();
  }
  /// Position of interface k, k = 0..n_cells.
  double interface_x(std::size_t k) const {
    return x_lo + static_cast<double>(k) * dx();
  }
  std::vector<double> centers() const;
  void validate() const;
  bool operator==(const Grid1D&) const = default;
};

struct ParamPoint {
  double mu1 = 0.0;
  double mu2 = 0.0;
  bool operator==(const ParamPoint&) const = default;
};

struct ParamDomain {
  double mu1_lo = 3.0, mu1_hi = 9.0;
  double mu2_lo = 0.02, mu2_hi = 0.075;

  bool contains(const ParamPoint& p, double tol = 1e-12) const;
  /// Throws "parameter out of range" unless `p` is inside.
  void check(const ParamPoint& p) const;
};

struct Snapshot {
  ParamPoint mu;
  double t = 0.0;
  std::vector<double> cells;
};

enum class Boundary { inflow_outflow, periodic };

struct HfmConfig {
  Grid1D grid;
  double dt = 0.0125;
  double t_final = 12.0;
  ParamPoint mu;
  std::size_t snapshot_stride = 1;
  double source_amplitude = 0.02;
  Boundary boundary = Boundary::inflow_outflow;

  /// Number of steps implied by t_final; t_final must be a multiple of dt.
  std::size_t step_count() const;
  void validate() const;
};

/// Exact Godunov flux for f(u) = u^2/2.
double godunov_flux(double u_left, double u_right);

/// Per-step terms of the discrete mass balance.
struct StepBalance {
  double mass_change = 0.0;  // dx * sum(U_new - U_old)
  double flux_in = 0.0;
  double flux_out = 0.0;
  double source = 0.0;       // dx * sum(s_i)
};

Snapshot hfm_step(const Snapshot& state, const HfmConfig& cfg,
                  StepBalance* balance = nullptr);

struct Trajectory {
  Grid1D grid;
  double dt = 0.0;
  ParamPoint mu;
  std::vector<Snapshot> snapshots;

  std::size_t step_of(std::size_t k) const;
};

Trajectory hfm_solve(const HfmConfig& cfg);
/// Runs exactly `steps` steps regardless of cfg.t_final.
Trajectory hfm_solve_steps(const HfmConfig& cfg, std::size_t steps);

void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace dirom
