// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/hfm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dirom/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace dirom {

std::vector<double> Grid1D::centers() const {
  std::vector<double> x(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) x[i] = center(i);
  return x;
}

void Grid1D::validate() const {
  if (n_cells == 0) fail(ErrorKind::config, "grid needs at least one cell");
  if (!(x_hi > x_lo) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
    fail(ErrorKind::config, "grid bounds must satisfy x_lo < x_hi");
}

bool ParamDomain::contains(const ParamPoint& p, double tol) const {
  const double t1 = tol * (mu1_hi - mu1_lo), t2 = tol * (mu2_hi - mu2_lo);
  return p.mu1 >= mu1_lo - t1 && p.mu1 <= mu1_hi + t1 && p.mu2 >= mu2_lo - t2 &&
         p.mu2 <= mu2_hi + t2;
}

void ParamDomain::check(const ParamPoint& p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "parameter out of range: (" << p.mu1 << ", " << p.mu2 << ")";
    fail(ErrorKind::invalid_argument, os.str());
  }
}

std::size_t HfmConfig::step_count() const {
  const double steps = t_final / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    fail(ErrorKind::config, "t_final must be an integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}

void HfmConfig::validate() const {
  grid.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::config, "dt must be positive");
  if (t_final < 0.0) fail(ErrorKind::config, "t_final must be non-negative");
  if (snapshot_stride == 0) fail(ErrorKind::config, "snapshot_stride must be positive");
  if (!std::isfinite(mu.mu1) || !std::isfinite(mu.mu2))
    fail(ErrorKind::config, "parameters must be finite");
}

double godunov_flux(double u_left, double u_right) {
  const double a = std::max(u_left, 0.0);
  const double b = std::min(u_right, 0.0);
  return std::max(0.5 * a * a, 0.5 * b * b);
}

Snapshot hfm_step(const Snapshot& state, const HfmConfig& cfg, StepBalance* balance) {
  const std::size_t n = cfg.grid.n_cells;
  require(state.cells.size() == n, "snapshot length does not match grid");
  const double dx = cfg.grid.dx();
  const std::vector<double>& u = state.cells;

  double speed = 0.0;
  for (double v : u) speed = std::max(speed, std::abs(v));
  if (cfg.boundary == Boundary::inflow_outflow)
    speed = std::max(speed, std::abs(cfg.mu.mu1));
  const double cfl = cfg.dt * speed / dx;
  if (!(cfl <= 1.0)) {
    std::ostringstream os;
    os << "CFL violation at t=" << state.t << ": max wave speed " << speed
       << ", dt " << cfg.dt << ", dx " << dx << " (CFL " << cfl << ")";
    fail(ErrorKind::numerical, os.str());
  }

  std::vector<double> flux(n + 1);
  for (std::size_t k = 1; k < n; ++k) flux[k] = godunov_flux(u[k - 1], u[k]);
  if (cfg.boundary == Boundary::periodic) {
    flux[0] = godunov_flux(u[n - 1], u[0]);
    flux[n] = flux[0];
  } else {
    flux[0] = godunov_flux(cfg.mu.mu1, u[0]);
    flux[n] = godunov_flux(u[n - 1], u[n - 1]);
  }

  Snapshot next;
  next.mu = state.mu;
  next.t = state.t + cfg.dt;
  next.cells.resize(n);
  const double ratio = cfg.dt / dx;
  double source_sum = 0.0;
  double change = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = cfg.source_amplitude * std::exp(cfg.mu.mu2 * cfg.grid.center(i));
    next.cells[i] = u[i] - ratio * (flux[i + 1] - flux[i]) + cfg.dt * s;
    source_sum += s;
    change += next.cells[i] - u[i];
  }
  if (!all_finite(next.cells))
    fail(ErrorKind::numerical, "non-finite state after step at t=" + std::to_string(state.t));
  if (balance) {
    balance->mass_change = dx * change;
    balance->flux_in = flux[0];
    balance->flux_out = flux[n];
    balance->source = dx * source_sum;
  }
  return next;
}

std::size_t Trajectory::step_of(std::size_t k) const {
  return static_cast<std::size_t>(std::llround(snapshots.at(k).t / dt));
}

Trajectory hfm_solve_steps(const HfmConfig& cfg, std::size_t steps) {
  cfg.validate();
  Trajectory traj;
  traj.grid = cfg.grid;
  traj.dt = cfg.dt;
  traj.mu = cfg.mu;
  Snapshot s;
  s.mu = cfg.mu;
  s.t = 0.0;
  s.cells.assign(cfg.grid.n_cells, 0.0);
  traj.snapshots.push_back(s);
  for (std::size_t n = 1; n <= steps; ++n) {
    s = hfm_step(s, cfg);
    // Times are recomputed from the step index so they never drift.
    s.t = static_cast<double>(n) * cfg.dt;
    if (n % cfg.snapshot_stride == 0 || n == steps) traj.snapshots.push_back(s);
  }
  return traj;
}

Trajectory hfm_solve(const HfmConfig& cfg) {
  cfg.validate();
  return hfm_solve_steps(cfg, cfg.step_count());
}

namespace {

constexpr char kSnapshotMagic[8] = {'D', 'I', 'R', 'O', 'M', 'S', 'N', 'P'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::io, "truncated snapshot file");
  return v;
}

}  // namespace

// Layout: magic[8], u32 version, u32 N, u64 count, f64 dx, f64 dt, f64 mu1,
// f64 mu2, count*N f64 cells row-major, then count f64 snapshot times.
void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(traj.grid.n_cells));
  put<std::uint64_t>(os, traj.snapshots.size());
  put<double>(os, traj.grid.dx());
  put<double>(os, traj.dt);
  put<double>(os, traj.mu.mu1);
  put<double>(os, traj.mu.mu2);
  for (const auto& s : traj.snapshots) {
    require(s.cells.size() == traj.grid.n_cells, "snapshot length does not match grid");
    os.write(reinterpret_cast<const char*>(s.cells.data()),
             static_cast<std::streamsize>(s.cells.size() * sizeof(double)));
  }
  for (const auto& s : traj.snapshots) put<double>(os, s.t);
  if (!os) fail(ErrorKind::io, "write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    fail(ErrorKind::store, path + ": not a snapshot file");
  if (get<std::uint32_t>(is) != kSnapshotVersion)
    fail(ErrorKind::store, path + ": unsupported snapshot version");
  Trajectory traj;
  const auto n = get<std::uint32_t>(is);
  const auto count = get<std::uint64_t>(is);
  const double dx = get<double>(is);
  traj.dt = get<double>(is);
  traj.mu.mu1 = get<double>(is);
  traj.mu.mu2 = get<double>(is);
  // The file carries dx only; the domain starts at zero by convention.
  traj.grid.n_cells = n;
  traj.grid.x_lo = 0.0;
  traj.grid.x_hi = dx * n;
  traj.snapshots.resize(count);
  for (auto& s : traj.snapshots) {
    s.mu = traj.mu;
    s.cells.resize(n);
    is.read(reinterpret_cast<char*>(s.cells.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) fail(ErrorKind::io, "truncated snapshot file " + path);
  }
  for (auto& s : traj.snapshots) s.t = get<double>(is);
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os << std::setprecision(17);
  os << "x";
  for (const auto& s : traj.snapshots) os << ",t=" << s.t;
  os << "\n";
  for (std::size_t i = 0; i < traj.grid.n_cells; ++i) {
    os << traj.grid.center(i);
    for (const auto& s : traj.snapshots) os << "," << s.cells[i];
    os << "\n";
  }
}

}  // namespace dirom
