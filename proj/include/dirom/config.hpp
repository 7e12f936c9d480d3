// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dirom/basis.hpp"
#include "dirom/hfm.hpp"
#include "dirom/pod.hpp"
#include "dirom/rom.hpp"

namespace dirom {

/// `key = value` text with `[section]` headers. Keys are addressed as
/// "section.key"; only keys from the built-in schema are accepted.
class Config {
public:
  Config();

  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Accepts "section.key=value".
  void set_assignment(const std::string& assignment);
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Sections in schema order, keys sorted. An empty list means every
  /// section except [run].
  std::string canonical(const std::vector<std::string>& sections = {}) const;
  /// SHA-256 over the sections that shape offline artifacts.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

struct PipelineConfig {
  Grid1D grid;
  double dt = 0.0125;
  double source_amplitude = 0.02;
  ParamDomain domain;
  std::vector<double> anchors_mu1{3.0, 6.0, 9.0};
  std::vector<double> anchors_mu2{0.02, 0.05, 0.075};
  std::size_t slab_steps = 20;
  double t_final = 12.0;
  bool allow_truncation = false;
  SamplingSpec sampling{5, 5, 5};
  SamplingSpec fallback_sampling{2, 3, 65};
  bool transient_fallback = true;
  /// Failing slabs starting before this time use the fallback basis.
  double transient_end = 1.0;
  double gs_tol = 1e-10;
  double tol_rel = 1e-8;
  std::size_t quantile_levels = 401;
  std::size_t q_terms = 40;
  FluxMode flux_mode = FluxMode::automatic;
  double pod_threshold = 1e-8;
  std::size_t pod_samples = 200;
  /// Barycentric lattice order per triangle added to the sweep; 0 disables it.
  std::size_t pod_lattice = 6;
  std::uint64_t pod_seed = 1;
  SvdMethod svd_method = SvdMethod::one_sided_jacobi;
  bool pod_enabled = false;
  ParamDomain subregion{6.0, 7.0, 0.06, 0.075};
  std::size_t subregion_samples = 50;
  std::size_t uq_samples = 10000;
  std::uint64_t uq_seed = 2018;
  bool uq_hfm_check = false;
  double uq_time = 12.0;
  /// Piece tolerance for QoIs of reduced solutions, which carry small wiggles.
  double qoi_tol = 1e-4;
  /// Run the sweep on the POD-reduced bases instead of the local bases.
  bool uq_pod = false;
  std::size_t kde_grid = 64;
  int surrogate_degree = 5;
  std::size_t correlation_windows = 4;
  std::size_t threads = 0;

  static PipelineConfig from(const Config& c);
  /// Anchors with mu1 varying fastest.
  std::vector<ParamPoint> anchors() const;
  TimePartition partition() const { return TimePartition{slab_steps}; }
};

}  // namespace dirom
