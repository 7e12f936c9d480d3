// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "dirom/config.hpp"
#include "dirom/hfm.hpp"
#include "dirom/rom.hpp"
#include "dirom/store.hpp"

namespace dirom {

/// Relative paths of per-element artifacts, e.g. "basis/l3_m012.bas".
std::string element_artifact(const std::string& prefix, const char* kind, std::size_t ell,
                             std::size_t m);

HfmConfig hfm_config(const PipelineConfig& pc, const ParamPoint& mu, double t_final);

/// Full solve; writes the binary trajectory and, if `csv_path` is set, a CSV copy.
Trajectory cmd_hfm(const Config& cfg, const ParamPoint& mu, double t_final,
                   const std::string& out_path, const std::string& csv_path = {});

/// Builds the artifact store. Returns the summary also stored in summary.json.
nlohmann::json cmd_offline(const Config& cfg, const std::string& store_dir);

enum class StoreView { stage1, pod };

struct OpenStore {
  explicit OpenStore(ArtifactStore s) : store(std::move(s)) {}
  ArtifactStore store;
  Config config;
  PipelineConfig pc;
  std::shared_ptr<OfflineDb> db;
  bool reduced = false;
  std::size_t n_final = 0;
  std::size_t slabs = 0;
};

/// Verifies every artifact, then exposes the element models of the chosen
/// basis set through a lazy loader.
std::unique_ptr<OpenStore> open_store(const std::string& store_dir,
                                      StoreView view = StoreView::stage1, bool verify = true);

/// Keys of `overrides` in the named sections replace the store's values.
Config merge_sections(const Config& base, const Config& overrides,
                      const std::vector<std::string>& sections);

/// Second reduction stage plus the sub-region rank study. Only [pod] and
/// [run] keys of `overrides` are used.
nlohmann::json cmd_pod_reduce(const std::string& store_dir, const Config* overrides);

struct OnlineRequest {
  ParamPoint mu;
  double t_final = 12.0;
  bool hfm_check = false;
  std::string out_dir;
  std::size_t plot_every = 160;
};

nlohmann::json cmd_online(const OpenStore& store, const OnlineRequest& req);

/// Only [uq] and [run] keys of `overrides` are used.
nlohmann::json cmd_uq(const std::string& store_dir, const Config* overrides,
                      const std::string& out_dir);

nlohmann::json cmd_report(const std::string& store_dir, const std::string& out_dir);

}  // namespace dirom
