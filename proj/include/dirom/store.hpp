// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <json.hpp>

namespace dirom {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ArtifactEntry {
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Directory of artifacts indexed by manifest.json. Paths are relative to
/// the root; record() and write_manifest() are safe to call from any thread.
class ArtifactStore {
public:
  explicit ArtifactStore(std::filesystem::path root);
  ArtifactStore(ArtifactStore&& o) noexcept
      : root_(std::move(o.root_)), meta_(std::move(o.meta_)), artifacts_(std::move(o.artifacts_)) {}

  /// Creates the root, removing any manifest left from a previous run.
  static ArtifactStore create(const std::filesystem::path& root);
  /// Opens an existing store and loads its manifest.
  static ArtifactStore open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_of(const std::string& rel) const;
  /// Ensures the parent directory of `rel` exists and returns its path.
  std::filesystem::path prepare(const std::string& rel) const;

  void record(const std::string& rel);
  void write_text(const std::string& rel, const std::string& text);
  std::string read_text(const std::string& rel) const;
  bool contains(const std::string& rel) const;

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }
  const std::map<std::string, ArtifactEntry>& artifacts() const { return artifacts_; }

  void write_manifest();
  /// Throws a store error naming the first missing or modified artifact.
  void verify() const;

private:
  std::filesystem::path root_;
  nlohmann::json meta_ = nlohmann::json::object();
  std::map<std::string, ArtifactEntry> artifacts_;
  mutable std::mutex mutex_;
};

}  // namespace dirom
