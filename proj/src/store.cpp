// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/store.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "dirom/common.hpp"

namespace dirom {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr int kStoreVersion = 1;

class Sha256 {
public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      fail(ErrorKind::io, "SHA-256 initialisation failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) fail(ErrorKind::io, "SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1)
      fail(ErrorKind::io, "SHA-256 finalisation failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 15]);
    }
    return out;
  }

private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::store, "cannot read artifact " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (is) {
    is.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  return h.hex();
}

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {}

ArtifactStore ArtifactStore::create(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root))
    fail(ErrorKind::io, "cannot create store directory " + root.string());
  fs::remove(root / kManifest, ec);
  return ArtifactStore(root);
}

ArtifactStore ArtifactStore::open(const fs::path& root) {
  ArtifactStore s(root);
  const fs::path mpath = root / kManifest;
  std::ifstream is(mpath);
  if (!is) fail(ErrorKind::store, "store incomplete: missing " + mpath.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception&) {
    fail(ErrorKind::store, "store manifest is not valid JSON: " + mpath.string());
  }
  if (j.value("version", 0) != kStoreVersion)
    fail(ErrorKind::store, "unsupported store version in " + mpath.string());
  for (const auto& a : j.at("artifacts"))
    s.artifacts_[a.at("path").get<std::string>()] = {a.at("sha256").get<std::string>(),
                                                      a.at("bytes").get<std::uintmax_t>()};
  s.meta_ = j.value("meta", nlohmann::json::object());
  return s;
}

fs::path ArtifactStore::path_of(const std::string& rel) const { return root_ / rel; }

fs::path ArtifactStore::prepare(const std::string& rel) const {
  const fs::path p = path_of(rel);
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) fail(ErrorKind::io, "cannot create directory " + p.parent_path().string());
  return p;
}

void ArtifactStore::record(const std::string& rel) {
  const fs::path p = path_of(rel);
  ArtifactEntry e{sha256_file(p), fs::file_size(p)};
  std::lock_guard lock(mutex_);
  artifacts_[rel] = std::move(e);
}

void ArtifactStore::write_text(const std::string& rel, const std::string& text) {
  const fs::path p = prepare(rel);
  {
    std::ofstream os(p, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot write " + p.string());
    os << text;
  }
  record(rel);
}

std::string ArtifactStore::read_text(const std::string& rel) const {
  std::ifstream is(path_of(rel), std::ios::binary);
  if (!is) fail(ErrorKind::store, "store incomplete: missing artifact " + rel);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool ArtifactStore::contains(const std::string& rel) const {
  std::lock_guard lock(mutex_);
  return artifacts_.count(rel) != 0;
}

void ArtifactStore::write_manifest() {
  std::lock_guard lock(mutex_);
  nlohmann::json j;
  j["format"] = "dirom-store";
  j["version"] = kStoreVersion;
  j["meta"] = meta_;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [path, e] : artifacts_)
    arr.push_back({{"path", path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  j["artifacts"] = std::move(arr);
  const fs::path p = root_ / kManifest;
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot write " + p.string());
  os << j.dump(2) << "\n";
}

void ArtifactStore::verify() const {
  std::lock_guard lock(mutex_);
  for (const auto& [path, e] : artifacts_) {
    const fs::path p = path_of(path);
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) fail(ErrorKind::store, "missing artifact: " + path);
    if (fs::file_size(p, ec) != e.bytes || sha256_file(p) != e.sha256)
      fail(ErrorKind::store, "corrupt artifact: " + path);
  }
}

}  // namespace dirom
