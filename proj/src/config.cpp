// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "dirom/store.hpp"

namespace dirom {

namespace {

struct Section {
  const char* name;
  std::vector<std::pair<const char*, const char*>> keys;
};

const std::vector<Section>& schema() {
  static const std::vector<Section> s = {
      {"grid", {{"n_cells", "250"}, {"x_lo", "0"}, {"x_hi", "100"}}},
      {"hfm", {{"dt", "0.0125"}, {"source_amplitude", "0.02"}}},
      {"params",
       {{"mu1_min", "3"},
        {"mu1_max", "9"},
        {"mu2_min", "0.02"},
        {"mu2_max", "0.075"},
        {"anchors_mu1", "3,6,9"},
        {"anchors_mu2", "0.02,0.05,0.075"}}},
      {"time", {{"slab_steps", "20"}, {"t_final", "12"}, {"allow_truncation", "false"}}},
      {"basis",
       {{"p_t", "5"},
        {"p_mu1", "5"},
        {"p_mu2", "5"},
        {"fallback_p_t", "2"},
        {"fallback_p_mu1", "3"},
        {"fallback_p_mu2", "65"},
        {"transient_fallback", "true"},
        {"transient_end", "1"},
        {"gs_tol", "1e-10"},
        {"tol_rel", "1e-8"},
        {"quantile_levels", "401"}}},
      {"rom", {{"q_terms", "40"}, {"flux_mode", "auto"}}},
      {"pod",
       {{"enabled", "false"},
        {"threshold", "1e-8"},
        {"samples", "200"},
        {"lattice", "6"},
        {"seed", "1"},
        {"svd", "one_sided"},
        {"subregion", "6,7,0.06,0.075"},
        {"subregion_samples", "50"}}},
      {"uq",
       {{"samples", "10000"},
        {"seed", "2018"},
        {"hfm_check", "false"},
        {"qoi_time", "12"},
        {"qoi_tol", "1e-4"},
        {"basis", "stage1"},
        {"kde_grid", "64"},
        {"surrogate_degree", "5"},
        {"windows", "4"}}},
      {"run", {{"threads", "0"}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  fail(ErrorKind::config, "config key '" + key + "': '" + value + "' is not " + expected);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty())
    bad_value(key, v, "a number");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty())
    bad_value(key, v, "a non-negative integer");
  return out;
}

}  // namespace

Config::Config() {
  for (const Section& s : schema())
    for (const auto& [k, v] : s.keys) values_[std::string(s.name) + "." + k] = v;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream is(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::config, where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(schema().begin(), schema().end(),
                                     [&](const Section& s) { return section == s.name; });
      if (!known) fail(ErrorKind::config, where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::config, where + ": expected key = value");
    if (section.empty()) fail(ErrorKind::config, where + ": key outside any section");
    try {
      c.set(section + "." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(ErrorKind::config, where + ": " + e.what());
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::config, "cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::config, "unknown config key '" + key + "'");
  it->second = trim(value);
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    fail(ErrorKind::config, "expected section.key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorKind::config, "unknown config key '" + key + "'");
  return it->second;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

double Config::get_double(const std::string& key) const { return parse_double(key, get(key)); }

std::size_t Config::get_size(const std::string& key) const {
  return static_cast<std::size_t>(parse_u64(key, get(key)));
}

std::uint64_t Config::get_u64(const std::string& key) const { return parse_u64(key, get(key)); }

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) bad_value(key, get(key), "a comma-separated list");
  return out;
}

std::string Config::canonical(const std::vector<std::string>& sections) const {
  std::ostringstream os;
  for (const Section& s : schema()) {
    const std::string name = s.name;
    if (sections.empty() ? name == "run"
                         : std::find(sections.begin(), sections.end(), name) == sections.end())
      continue;
    os << "[" << name << "]\n";
    std::vector<std::string> keys;
    for (const auto& kv : s.keys) keys.emplace_back(kv.first);
    std::sort(keys.begin(), keys.end());
    for (const std::string& k : keys) os << k << " = " << get(name + "." + k) << "\n";
  }
  return os.str();
}

std::string Config::hash() const {
  return sha256_hex(canonical({"grid", "hfm", "params", "time", "basis", "rom"}));
}

PipelineConfig PipelineConfig::from(const Config& c) {
  PipelineConfig p;
  p.grid.n_cells = c.get_size("grid.n_cells");
  p.grid.x_lo = c.get_double("grid.x_lo");
  p.grid.x_hi = c.get_double("grid.x_hi");
  p.dt = c.get_double("hfm.dt");
  p.source_amplitude = c.get_double("hfm.source_amplitude");
  p.domain = {c.get_double("params.mu1_min"), c.get_double("params.mu1_max"),
              c.get_double("params.mu2_min"), c.get_double("params.mu2_max")};
  p.anchors_mu1 = c.get_list("params.anchors_mu1");
  p.anchors_mu2 = c.get_list("params.anchors_mu2");
  p.slab_steps = c.get_size("time.slab_steps");
  p.t_final = c.get_double("time.t_final");
  p.allow_truncation = c.get_bool("time.allow_truncation");
  p.sampling = {c.get_size("basis.p_t"), c.get_size("basis.p_mu1"), c.get_size("basis.p_mu2")};
  p.fallback_sampling = {c.get_size("basis.fallback_p_t"), c.get_size("basis.fallback_p_mu1"),
                         c.get_size("basis.fallback_p_mu2")};
  p.transient_fallback = c.get_bool("basis.transient_fallback");
  p.transient_end = c.get_double("basis.transient_end");
  p.gs_tol = c.get_double("basis.gs_tol");
  p.tol_rel = c.get_double("basis.tol_rel");
  p.quantile_levels = c.get_size("basis.quantile_levels");
  p.q_terms = c.get_size("rom.q_terms");
  const std::string mode = c.get("rom.flux_mode");
  if (mode == "auto") p.flux_mode = FluxMode::automatic;
  else if (mode == "tensor") p.flux_mode = FluxMode::tensor;
  else if (mode == "reconstruct") p.flux_mode = FluxMode::reconstruct;
  else bad_value("rom.flux_mode", mode, "one of auto, tensor, reconstruct");
  p.pod_enabled = c.get_bool("pod.enabled");
  p.pod_threshold = c.get_double("pod.threshold");
  p.pod_samples = c.get_size("pod.samples");
  p.pod_lattice = c.get_size("pod.lattice");
  p.pod_seed = c.get_u64("pod.seed");
  const std::string svd = c.get("pod.svd");
  if (svd == "one_sided") p.svd_method = SvdMethod::one_sided_jacobi;
  else if (svd == "gram") p.svd_method = SvdMethod::gram_jacobi;
  else bad_value("pod.svd", svd, "one of one_sided, gram");
  const auto box = c.get_list("pod.subregion");
  if (box.size() != 4) bad_value("pod.subregion", c.get("pod.subregion"), "mu1_lo,mu1_hi,mu2_lo,mu2_hi");
  p.subregion = {box[0], box[1], box[2], box[3]};
  p.subregion_samples = c.get_size("pod.subregion_samples");
  p.uq_samples = c.get_size("uq.samples");
  p.uq_seed = c.get_u64("uq.seed");
  p.uq_hfm_check = c.get_bool("uq.hfm_check");
  p.uq_time = c.get_double("uq.qoi_time");
  p.qoi_tol = c.get_double("uq.qoi_tol");
  const std::string uq_basis = c.get("uq.basis");
  if (uq_basis == "stage1") p.uq_pod = false;
  else if (uq_basis == "pod") p.uq_pod = true;
  else bad_value("uq.basis", uq_basis, "one of stage1, pod");
  p.kde_grid = c.get_size("uq.kde_grid");
  p.surrogate_degree = static_cast<int>(c.get_size("uq.surrogate_degree"));
  p.correlation_windows = c.get_size("uq.windows");
  p.threads = c.get_size("run.threads");

  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::config, msg);
  };
  check(p.grid.n_cells >= 2 && p.grid.x_hi > p.grid.x_lo, "grid must have >= 2 cells and x_hi > x_lo");
  check(p.dt > 0.0, "hfm.dt must be positive");
  check(p.domain.mu1_lo < p.domain.mu1_hi && p.domain.mu2_lo < p.domain.mu2_hi,
        "parameter bounds must be increasing");
  check(p.anchors_mu1.size() >= 2 && p.anchors_mu2.size() >= 2, "need at least 2 anchors per axis");
  check(p.slab_steps >= 1, "time.slab_steps must be positive");
  check(p.t_final > 0.0, "time.t_final must be positive");
  check(p.sampling.p_t >= 2 && p.sampling.p_mu1 >= 2 && p.sampling.p_mu2 >= 2,
        "basis sampling counts must be >= 2");
  check(p.fallback_sampling.p_t >= 2 && p.fallback_sampling.p_mu1 >= 2 &&
            p.fallback_sampling.p_mu2 >= 2,
        "fallback sampling counts must be >= 2");
  check(p.gs_tol > 0.0 && p.tol_rel > 0.0, "tolerances must be positive");
  check(p.quantile_levels >= 2, "basis.quantile_levels must be >= 2");
  check(p.q_terms >= 1, "rom.q_terms must be positive");
  check(p.pod_threshold > 0.0 && p.pod_threshold < 1.0, "pod.threshold must lie in (0, 1)");
  check(p.pod_samples >= 1 && p.subregion_samples >= 1, "POD sample counts must be positive");
  check(p.uq_samples >= 2, "uq.samples must be >= 2");
  check(p.qoi_tol > 0.0 && p.qoi_tol < 1.0, "uq.qoi_tol must lie in (0, 1)");
  check(p.kde_grid >= 2, "uq.kde_grid must be >= 2");
  check(p.correlation_windows >= 1, "uq.windows must be positive");
  return p;
}

std::vector<ParamPoint> PipelineConfig::anchors() const {
  std::vector<ParamPoint> out;
  for (double m2 : anchors_mu2)
    for (double m1 : anchors_mu1) out.push_back({m1, m2});
  return out;
}

}  // namespace dirom
