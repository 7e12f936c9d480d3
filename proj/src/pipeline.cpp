// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dirom/basis.hpp"
#include "dirom/param_space.hpp"
#include "dirom/pod.hpp"
#include "dirom/svg.hpp"
#include "dirom/transport.hpp"
#include "dirom/uq.hpp"

namespace dirom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string anchor_artifact(std::size_t j) { return "hfm/anchor_" + std::to_string(j) + ".snp"; }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::io, "cannot create directory " + dir);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot write " + p.string());
  os << text;
}

struct Model {
  LocalBasis basis;
  RomOperators ops;
};

json element_json(const LocalBasis& b, const RomOperators& ops) {
  return {{"ell", b.ell},
          {"m", b.m},
          {"M", b.M()},
          {"candidates", b.candidate_count},
          {"signature", b.signature.str()},
          {"signature_ok", b.signature_ok},
          {"fallback", b.fallback},
          {"reduced", b.reduced},
          {"tensor", ops.has_tensor}};
}

}  // namespace

std::string element_artifact(const std::string& prefix, const char* kind, std::size_t ell,
                             std::size_t m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s/l%zu_m%03zu.%s", kind, ell, m, kind == std::string("basis") ? "bas" : "ops");
  return prefix + buf;
}

HfmConfig hfm_config(const PipelineConfig& pc, const ParamPoint& mu, double t_final) {
  HfmConfig c;
  c.grid = pc.grid;
  c.dt = pc.dt;
  c.t_final = t_final;
  c.mu = mu;
  c.source_amplitude = pc.source_amplitude;
  return c;
}

Trajectory cmd_hfm(const Config& cfg, const ParamPoint& mu, double t_final,
                   const std::string& out_path, const std::string& csv_path) {
  const PipelineConfig pc = PipelineConfig::from(cfg);
  pc.domain.check(mu);
  Trajectory traj = hfm_solve(hfm_config(pc, mu, t_final));
  if (!out_path.empty()) write_trajectory(out_path, traj);
  if (!csv_path.empty()) write_trajectory_csv(csv_path, traj);
  return traj;
}

json cmd_offline(const Config& cfg, const std::string& store_dir) {
  const PipelineConfig pc = PipelineConfig::from(cfg);
  const TimePartition part = pc.partition();
  const Grid1D& grid = pc.grid;
  const std::size_t n_final = steps_for(pc.t_final, pc.dt);
  const std::size_t m_last = part.time_slab(n_final);
  const std::size_t hfm_steps = part.slab_start(m_last + 1);
  const std::vector<ParamPoint> anchors = pc.anchors();
  for (const ParamPoint& a : anchors) pc.domain.check(a);

  std::vector<Trajectory> trajs(anchors.size());
  parallel_for(anchors.size(), pc.threads, [&](std::size_t j) {
    trajs[j] = hfm_solve_steps(hfm_config(pc, anchors[j], static_cast<double>(hfm_steps) * pc.dt),
                               hfm_steps);
  });
  const Triangulation tri = delaunay(anchors);

  // Piece sets at every slab boundary of every anchor.
  const std::size_t levels = m_last + 2;
  std::vector<PieceSet> pieces(anchors.size() * levels);
  parallel_for(pieces.size(), pc.threads, [&](std::size_t idx) {
    const std::size_t j = idx / levels, lvl = idx % levels;
    pieces[idx] = analyze(trajs[j].snapshots[part.slab_start(lvl)], grid, pc.tol_rel,
                          pc.quantile_levels);
  });
  auto level_of = [&](std::size_t step) { return step == 0 ? 0 : part.time_slab(step - 1) + 1; };

  const std::size_t n_tri = tri.triangles.size();
  std::vector<Element> elements;
  std::vector<std::array<const PieceSet*, 6>> node_sets;
  std::vector<SignatureReport> reports;
  for (std::size_t ell = 0; ell < n_tri; ++ell)
    for (std::size_t m = 0; m <= m_last; ++m) {
      Element e = make_element(tri, part, pc.dt, ell, m);
      std::array<const PieceSet*, 6> ns{};
      const auto nodes = e.nodes();
      for (int k = 0; k < 6; ++k)
        ns[k] = &pieces[nodes[k].anchor * levels + level_of(nodes[k].step)];
      reports.push_back(check_signature_condition(ns));
      elements.push_back(e);
      node_sets.push_back(ns);
    }

  // Failures inside the initial transient get the fallback basis; a later
  // failure truncates the horizon at its slab.
  std::size_t horizon_m = m_last + 1;
  std::vector<bool> use_fallback(elements.size(), false);
  json failures = json::array();
  for (std::size_t idx = 0; idx < elements.size(); ++idx) {
    if (reports[idx].ok) continue;
    const Element& e = elements[idx];
    failures.push_back({{"ell", e.ell}, {"m", e.m}, {"nodes", reports[idx].describe()}});
    if (pc.transient_fallback && e.t0 < pc.transient_end - 1e-12)
      use_fallback[idx] = true;
    else
      horizon_m = std::min(horizon_m, e.m);
  }
  const std::size_t horizon_steps =
      horizon_m > m_last ? n_final : std::min(n_final, part.slab_start(horizon_m));
  if (horizon_steps < n_final) {
    std::ostringstream os;
    os << "signature condition fails on slab " << horizon_m << "; covered horizon ends at t = "
       << static_cast<double>(horizon_steps) * pc.dt;
    if (!pc.allow_truncation || horizon_m == 0) fail(ErrorKind::numerical, os.str());
  }
  const std::size_t slabs = std::min(horizon_m, m_last + 1);

  std::vector<std::size_t> work;
  for (std::size_t ell = 0; ell < n_tri; ++ell)
    for (std::size_t m = 0; m < slabs; ++m) work.push_back(ell * (m_last + 1) + m);
  std::vector<Model> models(elements.size());
  parallel_for(work.size(), pc.threads, [&](std::size_t w) {
    const std::size_t idx = work[w];
    const Element& e = elements[idx];
    if (use_fallback[idx]) {
      std::vector<const Snapshot*> raw;
      for (std::size_t v : e.vertices)
        for (std::size_t n = e.n0; n <= e.n1; ++n) raw.push_back(&trajs[v].snapshots[n]);
      const auto& fs = pc.fallback_sampling;
      models[idx].basis = build_fallback_basis(e, node_sets[idx], raw,
                                               sample_element(e, fs.p_t, fs.p_mu1, fs.p_mu2),
                                               grid, pc.gs_tol);
      models[idx].basis.sampling = fs;
    } else {
      const auto& s = pc.sampling;
      models[idx].basis = build_local_basis(e, node_sets[idx],
                                            sample_element(e, s.p_t, s.p_mu1, s.p_mu2), grid,
                                            pc.gs_tol);
      models[idx].basis.sampling = s;
    }
  });
  parallel_for(work.size(), pc.threads, [&](std::size_t w) {
    const std::size_t idx = work[w];
    const LocalBasis* prev = elements[idx].m > 0 ? &models[idx - 1].basis : nullptr;
    models[idx].ops = build_operators(models[idx].basis, grid, pc.q_terms, pc.source_amplitude,
                                      pc.flux_mode, prev);
  });

  ArtifactStore store = ArtifactStore::create(store_dir);
  store.write_text("config.ini", cfg.canonical());
  store.write_text("triangulation.json", tri.to_json() + "\n");
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    const std::string rel = anchor_artifact(j);
    write_trajectory(store.prepare(rel).string(), trajs[j]);
    store.record(rel);
  }
  json el = json::array();
  for (std::size_t idx : work) {
    const Model& md = models[idx];
    const std::string b = element_artifact("", "basis", md.basis.ell, md.basis.m);
    const std::string o = element_artifact("", "ops", md.basis.ell, md.basis.m);
    write_basis(store.prepare(b).string(), md.basis);
    store.record(b);
    write_operators(store.prepare(o).string(), md.ops);
    store.record(o);
    el.push_back(element_json(md.basis, md.ops));
  }
  store.write_text("elements.json", el.dump(2) + "\n");

  json summary = {{"config_hash", cfg.hash()},
                  {"trajectories", anchors.size()},
                  {"triangles", n_tri},
                  {"slabs", slabs},
                  {"steps", n_final},
                  {"horizon_steps", horizon_steps},
                  {"horizon_t", static_cast<double>(horizon_steps) * pc.dt},
                  {"hfm_steps", hfm_steps},
                  {"fallback_elements", std::count(use_fallback.begin(), use_fallback.end(), true)},
                  {"signature_failures", failures}};
  std::size_t max_m = 0, total_m = 0;
  for (std::size_t idx : work) {
    max_m = std::max(max_m, models[idx].basis.M());
    total_m += models[idx].basis.M();
  }
  summary["max_M"] = max_m;
  summary["mean_M"] = static_cast<double>(total_m) / static_cast<double>(work.size());
  store.write_text("summary.json", summary.dump(2) + "\n");

  store.meta() = {{"config_hash", cfg.hash()},
                  {"steps", n_final},
                  {"horizon_steps", horizon_steps},
                  {"slabs", slabs},
                  {"triangles", n_tri},
                  {"anchors", anchors.size()}};
  store.write_manifest();

  if (pc.pod_enabled) summary["pod"] = cmd_pod_reduce(store_dir, nullptr);
  return summary;
}

std::unique_ptr<OpenStore> open_store(const std::string& store_dir, StoreView view, bool verify) {
  auto out = std::make_unique<OpenStore>(ArtifactStore::open(store_dir));
  ArtifactStore& store = out->store;
  if (verify) store.verify();
  for (const char* rel : {"config.ini", "triangulation.json", "elements.json"})
    if (!store.contains(rel)) fail(ErrorKind::store, std::string("store incomplete: missing ") + rel);
  try {
    out->config = Config::parse(store.read_text("config.ini"), "config.ini");
    out->pc = PipelineConfig::from(out->config);
  } catch (const Error& e) {
    fail(ErrorKind::store, std::string("stored config is invalid: ") + e.what());
  }
  const json& meta = store.meta();
  if (meta.value("config_hash", std::string()) != out->config.hash())
    fail(ErrorKind::store, "stored config does not match manifest hash");
  out->n_final = meta.at("steps").get<std::size_t>();
  out->slabs = meta.at("slabs").get<std::size_t>();
  out->reduced = view == StoreView::pod;
  if (out->reduced && !meta.contains("pod"))
    fail(ErrorKind::store, "store has no POD stage; run pod reduce first");

  auto db = std::make_shared<OfflineDb>();
  db->grid = out->pc.grid;
  db->dt = out->pc.dt;
  db->partition = out->pc.partition();
  db->domain = out->pc.domain;
  db->tri = delaunay(out->pc.anchors());
  if (db->tri.to_json() + "\n" != store.read_text("triangulation.json"))
    fail(ErrorKind::store, "corrupt artifact: triangulation.json");
  db->horizon_steps = meta.at("horizon_steps").get<std::size_t>();
  const std::string prefix = out->reduced ? "pod/" : "";
  const fs::path root = store.root();
  const std::size_t slabs = out->slabs;
  const Grid1D grid = db->grid;
  db->set_loader([root, prefix, slabs, grid](std::size_t ell, std::size_t m) {
    if (m >= slabs) fail(ErrorKind::store, "no element for slab " + std::to_string(m));
    auto model = std::make_shared<ElementModel>();
    model->basis = read_basis((root / element_artifact(prefix, "basis", ell, m)).string());
    model->ops = read_operators((root / element_artifact(prefix, "ops", ell, m)).string());
    if (model->basis.W.rows != grid.n_cells || model->basis.M() != model->ops.M ||
        model->basis.ell != ell || model->basis.m != m || model->ops.ell != ell || model->ops.m != m)
      fail(ErrorKind::store, "basis and operators disagree for element " + std::to_string(ell) +
                                 "," + std::to_string(m));
    return std::shared_ptr<const ElementModel>(std::move(model));
  });
  out->db = std::move(db);
  return out;
}

Config merge_sections(const Config& base, const Config& overrides,
                      const std::vector<std::string>& sections) {
  Config out = base;
  for (const auto& [key, value] : overrides.entries())
    for (const std::string& s : sections)
      if (key.rfind(s + ".", 0) == 0) out.set(key, value);
  return out;
}

json cmd_pod_reduce(const std::string& store_dir, const Config* overrides) {
  auto os = open_store(store_dir, StoreView::stage1, true);
  const Config cfg = overrides ? merge_sections(os->config, *overrides, {"pod", "run"}) : os->config;
  const PipelineConfig pc = PipelineConfig::from(cfg);
  const OfflineDb& db = *os->db;
  const double t_end = static_cast<double>(db.horizon_steps) * db.dt;
  const std::size_t n_tri = db.tri.triangles.size(), slabs = os->slabs;

  // A barycentric lattice on every triangle keeps corners and edges in the
  // truncated spans; uniform samples follow.
  std::vector<ParamPoint> samples;
  {
    const std::size_t L = pc.pod_lattice;
    std::set<std::pair<double, double>> seen;
    auto add = [&](const ParamPoint& p) {
      if (seen.insert({p.mu1, p.mu2}).second) samples.push_back(p);
    };
    for (const ParamPoint& a : db.tri.anchors) add(a);
    for (std::size_t ell = 0; L > 0 && ell < n_tri; ++ell) {
      const auto& t = db.tri.triangles[ell];
      const ParamPoint& a = db.tri.anchors[t[0]];
      const ParamPoint& b = db.tri.anchors[t[1]];
      const ParamPoint& c = db.tri.anchors[t[2]];
      for (std::size_t i = 0; i <= L; ++i)
        for (std::size_t j = 0; i + j <= L; ++j) {
          const double wa = static_cast<double>(i) / L, wb = static_cast<double>(j) / L;
          const double wc = 1.0 - wa - wb;
          add({wa * a.mu1 + wb * b.mu1 + wc * c.mu1, wa * a.mu2 + wb * b.mu2 + wc * c.mu2});
        }
    }
  }
  for (const ParamPoint& p : sample_uniform(pc.pod_samples, pc.pod_seed, pc.domain))
    samples.push_back(p);
  const auto sweep = collect_sweep(samples, db, t_end, pc.threads);

  std::vector<LocalBasis> reduced(n_tri * slabs);
  std::vector<std::vector<double>> spectra(n_tri * slabs);
  std::vector<std::size_t> columns(n_tri * slabs, 0);
  parallel_for(reduced.size(), pc.threads, [&](std::size_t idx) {
    const std::size_t ell = idx / slabs, m = idx % slabs;
    const auto model = db.element(ell, m);
    auto it = sweep.find({ell, m});
    if (it == sweep.end()) {
      // No sample visited this element; keep its full basis.
      reduced[idx] = model->basis;
      reduced[idx].reduced = true;
      return;
    }
    const Spectrum sp = svd_spectrum(it->second.columns, pc.svd_method);
    reduced[idx] = pod_truncate(sp, pc.pod_threshold, model->basis);
    spectra[idx] = sp.sigma;
    columns[idx] = it->second.columns.cols;
  });
  std::vector<RomOperators> ops(reduced.size());
  parallel_for(reduced.size(), pc.threads, [&](std::size_t idx) {
    const LocalBasis* prev = idx % slabs > 0 ? &reduced[idx - 1] : nullptr;
    ops[idx] = build_operators(reduced[idx], db.grid, os->pc.q_terms, os->pc.source_amplitude,
                               os->pc.flux_mode, prev);
  });

  // Rank study on the sub-region, from stage-one coefficients.
  const auto sub_samples = sample_uniform(pc.subregion_samples, pc.pod_seed + 1, pc.subregion);
  const auto sub_sweep = collect_sweep(sub_samples, db, t_end, pc.threads);
  std::vector<std::pair<ElementKey, const SnapshotMatrix*>> sub_list;
  for (const auto& [key, sm] : sub_sweep) sub_list.emplace_back(key, &sm);
  std::vector<std::size_t> sub_k(sub_list.size());
  parallel_for(sub_list.size(), pc.threads, [&](std::size_t i) {
    sub_k[i] = truncation_rank(svd_spectrum(sub_list[i].second->columns, pc.svd_method).sigma,
                               pc.pod_threshold);
  });

  ArtifactStore& store = os->store;
  json el = json::array();
  std::ostringstream ranks;
  ranks << "ell,m,snapshots,M,k\n";
  for (std::size_t idx = 0; idx < reduced.size(); ++idx) {
    const std::size_t ell = idx / slabs, m = idx % slabs;
    const std::string b = element_artifact("pod/", "basis", ell, m);
    const std::string o = element_artifact("pod/", "ops", ell, m);
    write_basis(store.prepare(b).string(), reduced[idx]);
    store.record(b);
    write_operators(store.prepare(o).string(), ops[idx]);
    store.record(o);
    if (!spectra[idx].empty()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "pod/spectrum/l%zu_m%03zu.csv", ell, m);
      write_spectrum_csv(store.prepare(buf).string(), spectra[idx]);
      store.record(buf);
    }
    json e = element_json(reduced[idx], ops[idx]);
    e["snapshots"] = columns[idx];
    el.push_back(e);
    ranks << ell << "," << m << "," << columns[idx] << "," << db.element(ell, m)->basis.M() << ","
          << reduced[idx].M() << "\n";
  }
  store.write_text("pod/elements.json", el.dump(2) + "\n");
  store.write_text("pod/ranks.csv", ranks.str());

  json sub = json::array();
  std::ostringstream sub_csv;
  sub_csv << "ell,m,snapshots,k\n";
  std::size_t max_k = 0;
  for (std::size_t i = 0; i < sub_list.size(); ++i) {
    const auto& [key, sm] = sub_list[i];
    sub.push_back({{"ell", key.first}, {"m", key.second}, {"snapshots", sm->columns.cols}, {"k", sub_k[i]}});
    sub_csv << key.first << "," << key.second << "," << sm->columns.cols << "," << sub_k[i] << "\n";
    max_k = std::max(max_k, sub_k[i]);
  }
  store.write_text("pod/subregion.csv", sub_csv.str());

  std::size_t max_red = 0;
  for (const auto& b : reduced) max_red = std::max(max_red, b.M());
  json summary = {{"samples", pc.pod_samples},
                  {"lattice", pc.pod_lattice},
                  {"sweep_points", samples.size()},
                  {"seed", pc.pod_seed},
                  {"threshold", pc.pod_threshold},
                  {"svd", pc.svd_method == SvdMethod::gram_jacobi ? "gram" : "one_sided"},
                  {"max_k", max_red},
                  {"subregion",
                   {{"box", {pc.subregion.mu1_lo, pc.subregion.mu1_hi, pc.subregion.mu2_lo,
                             pc.subregion.mu2_hi}},
                    {"samples", pc.subregion_samples},
                    {"max_k", max_k},
                    {"elements", sub}}}};
  store.write_text("pod/summary.json", summary.dump(2) + "\n");
  store.meta()["pod"] = {{"samples", pc.pod_samples}, {"lattice", pc.pod_lattice}, {"seed", pc.pod_seed},
                         {"threshold", pc.pod_threshold}, {"svd", summary["svd"]}};
  store.write_manifest();
  return summary;
}

json cmd_online(const OpenStore& store, const OnlineRequest& req) {
  const OfflineDb& db = *store.db;
  db.domain.check(req.mu);
  const RomResult rom = rom_solve(db, req.mu, req.t_final);
  json report = {{"mu1", req.mu.mu1},
                 {"mu2", req.mu.mu2},
                 {"t_final", req.t_final},
                 {"triangle", rom.ell},
                 {"basis", store.reduced ? "pod" : "stage1"}};
  std::optional<Trajectory> hfm;
  if (req.hfm_check) {
    hfm = hfm_solve(hfm_config(store.pc, req.mu, req.t_final));
    report["max_relative_error"] = relative_error(*hfm, rom.trajectory);
  }
  if (!req.out_dir.empty()) {
    ensure_dir(req.out_dir);
    const fs::path out(req.out_dir);
    write_trajectory_csv((out / "rom.csv").string(), rom.trajectory);
    if (hfm) write_trajectory_csv((out / "hfm.csv").string(), *hfm);
    SvgPlot plot("ROM vs HFM", "x", "u");
    const std::vector<double> xs = db.grid.centers();
    const std::size_t every = std::max<std::size_t>(1, req.plot_every);
    std::size_t c = 0;
    for (std::size_t k = every; k < rom.trajectory.snapshots.size(); k += every, ++c) {
      const Snapshot& s = rom.trajectory.snapshots[k];
      const std::string color = kPalette[c % 8];
      std::ostringstream label;
      label << "t=" << s.t;
      plot.line(xs, s.cells, color, label.str());
      if (hfm) plot.line(xs, hfm->snapshots[k].cells, color, {}, true);
    }
    plot.save((out / "overlay.svg").string());
    write_file(out / "report.json", report.dump(2) + "\n");
  }
  return report;
}

namespace {

json moments(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size() > 1 ? v.size() - 1 : 1);
  return {{"mean", mean},
          {"var", var},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())},
          {"count", v.size()}};
}

json surrogate_json(const Poly2Surrogate& s) {
  json ex = json::array();
  for (const auto& [a, b] : s.exponents) ex.push_back({a, b});
  return {{"degree", s.degree}, {"r2", s.r2}, {"exponents", ex}, {"coefficients", s.coefficients}};
}

}  // namespace

json cmd_uq(const std::string& store_dir, const Config* overrides, const std::string& out_dir) {
  const Config base = open_store(store_dir, StoreView::stage1, false)->config;
  const Config cfg = overrides ? merge_sections(base, *overrides, {"uq", "run"}) : base;
  const PipelineConfig pc = PipelineConfig::from(cfg);
  auto os = open_store(store_dir, pc.uq_pod ? StoreView::pod : StoreView::stage1, true);
  const OfflineDb& db = *os->db;
  const Grid1D& grid = db.grid;
  const std::size_t n = pc.uq_samples;
  const std::size_t steps = steps_for(pc.uq_time, db.dt);

  const auto mu = sample_uniform(n, pc.uq_seed, pc.domain);
  std::vector<QoiSample> res(n);
  std::vector<Snapshot> finals(n);
  parallel_for(n, pc.threads, [&](std::size_t i) {
    RomOptions opts;
    opts.record_stride = pc.uq_hfm_check ? 1 : std::max<std::size_t>(1, steps);
    RomResult r = rom_solve(db, mu[i], pc.uq_time, opts);
    res[i].mu = mu[i];
    res[i].ell = r.ell;
    if (pc.uq_hfm_check)
      res[i].e_rel = relative_error(hfm_solve(hfm_config(os->pc, mu[i], pc.uq_time)), r.trajectory);
    finals[i] = std::move(r.trajectory.snapshots.back());
    ShockQoi q;
    try {
      q = shock_qois(finals[i], grid, pc.qoi_tol);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sample " << i << " (" << mu[i].mu1 << ", " << mu[i].mu2 << "): " << e.what();
      fail(e.kind(), msg.str());
    }
    res[i].shock_location = q.location;
    res[i].shock_height = q.height;
  });

  ensure_dir(out_dir);
  const fs::path out(out_dir);
  {
    std::ofstream csv(out / "samples.csv");
    if (!csv) fail(ErrorKind::io, "cannot write samples.csv");
    csv.precision(17);
    csv << "index,mu1,mu2,triangle,shock_location,shock_height,e_rel\n";
    for (std::size_t i = 0; i < n; ++i) {
      csv << i << "," << res[i].mu.mu1 << "," << res[i].mu.mu2 << "," << res[i].ell << ","
          << res[i].shock_location << "," << res[i].shock_height << ",";
      if (res[i].e_rel) csv << *res[i].e_rel;
      csv << "\n";
    }
  }

  std::vector<double> loc(n), height(n);
  std::vector<std::array<double, 2>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    loc[i] = res[i].shock_location;
    height[i] = res[i].shock_height;
    pts[i] = {loc[i], height[i]};
  }
  const Kde2D kde = kde2d(pts, pc.kde_grid, pc.kde_grid);
  {
    std::ofstream csv(out / "kde.csv");
    csv.precision(17);
    csv << "shock_location,shock_height,density\n";
    for (std::size_t j = 0; j < kde.ys.size(); ++j)
      for (std::size_t i = 0; i < kde.xs.size(); ++i)
        csv << kde.xs[i] << "," << kde.ys[j] << "," << kde.density(i, j) << "\n";
  }

  const std::size_t n_tri = db.tri.triangles.size();
  json fields = json::array();
  SvgPlot field_plot("Solution mean and variance at t = " + std::to_string(pc.uq_time), "x",
                     "mean (solid), variance (dashed)");
  {
    std::ofstream csv(out / "field_stats.csv");
    csv.precision(17);
    csv << "triangle,count,x,mean,var\n";
    const auto xs = grid.centers();
    for (std::size_t ell = 0; ell < n_tri; ++ell) {
      std::vector<const Snapshot*> group;
      for (std::size_t i = 0; i < n; ++i)
        if (res[i].ell == ell) group.push_back(&finals[i]);
      fields.push_back({{"triangle", ell}, {"count", group.size()}});
      if (group.size() < 2) continue;
      const FieldStats st = field_statistics(group);
      for (std::size_t k = 0; k < xs.size(); ++k)
        csv << ell << "," << st.count << "," << xs[k] << "," << st.mean[k] << "," << st.var[k] << "\n";
      field_plot.line(xs, st.mean, kPalette[ell % 8], "triangle " + std::to_string(ell));
      field_plot.line(xs, st.var, kPalette[ell % 8], {}, true);
    }
  }
  field_plot.save((out / "field_stats.svg").string());

  const Poly2Surrogate s_loc = polyfit2d(mu, loc, pc.surrogate_degree, pc.domain);
  const Poly2Surrogate s_h = polyfit2d(mu, height, pc.surrogate_degree, pc.domain);
  json windows = json::array();
  for (const auto& w : windowed_correlation(loc, height, pc.correlation_windows))
    windows.push_back({{"location_lo", w.x_lo}, {"location_hi", w.x_hi}, {"count", w.count},
                       {"pearson", w.correlation}});

  json summary = {{"samples", n},
                  {"seed", pc.uq_seed},
                  {"t", pc.uq_time},
                  {"basis", os->reduced ? "pod" : "stage1"},
                  {"shock_location", moments(loc)},
                  {"shock_height", moments(height)},
                  {"correlation", {{"pearson", pearson(loc, height)}, {"spearman", spearman(loc, height)}}},
                  {"correlation_windows", windows},
                  {"kde", {{"grid", pc.kde_grid}, {"h_location", kde.hx}, {"h_height", kde.hy},
                           {"integral", kde.integral()}}},
                  {"surrogate", {{"shock_location", surrogate_json(s_loc)},
                                 {"shock_height", surrogate_json(s_h)}}},
                  {"triangles", fields}};
  if (pc.uq_hfm_check) {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = *res[i].e_rel;
    summary["e_rel"] = moments(e);
  }
  write_file(out / "summary.json", summary.dump(2) + "\n");

  SvgPlot scatter("Shock location vs height", "shock location", "shock height");
  scatter.scatter(loc, height, kPalette[0]);
  scatter.save((out / "scatter_qoi.svg").string());
  SvgPlot by_mu("Shock location vs mu1", "mu1", "shock location");
  std::vector<double> m1(n);
  for (std::size_t i = 0; i < n; ++i) m1[i] = mu[i].mu1;
  by_mu.scatter(m1, loc, kPalette[1]);
  by_mu.save((out / "scatter_location_mu1.svg").string());
  return summary;
}

json cmd_report(const std::string& store_dir, const std::string& out_dir) {
  auto os = open_store(store_dir, StoreView::stage1, true);
  const OfflineDb& db = *os->db;
  ensure_dir(out_dir);
  const fs::path out(out_dir);
  json report;
  report["offline"] = json::parse(os->store.read_text("summary.json"));
  report["elements"] = json::parse(os->store.read_text("elements.json"));
  const bool has_pod = os->store.contains("pod/summary.json");
  if (has_pod) {
    report["pod"] = json::parse(os->store.read_text("pod/summary.json"));
    report["pod_elements"] = json::parse(os->store.read_text("pod/elements.json"));
  }

  SvgPlot tri_plot("Parameter triangulation", "mu1", "mu2");
  for (std::size_t ell = 0; ell < db.tri.triangles.size(); ++ell) {
    const auto& t = db.tri.triangles[ell];
    std::vector<double> x, y;
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k <= 3; ++k) {
      const ParamPoint& p = db.tri.anchors[t[k % 3]];
      x.push_back(p.mu1);
      y.push_back(p.mu2);
      if (k < 3) cx += p.mu1 / 3.0, cy += p.mu2 / 3.0;
    }
    tri_plot.line(x, y, "#444444");
    tri_plot.text(cx, cy, std::to_string(ell));
  }
  std::vector<double> ax, ay;
  for (const auto& p : db.tri.anchors) ax.push_back(p.mu1), ay.push_back(p.mu2);
  tri_plot.scatter(ax, ay, kPalette[1], "anchors", 4.0);
  tri_plot.save((out / "triangulation.svg").string());

  auto size_plot = [&](const json& elements, const char* title, const char* file) {
    SvgPlot p(title, "slab m", "basis size");
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_tri;
    for (const auto& e : elements) {
      auto& s = by_tri[e["ell"].get<std::size_t>()];
      s.first.push_back(e["m"].get<double>());
      s.second.push_back(e["M"].get<double>());
    }
    for (auto& [ell, s] : by_tri)
      p.line(s.first, s.second, kPalette[ell % 8], "triangle " + std::to_string(ell));
    p.save((out / file).string());
  };
  size_plot(report["elements"], "Local basis size per slab", "basis_sizes.svg");
  if (has_pod) size_plot(report["pod_elements"], "POD rank per slab", "pod_ranks.svg");
  write_file(out / "report.json", report.dump(2) + "\n");
  return {{"elements", report["elements"].size()}, {"pod", has_pod}, {"out", out_dir}};
}

}  // namespace dirom
