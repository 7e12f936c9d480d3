// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/dirom.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "dirom/common.hpp"
#include "dirom/config.hpp"
#include "dirom/pipeline.hpp"
#include "dirom/uq.hpp"

struct dirom_config {
  dirom::Config cfg;
};

struct dirom_store {
  std::unique_ptr<dirom::OpenStore> open;
};

struct dirom_trajectory {
  dirom::Trajectory traj;
};

namespace {

thread_local std::string g_last_error;

dirom_status status_of(dirom::ErrorKind k) {
  switch (k) {
    case dirom::ErrorKind::invalid_argument: return DIROM_ERR_INVALID_ARGUMENT;
    case dirom::ErrorKind::config: return DIROM_ERR_CONFIG;
    case dirom::ErrorKind::numerical: return DIROM_ERR_NUMERICAL;
    case dirom::ErrorKind::store: return DIROM_ERR_STORE;
    case dirom::ErrorKind::io: return DIROM_ERR_IO;
  }
  return DIROM_ERR_INTERNAL;
}

template <class F>
dirom_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DIROM_OK;
  } catch (const dirom::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return DIROM_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) dirom::fail(dirom::ErrorKind::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const nlohmann::json& j) {
  if (out) *out = dup(j.dump(2));
}

}  // namespace

extern "C" {

const char* dirom_version(void) { return "0.1.0"; }

const char* dirom_status_name(dirom_status status) {
  switch (status) {
    case DIROM_OK: return "ok";
    case DIROM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DIROM_ERR_CONFIG: return "config error";
    case DIROM_ERR_NUMERICAL: return "numerical failure";
    case DIROM_ERR_STORE: return "store integrity";
    case DIROM_ERR_IO: return "io error";
    case DIROM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dirom_last_error(void) { return g_last_error.c_str(); }

void dirom_string_free(char* s) { std::free(s); }

dirom_status dirom_config_create(dirom_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new dirom_config{};
  });
}

dirom_status dirom_config_load(const char* path, dirom_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto c = std::make_unique<dirom_config>(dirom_config{dirom::Config::load(path)});
    *out = c.release();
  });
}

dirom_status dirom_config_set(dirom_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

dirom_status dirom_config_get(const dirom_config* cfg, const char* key, char** value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    *value = dup(cfg->cfg.get(key));
  });
}

dirom_status dirom_config_hash(const dirom_config* cfg, char** hex) {
  return guarded([&] {
    need(cfg, "config");
    need(hex, "hex");
    *hex = dup(cfg->cfg.hash());
  });
}

void dirom_config_destroy(dirom_config* cfg) { delete cfg; }

dirom_status dirom_hfm_solve(const dirom_config* cfg, double mu1, double mu2, double t_final,
                             dirom_trajectory** out) {
  return guarded([&] {
    need(out, "out");
    const dirom::Config c = cfg ? cfg->cfg : dirom::Config{};
    auto t = std::make_unique<dirom_trajectory>();
    t->traj = dirom::cmd_hfm(c, {mu1, mu2}, t_final, {}, {});
    *out = t.release();
  });
}

dirom_status dirom_hfm_run(const dirom_config* cfg, double mu1, double mu2, double t_final,
                           const char* out_path, const char* csv_path) {
  return guarded([&] {
    need(out_path, "out_path");
    const dirom::Config c = cfg ? cfg->cfg : dirom::Config{};
    dirom::cmd_hfm(c, {mu1, mu2}, t_final, out_path, csv_path ? csv_path : "");
  });
}

dirom_status dirom_offline(const dirom_config* cfg, const char* store_dir, char** summary_json) {
  return guarded([&] {
    need(store_dir, "store_dir");
    const dirom::Config c = cfg ? cfg->cfg : dirom::Config{};
    emit(summary_json, dirom::cmd_offline(c, store_dir));
  });
}

dirom_status dirom_pod_reduce(const char* store_dir, const dirom_config* overrides,
                              char** summary_json) {
  return guarded([&] {
    need(store_dir, "store_dir");
    emit(summary_json, dirom::cmd_pod_reduce(store_dir, overrides ? &overrides->cfg : nullptr));
  });
}

dirom_status dirom_store_open(const char* store_dir, int use_pod, dirom_store** out) {
  return guarded([&] {
    need(store_dir, "store_dir");
    need(out, "out");
    auto s = std::make_unique<dirom_store>();
    s->open = dirom::open_store(store_dir, use_pod ? dirom::StoreView::pod : dirom::StoreView::stage1);
    *out = s.release();
  });
}

dirom_status dirom_store_verify(const char* store_dir) {
  return guarded([&] {
    need(store_dir, "store_dir");
    dirom::open_store(store_dir);
  });
}

double dirom_store_horizon(const dirom_store* store) {
  if (!store || !store->open) return 0.0;
  return static_cast<double>(store->open->db->horizon_steps) * store->open->db->dt;
}

void dirom_store_close(dirom_store* store) { delete store; }

dirom_status dirom_rom_solve(const dirom_store* store, double mu1, double mu2, double t_final,
                             dirom_trajectory** out) {
  return guarded([&] {
    need(store, "store");
    need(out, "out");
    auto t = std::make_unique<dirom_trajectory>();
    t->traj = dirom::rom_solve(*store->open->db, {mu1, mu2}, t_final).trajectory;
    *out = t.release();
  });
}

dirom_status dirom_rom_run(const dirom_store* store, double mu1, double mu2, double t_final,
                           int with_hfm, size_t plot_every, const char* out_dir,
                           char** report_json) {
  return guarded([&] {
    need(store, "store");
    dirom::OnlineRequest req;
    req.mu = {mu1, mu2};
    req.t_final = t_final;
    req.hfm_check = with_hfm != 0;
    req.out_dir = out_dir ? out_dir : "";
    if (plot_every > 0) req.plot_every = plot_every;
    emit(report_json, dirom::cmd_online(*store->open, req));
  });
}

dirom_status dirom_uq_run(const char* store_dir, const dirom_config* overrides,
                          const char* out_dir, char** summary_json) {
  return guarded([&] {
    need(store_dir, "store_dir");
    need(out_dir, "out_dir");
    emit(summary_json,
         dirom::cmd_uq(store_dir, overrides ? &overrides->cfg : nullptr, out_dir));
  });
}

dirom_status dirom_report(const char* store_dir, const char* out_dir, char** summary_json) {
  return guarded([&] {
    need(store_dir, "store_dir");
    need(out_dir, "out_dir");
    emit(summary_json, dirom::cmd_report(store_dir, out_dir));
  });
}

size_t dirom_trajectory_count(const dirom_trajectory* t) {
  return t ? t->traj.snapshots.size() : 0;
}

size_t dirom_trajectory_cells(const dirom_trajectory* t) { return t ? t->traj.grid.n_cells : 0; }

double dirom_trajectory_time(const dirom_trajectory* t, size_t k) {
  if (!t || k >= t->traj.snapshots.size()) return 0.0;
  return t->traj.snapshots[k].t;
}

const double* dirom_trajectory_values(const dirom_trajectory* t, size_t k) {
  if (!t || k >= t->traj.snapshots.size()) return nullptr;
  return t->traj.snapshots[k].cells.data();
}

dirom_status dirom_trajectory_write(const dirom_trajectory* t, const char* path) {
  return guarded([&] {
    need(t, "trajectory");
    need(path, "path");
    dirom::write_trajectory(path, t->traj);
  });
}

dirom_status dirom_relative_error(const dirom_trajectory* reference, const dirom_trajectory* approx,
                                  double* out) {
  return guarded([&] {
    need(reference, "reference");
    need(approx, "approx");
    need(out, "out");
    *out = dirom::relative_error(reference->traj, approx->traj);
  });
}

void dirom_trajectory_destroy(dirom_trajectory* t) { delete t; }

}  // extern "C"
