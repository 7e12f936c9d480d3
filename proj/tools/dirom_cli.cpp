// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirom/dirom.h"

namespace {

int exit_code(dirom_status s) {
  switch (s) {
    case DIROM_OK: return 0;
    case DIROM_ERR_CONFIG: return 2;
    case DIROM_ERR_NUMERICAL: return 3;
    case DIROM_ERR_STORE: return 4;
    default: return 1;
  }
}

int report(dirom_status s, const char* what) {
  if (s != DIROM_OK)
    std::fprintf(stderr, "dirom %s: %s: %s\n", what, dirom_status_name(s), dirom_last_error());
  return exit_code(s);
}

void print_owned(char* s) {
  if (!s) return;
  std::printf("%s\n", s);
  dirom_string_free(s);
}

struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;
};

void add_config_flags(CLI::App* app, ConfigArgs& a) {
  app->add_option("--config", a.path, "Config file (key = value with [sections])");
  app->add_option("--set", a.sets, "Override a config key: section.key=value")->type_name("K=V");
}

// Builds the config handle; returns a non-zero exit code on failure.
int make_config(const ConfigArgs& a, dirom_config** out) {
  dirom_status s = a.path.empty() ? dirom_config_create(out) : dirom_config_load(a.path.c_str(), out);
  if (s != DIROM_OK) return report(s, "config");
  for (const std::string& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "dirom config: expected section.key=value, got '%s'\n", kv.c_str());
      dirom_config_destroy(*out);
      return 2;
    }
    s = dirom_config_set(*out, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != DIROM_OK) {
      dirom_config_destroy(*out);
      return report(s, "config");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displacement-interpolation reduced models for parametrized Burgers flow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dirom_version());

  ConfigArgs cfg_args;
  std::string store, out, csv;
  double mu1 = 0.0, mu2 = 0.0, t_final = 12.0;
  bool with_hfm = false;
  std::size_t plot_every = 160;
  std::string basis_set = "stage1";

  CLI::App* hfm = app.add_subcommand("hfm", "Full-order solver");
  hfm->require_subcommand(1);
  CLI::App* hfm_run = hfm->add_subcommand("run", "Solve one parameter point and write the trajectory");
  hfm_run->add_option("--mu1", mu1, "Inflow value")->required();
  hfm_run->add_option("--mu2", mu2, "Source exponent")->required();
  hfm_run->add_option("--t-final", t_final, "Final time")->capture_default_str();
  hfm_run->add_option("--out", out, "Binary trajectory file")->required();
  hfm_run->add_option("--csv", csv, "Optional CSV copy");
  add_config_flags(hfm_run, cfg_args);

  CLI::App* offline = app.add_subcommand("offline", "Build the offline artifact store");
  offline->add_option("--store", store, "Store directory")->required();
  add_config_flags(offline, cfg_args);

  CLI::App* rom = app.add_subcommand("rom", "Reduced-model solver");
  rom->require_subcommand(1);
  CLI::App* rom_run = rom->add_subcommand("run", "Solve one parameter point with the reduced model");
  rom_run->add_option("--store", store, "Store directory")->required();
  rom_run->add_option("--mu1", mu1, "Inflow value")->required();
  rom_run->add_option("--mu2", mu2, "Source exponent")->required();
  rom_run->add_option("--t-final", t_final, "Final time")->capture_default_str();
  rom_run->add_option("--out", out, "Output directory")->required();
  rom_run->add_flag("--with-hfm", with_hfm, "Cross-check against the full-order solver");
  rom_run->add_option("--plot-every", plot_every, "Steps between overlay curves")->capture_default_str();
  rom_run->add_option("--basis", basis_set, "Basis set")
      ->check(CLI::IsMember({"stage1", "pod"}))
      ->capture_default_str();

  CLI::App* pod = app.add_subcommand("pod", "Second reduction stage");
  pod->require_subcommand(1);
  CLI::App* pod_reduce = pod->add_subcommand("reduce", "POD-truncate every local basis");
  pod_reduce->add_option("--store", store, "Store directory")->required();
  add_config_flags(pod_reduce, cfg_args);

  CLI::App* uq = app.add_subcommand("uq", "Monte-Carlo uncertainty quantification");
  uq->require_subcommand(1);
  CLI::App* uq_run = uq->add_subcommand("run", "Sample parameters and summarize the QoIs");
  uq_run->add_option("--store", store, "Store directory")->required();
  uq_run->add_option("--out", out, "Output directory")->required();
  uq_run->add_flag("--with-hfm-check", with_hfm, "Compute E_Rel against the full-order solver");
  add_config_flags(uq_run, cfg_args);

  CLI::App* rep = app.add_subcommand("report", "Summarize a store and draw its figures");
  rep->add_option("--store", store, "Store directory")->required();
  rep->add_option("--out", out, "Output directory")->required();

  CLI::App* verify = app.add_subcommand("verify", "Check store integrity");
  verify->add_option("--store", store, "Store directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  dirom_config* cfg = nullptr;
  const bool needs_cfg = hfm_run->parsed() || offline->parsed() || pod_reduce->parsed() || uq_run->parsed();
  if (needs_cfg) {
    if (const int rc = make_config(cfg_args, &cfg)) return rc;
    if (uq_run->parsed() && with_hfm) dirom_config_set(cfg, "uq.hfm_check", "true");
  }
  int rc = 0;
  char* text = nullptr;
  if (hfm_run->parsed()) {
    rc = report(dirom_hfm_run(cfg, mu1, mu2, t_final, out.c_str(), csv.empty() ? nullptr : csv.c_str()),
                "hfm run");
  } else if (offline->parsed()) {
    rc = report(dirom_offline(cfg, store.c_str(), &text), "offline");
  } else if (pod_reduce->parsed()) {
    rc = report(dirom_pod_reduce(store.c_str(), cfg, &text), "pod reduce");
  } else if (uq_run->parsed()) {
    rc = report(dirom_uq_run(store.c_str(), cfg, out.c_str(), &text), "uq run");
  } else if (rom_run->parsed()) {
    dirom_store* st = nullptr;
    rc = report(dirom_store_open(store.c_str(), basis_set == "pod" ? 1 : 0, &st), "rom run");
    if (rc == 0) {
      rc = report(dirom_rom_run(st, mu1, mu2, t_final, with_hfm ? 1 : 0, plot_every, out.c_str(), &text),
                  "rom run");
      dirom_store_close(st);
    }
  } else if (rep->parsed()) {
    rc = report(dirom_report(store.c_str(), out.c_str(), &text), "report");
  } else if (verify->parsed()) {
    rc = report(dirom_store_verify(store.c_str()), "verify");
    if (rc == 0) std::printf("store ok\n");
  }
  print_owned(text);
  dirom_config_destroy(cfg);
  return rc;
}
