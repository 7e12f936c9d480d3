// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Each criterion prints one line:
//   AC<n> PASS|FAIL <name>: <measurements>
// --setup store|uq builds the shared production artifacts under --work.

#include <Eigen/Dense>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dirom/basis.hpp"
#include "dirom/common.hpp"
#include "dirom/config.hpp"
#include "dirom/hfm.hpp"
#include "dirom/linalg.hpp"
#include "dirom/param_space.hpp"
#include "dirom/pipeline.hpp"
#include "dirom/pod.hpp"
#include "dirom/rom.hpp"
#include "dirom/transport.hpp"
#include "dirom/uq.hpp"

using namespace dirom;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Pinned thresholds.
constexpr double kOracleTol = 1e-10;
constexpr double kOracleSeconds = 1.0;
constexpr double kReferenceMean = 3.14e-3;
constexpr double kReferenceVar = 1.79e-6;
constexpr double kMeanCap = 1e-2;
constexpr double kMeanFactor = 5.0;
constexpr double kVarFactor = 10.0;
constexpr std::size_t kUqSamples = 500;
constexpr double kPointTol = 5e-3;
constexpr std::size_t kSubregionK = 13;
constexpr double kTrendCorrelation = 0.9;
constexpr double kTrendDrop = 0.1;
constexpr double kTransportSeconds = 10.0;
constexpr double kMassTol = 1e-12;
constexpr double kConvergenceRatio = 1.8;
constexpr double kSvdTol = 1e-10;
constexpr double kR2 = 0.99;
constexpr double kRecoveryTol = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read " + p.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<ParamPoint> anchors() { return PipelineConfig::from(Config{}).anchors(); }

Matrix random_gaussian(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> nd;
  Matrix a(r, c);
  for (double& v : a.data) v = nd(rng);
  return a;
}

// ---------------------------------------------------------------- AC1

Outcome ac1() {
  Outcome o;
  const Grid1D g{32, 0.0, 12.8};
  const double dx = g.dx(), dt = 0.0125;
  const ParamPoint mu{9.0, 0.075};
  HfmConfig hc;
  hc.grid = g;
  hc.mu = mu;
  const Trajectory ref = hfm_solve_steps(hc, 100);
  std::mt19937_64 rng(1);
  LocalBasis b;
  b.W = HouseholderQr(random_gaussian(rng, 32, 32)).apply_q(Matrix::identity(32));
  for (double& v : b.W.data) v /= std::sqrt(dx);
  for (FluxMode mode : {FluxMode::tensor, FluxMode::reconstruct}) {
    const auto t0 = Clock::now();
    const RomOperators ops = build_operators(b, g, 40, 0.02, mode, nullptr);
    RomState s;
    s.r.assign(ops.M, 0.0);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 100; ++n) {
      rom_step(s, ops, mu, dt, dx, &b.W);
      const auto u = reconstruct(b.W, s.r);
      for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(u[i] - ref.snapshots[n].cells[i]));
    }
    const double secs = seconds_since(t0);
    const std::string tag = mode == FluxMode::tensor ? "tensor" : "reconstruct";
    o.check(worst <= kOracleTol, tag + " max err " + fmt("%.2e", worst));
    o.check(secs < kOracleSeconds, tag + " time " + fmt("%.3f", secs) + " s");
  }
  return o;
}

// ---------------------------------------------------------------- AC2, AC9

json uq_summary(const fs::path& work) { return json::parse(read_file(work / "uq" / "summary.json")); }

Outcome ac2(const fs::path& work) {
  Outcome o;
  const json s = uq_summary(work);
  const std::size_t n = s["samples"];
  const double mean = s["e_rel"]["mean"], var = s["e_rel"]["var"];
  o.check(n >= kUqSamples, "samples " + std::to_string(n));
  o.check(mean <= kMeanCap, "mean E_Rel " + fmt("%.4e", mean));
  o.check(mean <= kMeanFactor * kReferenceMean && mean >= kReferenceMean / kMeanFactor,
          "mean/reference " + fmt("%.3f", mean / kReferenceMean));
  o.check(var <= kVarFactor * kReferenceVar && var >= kReferenceVar / kVarFactor,
          "var " + fmt("%.4e", var) + " var/reference " + fmt("%.3f", var / kReferenceVar));
  return o;
}

Outcome ac9(const fs::path& work) {
  Outcome o;
  const json s = uq_summary(work);
  const json& loc = s["surrogate"]["shock_location"];
  const int degree = loc["degree"];
  const double r2 = loc["r2"];
  o.check(degree == 5 && s["samples"].get<std::size_t>() >= kUqSamples,
          "degree " + std::to_string(degree) + " over " + std::to_string(s["samples"].get<std::size_t>()));
  o.check(r2 >= kR2, "location R^2 " + fmt("%.8f", r2));

  const auto mu = sample_uniform(200, 77);
  auto cubic = [](const ParamPoint& p) {
    const double a = p.mu1, b = 100.0 * p.mu2;
    return 1.0 - 0.3 * a + 0.05 * b + 0.02 * a * b - 0.001 * a * a * a + 0.0007 * b * b * b;
  };
  std::vector<double> y;
  for (const auto& p : mu) y.push_back(cubic(p));
  const Poly2Surrogate fit = polyfit2d(mu, y, 3);
  double worst = 0.0;
  for (const auto& p : sample_uniform(500, 78)) worst = std::max(worst, std::abs(fit.evaluate(p) - cubic(p)));
  o.check(worst <= kRecoveryTol, "degree-3 recovery " + fmt("%.2e", worst));
  return o;
}

// ---------------------------------------------------------------- AC3

Outcome ac3(const fs::path& work) {
  Outcome o;
  const auto os = open_store((work / "store").string());
  const ParamPoint mu{8.4601, 0.0750};
  const double t = 12.0;
  const RomResult rom = rom_solve(*os->db, mu, t);
  const Trajectory hfm = hfm_solve(hfm_config(os->pc, mu, t));
  const double e = relative_error(hfm, rom.trajectory);
  o.check(e <= kPointTol, "max relative error " + fmt("%.4e", e));
  return o;
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
  Outcome o;
  const PipelineConfig pc = PipelineConfig::from(Config{});
  const TimePartition part = pc.partition();
  std::size_t bad = 0, checked = 0;
  std::string first_bad;
  bool null_at_zero = true;
  for (const ParamPoint& mu : anchors()) {
    const Trajectory tr = hfm_solve(hfm_config(pc, mu, 12.0));
    for (std::size_t n = 0; n < tr.snapshots.size(); ++n) {
      const Snapshot& s = tr.snapshots[n];
      const Signature sig = signature(s, pc.grid, pc.tol_rel);
      if (n == 0) {
        null_at_zero = null_at_zero && sig.str() == "[]";
        continue;
      }
      if (s.t < 1.0 - 1e-12) continue;
      ++checked;
      if (sig.str() != "[+,-,+]") {
        if (bad++ == 0) first_bad = "(" + fmt("%g", mu.mu1) + "," + fmt("%g", mu.mu2) + ") t=" + fmt("%g", s.t) + " " + sig.str();
      }
    }
  }
  o.check(bad == 0, std::to_string(checked) + " snapshots on t in [1,12], " + std::to_string(bad) +
                        " off-signature" + (first_bad.empty() ? "" : " first " + first_bad));
  o.check(null_at_zero, "t=0 signature null");
  o.check(part.time_slab(0) == 0 && part.slab_start(1) == 1 && part.time_slab(1) == 1,
          "slab 0 holds step 0 only");
  return o;
}

// ---------------------------------------------------------------- AC5

Outcome ac5(const fs::path& work) {
  Outcome o;
  const json s = json::parse(read_file(work / "store" / "pod" / "summary.json"));
  const json& sub = s["subregion"];
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> per;
  std::size_t max_k = 0, max_m = 0;
  for (const json& e : sub["elements"]) {
    const std::size_t ell = e["ell"], m = e["m"], k = e["k"];
    per[ell].emplace_back(m, k);
    max_k = std::max(max_k, k);
    max_m = std::max(max_m, m);
  }
  o.check(!per.empty() && max_m + 1 >= TimePartition{20}.time_slab(960) + 1,
          std::to_string(per.size()) + " element(s) through slab " + std::to_string(max_m));
  o.check(max_k <= kSubregionK, "max k " + std::to_string(max_k));
  for (auto& [ell, seq] : per) {
    std::sort(seq.begin(), seq.end());
    // Trend: positive correlation with the slab index and no large drops
    // below the running maximum.
    std::vector<double> xm, yk;
    double running = 0.0, worst_drop = 0.0;
    for (const auto& [m, k] : seq) {
      xm.push_back(static_cast<double>(m));
      yk.push_back(static_cast<double>(k));
      running = std::max(running, static_cast<double>(k));
      worst_drop = std::max(worst_drop, (running - static_cast<double>(k)) / running);
    }
    const double r = pearson(xm, yk);
    o.check(r >= kTrendCorrelation && worst_drop <= kTrendDrop,
            "element " + std::to_string(ell) + " k " + std::to_string(seq.front().second) + ".." +
                std::to_string(seq.back().second) + " corr " + fmt("%.3f", r) + " max drop " +
                fmt("%.2f", worst_drop));
  }
  return o;
}

// ---------------------------------------------------------------- AC6

Density gaussian(double center, double width, double dx, std::size_t n) {
  Density d{dx, 0.0, std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const double z = (d.position(k) - center) / width;
    d.values[k] = std::exp(-0.5 * z * z);
  }
  return d;
}

double l1(const Density& a, const Density& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) s += std::abs(a.values[k] - b.values[k]);
  return s * a.dx;
}

double peak(const Density& d) {
  double m = 0.0;
  for (double v : d.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> random_convex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& v : w) s += (v = e(rng));
  for (double& v : w) v /= s;
  return w;
}

Outcome ac6() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::size_t K = 401, n = 251;
  const double dx = 0.4;
  auto quantile = [&](const Density& d) { return to_quantile(decompose(d, 1e-8)[0], d, K); };

  {
    const Density a = gaussian(30.0, 4.0, dx, n), b = gaussian(55.0, 2.0, dx, n);
    const Quantile qa = quantile(a), qb = quantile(b);
    const Density out = displacement_interp({&qa, &qb}, {1.0, 0.0}, dx, 0.0, n);
    const double err = l1(out, a), bound = 2.0 * qa.mass / (K - 1) + 2.0 * dx * peak(a);
    o.check(err <= bound, "identity L1 " + fmt("%.2e", err) + " <= " + fmt("%.2e", bound));
  }
  {
    Density a = gaussian(30.0, 4.0, dx, n), b = gaussian(60.0, 2.0, dx, n);
    const double ma = a.mass(), mb = b.mass();
    for (double& v : a.values) v /= ma;
    for (double& v : b.values) v *= 3.0 / mb;
    const Quantile qa = quantile(a), qb = quantile(b);
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto w = random_convex(rng, 2);
      const Density d = displacement_interp({&qa, &qb}, w, dx, 0.0, n);
      worst = std::max(worst, std::abs(d.mass() - (w[0] * qa.mass + w[1] * qb.mass)));
    }
    o.check(worst <= 1e-12, "mass linearity " + fmt("%.2e", worst));
  }
  {
    const double width = 3.0, offset = 24.0;
    const Density a = gaussian(30.0, width, dx, n), b = gaussian(30.0 + offset, width, dx, n);
    const Quantile qa = quantile(a), qb = quantile(b);
    double worst_ratio = 0.0;
    for (double alpha : {0.1, 0.25, 0.5, 0.8}) {
      const Density out = displacement_interp({&qa, &qb}, {1.0 - alpha, alpha}, dx, 0.0, n);
      const Density ref = gaussian(30.0 + alpha * offset, width, dx, n);
      worst_ratio = std::max(worst_ratio, l1(out, ref) / (4.0 * dx * peak(ref)));
    }
    o.check(worst_ratio <= 1.0, "translate L1 / (4 dx peak) " + fmt("%.2e", worst_ratio));
  }
  {
    std::vector<Density> ds;
    std::vector<Quantile> qs;
    for (int j = 0; j < 6; ++j) ds.push_back(gaussian(20.0 + 9.0 * j, 1.0 + 0.7 * j, dx, n));
    for (const auto& d : ds) qs.push_back(quantile(d));
    std::vector<const Quantile*> ptrs;
    for (const auto& q : qs) ptrs.push_back(&q);
    std::mt19937_64 rng(21);
    bool monotone = true;
    for (int rep = 0; rep < 100; ++rep) {
      const Quantile q = interpolate_quantiles(ptrs, random_convex(rng, 6));
      for (std::size_t i = 1; i < q.positions.size(); ++i) monotone = monotone && q.positions[i] >= q.positions[i - 1];
    }
    o.check(monotone, "monotone quantiles under 100 convex weights");
  }
  const double secs = seconds_since(t0);
  o.check(secs < kTransportSeconds, "time " + fmt("%.3f", secs) + " s");
  return o;
}

// ---------------------------------------------------------------- AC7

std::vector<double> coarsen(const std::vector<double>& u, std::size_t factor) {
  std::vector<double> out(u.size() / factor, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) out[i / factor] += u[i] / static_cast<double>(factor);
  return out;
}

Outcome ac7() {
  Outcome o;
  HfmConfig c;
  c.mu = {9.0, 0.02};
  Snapshot s;
  s.cells.assign(c.grid.n_cells, 0.0);
  double worst = 0.0;
  for (std::size_t n = 0; n < c.step_count(); ++n) {
    StepBalance b;
    s = hfm_step(s, c, &b);
    const double rhs = c.dt * (b.flux_in - b.flux_out) + c.dt * b.source;
    const double scale = std::max({std::abs(b.mass_change), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(b.mass_change - rhs) / scale);
  }
  o.check(worst <= kMassTol, std::to_string(c.step_count()) + " steps, worst relative imbalance " + fmt("%.2e", worst));

  auto run = [](std::size_t cells, double dt) {
    HfmConfig h;
    h.mu = {9.0, 0.02};
    h.t_final = 2.0;
    h.grid.n_cells = cells;
    h.dt = dt;
    return hfm_solve(h).snapshots.back().cells;
  };
  const auto u1 = run(250, 0.0125), u2 = run(500, 0.00625), u4 = run(1000, 0.003125);
  const auto r1 = coarsen(u4, 4), r2 = coarsen(u4, 2);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 100; i < 250; ++i) e1 += 0.4 * std::abs(u1[i] - r1[i]);
  for (std::size_t i = 200; i < 500; ++i) e2 += 0.2 * std::abs(u2[i] - r2[i]);
  const double ratio = e2 > 0.0 ? e1 / e2 : 0.0;
  o.check(ratio >= kConvergenceRatio, "smooth-region L1 ratio " + fmt("%.3f", ratio));
  return o;
}

// ---------------------------------------------------------------- AC8

Outcome ac8() {
  Outcome o;
  std::mt19937_64 rng(2018);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  double worst[2] = {0.0, 0.0};
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix a = random_gaussian(rng, dim(rng), dim(rng));
    Eigen::MatrixXd m(a.rows, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
    const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    for (int which = 0; which < 2; ++which) {
      const Spectrum s = svd_spectrum(a, which == 0 ? SvdMethod::one_sided_jacobi : SvdMethod::gram_jacobi);
      if (s.sigma.size() != static_cast<std::size_t>(ref.size())) {
        worst[which] = INFINITY;
        continue;
      }
      for (Eigen::Index k = 0; k < ref.size(); ++k)
        worst[which] = std::max(worst[which], std::abs(s.sigma[k] - ref[k]) / std::max(1.0, ref[0]));
    }
  }
  o.check(worst[0] <= kSvdTol, "one-sided " + fmt("%.2e", worst[0]));
  o.check(worst[1] <= kSvdTol, "method of snapshots " + fmt("%.2e", worst[1]));
  return o;
}

// ---------------------------------------------------------------- AC10

Outcome ac10(const fs::path& work) {
  Outcome o;
  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto config = [](const char* threads) {
    Config c;
    c.set("time.t_final", "1.5");
    c.set("pod.samples", "40");
    c.set("pod.lattice", "2");
    c.set("pod.subregion_samples", "10");
    c.set("uq.samples", "40");
    c.set("uq.qoi_time", "1.5");
    c.set("uq.hfm_check", "true");
    c.set("run.threads", threads);
    return c;
  };
  struct Run {
    std::string manifest, summary;
  };
  auto run = [&](const std::string& name, const char* threads) {
    const Config c = config(threads);
    const std::string store = (dir / name).string();
    cmd_offline(c, store);
    cmd_pod_reduce(store, &c);
    cmd_uq(store, &c, (dir / (name + "_uq")).string());
    return Run{read_file(dir / name / "manifest.json"), read_file(dir / (name + "_uq") / "summary.json")};
  };
  const Run a = run("a", "1"), b = run("b", "1"), c = run("c", "3"), d = run("d", "2");
  o.check(a.manifest == b.manifest, "offline manifest repeat");
  o.check(a.manifest == c.manifest && a.manifest == d.manifest, "offline manifest threads 1/3/2");
  o.check(a.summary == b.summary, "uq summary repeat");
  o.check(a.summary == c.summary && a.summary == d.summary, "uq summary threads 1/3/2");
  return o;
}

// ---------------------------------------------------------------- setup

void setup_store(const fs::path& work) {
  const fs::path store = work / "store";
  std::fprintf(stderr, "building production store in %s\n", store.string().c_str());
  cmd_offline(Config{}, store.string());
  cmd_pod_reduce(store.string(), nullptr);
}

void setup_uq(const fs::path& work) {
  Config c;
  c.set("uq.samples", std::to_string(kUqSamples));
  c.set("uq.hfm_check", "true");
  cmd_uq((work / "store").string(), &c, (work / "uq").string());
}

const char* kNames[] = {"",
                        "full-basis Galerkin oracle",
                        "error statistics",
                        "single-point check (8.4601, 0.075)",
                        "signature condition",
                        "POD sub-region bound",
                        "transport property suite",
                        "HFM conservation and convergence",
                        "SVD oracle",
                        "UQ surrogate",
                        "determinism"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("dirom acceptance checks");
  std::string work = "acceptance_work", setup;
  int only = 0;
  app.add_option("--work", work, "Working directory for shared artifacts");
  app.add_option("--setup", setup, "Build shared artifacts: store or uq")->check(CLI::IsMember({"store", "uq"}));
  app.add_option("--only", only, "Run one criterion")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  const fs::path w = fs::absolute(work);
  fs::create_directories(w);

  try {
    if (setup == "store") {
      setup_store(w);
      return 0;
    }
    if (setup == "uq") {
      setup_uq(w);
      return 0;
    }
    if (only == 0) {
      if (!fs::exists(w / "store" / "pod" / "summary.json")) setup_store(w);
      if (!fs::exists(w / "uq" / "summary.json")) setup_uq(w);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "setup failed: %s\n", e.what());
    return 1;
  }

  const std::vector<std::function<Outcome()>> checks = {
      {},
      ac1,
      [&] { return ac2(w); },
      [&] { return ac3(w); },
      ac4,
      [&] { return ac5(w); },
      ac6,
      ac7,
      ac8,
      [&] { return ac9(w); },
      [&] { return ac10(w); }};
  int failures = 0;
  for (int k = 1; k <= 10; ++k) {
    if (only != 0 && k != only) continue;
    Outcome out;
    try {
      out = checks[k]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("error: ") + e.what();
    }
    std::printf("AC%d %s %s: %s\n", k, out.pass ? "PASS" : "FAIL", kNames[k], out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
