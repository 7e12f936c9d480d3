// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/rom.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dirom {

void SymmetricTensor3::contract(const double* r, double* out) const {
  std::vector<double> rr(pairs_);
  for (std::size_t p = 0; p < m_; ++p) {
    for (std::size_t k = 0; k < p; ++k) rr[p * (p + 1) / 2 + k] = 2.0 * r[k] * r[p];
    rr[p * (p + 1) / 2 + p] = r[p] * r[p];
  }
  for (std::size_t j = 0; j < m_; ++j) {
    const double* row = data_.data() + j * pairs_;
    double s = 0.0;
    for (std::size_t q = 0; q < pairs_; ++q) s += row[q] * rr[q];
    out[j] = s;
  }
}

namespace {

// T_j(kp) = 1/2 dx sum_i L_ij W_ik W_ip for a given left factor L.
SymmetricTensor3 cubic_tensor(const Matrix& left, const Matrix& W, double dx) {
  const std::size_t n = W.rows, m = W.cols;
  SymmetricTensor3 t(m);
  std::vector<double> prod(n);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t k = 0; k <= p; ++k) {
      const double* wk = W.col(k);
      const double* wp = W.col(p);
      for (std::size_t i = 0; i < n; ++i) prod[i] = wk[i] * wp[i];
      const std::size_t pair = SymmetricTensor3::pair_index(k, p);
      for (std::size_t j = 0; j < m; ++j) {
        const double* lj = left.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += lj[i] * prod[i];
        t.at(j, pair) = 0.5 * dx * s;
      }
    }
  return t;
}

}  // namespace

SymmetricTensor3 build_flux_tensor(const Matrix& W, double dx) { return cubic_tensor(W, W, dx); }

SymmetricTensor3 build_upwind_flux_tensor(const Matrix& W, double dx) {
  Matrix diff(W.rows, W.cols);
  for (std::size_t j = 0; j < W.cols; ++j)
    for (std::size_t i = 0; i < W.rows; ++i)
      diff(i, j) = W(i, j) - (i + 1 < W.rows ? W(i + 1, j) : 0.0);
  return cubic_tensor(diff, W, dx);
}

Matrix build_source_matrix(const Matrix& W, const Grid1D& grid, std::size_t Q,
                           double amplitude) {
  require(Q >= 1, "source expansion needs Q >= 1");
  require(W.rows == grid.n_cells, "basis does not match grid");
  const double dx = grid.dx();
  Matrix S(W.cols, Q);
  std::vector<double> term(grid.n_cells, 1.0);
  const std::vector<double> x = grid.centers();
  for (std::size_t q = 0; q < Q; ++q) {
    if (q > 0)
      for (std::size_t i = 0; i < grid.n_cells; ++i) term[i] *= x[i] / static_cast<double>(q);
    for (std::size_t j = 0; j < W.cols; ++j) {
      const double* wj = W.col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < grid.n_cells; ++i) s += wj[i] * term[i];
      S(j, q) = amplitude * dx * s;
    }
  }
  return S;
}

RomOperators build_operators(const LocalBasis& basis, const Grid1D& grid, std::size_t Q,
                             double amplitude, FluxMode mode, const LocalBasis* previous) {
  const Matrix& W = basis.W;
  const double dx = grid.dx();
  RomOperators ops;
  ops.ell = basis.ell;
  ops.m = basis.m;
  ops.M = W.cols;
  ops.Q = Q;
  // The tensor costs M^3/2 per step against about 2NM for reconstruction.
  ops.has_tensor = mode == FluxMode::tensor ||
                   (mode == FluxMode::automatic && ops.M * ops.M <= 4 * grid.n_cells);
  if (ops.has_tensor) ops.flux = build_upwind_flux_tensor(W, dx);
  ops.boundary.resize(ops.M);
  for (std::size_t j = 0; j < ops.M; ++j) ops.boundary[j] = 0.5 * dx * W(0, j);
  ops.source = build_source_matrix(W, grid, Q, amplitude);
  if (previous) ops.entry_map = transition_matrix(*previous, basis, dx);
  return ops;
}

void rom_step(RomState& state, const RomOperators& ops, const ParamPoint& mu, double dt,
              double dx, const Matrix* basis) {
  const std::size_t M = ops.M;
  if (state.r.size() != M) fail(ErrorKind::invalid_argument, "state dimension does not match operators");
  std::vector<double> flux(M, 0.0);
  if (ops.has_tensor) {
    ops.flux.contract(state.r.data(), flux.data());
  } else {
    if (!basis || basis->cols != M)
      fail(ErrorKind::invalid_argument, "reconstruction flux needs the element basis");
    const std::vector<double> u = multiply(*basis, state.r);
    const std::size_t n = u.size();
    std::vector<double> g(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sq = u[i] * u[i];
      g[i] = sq - prev;
      prev = sq;
    }
    for (std::size_t j = 0; j < M; ++j) {
      const double* wj = basis->col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += wj[i] * g[i];
      flux[j] = 0.5 * dx * s;
    }
  }
  const double inflow = mu.mu1 * mu.mu1;
  const double ratio = dt / dx;
  for (std::size_t j = 0; j < M; ++j) {
    double src = 0.0, pw = 1.0;
    for (std::size_t q = 0; q < ops.Q; ++q) {
      src += ops.source(j, q) * pw;
      pw *= mu.mu2;
    }
    state.r[j] += -ratio * (flux[j] - ops.boundary[j] * inflow) + dt * src;
  }
  if (!all_finite(state.r)) fail(ErrorKind::numerical, "non-finite reduced state");
  ++state.n;
}

std::vector<double> reconstruct(const Matrix& W, const std::vector<double>& r) {
  if (W.cols != r.size()) fail(ErrorKind::invalid_argument, "coefficient dimension mismatch");
  return multiply(W, r);
}

std::vector<double> project(const Matrix& W, const std::vector<double>& u, double dx) {
  if (W.rows != u.size()) fail(ErrorKind::invalid_argument, "field dimension mismatch");
  std::vector<double> r(W.cols);
  for (std::size_t j = 0; j < W.cols; ++j) {
    const double* wj = W.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < W.rows; ++i) s += wj[i] * u[i];
    r[j] = dx * s;
  }
  return r;
}

void OfflineDb::insert(std::size_t ell, std::size_t m, std::shared_ptr<const ElementModel> model) {
  std::lock_guard<std::mutex> lock(mutex_);
  cache_[{ell, m}] = std::move(model);
}

std::shared_ptr<const ElementModel> OfflineDb::element(std::size_t ell, std::size_t m) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find({ell, m});
    if (it != cache_.end()) return it->second;
  }
  if (!loader_)
    fail(ErrorKind::store, "missing element data (" + std::to_string(ell) + ", " +
                               std::to_string(m) + ")");
  auto model = loader_(ell, m);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = cache_.emplace(std::make_pair(ell, m), std::move(model));
  return it->second;
}

void OfflineDb::clear_cache() {
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.clear();
}

std::size_t steps_for(double t_final, double dt) {
  if (!(t_final >= 0.0)) fail(ErrorKind::invalid_argument, "t_final must be non-negative");
  const double steps = t_final / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    fail(ErrorKind::invalid_argument, "t_final must be an integer multiple of dt");
  return static_cast<std::size_t>(rounded);
}

RomResult rom_solve(const OfflineDb& db, const ParamPoint& mu, double t_final,
                    const RomOptions& opts) {
  if (!opts.allow_extrapolation) db.domain.check(mu);
  const std::size_t n_final = steps_for(t_final, db.dt);
  if (n_final > db.horizon_steps) {
    std::ostringstream os;
    os << "t_final " << t_final << " is beyond the covered horizon "
       << static_cast<double>(db.horizon_steps) * db.dt;
    fail(ErrorKind::invalid_argument, os.str());
  }
  require(opts.record_stride >= 1, "record_stride must be positive");
  const double dx = db.grid.dx();

  RomResult out;
  out.ell = db.tri.locate(mu);
  out.trajectory.grid = db.grid;
  out.trajectory.dt = db.dt;
  out.trajectory.mu = mu;

  auto model = db.element(out.ell, 0);
  RomState state;
  state.ell = out.ell;
  state.r.assign(model->ops.M, 0.0);
  auto record = [&] {
    Snapshot s;
    s.mu = mu;
    s.t = static_cast<double>(state.n) * db.dt;
    s.cells = reconstruct(model->basis.W, state.r);
    out.trajectory.snapshots.push_back(std::move(s));
  };
  if (opts.record) record();
  if (opts.collect) out.coefficients.push_back({0, state.r});

  for (std::size_t n = 0; n < n_final; ++n) {
    rom_step(state, model->ops, mu, db.dt, dx, &model->basis.W);
    if (opts.collect) out.coefficients.push_back({state.m, state.r});
    const std::size_t next = db.partition.time_slab(n + 1);
    if (next != state.m && n + 1 < n_final) {
      auto incoming = db.element(out.ell, next);
      if (incoming->ops.entry_map.cols != state.r.size())
        fail(ErrorKind::store, "entry map does not match previous element");
      state.r = multiply(incoming->ops.entry_map, state.r);
      state.m = next;
      model = std::move(incoming);
      if (opts.collect) out.coefficients.push_back({state.m, state.r});
    }
    if (opts.record && ((n + 1) % opts.record_stride == 0 || n + 1 == n_final)) record();
  }
  return out;
}

namespace {

constexpr char kOpsMagic[8] = {'D', 'I', 'R', 'O', 'M', 'O', 'P', 'S'};
constexpr std::uint32_t kOpsVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::store, "truncated operator file " + path);
  return v;
}

void get_doubles(std::istream& is, std::vector<double>& v, const std::string& path) {
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) fail(ErrorKind::store, "truncated operator file " + path);
}

}  // namespace

// Layout: magic[8], u32 version, u32 flags (bit0 tensor), u32 ell, u32 m,
// u32 M, u32 Q, u32 M_prev, then f64 boundary[M], source[M*Q],
// entry_map[M*M_prev], and the packed tensor when present.
void write_operators(const std::string& path, const RomOperators& ops) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  os.write(kOpsMagic, sizeof(kOpsMagic));
  put<std::uint32_t>(os, kOpsVersion);
  put<std::uint32_t>(os, ops.has_tensor ? 1u : 0u);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ops.ell));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ops.m));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ops.M));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ops.Q));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ops.entry_map.cols));
  put_doubles(os, ops.boundary);
  put_doubles(os, ops.source.data);
  put_doubles(os, ops.entry_map.data);
  if (ops.has_tensor) put_doubles(os, ops.flux.data());
  if (!os) fail(ErrorKind::io, "write failed for " + path);
}

RomOperators read_operators(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::store, "missing operator file " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kOpsMagic, sizeof(magic)) != 0)
    fail(ErrorKind::store, path + ": not an operator file");
  if (get<std::uint32_t>(is, path) != kOpsVersion)
    fail(ErrorKind::store, path + ": unsupported operator version");
  RomOperators ops;
  ops.has_tensor = get<std::uint32_t>(is, path) & 1u;
  ops.ell = get<std::uint32_t>(is, path);
  ops.m = get<std::uint32_t>(is, path);
  ops.M = get<std::uint32_t>(is, path);
  ops.Q = get<std::uint32_t>(is, path);
  const auto prev = get<std::uint32_t>(is, path);
  ops.boundary.resize(ops.M);
  get_doubles(is, ops.boundary, path);
  ops.source = Matrix(ops.M, ops.Q);
  get_doubles(is, ops.source.data, path);
  if (prev > 0) {
    ops.entry_map = Matrix(ops.M, prev);
    get_doubles(is, ops.entry_map.data, path);
  }
  if (ops.has_tensor) {
    ops.flux = SymmetricTensor3(ops.M);
    get_doubles(is, ops.flux.data(), path);
  }
  return ops;
}

}  // namespace dirom
