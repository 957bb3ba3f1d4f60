#include "agmm/moments.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace agmm {

namespace {

void require_lag(const CurvePanel& panel, int k, int L) {
  if (k < 1 || k > L) throw ConfigError("lag must satisfy 1 <= k <= L");
  if (panel.n() <= L) {
    throw DataError("panel has n = " + std::to_string(panel.n()) +
                    " curves, need n > L = " + std::to_string(L));
  }
}

}  // namespace

CurvePanel center_panel(const CurvePanel& panel) {
  if (panel.n() < 2) throw DataError("center_panel: need at least 2 curves");
  CurvePanel out = panel;
  out.curves.rowwise() -= panel.curves.colwise().mean();
  if (panel.has_scalar_response()) out.y.array() -= panel.y.mean();
  if (panel.has_functional_response()) out.yfun.rowwise() -= panel.yfun.colwise().mean();
  return out;
}

KernelSurface lag_autocov(const CurvePanel& panel, int k, int L) {
  require_lag(panel, k, L);
  const int m = panel.n() - L;
  Matrix values = panel.curves.topRows(m).transpose() * panel.curves.middleRows(k, m) / m;
  return KernelSurface(panel.grid, std::move(values));
}

DiscretizedFunction lag_crosscov(const CurvePanel& panel, int k, int L) {
  require_lag(panel, k, L);
  if (!panel.has_scalar_response()) throw DataError("lag_crosscov: panel has no scalar response");
  const int m = panel.n() - L;
  Vector values = panel.curves.middleRows(k, m).transpose() * panel.y.head(m) / m;
  return DiscretizedFunction(panel.grid, std::move(values));
}

KernelSurface lag0_cov(const CurvePanel& panel) {
  if (panel.n() < 2) throw DataError("lag0_cov: need at least 2 curves");
  Matrix values = panel.curves.transpose() * panel.curves / panel.n();
  return KernelSurface(panel.grid, std::move(values));
}

KernelSurface build_K(const std::vector<KernelSurface>& C_hats) {
  if (C_hats.empty()) throw ConfigError("build_K: need at least one lag");
  const int G = C_hats.front().size();
  Matrix acc = Matrix::Zero(G, G);
  for (const auto& C : C_hats) acc += compose_kernels(C, C).values();
  return KernelSurface(C_hats.front().grid(), std::move(acc));
}

DiscretizedFunction build_R(const std::vector<KernelSurface>& C_hats,
                            const std::vector<DiscretizedFunction>& c_hats) {
  if (C_hats.size() != c_hats.size() || C_hats.empty()) {
    throw ConfigError("build_R: lag lists must be nonempty and equal length");
  }
  Vector acc = Vector::Zero(C_hats.front().size());
  for (size_t k = 0; k < C_hats.size(); ++k) {
    acc += apply_kernel(C_hats[k], c_hats[k]).values();
  }
  return DiscretizedFunction(C_hats.front().grid(), std::move(acc));
}

KernelSurface build_H(const CurvePanel& panel, int L) {
  if (!panel.has_functional_response()) throw DataError("build_H: panel has no functional response");
  if (panel.n() <= L) throw DataError("build_H: n must exceed L");
  const int m = panel.n() - L;
  const Vector& w = panel.grid.weights();
  Matrix acc = Matrix::Zero(panel.grid.size(), panel.grid.size());
  for (int k = 1; k <= L; ++k) {
    const Matrix Ck = panel.curves.topRows(m).transpose() * panel.curves.middleRows(k, m) / m;
    // D_k(z, v) = (1/m) sum_s W_{s+k}(z) Y_s(v)
    const Matrix Dk = panel.curves.middleRows(k, m).transpose() * panel.yfun.topRows(m) / m;
    acc += Ck * w.asDiagonal() * Dk;
  }
  return KernelSurface(panel.grid, std::move(acc));
}

MomentSet compute_moments(const CurvePanel& panel, const MomentOptions& opts) {
  const CurvePanel p = opts.center ? center_panel(panel) : panel;
  MomentSet m(p.grid);
  m.L = opts.L;
  m.C.reserve(opts.L);
  for (int k = 1; k <= opts.L; ++k) m.C.push_back(lag_autocov(p, k, opts.L));
  m.K = build_K(m.C);
  if (p.has_scalar_response()) {
    m.c.reserve(opts.L);
    for (int k = 1; k <= opts.L; ++k) m.c.push_back(lag_crosscov(p, k, opts.L));
    m.R = build_R(m.C, m.c);
  }
  if (opts.with_H) m.H = build_H(p, opts.L);
  if (opts.with_CW) m.CW = lag0_cov(p);
  return m;
}

namespace {

constexpr std::uint64_t kMomentMagic = 0x41474d4d4d4f4d31ULL;  // "AGMMMOM1"

void write_block(std::ofstream& os, const double* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data), count * sizeof(double));
}

void read_block(std::ifstream& is, double* data, std::size_t count) {
  is.read(reinterpret_cast<char*>(data), count * sizeof(double));
  if (!is) throw DataError("load_moments: truncated file");
}

}  // namespace

void save_moments(const MomentSet& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("save_moments: cannot open " + path);
  const std::uint64_t magic = kMomentMagic;
  const std::int64_t L = m.L, G = m.grid().size();
  const std::int64_t has_H = m.H.has_value() ? 1 : 0;
  os.write(reinterpret_cast<const char*>(&magic), 8);
  os.write(reinterpret_cast<const char*>(&L), 8);
  os.write(reinterpret_cast<const char*>(&G), 8);
  os.write(reinterpret_cast<const char*>(&has_H), 8);
  for (const auto& C : m.C) write_block(os, C.values().data(), G * G);
  const std::int64_t has_c = m.c.empty() ? 0 : 1;
  os.write(reinterpret_cast<const char*>(&has_c), 8);
  for (const auto& f : m.c) write_block(os, f.values().data(), G);
  write_block(os, m.K.values().data(), G * G);
  write_block(os, m.R.values().data(), G);
  if (m.H) write_block(os, m.H->values().data(), G * G);
  write_block(os, m.CW.values().data(), G * G);
}

MomentSet load_moments(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("load_moments: cannot open " + path);
  std::uint64_t magic = 0;
  std::int64_t L = 0, G = 0, has_H = 0, has_c = 0;
  is.read(reinterpret_cast<char*>(&magic), 8);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&G), 8);
  is.read(reinterpret_cast<char*>(&has_H), 8);
  if (!is || magic != kMomentMagic) throw DataError("load_moments: bad header in " + path);
  const Grid grid = Grid::uniform(static_cast<int>(G));
  MomentSet m(grid);
  m.L = static_cast<int>(L);
  for (int k = 0; k < L; ++k) {
    Matrix v(G, G);
    read_block(is, v.data(), G * G);
    m.C.emplace_back(grid, std::move(v));
  }
  is.read(reinterpret_cast<char*>(&has_c), 8);
  if (has_c) {
    for (int k = 0; k < L; ++k) {
      Vector v(G);
      read_block(is, v.data(), G);
      m.c.emplace_back(grid, std::move(v));
    }
  }
  Matrix Kv(G, G);
  read_block(is, Kv.data(), G * G);
  m.K = KernelSurface(grid, std::move(Kv));
  Vector Rv(G);
  read_block(is, Rv.data(), G);
  m.R = DiscretizedFunction(grid, std::move(Rv));
  if (has_H) {
    Matrix Hv(G, G);
    read_block(is, Hv.data(), G * G);
    m.H = KernelSurface(grid, std::move(Hv));
  }
  Matrix CWv(G, G);
  read_block(is, CWv.data(), G * G);
  m.CW = KernelSurface(grid, std::move(CWv));
  return m;
}

}  // namespace agmm
