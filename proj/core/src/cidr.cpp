#include "agmm/cidr.hpp"

#include "agmm/estimators.hpp"
#include "agmm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace agmm {

CidrPanel read_minute_bars_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("read_minute_bars_csv: cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<std::string> day_order;
  std::map<std::string, std::map<int, double>> days;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string date, minute, price;
    if (!std::getline(ss, date, ',') || !std::getline(ss, minute, ',') ||
        !std::getline(ss, price, ',')) {
      throw DataError("read_minute_bars_csv: malformed row '" + line + "'");
    }
    if (days.find(date) == days.end()) day_order.push_back(date);
    days[date][std::stoi(minute)] = std::stod(price);
  }
  if (day_order.empty()) throw DataError("read_minute_bars_csv: no data rows in " + path);
  const size_t minutes = days[day_order.front()].size();
  CidrPanel panel;
  panel.dates = day_order;
  panel.prices.resize(day_order.size(), minutes);
  for (size_t t = 0; t < day_order.size(); ++t) {
    const auto& day = days[day_order[t]];
    if (day.size() != minutes) {
      throw DataError("read_minute_bars_csv: day " + day_order[t] + " has " +
                      std::to_string(day.size()) + " minutes, expected " + std::to_string(minutes));
    }
    int j = 0;
    for (const auto& [minute, price] : day) panel.prices(t, j++) = price;
  }
  return panel;
}

CurvePanel cidr_transform(const CidrPanel& prices) {
  const int n = prices.n(), G = prices.minutes();
  if (n < 2) throw DataError("cidr_transform: need at least 2 trading days");
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < G; ++j) {
      if (!(prices.prices(t, j) > 0.0)) {
        throw DataError("cidr_transform: nonpositive price at day " + std::to_string(t) +
                        ", minute " + std::to_string(j));
      }
    }
  }
  Matrix r(n, G);
  for (int t = 0; t < n; ++t) {
    const double log_open = std::log(prices.prices(t, 0));
    for (int j = 0; j < G; ++j) r(t, j) = 100.0 * (std::log(prices.prices(t, j)) - log_open);
    r(t, 0) = 0.0;
  }
  Vector y = r.col(G - 1);
  return make_panel(Grid::uniform(G), std::move(r), std::move(y));
}

namespace {

struct FitContext {
  CurvePanel train;  // centered
  Vector mean_curve;
  double mean_y = 0.0;
  MomentSet moments;

  explicit FitContext(const Grid& g)
      : train{g, Matrix(), Vector(), Matrix()}, moments(g) {}
};

double predict(const SlopeEstimate& est, const Vector& x_test, const FitContext& ctx,
               const Grid& grid) {
  const Vector centered = x_test - ctx.mean_curve;
  return ctx.mean_y + grid.weights().dot(centered.cwiseProduct(est.beta.values()));
}

}  // namespace

std::vector<MspeEntry> rolling_mspe(const CurvePanel& panel, const std::vector<std::string>& models,
                                    int H, int cut_minutes, const std::vector<int>& d_grid,
                                    const std::vector<int>& J_grid, int L) {
  const int n = panel.n();
  if (!panel.has_scalar_response()) throw DataError("rolling_mspe: panel has no responses");
  if (H < 1) throw ConfigError("rolling_mspe: H must be positive");
  const int min_train = std::max(2 * L, 10);
  if (n - H < min_train) {
    throw ConfigError("rolling_mspe: n - H = " + std::to_string(n - H) +
                      " leaves fewer than " + std::to_string(min_train) + " training days");
  }
  if (d_grid.empty() || J_grid.empty()) throw ConfigError("rolling_mspe: empty (d, J) grid");

  const int G_full = panel.grid.size();
  const int T = std::min(std::max(cut_minutes, 8), G_full);
  const Grid grid = Grid::uniform(T);
  const Matrix curves = panel.curves.leftCols(T);

  const bool want_agmm = std::find(models.begin(), models.end(), "agmm") != models.end();
  const bool want_cls = std::find(models.begin(), models.end(), "cls") != models.end();

  // accumulated squared errors per (d, J) pair
  Matrix err_agmm = Matrix::Zero(d_grid.size(), J_grid.size());
  Matrix err_cls = Matrix::Zero(d_grid.size(), J_grid.size());
  double err_mean = 0.0;
  const double inf = std::numeric_limits<double>::infinity();

  for (int h = H; h >= 1; --h) {
    const int n_train = n - h;
    const int t_test = n - h;  // predict the day after the training window

    FitContext ctx(grid);
    ctx.mean_curve = curves.topRows(n_train).colwise().mean();
    ctx.mean_y = panel.y.head(n_train).mean();
    Matrix centered = curves.topRows(n_train);
    centered.rowwise() -= ctx.mean_curve.transpose();
    Vector y_centered = panel.y.head(n_train);
    y_centered.array() -= ctx.mean_y;
    ctx.train = make_panel(grid, std::move(centered), std::move(y_centered));

    const double y_true = panel.y[t_test];
    const Vector x_test = curves.row(t_test).transpose();
    err_mean += (y_true - ctx.mean_y) * (y_true - ctx.mean_y);

    if (!want_agmm && !want_cls) continue;
    MomentOptions mo;
    mo.L = L;
    mo.center = false;  // already centered
    mo.with_CW = want_cls;
    ctx.moments = compute_moments(ctx.train, mo);

    for (size_t ji = 0; ji < J_grid.size(); ++ji) {
      const BasisSet basis = make_basis(BasisKind::cosine, std::min(J_grid[ji], T), grid);
      if (want_agmm) {
        const SpectralDecomposition dec = eigen_basis(ctx.moments.K, basis);
        for (size_t di = 0; di < d_grid.size(); ++di) {
          try {
            const SlopeEstimate est = agmm_scalar(ctx.moments, dec, d_grid[di]);
            const double e = y_true - predict(est, x_test, ctx, grid);
            err_agmm(di, ji) += e * e;
          } catch (const std::exception&) {
            err_agmm(di, ji) = inf;
          }
        }
      }
      if (want_cls) {
        for (size_t di = 0; di < d_grid.size(); ++di) {
          try {
            RankPolicy rp;
            rp.oracle = d_grid[di];
            const SlopeEstimate est = cls_scalar(ctx.train, rp, &basis);
            const double e = y_true - predict(est, x_test, ctx, grid);
            err_cls(di, ji) += e * e;
          } catch (const std::exception&) {
            err_cls(di, ji) = inf;
          }
        }
      }
    }
  }

  std::vector<MspeEntry> out;
  for (const std::string& model : models) {
    MspeEntry entry;
    entry.model = model;
    if (model == "mean") {
      entry.mspe = err_mean / H;
    } else {
      const Matrix& err = model == "agmm" ? err_agmm : err_cls;
      if (model != "agmm" && model != "cls") throw ConfigError("rolling_mspe: unknown model '" + model + "'");
      Eigen::Index bd = 0, bj = 0;
      err.minCoeff(&bd, &bj);
      entry.mspe = err(bd, bj) / H;
      entry.d = d_grid[bd];
      entry.J = J_grid[bj];
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace agmm
