#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "netblock/errors.hpp"
#include "netblock/linalg.hpp"
#include "netblock/simplex.hpp"

namespace netblock {

enum class Solver { lasso, dantzig };

// The estimation error bounds ask for delta > 2 on the Lasso and
// delta >= 2 on the Dantzig selector.
inline constexpr double kDefaultLassoDelta = 2.02;
inline constexpr double kDefaultDantzigDelta = 2.0;

// One within-region regression of component i on the remaining q-1
// components. beta is on the original predictor scale; the intercept
// absorbs the means, so residuals are centered by construction.
struct NodewiseFit {
  int region = -1;
  std::size_t component = 0;
  std::vector<double> beta;
  double intercept = 0.0;
  std::vector<double> residuals;
  double lambda = 0.0;
  Solver method = Solver::lasso;
  long iterations = 0;  // coordinate sweeps or simplex pivots
};

namespace detail {

// Per-region design shared by all q fits: centered columns, their 1/n
// standard deviations, and the full correlation matrix.
struct RegionDesign {
  Matrix xc;
  std::vector<double> mean;
  std::vector<double> sd;
  Matrix corr;
};

inline RegionDesign make_design(const ComponentPanel& panel) {
  const std::size_t n = panel.n();
  const std::size_t q = panel.width();
  RegionDesign d;
  d.mean.resize(q);
  d.sd.resize(q);
  d.xc = Matrix(n, q);
  for (std::size_t j = 0; j < q; ++j) {
    d.mean[j] = column_mean(panel.data, j);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d.xc(k, j) = panel(k, j) - d.mean[j];
      ss += d.xc(k, j) * d.xc(k, j);
    }
    if (ss <= 0.0)
      throw ZeroVariance("column " + std::to_string(j) + " has zero variance");
    d.sd[j] = std::sqrt(ss / static_cast<double>(n));
  }
  d.corr = cross_moment(d.xc, d.xc);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) d.corr(i, j) /= d.sd[i] * d.sd[j];
    d.corr(i, i) = 1.0;
  }
  return d;
}

inline double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

inline std::vector<double> residual_from_beta(const RegionDesign& d, std::size_t i,
                                              const std::vector<std::size_t>& idx,
                                              const std::vector<double>& beta) {
  const std::size_t n = d.xc.rows();
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    double fit = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) fit += d.xc(k, idx[j]) * beta[j];
    r[k] = d.xc(k, i) - fit;
  }
  return r;
}

// Cyclic coordinate descent on sd-standardized predictors, warm-started at
// zero. The standardized Gram has unit diagonal, so each update is a plain
// soft-threshold.
inline NodewiseFit lasso_solve(const RegionDesign& d, std::size_t i, double lambda) {
  const std::size_t q = d.corr.rows();
  std::vector<std::size_t> idx;
  idx.reserve(q - 1);
  for (std::size_t j = 0; j < q; ++j)
    if (j != i) idx.push_back(j);
  const std::size_t m = idx.size();

  // c_j = (1/n) <w_j, y> on the standardized scale.
  std::vector<double> c(m);
  for (std::size_t j = 0; j < m; ++j) c[j] = d.corr(idx[j], i) * d.sd[i];

  std::vector<double> alpha(m, 0.0);
  std::vector<double> grad(m, 0.0);  // grad_j = sum_l G_jl alpha_l
  constexpr int kMaxSweeps = 10000;
  constexpr double kTol = 1e-7;
  long sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double rho = c[j] - (grad[j] - alpha[j]);
      const double updated = soft_threshold(rho, lambda);
      const double delta = updated - alpha[j];
      if (delta != 0.0) {
        alpha[j] = updated;
        for (std::size_t l = 0; l < m; ++l) grad[l] += d.corr(idx[l], idx[j]) * delta;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta <= kTol) break;
  }
  if (sweep == kMaxSweeps)
    throw NoConvergence("lasso_fit: coordinate descent hit the sweep cap");

  NodewiseFit fit;
  fit.component = i;
  fit.method = Solver::lasso;
  fit.lambda = lambda;
  fit.iterations = sweep + 1;
  fit.beta.resize(m);
  for (std::size_t j = 0; j < m; ++j) fit.beta[j] = alpha[j] / d.sd[idx[j]];
  fit.residuals = residual_from_beta(d, i, idx, fit.beta);
  fit.intercept = d.mean[i];
  for (std::size_t j = 0; j < m; ++j) fit.intercept -= d.mean[idx[j]] * fit.beta[j];
  return fit;
}

// Dantzig selector as a linear program: min |beta|_1 subject to
// |D^{-1/2}(Sigma_{-i,-i} beta - b)|_inf <= lambda, split into positive and
// negative parts with slack rows.
inline NodewiseFit dantzig_solve(const RegionDesign& d, std::size_t i, double lambda) {
  const std::size_t q = d.corr.rows();
  std::vector<std::size_t> idx;
  idx.reserve(q - 1);
  for (std::size_t j = 0; j < q; ++j)
    if (j != i) idx.push_back(j);
  const std::size_t m = idx.size();

  // Row r of the standardized constraint: sum_l corr(r,l) sd_l beta_l - corr(r,i) sd_i.
  Matrix g(m, m);
  std::vector<double> rhs_center(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t l = 0; l < m; ++l) g(r, l) = d.corr(idx[r], idx[l]) * d.sd[idx[l]];
    rhs_center[r] = d.corr(idx[r], i) * d.sd[i];
  }

  // Variables: (u, v, s+, s-); constraints G(u-v) + s+ = c + lambda,
  // -G(u-v) + s- = lambda - c.
  const std::size_t ncols = 4 * m;
  Matrix a(2 * m, ncols);
  std::vector<double> b(2 * m);
  std::vector<double> cost(ncols, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t l = 0; l < m; ++l) {
      a(r, l) = g(r, l);
      a(r, m + l) = -g(r, l);
      a(m + r, l) = -g(r, l);
      a(m + r, m + l) = g(r, l);
    }
    a(r, 2 * m + r) = 1.0;
    a(m + r, 3 * m + r) = 1.0;
    b[r] = rhs_center[r] + lambda;
    b[m + r] = lambda - rhs_center[r];
  }
  for (std::size_t l = 0; l < 2 * m; ++l) cost[l] = 1.0;

  Simplex lp(std::move(a), std::move(b), std::move(cost));
  Simplex::Solution sol = lp.solve(1000000);

  NodewiseFit fit;
  fit.component = i;
  fit.method = Solver::dantzig;
  fit.lambda = lambda;
  fit.iterations = sol.pivots;
  fit.beta.resize(m);
  for (std::size_t l = 0; l < m; ++l) fit.beta[l] = sol.x[l] - sol.x[m + l];
  fit.residuals = residual_from_beta(d, i, idx, fit.beta);
  fit.intercept = d.mean[i];
  for (std::size_t j = 0; j < m; ++j) fit.intercept -= d.mean[idx[j]] * fit.beta[j];
  return fit;
}

inline NodewiseFit nodewise_solve(const RegionDesign& d, std::size_t i, Solver method,
                                  double lambda) {
  return method == Solver::lasso ? lasso_solve(d, i, lambda)
                                 : dantzig_solve(d, i, lambda);
}

}  // namespace detail

// delta * (sigma_hat_ii * log q_v / n)^(1/2), with the 1/n variance divisor.
inline double tuning_lambda(const ComponentPanel& panel, std::size_t i, double delta) {
  const std::size_t q = panel.width();
  if (q < 2) throw DomainError("tuning_lambda: need q_v >= 2");
  const double var = detail::column_variance(panel.data, i);
  if (var <= 0.0)
    throw ZeroVariance("column " + std::to_string(i) + " has zero variance");
  return delta * std::sqrt(var * std::log(static_cast<double>(q)) /
                           static_cast<double>(panel.n()));
}

inline NodewiseFit lasso_fit_at(const ComponentPanel& panel, std::size_t i,
                                double lambda) {
  if (panel.width() < 2) throw DomainError("lasso_fit: need q_v >= 2");
  return detail::lasso_solve(detail::make_design(panel), i, lambda);
}

inline NodewiseFit lasso_fit(const ComponentPanel& panel, std::size_t i,
                             double delta = kDefaultLassoDelta) {
  return lasso_fit_at(panel, i, tuning_lambda(panel, i, delta));
}

inline NodewiseFit dantzig_fit_at(const ComponentPanel& panel, std::size_t i,
                                  double lambda) {
  if (panel.width() < 2) throw DomainError("dantzig_fit: need q_v >= 2");
  return detail::dantzig_solve(detail::make_design(panel), i, lambda);
}

inline NodewiseFit dantzig_fit(const ComponentPanel& panel, std::size_t i,
                               double delta = kDefaultDantzigDelta) {
  return dantzig_fit_at(panel, i, tuning_lambda(panel, i, delta));
}

// Column i of the result is the residual of regressing component i on the
// region's other components. A one-component region has nothing to regress
// on; its residual is the centered input, which makes the residual test
// collapse to the marginal test there.
inline ComponentPanel nodewise_residual_panel(const ComponentPanel& panel,
                                              Solver method, double delta) {
  const std::size_t q = panel.width();
  if (q < 1) throw DomainError("nodewise_residual_panel: empty panel");
  if (q == 1) return center(panel);

  const detail::RegionDesign design = detail::make_design(panel);
  ComponentPanel out(panel.n(), q);
  for (std::size_t i = 0; i < q; ++i) {
    const double lambda =
        delta * std::sqrt(design.sd[i] * design.sd[i] *
                          std::log(static_cast<double>(q)) /
                          static_cast<double>(panel.n()));
    NodewiseFit fit = detail::nodewise_solve(design, i, method, lambda);
    out.data.set_column(i, fit.residuals);
  }
  return out;
}

}  // namespace netblock
