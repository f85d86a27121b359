#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here recomputes from first principles so the oracles stay decoupled from
// the library's own computation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "netblock/linalg.hpp"
#include "netblock/nodewise.hpp"
#include "netblock/rng.hpp"

namespace support {

using netblock::ComponentPanel;
using netblock::Matrix;
using netblock::NodewiseFit;
using netblock::Rng;

inline ComponentPanel panel_from_columns(const std::vector<std::vector<double>>& cols) {
  ComponentPanel p(cols[0].size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t k = 0; k < cols[j].size(); ++k) p(k, j) = cols[j][k];
  return p;
}

inline ComponentPanel random_panel(std::size_t n, std::size_t q, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0, Rng::kGeneric);
  ComponentPanel p(n, q);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < q; ++j) p(k, j) = rng.normal();
  return p;
}

struct ColumnStats {
  std::vector<std::vector<double>> centered;  // per column
  std::vector<double> sd;                     // 1/n convention
};

inline ColumnStats column_stats(const ComponentPanel& panel) {
  const std::size_t n = panel.n(), q = panel.width();
  ColumnStats st;
  st.centered.assign(q, std::vector<double>(n));
  st.sd.assign(q, 0.0);
  for (std::size_t j = 0; j < q; ++j) {
    double mean = 0;
    for (std::size_t k = 0; k < n; ++k) mean += panel(k, j);
    mean /= static_cast<double>(n);
    double ss = 0;
    for (std::size_t k = 0; k < n; ++k) {
      st.centered[j][k] = panel(k, j) - mean;
      ss += st.centered[j][k] * st.centered[j][k];
    }
    st.sd[j] = std::sqrt(ss / static_cast<double>(n));
  }
  return st;
}

// Triple-loop recomputation of the max-correlation statistic.
inline double naive_max_corr_statistic(const ComponentPanel& a,
                                       const ComponentPanel& b) {
  const std::size_t n = a.n();
  const ColumnStats sa = column_stats(a);
  const ColumnStats sb = column_stats(b);
  double max_rho2 = 0.0;
  for (std::size_t i = 0; i < a.width(); ++i) {
    for (std::size_t j = 0; j < b.width(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += sa.centered[i][k] * sb.centered[j][k];
      const double rho = (s / static_cast<double>(n)) / (sa.sd[i] * sb.sd[j]);
      max_rho2 = std::max(max_rho2, rho * rho);
    }
  }
  const double d = static_cast<double>(a.width() * b.width());
  return static_cast<double>(n) * max_rho2 - 2.0 * std::log(d) +
         std::log(std::log(d));
}

// Lasso objective on the sd-standardized predictors, evaluated at the fit's
// coefficients (alpha_j = beta_j * sd_j).
inline double lasso_objective(const ComponentPanel& panel, std::size_t i,
                              const NodewiseFit& fit) {
  const std::size_t n = panel.n(), q = panel.width();
  const ColumnStats st = column_stats(panel);
  double rss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double pred = 0;
    std::size_t b = 0;
    for (std::size_t j = 0; j < q; ++j) {
      if (j == i) continue;
      pred += st.centered[j][k] * fit.beta[b++];
    }
    const double r = st.centered[i][k] - pred;
    rss += r * r;
  }
  double l1 = 0;
  std::size_t b = 0;
  for (std::size_t j = 0; j < q; ++j) {
    if (j == i) continue;
    l1 += std::abs(fit.beta[b] * st.sd[j]);
    ++b;
  }
  return rss / (2.0 * static_cast<double>(n)) + fit.lambda * l1;
}

// Max KKT violation of the lasso fit on the standardized scale.
inline double lasso_kkt_violation(const ComponentPanel& panel, std::size_t i,
                                  const NodewiseFit& fit) {
  const std::size_t n = panel.n(), q = panel.width();
  const ColumnStats st = column_stats(panel);
  double worst = 0;
  std::size_t b = 0;
  for (std::size_t j = 0; j < q; ++j) {
    if (j == i) continue;
    double g = 0;
    for (std::size_t k = 0; k < n; ++k)
      g -= (st.centered[j][k] / st.sd[j]) * fit.residuals[k];
    g /= static_cast<double>(n);
    const double alpha = fit.beta[b] * st.sd[j];
    if (alpha != 0.0) {
      worst = std::max(worst, std::abs(g + fit.lambda * (alpha > 0 ? 1.0 : -1.0)));
    } else {
      worst = std::max(worst, std::max(0.0, std::abs(g) - fit.lambda));
    }
    ++b;
  }
  return worst;
}

// Standardized Dantzig constraint residual |D^{-1/2}(Sigma beta - b)|_inf.
inline double dantzig_constraint_norm(const ComponentPanel& panel, std::size_t i,
                                      const std::vector<double>& beta) {
  const std::size_t n = panel.n(), q = panel.width();
  const ColumnStats st = column_stats(panel);
  double worst = 0;
  std::size_t r = 0;
  for (std::size_t jr = 0; jr < q; ++jr) {
    if (jr == i) continue;
    double row = 0;
    std::size_t b = 0;
    for (std::size_t jl = 0; jl < q; ++jl) {
      if (jl == i) continue;
      double cov = 0;
      for (std::size_t k = 0; k < n; ++k) cov += st.centered[jr][k] * st.centered[jl][k];
      row += (cov / static_cast<double>(n)) * beta[b++];
    }
    double bi = 0;
    for (std::size_t k = 0; k < n; ++k) bi += st.centered[jr][k] * st.centered[i][k];
    row -= bi / static_cast<double>(n);
    worst = std::max(worst, std::abs(row) / st.sd[jr]);
    ++r;
  }
  return worst;
}

namespace detail {

// Solves the square system a x = rhs by Gaussian elimination with partial
// pivoting; returns false when numerically singular.
inline bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> rhs,
                        std::vector<double>& x) {
  const std::size_t m = rhs.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t cc = col; cc < m; ++cc) a[r][cc] -= f * a[col][cc];
      rhs[r] -= f * rhs[col];
    }
  }
  x.resize(m);
  for (std::size_t r = 0; r < m; ++r) x[r] = rhs[r] / a[r][r];
  return true;
}

}  // namespace detail

// Brute-force vertex enumeration for min |beta|_1 s.t. |M beta - c|_inf <= lam.
// Every optimal basic solution fixes z coordinates at zero and activates
// m - z one-sided constraint rows; all C(3m, m) such subsets are tried.
inline double dantzig_vertex_oracle(const std::vector<std::vector<double>>& m_mat,
                                    const std::vector<double>& c, double lam) {
  const std::size_t m = c.size();
  auto feasible_l1 = [&](const std::vector<double>& beta) {
    double worst = 0;
    for (std::size_t r = 0; r < m; ++r) {
      double row = 0;
      for (std::size_t l = 0; l < m; ++l) row += m_mat[r][l] * beta[l];
      worst = std::max(worst, std::abs(row - c[r]));
    }
    if (worst > lam + 1e-9) return std::numeric_limits<double>::infinity();
    double l1 = 0;
    for (const double b : beta) l1 += std::abs(b);
    return l1;
  };

  double best = feasible_l1(std::vector<double>(m, 0.0));

  // Items: 0..m-1 zero a coordinate; m..3m-1 activate row (r, sign).
  const std::size_t items = 3 * m;
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  for (;;) {
    std::vector<bool> zeroed(m, false);
    std::vector<std::pair<std::size_t, double>> active;  // (row, sign)
    bool valid = true;
    for (const std::size_t item : pick) {
      if (item < m) {
        zeroed[item] = true;
      } else {
        const std::size_t r = (item - m) % m;
        const double sign = item < 2 * m ? 1.0 : -1.0;
        active.emplace_back(r, sign);
      }
    }
    std::vector<std::size_t> free_coords;
    for (std::size_t l = 0; l < m; ++l)
      if (!zeroed[l]) free_coords.push_back(l);
    if (active.size() != free_coords.size()) valid = false;

    if (valid && !free_coords.empty()) {
      std::vector<std::vector<double>> a(active.size(),
                                         std::vector<double>(free_coords.size()));
      std::vector<double> rhs(active.size());
      for (std::size_t r = 0; r < active.size(); ++r) {
        for (std::size_t l = 0; l < free_coords.size(); ++l)
          a[r][l] = m_mat[active[r].first][free_coords[l]];
        rhs[r] = c[active[r].first] + active[r].second * lam;
      }
      std::vector<double> xf;
      if (detail::gauss_solve(a, rhs, xf)) {
        std::vector<double> beta(m, 0.0);
        for (std::size_t l = 0; l < free_coords.size(); ++l) beta[free_coords[l]] = xf[l];
        best = std::min(best, feasible_l1(beta));
      }
    } else if (valid && free_coords.empty()) {
      best = std::min(best, feasible_l1(std::vector<double>(m, 0.0)));
    }

    // Next combination of size m from `items`.
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == items - m + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// Dantzig constraint data (M, c) on the standardized scale for component i.
inline void dantzig_problem(const ComponentPanel& panel, std::size_t i,
                            std::vector<std::vector<double>>& m_mat,
                            std::vector<double>& c) {
  const std::size_t n = panel.n(), q = panel.width();
  const ColumnStats st = column_stats(panel);
  m_mat.assign(q - 1, std::vector<double>(q - 1, 0.0));
  c.assign(q - 1, 0.0);
  std::size_t r = 0;
  for (std::size_t jr = 0; jr < q; ++jr) {
    if (jr == i) continue;
    std::size_t l = 0;
    for (std::size_t jl = 0; jl < q; ++jl) {
      if (jl == i) continue;
      double cov = 0;
      for (std::size_t k = 0; k < n; ++k) cov += st.centered[jr][k] * st.centered[jl][k];
      m_mat[r][l++] = cov / static_cast<double>(n) / st.sd[jr];
    }
    double bi = 0;
    for (std::size_t k = 0; k < n; ++k) bi += st.centered[jr][k] * st.centered[i][k];
    c[r] = bi / static_cast<double>(n) / st.sd[jr];
    ++r;
  }
}

}  // namespace support
