#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "netblock/errors.hpp"
#include "netblock/matrix.hpp"

namespace netblock {

// One region's data: n scans (rows) by q summarized components (columns).
// Scans are treated as independent replicates once whitened.
struct ComponentPanel {
  Matrix data;

  ComponentPanel() = default;
  explicit ComponentPanel(Matrix m) : data(std::move(m)) {}
  ComponentPanel(std::size_t n, std::size_t q) : data(n, q) {}

  std::size_t n() const { return data.rows(); }
  std::size_t width() const { return data.cols(); }

  double operator()(std::size_t k, std::size_t i) const { return data(k, i); }
  double& operator()(std::size_t k, std::size_t i) { return data(k, i); }

  // n >= 4 keeps Fisher-z (sqrt(n-3)) and the covariance nondegenerate;
  // every column must carry some variation.
  void validate() const {
    if (n() < 4) throw DomainError("panel needs at least 4 scans");
    for (std::size_t j = 0; j < width(); ++j) {
      double mean = 0.0;
      for (std::size_t k = 0; k < n(); ++k) mean += data(k, j);
      mean /= static_cast<double>(n());
      double ss = 0.0;
      for (std::size_t k = 0; k < n(); ++k) {
        const double d = data(k, j) - mean;
        ss += d * d;
      }
      if (ss <= 0.0)
        throw ZeroVariance("column " + std::to_string(j) + " has zero variance");
    }
  }
};

namespace detail {

inline double column_mean(const Matrix& m, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.rows(); ++k) s += m(k, j);
  return s / static_cast<double>(m.rows());
}

// Population-style (1/n) variance, matching the sigma-hat convention used
// throughout the test statistics.
inline double column_variance(const Matrix& m, std::size_t j) {
  const double mean = column_mean(m, j);
  double ss = 0.0;
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const double d = m(k, j) - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(m.rows());
}

inline Matrix centered_copy(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double mean = column_mean(m, j);
    for (std::size_t k = 0; k < m.rows(); ++k) out(k, j) = m(k, j) - mean;
  }
  return out;
}

// (1/n) A^T B for panels sharing n rows; no centering applied here.
inline Matrix cross_moment(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  Matrix g(a.cols(), b.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const double* ar = a.row_ptr(k);
    const double* br = b.row_ptr(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ar[i];
      if (aki == 0.0) continue;
      double* grow = g.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) grow[j] += aki * br[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : g.data()) v *= inv_n;
  return g;
}

}  // namespace detail

// De-mean only. The always-on half of the preprocessing pipeline, and the
// centering step the residual tests share with the marginal test.
inline ComponentPanel center(const ComponentPanel& panel) {
  return ComponentPanel(detail::centered_copy(panel.data));
}

// Removes the column mean and the least-squares linear trend in scan index.
// A second mean pass pushes the residual mean down to rounding noise.
inline ComponentPanel center_and_detrend(const ComponentPanel& panel) {
  const std::size_t n = panel.n();
  if (n < 4) throw DomainError("center_and_detrend: need n >= 4");

  std::vector<double> t(n);
  const double mid = (static_cast<double>(n) - 1.0) / 2.0;
  double tt = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = static_cast<double>(k) - mid;
    tt += t[k] * t[k];
  }

  ComponentPanel out(n, panel.width());
  for (std::size_t j = 0; j < panel.width(); ++j) {
    const double mean = detail::column_mean(panel.data, j);
    const double var_in = detail::column_variance(panel.data, j);
    double xt = 0.0;
    for (std::size_t k = 0; k < n; ++k) xt += (panel(k, j) - mean) * t[k];
    const double slope = xt / tt;
    double res_mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      out(k, j) = panel(k, j) - mean - slope * t[k];
      res_mean += out(k, j);
    }
    res_mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      out(k, j) -= res_mean;
      ss += out(k, j) * out(k, j);
    }
    // A column that was a pure line is all roundoff now.
    if (ss / static_cast<double>(n) <= 1e-24 * std::max(var_in, 1e-300))
      throw ZeroVariance("column " + std::to_string(j) +
                         " is constant after de-trending");
  }
  return out;
}

// AR(1) whitening of centered columns. phi_hat is the lag-1 sample
// autocorrelation clipped to (-0.999, 0.999); the first row is scaled by
// sqrt(1 - phi^2) so the transformed column stays variance-stationary.
inline std::pair<ComponentPanel, std::vector<double>> ar1_whiten(
    const ComponentPanel& panel, std::span<const double> forced_phi = {}) {
  const std::size_t n = panel.n();
  if (n < 4) throw DomainError("ar1_whiten: need n >= 4");
  if (!forced_phi.empty() && forced_phi.size() != panel.width())
    throw DimensionMismatch("ar1_whiten: phi vector width mismatch");

  ComponentPanel out(n, panel.width());
  std::vector<double> phis(panel.width());
  for (std::size_t j = 0; j < panel.width(); ++j) {
    double phi;
    if (!forced_phi.empty()) {
      phi = forced_phi[j];
    } else {
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = panel(k, j);
        den += x * x;
        if (k > 0) num += x * panel(k - 1, j);
      }
      if (den <= 0.0)
        throw ZeroVariance("column " + std::to_string(j) + " has zero variance");
      phi = std::clamp(num / den, -0.999, 0.999);
    }
    phis[j] = phi;
    out(0, j) = phi == 0.0 ? panel(0, j) : panel(0, j) * std::sqrt(1.0 - phi * phi);
    for (std::size_t k = 1; k < n; ++k)
      out(k, j) = panel(k, j) - phi * panel(k - 1, j);
  }
  return {std::move(out), std::move(phis)};
}

// Sample covariance with the 1/n divisor (not 1/(n-1)); the statistic
// calibration assumes it.
inline Matrix sample_covariance(const ComponentPanel& a, const ComponentPanel& b) {
  if (a.n() != b.n())
    throw DimensionMismatch("sample_covariance: panels have different n");
  const Matrix ac = detail::centered_copy(a.data);
  const Matrix bc = detail::centered_copy(b.data);
  return detail::cross_moment(ac, bc);
}

inline Matrix sample_correlation(const ComponentPanel& a, const ComponentPanel& b) {
  if (a.n() != b.n())
    throw DimensionMismatch("sample_correlation: panels have different n");
  const Matrix ac = detail::centered_copy(a.data);
  const Matrix bc = detail::centered_copy(b.data);

  auto sds = [](const Matrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t k = 0; k < m.rows(); ++k)
      for (std::size_t j = 0; j < m.cols(); ++j) s[j] += m(k, j) * m(k, j);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (s[j] <= 0.0)
        throw ZeroVariance("column " + std::to_string(j) + " has zero variance");
      s[j] = std::sqrt(s[j] / static_cast<double>(m.rows()));
    }
    return s;
  };
  const std::vector<double> sa = sds(ac);
  const std::vector<double> sb = sds(bc);

  Matrix r = detail::cross_moment(ac, bc);
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) /= sa[i] * sb[j];
  if (&a == &b)
    for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) = 1.0;
  return r;
}

// Lower-triangular Cholesky factor; reports the first failing pivot.
inline Matrix cholesky(const SymmetricMatrix& m) {
  const std::size_t d = m.dim();
  Matrix l(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag <= 0.0)
      throw NotPositiveDefinite(j, "cholesky: pivot " + std::to_string(j) +
                                       " is not positive");
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // orthonormal columns, aligned with values
};

// Cyclic Jacobi. Dimensions in this project stay small enough that the
// robustness of Jacobi wins over anything faster.
inline EigenDecomposition symmetric_eigen(const SymmetricMatrix& m) {
  const std::size_t d = m.dim();
  Matrix a = m.dense();
  Matrix v = Matrix::identity(d);
  if (d == 1) return {{a(0, 0)}, v};

  double frob = 0.0;
  for (const double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);
  const double tol = 1e-14 * std::max(frob, 1e-300);

  constexpr int kMaxSweeps = 10000;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol) break;

    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps)
    throw NoConvergence("symmetric_eigen: Jacobi did not converge");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.resize(d);
  out.vectors = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < d; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

struct PcaSummary {
  ComponentPanel components;             // scores, n x k_selected
  Matrix loadings;                       // q x k_selected
  std::vector<double> explained;         // fractions, non-increasing, full length
  std::size_t k_selected = 0;
};

// PCA on a centered panel under the 1/n covariance. k_selected is the
// smallest k whose cumulative explained fraction reaches var_fraction.
// Sign convention: each loading's largest-magnitude entry is positive.
inline PcaSummary pca_summarize(const ComponentPanel& panel, double var_fraction) {
  if (!(var_fraction > 0.0 && var_fraction <= 1.0))
    throw DomainError("pca_summarize: var_fraction must be in (0, 1]");
  const std::size_t q = panel.width();
  const Matrix cov_dense = detail::cross_moment(panel.data, panel.data);
  const SymmetricMatrix cov = SymmetricMatrix::from_upper(cov_dense);
  EigenDecomposition eig = symmetric_eigen(cov);

  const double lmax = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
  if (lmax <= 0.0) throw ZeroVariance("pca_summarize: panel has no variance");
  // Eigenvalues at rounding level count as rank-zero directions.
  std::vector<double> clipped(q);
  double total = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    clipped[i] = eig.values[i] > 1e-12 * lmax ? eig.values[i] : 0.0;
    total += clipped[i];
  }

  PcaSummary out;
  out.explained.resize(q);
  double cum = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < q; ++i) {
    out.explained[i] = clipped[i] / total;
    if (k == 0) {
      cum += out.explained[i];
      if (cum >= var_fraction - 1e-15) k = i + 1;
    }
  }
  if (k == 0) k = q;
  out.k_selected = k;

  out.loadings = Matrix(q, k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < q; ++i) {
      const double mag = std::abs(eig.vectors(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double sign = eig.vectors(arg, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < q; ++i) out.loadings(i, j) = sign * eig.vectors(i, j);
  }
  out.components = ComponentPanel(multiply(panel.data, out.loadings));
  return out;
}

}  // namespace netblock
