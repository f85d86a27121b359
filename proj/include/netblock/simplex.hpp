#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "netblock/errors.hpp"
#include "netblock/matrix.hpp"

namespace netblock::detail {

// Two-phase dense simplex with Bland's anti-cycling rule, for
//   min c^T x  s.t.  A x = b,  x >= 0.
// Sized for the nodewise Dantzig programs (a few hundred rows at most).
class Simplex {
 public:
  Simplex(Matrix a, std::vector<double> b, std::vector<double> cost)
      : a_(std::move(a)), b_(std::move(b)), cost_(std::move(cost)) {}

  struct Solution {
    std::vector<double> x;
    double objective = 0.0;
    long pivots = 0;
  };

  Solution solve(long pivot_cap = 1000000) {
    const std::size_t m = a_.rows();
    const std::size_t n = a_.cols();
    for (std::size_t r = 0; r < m; ++r) {
      if (b_[r] < 0.0) {
        b_[r] = -b_[r];
        for (std::size_t j = 0; j < n; ++j) a_(r, j) = -a_(r, j);
      }
    }

    // Tableau columns: original vars, artificials, rhs.
    const std::size_t width = n + m + 1;
    tab_.assign(m + 1, std::vector<double>(width, 0.0));
    basis_.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < n; ++j) tab_[r][j] = a_(r, j);
      tab_[r][n + r] = 1.0;
      tab_[r][width - 1] = b_[r];
      basis_[r] = n + r;
    }

    // Phase 1: minimize the artificial sum. Objective row keeps z_j - c_j,
    // which for the artificial basis is the plain column sum.
    for (std::size_t j = 0; j < width; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += tab_[r][j];
      tab_[m][j] = (j >= n && j < n + m) ? 0.0 : s;
    }
    long pivots = run(n + m, pivot_cap);

    double scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(b_[r]));
    if (tab_[m][width - 1] > 1e-7 * scale)
      throw Infeasible("simplex: phase 1 finished with positive infeasibility");

    // Kick residual artificials out of the basis (they sit at zero).
    for (std::size_t r = 0; r < m; ++r) {
      if (basis_[r] < n) continue;
      std::size_t piv = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(tab_[r][j]) > 1e-9) {
          piv = j;
          break;
        }
      }
      if (piv < n) {
        pivot(r, piv);
        ++pivots;
      }
      // else: redundant row; leave the artificial basic at zero.
    }

    // Phase 2: original objective, artificials priced out of play.
    for (std::size_t j = 0; j < width; ++j) tab_[m][j] = 0.0;
    for (std::size_t j = 0; j < n; ++j) tab_[m][j] = -cost_[j];
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t bv = basis_[r];
      if (bv < n && cost_[bv] != 0.0) {
        const double f = cost_[bv];
        for (std::size_t j = 0; j < width; ++j) tab_[m][j] += f * tab_[r][j];
      }
    }
    pivots += run(n, pivot_cap - pivots);

    Solution sol;
    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      if (basis_[r] < n) sol.x[basis_[r]] = tab_[r][width - 1];
    sol.objective = tab_[m][width - 1];
    sol.pivots = pivots;
    return sol;
  }

 private:
  // Bland's rule throughout: lowest eligible entering index, and ties in the
  // ratio test broken by the lowest basic index.
  long run(std::size_t num_cols, long pivot_cap) {
    const std::size_t m = basis_.size();
    const std::size_t rhs = tab_[0].size() - 1;
    long pivots = 0;
    for (;;) {
      std::size_t enter = num_cols;
      for (std::size_t j = 0; j < num_cols; ++j) {
        if (tab_[m][j] > 1e-11) {
          enter = j;
          break;
        }
      }
      if (enter == num_cols) return pivots;

      std::size_t leave = m;
      double best_ratio = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (tab_[r][enter] > 1e-11) {
          const double ratio = tab_[r][rhs] / tab_[r][enter];
          if (leave == m || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave == m)
        throw Infeasible("simplex: objective unbounded");

      pivot(leave, enter);
      if (++pivots >= pivot_cap)
        throw NoConvergence("simplex: pivot cap exceeded");
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const std::size_t width = tab_[0].size();
    const double p = tab_[row][col];
    for (std::size_t j = 0; j < width; ++j) tab_[row][j] /= p;
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      if (r == row) continue;
      const double f = tab_[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) tab_[r][j] -= f * tab_[row][j];
      tab_[r][col] = 0.0;
    }
    if (row < basis_.size()) basis_[row] = col;
  }

  Matrix a_;
  std::vector<double> b_;
  std::vector<double> cost_;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
};

}  // namespace netblock::detail
