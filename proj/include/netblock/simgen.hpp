#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "netblock/adjacency.hpp"
#include "netblock/errors.hpp"
#include "netblock/linalg.hpp"
#include "netblock/matrix.hpp"
#include "netblock/rng.hpp"

namespace netblock {

// Law of the nonzero cross-block entries: each entry is 0 with probability
// 1 - bernoulli_rate, otherwise N(mean_scale * sqrt(log(q_s q_t)/n),
// noise_variance). The second normal parameter is a variance.
struct SignalLaw {
  double bernoulli_rate = 0.0;
  double mean_scale = 4.0;
  double noise_variance = 0.5;
  std::size_t n = 150;
};

struct CovarianceModelSpec {
  int model_id = 1;  // 1..5
  std::vector<std::size_t> dims;
  std::uint64_t seed = 0;
  std::optional<SignalLaw> signal;
};

struct ErdosRenyiSpec {
  std::size_t p = 2;
  double edge_prob = 0.01;
  std::uint64_t seed = 0;
};

// Diagonal entries lambda_ii ~ U(0.5, 2.5), i.i.d.
inline std::vector<double> make_lambda(std::size_t d, Rng& rng) {
  std::vector<double> diag(d);
  for (std::size_t i = 0; i < d; ++i) diag[i] = rng.uniform(0.5, 2.5);
  return diag;
}

// Unit diagonal; within each consecutive block of 10 indices, off-diagonal
// entries are 0.5 with probability 1/2 and zero otherwise. Entries across
// blocks are zero; a trailing partial block acts as a smaller block. The
// upper triangle is drawn row-major and mirrored.
inline SymmetricMatrix make_A(std::size_t d, Rng& rng) {
  SymmetricMatrix a(d);
  for (std::size_t i = 0; i < d; ++i) a.set(i, i, 1.0);
  for (std::size_t block = 0; block < d; block += 10) {
    const std::size_t end = std::min(block + 10, d);
    for (std::size_t i = block; i < end; ++i)
      for (std::size_t j = i + 1; j < end; ++j)
        a.set(i, j, rng.bernoulli(0.5) ? 0.5 : 0.0);
  }
  return a;
}

// Deterministic tridiagonal: 1 on the diagonal, 0.5 at |i-j| = 1, zero
// beyond (the band at |i-j| in {2,3} is zero).
inline SymmetricMatrix make_B(std::size_t d) {
  SymmetricMatrix b(d);
  for (std::size_t i = 0; i < d; ++i) {
    b.set(i, i, 1.0);
    if (i + 1 < d) b.set(i, i + 1, 0.5);
  }
  return b;
}

namespace detail {

// (M + shift I)/(1 + shift) scaled by Lambda^{1/2} on both sides, with
// shift = |lambda_min(M)| + 0.05. The shift makes the core matrix strictly
// PD, and the diagonal congruence preserves that.
inline SymmetricMatrix shift_and_scale(const Matrix& core, double lambda_min,
                                       const std::vector<double>& lambda_diag) {
  const std::size_t d = core.rows();
  const double shift = std::abs(lambda_min) + 0.05;
  std::vector<double> sqrt_lambda(d);
  for (std::size_t i = 0; i < d; ++i) sqrt_lambda[i] = std::sqrt(lambda_diag[i]);

  SymmetricMatrix sigma(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double base = (core(i, j) + (i == j ? shift : 0.0)) / (1.0 + shift);
      sigma.set(i, j, sqrt_lambda[i] * base * sqrt_lambda[j]);
    }
  }
  return sigma;
}

inline bool numerically_singular(const std::vector<double>& eigenvalues) {
  double max_abs = 0.0, min_abs = 1e300;
  for (const double v : eigenvalues) {
    max_abs = std::max(max_abs, std::abs(v));
    min_abs = std::min(min_abs, std::abs(v));
  }
  return min_abs <= 1e-10 * max_abs;
}

inline Matrix inverse_from_eigen(const EigenDecomposition& eig) {
  const std::size_t d = eig.values.size();
  Matrix inv(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        if (eig.values[k] == 0.0)
          throw NotPositiveDefinite(k, "make_region_cov: singular base matrix");
        s += eig.vectors(i, k) * eig.vectors(j, k) / eig.values[k];
      }
      inv(i, j) = s;
      inv(j, i) = s;
    }
  }
  return inv;
}

}  // namespace detail

// Within-region covariance, Models 1-5:
//   1: diag(Lambda)                    (independent components)
//   2: Lambda^{1/2}(A + dI)/(1+d)Lambda^{1/2}      (block sparse covariance)
//   3: as 2 with A^{-1}                (block sparse precision)
//   4: as 2 with B                     (banded sparse covariance)
//   5: as 2 with B^{-1}                (banded sparse precision)
// The result is verified PD with a Cholesky probe; by construction the
// probe cannot fail.
inline SymmetricMatrix make_region_cov(int model_id, std::size_t d, Rng& rng) {
  if (model_id < 1 || model_id > 5)
    throw DomainError("make_region_cov: model_id must be 1..5");
  const std::vector<double> lambda_diag = make_lambda(d, rng);

  SymmetricMatrix sigma(d);
  if (model_id == 1) {
    for (std::size_t i = 0; i < d; ++i) sigma.set(i, i, lambda_diag[i]);
    return sigma;
  }

  const bool random_base = model_id == 2 || model_id == 3;
  const bool inverted = model_id == 3 || model_id == 5;
  SymmetricMatrix base = random_base ? make_A(d, rng) : make_B(d);
  EigenDecomposition eig = symmetric_eigen(base);

  if (inverted && random_base) {
    // The recipe needs A^{-1}; the 0/0.5-valued draws are exactly singular
    // with noticeable probability, so condition the draw on numerical
    // invertibility.
    int tries = 0;
    while (detail::numerically_singular(eig.values)) {
      if (++tries > 100)
        throw NotPositiveDefinite(0, "make_region_cov: could not draw an "
                                     "invertible A");
      base = make_A(d, rng);
      eig = symmetric_eigen(base);
    }
  }

  if (!inverted) {
    sigma = detail::shift_and_scale(base.dense(), eig.values.back(), lambda_diag);
  } else {
    const Matrix inv = detail::inverse_from_eigen(eig);
    double inv_min = 1.0 / eig.values.front();
    for (const double v : eig.values) inv_min = std::min(inv_min, 1.0 / v);
    sigma = detail::shift_and_scale(inv, inv_min, lambda_diag);
  }
  cholesky(sigma);  // PD probe
  return sigma;
}

// Sparse cross-region block under the given signal law.
inline Matrix make_cross_block(std::size_t q_s, std::size_t q_t, const SignalLaw& law,
                               Rng& rng) {
  const double mean =
      law.mean_scale * std::sqrt(std::log(static_cast<double>(q_s * q_t)) /
                                 static_cast<double>(law.n));
  const double sd = std::sqrt(law.noise_variance);
  Matrix block(q_s, q_t);
  for (std::size_t i = 0; i < q_s; ++i)
    for (std::size_t j = 0; j < q_t; ++j)
      if (rng.bernoulli(law.bernoulli_rate)) block(i, j) = rng.normal(mean, sd);
  return block;
}

struct JointCovariance {
  SymmetricMatrix sigma;
  bool repaired = false;
  double ridge = 0.0;
};

// Block-diagonal assembly with cross blocks exactly on the given edges.
// If the result is not comfortably PD (lambda_min <= 1e-8), a ridge of
// |lambda_min| + 0.01 is added and recorded.
inline JointCovariance assemble_joint_cov(const std::vector<SymmetricMatrix>& region_covs,
                                          const Adjacency& edges, const SignalLaw& law,
                                          Rng& rng) {
  const std::size_t p = region_covs.size();
  if (edges.p() != p)
    throw DimensionMismatch("assemble_joint_cov: adjacency size mismatch");
  std::vector<std::size_t> offset(p + 1, 0);
  for (std::size_t v = 0; v < p; ++v) offset[v + 1] = offset[v] + region_covs[v].dim();
  const std::size_t q = offset[p];

  JointCovariance out;
  out.sigma = SymmetricMatrix(q);
  for (std::size_t v = 0; v < p; ++v)
    for (std::size_t i = 0; i < region_covs[v].dim(); ++i)
      for (std::size_t j = i; j < region_covs[v].dim(); ++j)
        out.sigma.set(offset[v] + i, offset[v] + j, region_covs[v](i, j));

  for (std::size_t s = 0; s < p; ++s) {
    for (std::size_t t = s + 1; t < p; ++t) {
      if (!edges(s, t)) continue;
      const Matrix block =
          make_cross_block(region_covs[s].dim(), region_covs[t].dim(), law, rng);
      for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j)
          out.sigma.set(offset[s] + i, offset[t] + j, block(i, j));
    }
  }

  // Fast probe: Cholesky of sigma - 1e-8 I succeeding means no repair.
  SymmetricMatrix probe = out.sigma;
  probe.add_to_diagonal(-1e-8);
  bool healthy = true;
  try {
    cholesky(probe);
  } catch (const NotPositiveDefinite&) {
    healthy = false;
  }
  if (!healthy) {
    const EigenDecomposition eig = symmetric_eigen(out.sigma);
    const double lmin = eig.values.back();
    out.ridge = std::abs(lmin) + 0.01;
    out.repaired = true;
    out.sigma.add_to_diagonal(out.ridge);
  }
  return out;
}

// n i.i.d. rows of N(0, cov) via the Cholesky factor.
inline ComponentPanel sample_mvn(const SymmetricMatrix& cov, std::size_t n, Rng& rng) {
  const std::size_t q = cov.dim();
  const Matrix l = cholesky(cov);
  ComponentPanel panel(n, q);
  std::vector<double> z(q);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < q; ++j) z[j] = rng.normal();
    for (std::size_t i = 0; i < q; ++i) {
      double s = 0.0;
      const double* lrow = l.row_ptr(i);
      for (std::size_t j = 0; j <= i; ++j) s += lrow[j] * z[j];
      panel(k, i) = s;
    }
  }
  return panel;
}

// One generative description, one joint covariance: region covariances from
// the model, cross blocks on the given edges under the spec's signal law
// (absent signal means all-zero cross blocks).
inline JointCovariance joint_covariance_from_spec(const CovarianceModelSpec& spec,
                                                  const Adjacency& edges) {
  if (spec.dims.empty()) throw EmptyInput("joint_covariance_from_spec: no regions");
  Rng cov_rng = Rng::stream(spec.seed, 0, Rng::kCovariance);
  std::vector<SymmetricMatrix> covs;
  covs.reserve(spec.dims.size());
  for (const std::size_t q : spec.dims)
    covs.push_back(make_region_cov(spec.model_id, q, cov_rng));
  SignalLaw law;
  law.bernoulli_rate = 0.0;
  if (spec.signal) law = *spec.signal;
  Rng signal_rng = Rng::stream(spec.seed, 0, Rng::kSignal);
  return assemble_joint_cov(covs, edges, law, signal_rng);
}

inline Adjacency erdos_renyi(const ErdosRenyiSpec& spec) {
  if (spec.p < 2) throw DomainError("erdos_renyi: need p >= 2");
  if (!(spec.edge_prob >= 0.0 && spec.edge_prob <= 1.0))
    throw DomainError("erdos_renyi: edge_prob must be in [0, 1]");
  Rng rng = Rng::stream(spec.seed, 0, Rng::kGraph);
  Adjacency g(spec.p);
  for (std::size_t s = 0; s < spec.p; ++s)
    for (std::size_t t = s + 1; t < spec.p; ++t)
      g.set(s, t, rng.bernoulli(spec.edge_prob));
  return g;
}

}  // namespace netblock
