#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netblock/adjacency.hpp"
#include "netblock/dependence_tests.hpp"
#include "netblock/errors.hpp"
#include "netblock/network.hpp"
#include "netblock/rng.hpp"
#include "netblock/simgen.hpp"
#include "netblock/threads.hpp"

namespace netblock {

enum class ExperimentKind { size, power, network };

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::size: return "size";
    case ExperimentKind::power: return "power";
    case ExperimentKind::network: return "network";
  }
  return "?";
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::size;
  int model_id = 1;
  std::size_t n = 150;
  std::vector<std::size_t> dims = {50, 50};  // (q1,q2), or per-region widths
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::vector<Method> methods = {Method::max_corr};
  std::uint64_t seed = 0;
  double edge_prob = 0.01;  // network kind only
  Solver solver = Solver::lasso;
  double delta = kDefaultLassoDelta;
  unsigned threads = 0;  // 0 = auto (NETBLOCK_THREADS, then hardware)
  std::optional<SignalLaw> signal_override;  // replaces the kind's default law
};

struct MethodResult {
  Method method = Method::max_corr;
  // size/power
  double rate = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  // network
  double nettpr = std::numeric_limits<double>::quiet_NaN();
  double fwer = std::numeric_limits<double>::quiet_NaN();
  double fdr = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<MethodResult> methods;
  double wall_seconds = 0.0;
};

namespace detail {

inline double binomial_se(double rate, std::size_t replicates) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(replicates));
}

inline std::vector<ComponentPanel> split_panel(const ComponentPanel& joint,
                                               const std::vector<std::size_t>& dims) {
  std::vector<ComponentPanel> panels;
  panels.reserve(dims.size());
  std::size_t offset = 0;
  for (const std::size_t q : dims) {
    ComponentPanel part(joint.n(), q);
    for (std::size_t k = 0; k < joint.n(); ++k)
      for (std::size_t j = 0; j < q; ++j) part(k, j) = joint(k, offset + j);
    panels.push_back(std::move(part));
    offset += q;
  }
  return panels;
}

inline TestOutcome run_method(Method method, const ComponentPanel& a,
                              const ComponentPanel& b, const ExperimentSpec& spec) {
  switch (method) {
    case Method::max_corr: return max_corr_test(a, b, spec.alpha);
    case Method::residual_corr:
      return residual_corr_test(a, b, spec.alpha, spec.solver, spec.delta);
    case Method::fisher_pc: return fisher_pc_test(a, b, spec.alpha);
  }
  throw DomainError("unknown method");
}

}  // namespace detail

// Shared two-region driver for the size and power experiments. Each
// replicate redraws the covariance (and, for power, the cross-block
// signal) on streams derived from the replicate index, so results do not
// depend on the worker count.
inline ExperimentResult run_two_region(const ExperimentSpec& spec) {
  if (spec.dims.size() != 2)
    throw DomainError("size/power experiments need dims = (q1, q2)");
  if (spec.replicates < 1) throw DomainError("need replicates >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t q1 = spec.dims[0], q2 = spec.dims[1];
  const bool with_signal = spec.kind == ExperimentKind::power;

  SignalLaw law;
  law.bernoulli_rate = with_signal ? 5.0 / static_cast<double>(q1 * q2) : 0.0;
  law.mean_scale = 4.0;
  law.noise_variance = 0.5;
  law.n = spec.n;
  if (with_signal && spec.signal_override) law = *spec.signal_override;

  Adjacency edges(2);
  if (with_signal) edges.set(0, 1, true);

  const std::size_t m = spec.methods.size();
  std::vector<char> rejected(spec.replicates * m, 0);
  const unsigned threads = detail::resolve_threads(spec.threads);

  detail::parallel_for(spec.replicates, threads, [&](std::size_t r) {
    CovarianceModelSpec cspec;
    cspec.model_id = spec.model_id;
    cspec.dims = spec.dims;
    cspec.seed = Rng::derive_seed(spec.seed, r);
    if (with_signal) cspec.signal = law;
    const JointCovariance joint = joint_covariance_from_spec(cspec, edges);

    Rng sample_rng = Rng::stream(spec.seed, r, Rng::kSample);
    const ComponentPanel panel = sample_mvn(joint.sigma, spec.n, sample_rng);
    const std::vector<ComponentPanel> parts = detail::split_panel(panel, spec.dims);

    for (std::size_t mi = 0; mi < m; ++mi) {
      const TestOutcome out =
          detail::run_method(spec.methods[mi], parts[0], parts[1], spec);
      rejected[r * m + mi] = out.reject ? 1 : 0;
    }
  });

  ExperimentResult result;
  result.spec = spec;
  for (std::size_t mi = 0; mi < m; ++mi) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < spec.replicates; ++r) count += rejected[r * m + mi];
    MethodResult mr;
    mr.method = spec.methods[mi];
    mr.rate = static_cast<double>(count) / static_cast<double>(spec.replicates);
    mr.se = detail::binomial_se(mr.rate, spec.replicates);
    result.methods.push_back(mr);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

inline ExperimentResult run_size(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::size) throw DomainError("run_size: wrong kind");
  return run_two_region(spec);
}

inline ExperimentResult run_power(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::power) throw DomainError("run_power: wrong kind");
  return run_two_region(spec);
}

// Network identification experiment: one Erdos-Renyi truth graph held
// fixed, per-replicate covariance and data redraws, FWER-thresholded
// network per replicate, metrics against the truth.
inline ExperimentResult run_network(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::network)
    throw DomainError("run_network: wrong kind");
  if (spec.dims.size() < 2) throw DomainError("network experiment needs p >= 2 regions");
  if (spec.replicates < 1) throw DomainError("need replicates >= 1");
  for (const std::size_t q : spec.dims)
    if (q != spec.dims[0])
      throw DomainError("network experiment expects equal region widths");
  for (const Method method : spec.methods)
    if (method == Method::fisher_pc)
      throw DomainError("network experiment uses the Gumbel-scale tests only");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t p = spec.dims.size();
  const std::size_t d_st = spec.dims[0] * spec.dims[0];

  SignalLaw law;
  law.bernoulli_rate = 10.0 / static_cast<double>(d_st);
  law.mean_scale = 4.0;
  law.noise_variance = 1.0;
  law.n = spec.n;
  if (spec.signal_override) law = *spec.signal_override;

  const Adjacency truth = erdos_renyi({p, spec.edge_prob, spec.seed});
  const RegionLayout layout = RegionLayout::uniform(p, spec.dims[0]);

  const std::size_t m = spec.methods.size();
  std::vector<std::vector<NetworkEstimate>> estimates(
      m, std::vector<NetworkEstimate>(spec.replicates));
  const unsigned threads = detail::resolve_threads(spec.threads);

  detail::parallel_for(spec.replicates, threads, [&](std::size_t r) {
    CovarianceModelSpec cspec;
    cspec.model_id = spec.model_id;
    cspec.dims = spec.dims;
    cspec.seed = Rng::derive_seed(spec.seed, r);
    cspec.signal = law;
    const JointCovariance joint = joint_covariance_from_spec(cspec, truth);

    Rng sample_rng = Rng::stream(spec.seed, r, Rng::kSample);
    const ComponentPanel panel = sample_mvn(joint.sigma, spec.n, sample_rng);
    const std::vector<ComponentPanel> parts = detail::split_panel(panel, spec.dims);

    for (std::size_t mi = 0; mi < m; ++mi) {
      ScanOptions opts;
      opts.method = spec.methods[mi];
      opts.solver = spec.solver;
      opts.delta = spec.delta;
      opts.threads = 1;  // replicate-level parallelism only
      std::vector<TestOutcome> outcomes = pairwise_scan(layout, parts, spec.alpha, opts);
      estimates[mi][r] = identify_network(std::move(outcomes), p, spec.alpha);
    }
  });

  ExperimentResult result;
  result.spec = spec;
  for (std::size_t mi = 0; mi < m; ++mi) {
    const NetworkMetrics metrics = network_metrics(estimates[mi], truth);
    MethodResult mr;
    mr.method = spec.methods[mi];
    mr.nettpr = metrics.nettpr;
    mr.fwer = metrics.fwer;
    mr.fdr = metrics.fdr;
    mr.se = detail::binomial_se(metrics.nettpr, spec.replicates);
    result.methods.push_back(mr);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::size: return run_size(spec);
    case ExperimentKind::power: return run_power(spec);
    case ExperimentKind::network: return run_network(spec);
  }
  throw DomainError("unknown experiment kind");
}

}  // namespace netblock
