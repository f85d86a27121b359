#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "netblock/adjacency.hpp"
#include "netblock/dependence_tests.hpp"
#include "netblock/errors.hpp"
#include "netblock/null_dist.hpp"

namespace netblock {

// Region-level network from one simultaneous pass over all pairs.
struct NetworkEstimate {
  std::size_t p = 0;
  Adjacency adjacency;
  std::vector<TestOutcome> outcomes;
  double alpha = 0.05;
  double threshold = 0.0;
};

// Applies the FWER rule: an edge is kept iff its statistic exceeds
// 2 log{p(p-1)/2} + q_alpha. Outcomes must cover every pair s < t exactly
// once and must come from the Gumbel-scale tests.
inline NetworkEstimate identify_network(std::vector<TestOutcome> outcomes,
                                        std::size_t p, double alpha) {
  if (p < 2) throw DomainError("identify_network: need p >= 2");
  const std::size_t expected = p * (p - 1) / 2;
  if (outcomes.size() != expected)
    throw IncompletePairSet("identify_network: expected " +
                            std::to_string(expected) + " outcomes, got " +
                            std::to_string(outcomes.size()));

  std::vector<char> seen(p * p, 0);
  for (const TestOutcome& o : outcomes) {
    if (o.method == Method::fisher_pc)
      throw DomainError("identify_network: the FWER rule applies to the "
                        "Gumbel-scale statistics only");
    if (o.s >= o.t || o.t >= p)
      throw IncompletePairSet("identify_network: pair out of range");
    if (seen[o.s * p + o.t]++)
      throw IncompletePairSet("identify_network: duplicate pair (" +
                              std::to_string(o.s) + "," + std::to_string(o.t) + ")");
  }

  NetworkEstimate est;
  est.p = p;
  est.alpha = alpha;
  est.threshold = fwer_threshold(p, alpha);
  est.adjacency = Adjacency(p);
  for (TestOutcome& o : outcomes) {
    const bool edge = o.statistic > est.threshold;
    o.threshold = est.threshold;
    o.reject = edge;
    o.p_value = 1.0 - gumbel_cdf(o.statistic);
    est.adjacency.set(o.s, o.t, edge);
  }
  est.outcomes = std::move(outcomes);
  return est;
}

struct NetworkMetrics {
  double nettpr = 0.0;  // fraction of replicates matching the truth exactly
  double fwer = 0.0;    // fraction of replicates with at least one false edge
  double fdr = 0.0;     // false edges over all declared edges, 0 when none
};

inline NetworkMetrics network_metrics(const std::vector<NetworkEstimate>& estimates,
                                      const Adjacency& truth) {
  if (estimates.empty()) throw EmptyInput("network_metrics: no estimates");
  const std::size_t p = truth.p();
  for (const NetworkEstimate& e : estimates)
    if (e.p != p)
      throw DimensionMismatch("network_metrics: estimate and truth disagree on p");

  std::size_t exact = 0, any_false = 0, false_edges = 0, total_edges = 0;
  for (const NetworkEstimate& e : estimates) {
    bool all_match = true, has_false = false;
    for (std::size_t s = 0; s < p; ++s) {
      for (std::size_t t = s + 1; t < p; ++t) {
        const bool est = e.adjacency(s, t);
        const bool tru = truth(s, t);
        if (est != tru) all_match = false;
        if (est) {
          ++total_edges;
          if (!tru) {
            ++false_edges;
            has_false = true;
          }
        }
      }
    }
    exact += all_match;
    any_false += has_false;
  }

  const double r = static_cast<double>(estimates.size());
  NetworkMetrics m;
  m.nettpr = static_cast<double>(exact) / r;
  m.fwer = static_cast<double>(any_false) / r;
  m.fdr = total_edges == 0 ? 0.0
                           : static_cast<double>(false_edges) /
                                 static_cast<double>(total_edges);
  return m;
}

// Group-level network: keep an edge present in at least a quorum fraction
// of subject networks (boundary inclusive).
inline Adjacency group_consensus_network(const std::vector<NetworkEstimate>& subjects,
                                         double quorum) {
  if (subjects.empty()) throw EmptyInput("group_consensus_network: no subjects");
  if (!(quorum > 0.0 && quorum <= 1.0))
    throw DomainError("group_consensus_network: quorum must be in (0, 1]");
  const std::size_t p = subjects.front().p;
  for (const NetworkEstimate& e : subjects)
    if (e.p != p)
      throw DimensionMismatch("group_consensus_network: subjects disagree on p");

  const double total = static_cast<double>(subjects.size());
  Adjacency out(p);
  for (std::size_t s = 0; s < p; ++s) {
    for (std::size_t t = s + 1; t < p; ++t) {
      std::size_t count = 0;
      for (const NetworkEstimate& e : subjects) count += e.adjacency(s, t) ? 1 : 0;
      out.set(s, t, static_cast<double>(count) / total >= quorum);
    }
  }
  return out;
}

}  // namespace netblock
