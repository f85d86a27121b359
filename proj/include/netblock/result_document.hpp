#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "netblock/adjacency.hpp"
#include "netblock/dependence_tests.hpp"
#include "netblock/errors.hpp"
#include "netblock/experiments.hpp"
#include "netblock/io.hpp"
#include "netblock/layout.hpp"
#include "netblock/network.hpp"

namespace netblock {

// Self-describing machine-readable run record. The payload is plain JSON
// with a schema_version field; doubles round-trip bit-exactly.
struct ResultDocument {
  nlohmann::json payload;

  std::string serialize() const { return payload.dump(2) + "\n"; }

  static ResultDocument parse(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(1, e.byte, std::string("result document: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema_version") ||
        !j["schema_version"].is_number_integer())
      throw DomainError("result document: missing schema_version");
    if (j["schema_version"].get<int>() != 1)
      throw DomainError("result document: unsupported schema_version");
    return ResultDocument{std::move(j)};
  }

  friend bool operator==(const ResultDocument& a, const ResultDocument& b) {
    return a.payload == b.payload;
  }
};

namespace detail {

inline nlohmann::json document_header(const std::string& command, std::uint64_t seed,
                                      const std::string& created) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["tool"] = "netblock";
  j["tool_version"] = kToolVersion;
  j["created"] = created;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

inline nlohmann::json outcome_to_json(const TestOutcome& o) {
  nlohmann::json j;
  j["s"] = o.s;
  j["t"] = o.t;
  j["method"] = static_cast<int>(o.method);
  j["statistic"] = o.statistic;
  j["p_value"] = o.p_value;
  j["threshold"] = o.threshold;
  j["reject"] = o.reject;
  j["d"] = o.d;
  if (o.argmax) j["argmax"] = {o.argmax->first, o.argmax->second};
  return j;
}

inline nlohmann::json adjacency_to_json(const Adjacency& adj) {
  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t s = 0; s < adj.p(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t t = 0; t < adj.p(); ++t) row.push_back(adj(s, t) ? 1 : 0);
    grid.push_back(std::move(row));
    for (std::size_t t = s + 1; t < adj.p(); ++t)
      if (adj(s, t)) edges.push_back({s, t});
  }
  return nlohmann::json{{"p", adj.p()}, {"grid", grid}, {"edges", edges}};
}

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json methods = nlohmann::json::array();
  for (const Method m : spec.methods) methods.push_back(static_cast<int>(m));
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  j["model"] = spec.model_id;
  j["n"] = spec.n;
  j["dims"] = spec.dims;
  j["replicates"] = spec.replicates;
  j["alpha"] = spec.alpha;
  j["methods"] = methods;
  j["seed"] = spec.seed;
  if (spec.kind == ExperimentKind::network) j["edge_prob"] = spec.edge_prob;
  j["solver"] = spec.solver == Solver::lasso ? "lasso" : "dantzig";
  j["delta"] = spec.delta;
  return j;
}

}  // namespace detail

inline ResultDocument make_outcomes_document(const std::string& command,
                                             const RegionLayout& layout, double alpha,
                                             const std::vector<TestOutcome>& outcomes,
                                             std::uint64_t seed,
                                             const std::string& created) {
  nlohmann::json j = detail::document_header(command, seed, created);
  j["alpha"] = alpha;
  j["regions"] = layout.names;
  nlohmann::json arr = nlohmann::json::array();
  for (const TestOutcome& o : outcomes) arr.push_back(detail::outcome_to_json(o));
  j["outcomes"] = std::move(arr);
  return ResultDocument{std::move(j)};
}

inline ResultDocument make_network_document(const RegionLayout& layout,
                                            const NetworkEstimate& net,
                                            std::uint64_t seed,
                                            const std::string& created) {
  ResultDocument doc =
      make_outcomes_document("network", layout, net.alpha, net.outcomes, seed, created);
  nlohmann::json network = detail::adjacency_to_json(net.adjacency);
  network["threshold"] = net.threshold;
  doc.payload["network"] = std::move(network);
  return doc;
}

inline ResultDocument make_experiment_document(const ExperimentResult& result,
                                               const std::string& created) {
  nlohmann::json j = detail::document_header("simulate", result.spec.seed, created);
  j["spec"] = detail::spec_to_json(result.spec);
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodResult& mr : result.methods) {
    nlohmann::json m;
    m["method"] = static_cast<int>(mr.method);
    if (!std::isnan(mr.rate)) m["rate"] = mr.rate;
    if (!std::isnan(mr.se)) m["se"] = mr.se;
    if (!std::isnan(mr.nettpr)) {
      m["nettpr"] = mr.nettpr;
      m["fwer"] = mr.fwer;
      m["fdr"] = mr.fdr;
    }
    methods.push_back(std::move(m));
  }
  j["results"] = std::move(methods);
  j["wall_seconds"] = result.wall_seconds;
  return ResultDocument{std::move(j)};
}

inline ResultDocument make_metrics_document(const NetworkMetrics& metrics,
                                            std::size_t subjects,
                                            const std::string& created) {
  nlohmann::json j = detail::document_header("metrics", 0, created);
  j["subjects"] = subjects;
  j["nettpr"] = metrics.nettpr;
  j["fwer"] = metrics.fwer;
  j["fdr"] = metrics.fdr;
  return ResultDocument{std::move(j)};
}

}  // namespace netblock
