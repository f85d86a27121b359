#pragma once

#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "netblock/dependence_tests.hpp"
#include "netblock/errors.hpp"
#include "netblock/experiments.hpp"
#include "netblock/io.hpp"
#include "netblock/network.hpp"
#include "netblock/result_document.hpp"

namespace netblock::cli {

namespace detail {

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_output(const std::string& text, const std::string& out_path,
                         std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error("cannot open output file: " + out_path);
  f << text;
}

inline std::string format_outcome_table(const RegionLayout& layout,
                                        const std::vector<TestOutcome>& outcomes) {
  std::ostringstream os;
  os << "region_s\tregion_t\td\tmethod\tstatistic\tp_value\tthreshold\treject\n";
  os << std::setprecision(10);
  for (const TestOutcome& o : outcomes) {
    os << layout.names[o.s] << '\t' << layout.names[o.t] << '\t' << o.d << '\t'
       << method_name(o.method) << '\t' << o.statistic << '\t' << o.p_value << '\t'
       << o.threshold << '\t' << (o.reject ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string format_edge_list(const RegionLayout& layout, const Adjacency& adj) {
  std::string out;
  for (std::size_t s = 0; s < adj.p(); ++s)
    for (std::size_t t = s + 1; t < adj.p(); ++t)
      if (adj(s, t)) out += layout.names[s] + "," + layout.names[t] + "\n";
  return out;
}

// Rates appear as percentages in tables (the raw proportions live in the
// document format); the network accuracy metrics stay raw proportions.
inline std::string format_experiment_table(const ExperimentResult& result) {
  const ExperimentSpec& spec = result.spec;
  std::ostringstream os;
  os << std::setprecision(10);
  if (spec.kind == ExperimentKind::network) {
    os << "kind\tmodel\tn\tp\tq\treplicates\talpha\tedge_prob\tmethod\tnettpr\tfwer"
          "\tfdr\tseconds\n";
    for (const MethodResult& mr : result.methods) {
      os << kind_name(spec.kind) << '\t' << spec.model_id << '\t' << spec.n << '\t'
         << spec.dims.size() << '\t' << spec.dims[0] << '\t' << spec.replicates
         << '\t' << spec.alpha << '\t' << spec.edge_prob << '\t'
         << method_name(mr.method) << '\t' << mr.nettpr << '\t' << mr.fwer << '\t'
         << mr.fdr << '\t' << std::setprecision(3) << result.wall_seconds
         << std::setprecision(10) << '\n';
    }
  } else {
    os << "kind\tmodel\tn\tq1\tq2\treplicates\talpha\tmethod\trate_pct\tse_pct"
          "\tseconds\n";
    for (const MethodResult& mr : result.methods) {
      os << kind_name(spec.kind) << '\t' << spec.model_id << '\t' << spec.n << '\t'
         << spec.dims[0] << '\t' << spec.dims[1] << '\t' << spec.replicates << '\t'
         << spec.alpha << '\t' << method_name(mr.method) << '\t' << mr.rate * 100.0
         << '\t' << mr.se * 100.0 << '\t' << std::setprecision(3)
         << result.wall_seconds << std::setprecision(10) << '\n';
    }
  }
  return os.str();
}

}  // namespace detail

// Runs the CLI against argv-style arguments (without the program name).
// Exit codes: 0 success, 2 usage error, 3 data/domain error.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Cross-region dependence tests and network identification"};
  app.require_subcommand(1);

  // Shared options.
  std::string data_path, layout_path, out_path;
  std::string format = "table";
  double alpha = 0.05;
  int method = 1;
  std::string solver_name = "lasso";
  double delta = 0.0;  // 0 = solver default
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool detrend = false, whiten = false;
  double pca_fraction = 0.0;  // 0 = off

  auto add_data_options = [&](CLI::App* sub) {
    sub->add_option("--data", data_path, "numeric CSV, rows = scans")->required();
    sub->add_option("--layout", layout_path, "layout CSV: name,width per region")
        ->required();
    sub->add_flag("--detrend", detrend, "remove a linear trend per column");
    sub->add_flag("--whiten", whiten, "AR(1) whitening per column");
    sub->add_option("--pca-fraction", pca_fraction,
                    "summarize each region by PCA at this cumulative variance");
    sub->add_option("--alpha", alpha, "significance level")->capture_default_str();
    sub->add_option("--solver", solver_name, "lasso|dantzig for method 2")
        ->check(CLI::IsMember({"lasso", "dantzig"}));
    sub->add_option("--delta", delta, "tuning multiplier (default 2.02 lasso, 2 dantzig)");
    sub->add_option("--threads", threads, "worker threads (0 = auto)");
    sub->add_option("--seed", seed, "seed recorded in the output document");
    sub->add_option("--format", format, "table|doc")
        ->check(CLI::IsMember({"table", "doc"}));
    sub->add_option("--out", out_path, "output file (default: stdout)");
  };

  CLI::App* cmd_test = app.add_subcommand("test", "pairwise dependence tests");
  add_data_options(cmd_test);
  cmd_test->add_option("--method", method, "1=max-corr, 2=residual, 3=fisher-pc")
      ->check(CLI::Range(1, 3));

  CLI::App* cmd_network =
      app.add_subcommand("network", "FWER-controlled network identification");
  add_data_options(cmd_network);
  cmd_network->add_option("--method", method, "1=max-corr, 2=residual")
      ->check(CLI::Range(1, 2));

  // simulate: Monte Carlo experiments.
  std::string kind_name_arg = "size";
  int model_id = 1;
  std::size_t n_scans = 150;
  std::vector<std::size_t> dims;
  std::size_t replicates = 1000;
  std::vector<int> sim_methods = {1};
  std::size_t p_regions = 0;
  double edge_prob = 0.01;

  CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  cmd_sim->add_option("--kind", kind_name_arg, "size|power|network")
      ->check(CLI::IsMember({"size", "power", "network"}));
  cmd_sim->add_option("--model", model_id, "covariance model 1..5")
      ->check(CLI::Range(1, 5));
  cmd_sim->add_option("--n", n_scans, "scans per replicate")->capture_default_str();
  cmd_sim->add_option("--dims", dims, "q1,q2 (or region width for network kind)")
      ->delimiter(',');
  cmd_sim->add_option("--replicates", replicates, "Monte Carlo replicates")
      ->capture_default_str();
  cmd_sim->add_option("--method", sim_methods, "methods to run, e.g. 1,2,3")
      ->delimiter(',');
  cmd_sim->add_option("--p", p_regions, "region count (network kind)");
  cmd_sim->add_option("--edge-prob", edge_prob, "Erdos-Renyi edge probability")
      ->capture_default_str();
  cmd_sim->add_option("--alpha", alpha, "significance level")->capture_default_str();
  cmd_sim->add_option("--solver", solver_name, "lasso|dantzig for method 2")
      ->check(CLI::IsMember({"lasso", "dantzig"}));
  cmd_sim->add_option("--delta", delta, "tuning multiplier");
  cmd_sim->add_option("--threads", threads, "worker threads (0 = auto)");
  cmd_sim->add_option("--seed", seed, "master seed");
  cmd_sim->add_option("--format", format, "table|doc")
      ->check(CLI::IsMember({"table", "doc"}));
  cmd_sim->add_option("--out", out_path, "output file (default: stdout)");

  // metrics: score saved adjacencies against a truth grid, or build a
  // consensus network from subject-level grids.
  std::vector<std::string> adj_paths;
  std::string truth_path;
  double quorum = 0.85;

  CLI::App* cmd_metrics =
      app.add_subcommand("metrics", "network accuracy metrics / consensus");
  cmd_metrics->add_option("--adj", adj_paths, "adjacency grid files")->required();
  cmd_metrics->add_option("--truth", truth_path, "truth adjacency grid");
  cmd_metrics->add_option("--quorum", quorum, "consensus quorum")
      ->capture_default_str();
  cmd_metrics->add_option("--format", format, "table|doc")
      ->check(CLI::IsMember({"table", "doc"}));
  cmd_metrics->add_option("--out", out_path, "output file (default: stdout)");

  std::vector<const char*> argv;
  argv.push_back("netblock");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Solver solver = solver_name == "dantzig" ? Solver::dantzig : Solver::lasso;
    const double effective_delta =
        delta > 0.0 ? delta
                    : (solver == Solver::lasso ? kDefaultLassoDelta
                                               : kDefaultDantzigDelta);

    if (*cmd_test || *cmd_network) {
      auto [panels, layout] = read_panel_csv(data_path, layout_path);
      PreprocessOptions prep;
      prep.detrend = detrend;
      prep.whiten = whiten;
      if (pca_fraction > 0.0) prep.pca_fraction = pca_fraction;
      panels = preprocess(panels, prep);
      for (std::size_t v = 0; v < panels.size(); ++v)
        layout.widths[v] = panels[v].width();

      ScanOptions opts;
      opts.method = static_cast<Method>(method);
      opts.solver = solver;
      opts.delta = effective_delta;
      opts.threads = threads;
      std::vector<TestOutcome> outcomes = pairwise_scan(layout, panels, alpha, opts);

      if (*cmd_test) {
        if (format == "doc") {
          const ResultDocument doc = make_outcomes_document(
              "test", layout, alpha, outcomes, seed, detail::timestamp_utc());
          detail::write_output(doc.serialize(), out_path, out);
        } else {
          detail::write_output(detail::format_outcome_table(layout, outcomes),
                               out_path, out);
        }
      } else {
        const NetworkEstimate net =
            identify_network(std::move(outcomes), layout.p(), alpha);
        if (format == "doc") {
          const ResultDocument doc =
              make_network_document(layout, net, seed, detail::timestamp_utc());
          detail::write_output(doc.serialize(), out_path, out);
        } else {
          std::ostringstream os;
          os << std::setprecision(10);
          os << "# p " << net.p << " alpha " << net.alpha << " threshold "
             << net.threshold << '\n';
          os << format_adjacency_grid(net.adjacency);
          os << "edges\n" << detail::format_edge_list(layout, net.adjacency);
          detail::write_output(os.str(), out_path, out);
        }
      }
      return 0;
    }

    if (*cmd_sim) {
      ExperimentSpec spec;
      if (kind_name_arg == "size") {
        spec.kind = ExperimentKind::size;
      } else if (kind_name_arg == "power") {
        spec.kind = ExperimentKind::power;
      } else {
        spec.kind = ExperimentKind::network;
      }
      spec.model_id = model_id;
      spec.n = n_scans;
      spec.replicates = replicates;
      spec.alpha = alpha;
      spec.seed = seed;
      spec.edge_prob = edge_prob;
      spec.solver = solver;
      spec.delta = effective_delta;
      spec.threads = threads;
      spec.methods.clear();
      for (const int mi : sim_methods) {
        if (mi < 1 || mi > 3) throw DomainError("--method values must be 1..3");
        spec.methods.push_back(static_cast<Method>(mi));
      }
      if (spec.kind == ExperimentKind::network) {
        if (p_regions < 2) throw DomainError("network kind needs --p >= 2");
        const std::size_t width = dims.empty() ? 10 : dims[0];
        if (dims.size() > 1)
          throw DomainError("network kind takes a single region width in --dims");
        spec.dims.assign(p_regions, width);
      } else {
        spec.dims = dims.empty() ? std::vector<std::size_t>{50, 50} : dims;
        if (spec.dims.size() != 2)
          throw DomainError("size/power kinds need --dims q1,q2");
      }

      const ExperimentResult result = run_experiment(spec);
      if (format == "doc") {
        const ResultDocument doc =
            make_experiment_document(result, detail::timestamp_utc());
        detail::write_output(doc.serialize(), out_path, out);
      } else {
        detail::write_output(detail::format_experiment_table(result), out_path, out);
      }
      return 0;
    }

    if (*cmd_metrics) {
      std::vector<NetworkEstimate> estimates;
      estimates.reserve(adj_paths.size());
      for (const std::string& path : adj_paths) {
        NetworkEstimate e;
        e.adjacency = read_adjacency_grid(path);
        e.p = e.adjacency.p();
        estimates.push_back(std::move(e));
      }
      if (!truth_path.empty()) {
        const Adjacency truth = read_adjacency_grid(truth_path);
        const NetworkMetrics metrics = network_metrics(estimates, truth);
        if (format == "doc") {
          const ResultDocument doc = make_metrics_document(
              metrics, estimates.size(), detail::timestamp_utc());
          detail::write_output(doc.serialize(), out_path, out);
        } else {
          std::ostringstream os;
          os << std::setprecision(10);
          os << "subjects\tnettpr\tfwer\tfdr\n";
          os << estimates.size() << '\t' << metrics.nettpr << '\t' << metrics.fwer
             << '\t' << metrics.fdr << '\n';
          detail::write_output(os.str(), out_path, out);
        }
      } else {
        const Adjacency consensus = group_consensus_network(estimates, quorum);
        const RegionLayout layout = RegionLayout::uniform(consensus.p(), 1);
        std::ostringstream os;
        os << format_adjacency_grid(consensus);
        os << "edges\n" << detail::format_edge_list(layout, consensus);
        detail::write_output(os.str(), out_path, out);
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "netblock: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "netblock: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace netblock::cli
