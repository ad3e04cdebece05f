// Command-line front end: simulate, contagion, fit, infer, experiment,
// and oracle subcommands over JSON/CSV files.  Every run that takes
// --seed is bit-reproducible; omitting it draws a fresh seed and prints
// it to stderr so the run can be repeated.
//
// Exit status: 0 success; 1 usage, file, or validation errors;
// 2 numerical failures (infeasible dispersion targets, impossible
// posteriors, degenerate or non-converged fits).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphmix/fitting.hpp"
#include "graphmix/graph.hpp"
#include "graphmix/io.hpp"
#include "graphmix/models.hpp"
#include "graphmix/netinf.hpp"
#include "graphmix/oracle.hpp"
#include "graphmix/rng.hpp"
#include "graphmix/samplers.hpp"

namespace {

using namespace graphmix;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t fresh =
      (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << fresh << "\n";
  return fresh;
}

void write_stream_or_file(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- simulate ----

struct SimulateArgs {
  std::string family;
  int n = 0;
  bool directed = false;
  bool loops = false;
  int count = 1;
  double delta = 0.5;
  long long edges = 0;
  double m = 0.0, a = 0.0;
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  double mu = 0.0, sigma = 0.0, r = 0.5;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  GraphSpace space{args.n, args.directed, args.loops};
  validate(space);
  if (args.count < 1)
    throw std::runtime_error("--count must be at least 1");
  Rng rng(resolve_seed(args.seed));
  GraphSet gs;
  for (int i = 0; i < args.count; ++i) {
    if (args.family == "bernoulli") {
      gs.graphs.push_back(
          sample_bernoulli_graph(space, BernoulliParams{args.delta}, rng));
    } else if (args.family == "cug") {
      gs.graphs.push_back(sample_cug(space, args.edges, rng));
    } else if (args.family == "uman") {
      const double n_rate = 1.0 - args.m - args.a;
      gs.graphs.push_back(
          sample_uman(space, UmanParams{args.m, args.a, n_rate}, rng));
    } else if (args.family == "beta-bernoulli") {
      gs.graphs.push_back(
          sample_beta_bernoulli(space, BetaBernoulliParams{args.alpha, args.beta},
                                rng)
              .graph);
    } else if (args.family == "dirichlet-categorical") {
      gs.graphs.push_back(
          sample_dirichlet_categorical(
              space,
              DirichletCategoricalParams{args.alpha, args.beta, args.gamma},
              rng)
              .graph);
    } else if (args.family == "beta-bernoulli-meandeg") {
      const BetaBernoulliParams bb =
          params_from_mean_degree(MeanDegreeParams{args.mu, args.sigma}, space);
      gs.graphs.push_back(sample_beta_bernoulli(space, bb, rng).graph);
    } else if (args.family == "dc-nnd") {
      const DirichletCategoricalParams dc = params_from_nnd(
          NonNullDegreeParams{args.mu, args.r, args.sigma}, space);
      gs.graphs.push_back(sample_dirichlet_categorical(space, dc, rng).graph);
    } else {
      throw std::runtime_error("unknown family \"" + args.family + "\"");
    }
  }
  save_graph_set(gs, args.out);
  return kExitOk;
}

// ---- contagion ----

struct ContagionArgs {
  int n = 0;
  double alpha = 1.0, beta = 1.0;
  long long rounds = 0;
  long long thin = 1;
  std::string init = "exact";
  std::optional<std::uint64_t> seed;
  std::string trace_out;
  std::string final_out;
};

int run_contagion_cmd(const ContagionArgs& args) {
  const GraphSpace space{args.n, true, false};
  validate(space);
  const BetaBernoulliParams p{args.alpha, args.beta};
  validate(p);
  Rng rng(resolve_seed(args.seed));

  Graph y0(space);
  if (args.init == "exact") {
    y0 = sample_beta_bernoulli(space, p, rng).graph;
  } else if (args.init == "empty") {
    // default-constructed graph is empty
  } else if (args.init.rfind("density=", 0) == 0) {
    const double d = std::stod(args.init.substr(8));
    if (d < 0.0 || d > 1.0)
      throw std::runtime_error("--init density must lie in [0, 1]");
    const long long e = std::llround(d * static_cast<double>(space.max_edges()));
    y0 = sample_cug(space, e, rng);
  } else {
    throw std::runtime_error(
        "--init must be exact, empty, or density=<x>");
  }

  const ContagionTrace trace = run_contagion(y0, p, args.rounds, args.thin, rng);
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  write_stream_or_file(csv.str(), args.trace_out);
  if (!args.final_out.empty()) {
    GraphSet gs;
    gs.graphs.push_back(trace.final_graph);
    save_graph_set(gs, args.final_out);
  }
  return kExitOk;
}

// ---- fit ----

struct FitArgs {
  std::string in;
  std::string family;
  std::string compare;
  bool approx = false;
  std::string out;
};

int run_fit(const FitArgs& args) {
  const GraphSet gs = load_graph_set(args.in);
  FitConfig config;
  config.offset_transform = args.approx;

  if (!args.compare.empty()) {
    std::vector<FitResult> fits;
    std::stringstream ss(args.compare);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto fam = family_from_name(name);
      if (!fam)
        throw std::runtime_error("unknown family \"" + name +
                                 "\" in --compare");
      fits.push_back(fit_mle(gs, *fam, config));
    }
    for (const FitResult& f : fits)
      if (f.degenerate)
        throw NumericalError("fit of " + f.family +
                             " is degenerate: " + *f.degenerate);
    const std::vector<ComparisonRow> rows = model_comparison(fits);
    std::ostringstream csv;
    write_comparison_csv(rows, csv);
    write_stream_or_file(csv.str(), args.out);
    return kExitOk;
  }

  const auto fam = family_from_name(args.family);
  if (!fam) throw std::runtime_error("unknown family \"" + args.family + "\"");
  const FitResult fit = fit_mle(gs, *fam, config);
  write_stream_or_file(fit_result_to_json(fit), args.out);
  if (fit.degenerate) {
    std::cerr << "degenerate fit: " << *fit.degenerate << "\n";
    return kExitNumerical;
  }
  if (!fit.converged) {
    std::cerr << "fit did not converge";
    for (const std::string& f : fit.flags) std::cerr << " [" << f << "]";
    std::cerr << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---- infer ----

struct InferArgs {
  std::string obs_path;
  std::string prior = "bernoulli(0.5)";
  int chains = 3;
  int burn_in = 100;
  int draws = 500;
  int thin = 1;
  std::vector<double> fixed_rates;
  std::vector<double> fp_prior{1.0, 11.0};
  std::vector<double> fn_prior{1.0, 11.0};
  std::string pooling = "global";
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_infer(const InferArgs& args) {
  const ObservationSet obs = load_observations(args.obs_path);
  const GraphPrior prior = parse_prior(args.prior);
  ErrorModel em;
  em.fp_a = args.fp_prior[0];
  em.fp_b = args.fp_prior[1];
  em.fn_a = args.fn_prior[0];
  em.fn_b = args.fn_prior[1];
  if (args.pooling == "global")
    em.pooling = ErrorModel::Pooling::global;
  else if (args.pooling == "per-source")
    em.pooling = ErrorModel::Pooling::per_source;
  else
    throw std::runtime_error("--pooling must be global or per-source");

  GibbsConfig config;
  config.chains = args.chains;
  config.burn_in = args.burn_in;
  config.draws = args.draws;
  config.thin = args.thin;
  if (!args.fixed_rates.empty()) {
    if (args.fixed_rates.size() != 2)
      throw std::runtime_error("--fixed-rates needs two values: fp fn");
    config.fixed_rates = {args.fixed_rates[0], args.fixed_rates[1]};
  }
  config.seed = resolve_seed(args.seed);

  const PosteriorDraws draws = posterior_gibbs(obs, prior, em, config);
  const Graph est = point_estimate(draws);
  const GliRecord gli = graph_level_indices(est);
  const std::vector<double> marg = edge_marginals(draws);

  double fp_mean = 0.0, fn_mean = 0.0;
  std::size_t n_rate = 0;
  std::vector<std::vector<double>> dens, fps, fns;
  for (const auto& chain : draws.chains) {
    dens.push_back(chain.density);
    std::vector<double> f1, f2;
    for (std::size_t k = 0; k < chain.fp.size(); ++k) {
      double s1 = 0.0, s2 = 0.0;
      for (double v : chain.fp[k]) s1 += v;
      for (double v : chain.fn[k]) s2 += v;
      f1.push_back(s1 / static_cast<double>(chain.fp[k].size()));
      f2.push_back(s2 / static_cast<double>(chain.fn[k].size()));
      fp_mean += f1.back();
      fn_mean += f2.back();
      ++n_rate;
    }
    fps.push_back(std::move(f1));
    fns.push_back(std::move(f2));
  }
  fp_mean /= static_cast<double>(n_rate);
  fn_mean /= static_cast<double>(n_rate);

  json out;
  out["n"] = obs.space.n_vertices;
  out["n_slices"] = obs.slices.size();
  out["prior"] = prior.name();
  out["gibbs"] = {{"chains", config.chains},
                  {"burn_in", config.burn_in},
                  {"draws", config.draws},
                  {"thin", config.thin}};
  json edges = json::array();
  for (const auto& [i, k] : edge_variables(est.space()))
    if (est.edge(i, k)) edges.push_back({i + 1, k + 1});
  out["point_estimate"] = {{"edges", std::move(edges)}};
  out["gli"] = {{"density", gli.density},
                {"reciprocity",
                 gli.reciprocity ? json(*gli.reciprocity) : json()},
                {"connectedness", gli.connectedness}};
  json jm = json::array();
  const auto vars = edge_variables(est.space());
  for (std::size_t k = 0; k < vars.size(); ++k)
    jm.push_back({{"from", vars[k].first + 1},
                  {"to", vars[k].second + 1},
                  {"prob", marg[k]}});
  out["edge_marginals"] = std::move(jm);
  out["posterior_density_mean"] = posterior_density_summary(draws);
  out["rates"] = {{"fp_mean", fp_mean}, {"fn_mean", fn_mean}};
  json psrf_block;
  psrf_block["density"] = psrf(dens);
  if (!config.fixed_rates) {
    psrf_block["fp"] = psrf(fps);
    psrf_block["fn"] = psrf(fns);
  } else {
    psrf_block["fp"] = json();
    psrf_block["fn"] = json();
  }
  out["psrf"] = std::move(psrf_block);
  write_stream_or_file(out.dump(2) + "\n", args.out);
  return kExitOk;
}

// ---- experiment ----

struct ExperimentArgs {
  std::string design_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_experiment_cmd(const ExperimentArgs& args) {
  const ExperimentDesign design = load_design(args.design_path);
  const std::uint64_t seed = resolve_seed(args.seed);
  const std::vector<ExperimentRow> rows = run_experiment(design, seed);
  std::ostringstream csv;
  write_experiment_csv(rows, csv);
  write_stream_or_file(csv.str(), args.out);
  return kExitOk;
}

// ---- oracle ----

struct OracleArgs {
  std::string family;
  int n = 0;
  bool directed = false;
  bool loops = false;
  double delta = 0.5;
  long long edges = 0;
  double m = 0.0, a = 0.0;
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  std::string obs_path;  // posterior mode when non-empty
  std::string prior = "bernoulli(0.5)";
  double fp = 0.0, fn = 0.0;
  std::string out;
};

std::function<double(const Graph&)> make_log_pmf(const OracleArgs& args) {
  if (args.family == "bernoulli") {
    const BernoulliParams p{args.delta};
    return [p](const Graph& g) { return log_pmf_bernoulli(g, p); };
  }
  if (args.family == "cug") {
    const long long e = args.edges;
    return [e](const Graph& g) { return log_pmf_cug(g, e); };
  }
  if (args.family == "uman") {
    const UmanParams p{args.m, args.a, 1.0 - args.m - args.a};
    return [p](const Graph& g) { return log_pmf_uman(g, p); };
  }
  if (args.family == "beta-bernoulli") {
    const BetaBernoulliParams p{args.alpha, args.beta};
    return [p](const Graph& g) { return log_pmf_beta_bernoulli(g, p); };
  }
  if (args.family == "dirichlet-categorical") {
    const DirichletCategoricalParams p{args.alpha, args.beta, args.gamma};
    return [p](const Graph& g) { return log_pmf_dirichlet_categorical(g, p); };
  }
  throw std::runtime_error("unknown family \"" + args.family + "\"");
}

std::function<double(const Graph&)> prior_log_pmf(const GraphPrior& prior) {
  switch (prior.family) {
    case GraphPrior::Family::bernoulli: {
      const BernoulliParams p = prior.bernoulli;
      return [p](const Graph& g) { return log_pmf_bernoulli(g, p); };
    }
    case GraphPrior::Family::beta_bernoulli: {
      const BetaBernoulliParams p = prior.bb;
      return [p](const Graph& g) { return log_pmf_beta_bernoulli(g, p); };
    }
    case GraphPrior::Family::dirichlet_categorical: {
      const DirichletCategoricalParams p = prior.dc;
      return [p](const Graph& g) {
        return log_pmf_dirichlet_categorical(g, p);
      };
    }
  }
  throw std::logic_error("unreachable prior family");
}

int run_oracle(const OracleArgs& args) {
  EnumeratedDistribution dist;
  if (!args.obs_path.empty()) {
    const ObservationSet obs = load_observations(args.obs_path);
    const GraphPrior prior = parse_prior(args.prior);
    dist = exact_posterior(obs.space, prior_log_pmf(prior), obs, args.fp,
                           args.fn);
  } else {
    const GraphSpace space{args.n, args.directed, args.loops};
    validate(space);
    dist = exact_distribution(space, make_log_pmf(args));
  }
  std::ostringstream csv;
  csv << "encoding,probability\n";
  char buf[40];
  for (std::size_t code = 0; code < dist.prob.size(); ++code) {
    std::snprintf(buf, sizeof buf, "%.12g", dist.prob[code]);
    csv << code << ',' << buf << '\n';
  }
  write_stream_or_file(csv.str(), args.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Continuous mixture models for random graphs: exact pmfs, samplers, "
      "pooled fitting, contagion dynamics, and network inference from "
      "noisy reports"};
  app.require_subcommand(1);
  app.set_config("--config");

  SimulateArgs sim;
  CLI::App* c_sim =
      app.add_subcommand("simulate", "Draw graphs from a model family");
  c_sim->add_option("--family", sim.family,
                    "bernoulli | cug | uman | beta-bernoulli | "
                    "dirichlet-categorical | beta-bernoulli-meandeg | dc-nnd")
      ->required();
  c_sim->add_option("--n", sim.n, "number of vertices")->required();
  c_sim->add_flag("--directed", sim.directed, "directed edges");
  c_sim->add_flag("--loops", sim.loops, "allow self-ties");
  c_sim->add_option("-k,--count", sim.count, "number of graphs");
  c_sim->add_option("--delta", sim.delta, "edge probability (bernoulli)");
  c_sim->add_option("--edges", sim.edges, "edge count (cug)");
  c_sim->add_option("--m", sim.m, "mutual-dyad rate (uman)");
  c_sim->add_option("--a", sim.a, "asymmetric-dyad rate (uman)");
  c_sim->add_option("--alpha", sim.alpha, "first mixing weight");
  c_sim->add_option("--beta", sim.beta, "second mixing weight");
  c_sim->add_option("--gamma", sim.gamma, "third mixing weight");
  c_sim->add_option("--mu", sim.mu, "target mean degree");
  c_sim->add_option("--sigma", sim.sigma, "target degree deviation");
  c_sim->add_option("--r", sim.r, "reciprocation rate (dc-nnd)");
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out", sim.out, "output graph-set JSON")->required();

  ContagionArgs con;
  CLI::App* c_con = app.add_subcommand(
      "contagion", "Round-based tie dynamics with a trace of summaries");
  c_con->add_option("--n", con.n, "number of vertices")->required();
  c_con->add_option("--alpha", con.alpha, "mixing weight on ties")->required();
  c_con->add_option("--beta", con.beta, "mixing weight on non-ties")
      ->required();
  c_con->add_option("--rounds", con.rounds, "number of update rounds")
      ->required();
  c_con->add_option("--thin", con.thin, "rounds between recorded summaries");
  c_con->add_option("--init", con.init, "exact | empty | density=<x>");
  c_con->add_option("--seed", con.seed, "RNG seed");
  c_con->add_option("--trace", con.trace_out, "trace CSV path (- for stdout)")
      ->required();
  c_con->add_option("--final", con.final_out, "final graph JSON path");

  FitArgs fit;
  CLI::App* c_fit = app.add_subcommand(
      "fit", "Pooled maximum-likelihood fit over a set of graphs");
  c_fit->add_option("--in", fit.in, "graph-set JSON")->required();
  c_fit->add_option("--family", fit.family,
                    "bernoulli | beta-bernoulli | dirichlet-categorical | "
                    "beta-bernoulli-meandeg | dc-nnd");
  c_fit->add_option("--compare", fit.compare,
                    "comma-separated families; writes an AIC table");
  c_fit->add_flag("--approx", fit.approx,
                  "restrict weights above 1 (offset-approximation regime)");
  c_fit->add_option("--out", fit.out, "output path (- for stdout)");

  InferArgs inf;
  CLI::App* c_inf = app.add_subcommand(
      "infer", "Posterior over a criterion graph from noisy reports");
  c_inf->add_option("--obs", inf.obs_path, "observation-set JSON")->required();
  c_inf->add_option("--prior", inf.prior,
                    "criterion prior, e.g. beta-bernoulli(0.5,0.5)");
  c_inf->add_option("--chains", inf.chains, "number of chains");
  c_inf->add_option("--burn-in", inf.burn_in, "discarded sweeps per chain");
  c_inf->add_option("--draws", inf.draws, "retained draws per chain");
  c_inf->add_option("--thin", inf.thin, "sweeps between retained draws");
  c_inf->add_option("--fixed-rates", inf.fixed_rates,
                    "fix error rates: fp fn")
      ->expected(2);
  c_inf->add_option("--fp-prior", inf.fp_prior, "beta prior on fp: a b")
      ->expected(2);
  c_inf->add_option("--fn-prior", inf.fn_prior, "beta prior on fn: a b")
      ->expected(2);
  c_inf->add_option("--pooling", inf.pooling, "global | per-source");
  c_inf->add_option("--seed", inf.seed, "RNG seed");
  c_inf->add_option("--out", inf.out, "output JSON path (- for stdout)");

  ExperimentArgs exp;
  CLI::App* c_exp = app.add_subcommand(
      "experiment", "Recovery experiment over a design grid");
  c_exp->add_option("--design", exp.design_path, "design JSON")->required();
  c_exp->add_option("--seed", exp.seed, "RNG seed");
  c_exp->add_option("--out", exp.out, "output CSV path (- for stdout)");

  OracleArgs ora;
  CLI::App* c_ora = app.add_subcommand(
      "oracle", "Exhaustive enumeration of a small-space distribution");
  c_ora->add_option("--family", ora.family,
                    "bernoulli | cug | uman | beta-bernoulli | "
                    "dirichlet-categorical");
  c_ora->add_option("--n", ora.n, "number of vertices");
  c_ora->add_flag("--directed", ora.directed, "directed edges");
  c_ora->add_flag("--loops", ora.loops, "allow self-ties");
  c_ora->add_option("--delta", ora.delta, "edge probability (bernoulli)");
  c_ora->add_option("--edges", ora.edges, "edge count (cug)");
  c_ora->add_option("--m", ora.m, "mutual-dyad rate (uman)");
  c_ora->add_option("--a", ora.a, "asymmetric-dyad rate (uman)");
  c_ora->add_option("--alpha", ora.alpha, "first mixing weight");
  c_ora->add_option("--beta", ora.beta, "second mixing weight");
  c_ora->add_option("--gamma", ora.gamma, "third mixing weight");
  c_ora->add_option("--obs", ora.obs_path,
                    "observation-set JSON (posterior mode)");
  c_ora->add_option("--prior", ora.prior, "criterion prior (posterior mode)");
  c_ora->add_option("--fp", ora.fp, "false-positive rate (posterior mode)");
  c_ora->add_option("--fn", ora.fn, "false-negative rate (posterior mode)");
  c_ora->add_option("--out", ora.out, "output CSV path (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11's own exit codes collapse onto the documented 0/1 contract.
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_con->parsed()) return run_contagion_cmd(con);
    if (c_fit->parsed()) return run_fit(fit);
    if (c_inf->parsed()) return run_infer(inf);
    if (c_exp->parsed()) return run_experiment_cmd(exp);
    if (c_ora->parsed()) return run_oracle(ora);
  } catch (const InvalidDispersionError& e) {
    std::cerr << "error: " << e.what();
    if (e.graph_index >= 0) std::cerr << " (graph " << e.graph_index + 1 << ")";
    std::cerr << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << "error: no subcommand given\n";
  return kExitUsage;
}
