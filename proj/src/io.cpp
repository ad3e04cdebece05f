#include "graphmix/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace graphmix {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

int require_int(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number_integer())
    bad(path, std::string("missing or non-integer field \"") + key + "\"");
  return j[key].get<int>();
}

double require_num(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number())
    bad(path, std::string("missing or non-numeric field \"") + key + "\"");
  return j[key].get<double>();
}

}  // namespace

GraphSet load_graph_set(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object()) bad(path, "top level must be an object");
  if (!j.contains("directed") || !j["directed"].is_boolean())
    bad(path, "missing boolean field \"directed\"");
  GraphSpace proto;
  proto.directed = j["directed"].get<bool>();
  proto.loops = j.value("loops", false);
  if (!j.contains("graphs") || !j["graphs"].is_array() || j["graphs"].empty())
    bad(path, "missing non-empty array field \"graphs\"");

  GraphSet gs;
  for (std::size_t gi = 0; gi < j["graphs"].size(); ++gi) {
    const json& jg = j["graphs"][gi];
    const std::string ctx = "graphs[" + std::to_string(gi) + "]";
    if (!jg.is_object()) bad(path, ctx + " must be an object");
    GraphSpace sp = proto;
    sp.n_vertices = require_int(jg, "n", path);
    try {
      validate(sp);
    } catch (const std::exception& e) {
      bad(path, ctx + ": " + e.what());
    }
    Graph g(sp);
    if (!jg.contains("edges") || !jg["edges"].is_array())
      bad(path, ctx + " missing array field \"edges\"");
    for (const json& je : jg["edges"]) {
      if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
          !je[1].is_number_integer())
        bad(path, ctx + ": each edge must be a pair of integers");
      const int i = je[0].get<int>();
      const int k = je[1].get<int>();
      if (i < 1 || i > sp.n_vertices || k < 1 || k > sp.n_vertices)
        bad(path, ctx + ": vertex out of range in edge (" + std::to_string(i) +
                      ", " + std::to_string(k) + ")");
      if (i == k && !sp.loops)
        bad(path, ctx + ": loop (" + std::to_string(i) + ", " +
                      std::to_string(i) + ") in a loopless space");
      g.set_edge(i - 1, k - 1, true);
    }
    gs.graphs.push_back(std::move(g));
  }
  validate(gs);
  return gs;
}

void save_graph_set(const GraphSet& gs, const std::string& path) {
  validate(gs);
  json j;
  j["directed"] = gs.graphs.front().space().directed;
  j["loops"] = gs.graphs.front().space().loops;
  j["graphs"] = json::array();
  for (const Graph& g : gs.graphs) {
    json jg;
    jg["n"] = g.space().n_vertices;
    json edges = json::array();
    for (const auto& [i, k] : edge_variables(g.space()))
      if (g.edge(i, k)) edges.push_back({i + 1, k + 1});
    jg["edges"] = std::move(edges);
    j["graphs"].push_back(std::move(jg));
  }
  save_text(j.dump(2) + "\n", path);
}

ObservationSet load_observations(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object()) bad(path, "top level must be an object");
  ObservationSet obs;
  obs.space.n_vertices = require_int(j, "n", path);
  obs.space.directed = j.value("directed", true);
  obs.space.loops = false;
  const int n = obs.space.n_vertices;
  if (!j.contains("slices") || !j["slices"].is_array() || j["slices"].empty())
    bad(path, "missing non-empty array field \"slices\"");
  for (std::size_t si = 0; si < j["slices"].size(); ++si) {
    const json& jm = j["slices"][si];
    const std::string ctx = "slices[" + std::to_string(si) + "]";
    if (!jm.is_array() || static_cast<int>(jm.size()) != n)
      bad(path, ctx + " must be an array of " + std::to_string(n) + " rows");
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n, 0);
    for (int r = 0; r < n; ++r) {
      const json& row = jm[r];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        bad(path, ctx + " row " + std::to_string(r + 1) + " must have " +
                      std::to_string(n) + " entries");
      for (int c = 0; c < n; ++c) {
        if (!row[c].is_number_integer() ||
            (row[c].get<int>() != 0 && row[c].get<int>() != 1))
          bad(path, ctx + " cell (" + std::to_string(r + 1) + ", " +
                        std::to_string(c + 1) + ") must be 0 or 1");
        cells[static_cast<std::size_t>(r) * n + c] =
            static_cast<std::uint8_t>(row[c].get<int>());
      }
    }
    obs.slices.push_back(std::move(cells));
  }
  try {
    validate(obs);
  } catch (const std::exception& e) {
    bad(path, e.what());
  }
  return obs;
}

void save_observations(const ObservationSet& obs, const std::string& path) {
  validate(obs);
  const int n = obs.space.n_vertices;
  json j;
  j["n"] = n;
  j["directed"] = true;
  j["slices"] = json::array();
  for (const auto& cells : obs.slices) {
    json jm = json::array();
    for (int r = 0; r < n; ++r) {
      json row = json::array();
      for (int c = 0; c < n; ++c)
        row.push_back(static_cast<int>(cells[static_cast<std::size_t>(r) * n + c]));
      jm.push_back(std::move(row));
    }
    j["slices"].push_back(std::move(jm));
  }
  save_text(j.dump() + "\n", path);
}

std::string fit_result_to_json(const FitResult& fit) {
  json j;
  j["family"] = fit.family;
  json est = json::object();
  json se = json::object();
  for (std::size_t i = 0; i < fit.param_names.size(); ++i) {
    est[fit.param_names[i]] = fit.estimates[i];
    se[fit.param_names[i]] =
        std::isfinite(fit.std_errors[i]) ? json(fit.std_errors[i]) : json();
  }
  j["estimates"] = std::move(est);
  j["std_errors"] = std::move(se);
  j["scale"] = fit.scale;
  j["logLik"] = std::isfinite(fit.log_likelihood) ? json(fit.log_likelihood)
                                                  : json();
  j["deviance"] = std::isfinite(fit.deviance) ? json(fit.deviance) : json();
  j["nullDeviance"] =
      std::isfinite(fit.null_deviance) ? json(fit.null_deviance) : json();
  j["aic"] = std::isfinite(fit.aic) ? json(fit.aic) : json();
  j["converged"] = fit.converged;
  j["flags"] = fit.flags;
  if (fit.degenerate) j["degenerate"] = *fit.degenerate;
  return j.dump(2) + "\n";
}

void save_fit_result(const FitResult& fit, const std::string& path) {
  save_text(fit_result_to_json(fit), path);
}

GraphPrior parse_prior(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw std::runtime_error("cannot parse prior \"" + text +
                             "\": expected name(args)");
  const std::string name = text.substr(0, open);
  std::vector<double> args;
  std::string body = text.substr(open + 1, text.size() - open - 2);
  std::istringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(tok, &used));
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
        ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::runtime_error("cannot parse prior \"" + text +
                               "\": bad number \"" + tok + "\"");
    }
  }
  GraphPrior prior;
  if (name == "bernoulli" && args.size() == 1) {
    prior.family = GraphPrior::Family::bernoulli;
    prior.bernoulli.delta = args[0];
  } else if (name == "beta-bernoulli" && args.size() == 2) {
    prior.family = GraphPrior::Family::beta_bernoulli;
    prior.bb = {args[0], args[1]};
  } else if (name == "dirichlet-categorical" && args.size() == 3) {
    prior.family = GraphPrior::Family::dirichlet_categorical;
    prior.dc = {args[0], args[1], args[2]};
  } else {
    throw std::runtime_error(
        "cannot parse prior \"" + text +
        "\": expected bernoulli(d), beta-bernoulli(a,b), or "
        "dirichlet-categorical(a,b,g)");
  }
  return prior;
}

ExperimentDesign load_design(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object()) bad(path, "top level must be an object");
  ExperimentDesign d;
  d.n_vertices = require_int(j, "n", path);
  d.n_criterion = require_int(j, "n_criterion", path);
  d.fp_rate = require_num(j, "fp", path);
  d.fn_rate = require_num(j, "fn", path);

  if (j.contains("conditions")) {
    if (!j["conditions"].is_array())
      bad(path, "\"conditions\" must be an array of [density, reciprocity]");
    for (const json& jc : j["conditions"]) {
      if (!jc.is_array() || jc.size() != 2 || !jc[0].is_number() ||
          !jc[1].is_number())
        bad(path, "\"conditions\" entries must be [density, reciprocity]");
      d.conditions.emplace_back(jc[0].get<double>(), jc[1].get<double>());
    }
  } else if (j.contains("densities") && j.contains("reciprocities")) {
    if (!j["densities"].is_array() || !j["reciprocities"].is_array())
      bad(path, "\"densities\" and \"reciprocities\" must be arrays");
    for (const json& jd : j["densities"])
      for (const json& jr : j["reciprocities"]) {
        if (!jd.is_number() || !jr.is_number())
          bad(path, "\"densities\" and \"reciprocities\" must be numeric");
        d.conditions.emplace_back(jd.get<double>(), jr.get<double>());
      }
  } else {
    bad(path,
        "need either \"conditions\" or both \"densities\" and "
        "\"reciprocities\"");
  }

  if (!j.contains("slice_schedule") || !j["slice_schedule"].is_array())
    bad(path, "missing array field \"slice_schedule\"");
  for (const json& js : j["slice_schedule"]) {
    if (!js.is_number_integer())
      bad(path, "\"slice_schedule\" entries must be integers");
    d.slice_schedule.push_back(js.get<int>());
  }

  if (!j.contains("priors") || !j["priors"].is_array() || j["priors"].empty())
    bad(path, "missing non-empty array field \"priors\"");
  for (const json& jp : j["priors"]) {
    if (!jp.is_string()) bad(path, "\"priors\" entries must be strings");
    try {
      d.priors.push_back(parse_prior(jp.get<std::string>()));
    } catch (const std::exception& e) {
      bad(path, e.what());
    }
  }

  if (j.contains("error_model")) {
    const json& je = j["error_model"];
    if (!je.is_object()) bad(path, "\"error_model\" must be an object");
    d.error_model.fp_a = je.value("fp_a", d.error_model.fp_a);
    d.error_model.fp_b = je.value("fp_b", d.error_model.fp_b);
    d.error_model.fn_a = je.value("fn_a", d.error_model.fn_a);
    d.error_model.fn_b = je.value("fn_b", d.error_model.fn_b);
    const std::string pooling = je.value("pooling", "global");
    if (pooling == "global")
      d.error_model.pooling = ErrorModel::Pooling::global;
    else if (pooling == "per-source")
      d.error_model.pooling = ErrorModel::Pooling::per_source;
    else
      bad(path, "\"pooling\" must be \"global\" or \"per-source\"");
  }

  if (j.contains("gibbs")) {
    const json& jg = j["gibbs"];
    if (!jg.is_object()) bad(path, "\"gibbs\" must be an object");
    d.gibbs.chains = jg.value("chains", d.gibbs.chains);
    d.gibbs.burn_in = jg.value("burn_in", d.gibbs.burn_in);
    d.gibbs.draws = jg.value("draws", d.gibbs.draws);
    d.gibbs.thin = jg.value("thin", d.gibbs.thin);
    if (jg.contains("fixed_rates")) {
      const json& jf = jg["fixed_rates"];
      if (!jf.is_array() || jf.size() != 2 || !jf[0].is_number() ||
          !jf[1].is_number())
        bad(path, "\"fixed_rates\" must be [fp, fn]");
      d.gibbs.fixed_rates = {jf[0].get<double>(), jf[1].get<double>()};
    }
  }

  try {
    validate(d);
  } catch (const std::exception& e) {
    bad(path, e.what());
  }
  return d;
}

void write_trace_csv(const ContagionTrace& trace, std::ostream& out) {
  out << "step,density,reciprocity,connectedness\n";
  for (std::size_t i = 0; i < trace.step_index.size(); ++i) {
    const GliRecord& g = trace.gli[i];
    out << trace.step_index[i] << ',' << fmt(g.density) << ',';
    if (g.reciprocity) out << fmt(*g.reciprocity);
    out << ',' << fmt(g.connectedness) << '\n';
  }
}

void write_experiment_csv(const std::vector<ExperimentRow>& rows,
                          std::ostream& out) {
  out << "density,reciprocity,prior,n_slices,replicate,accuracy,"
         "inferred_density,psrf_density,psrf_fp,psrf_fn\n";
  for (const ExperimentRow& r : rows) {
    out << fmt(r.density) << ',' << fmt(r.reciprocity) << ',' << r.prior << ','
        << r.n_slices << ',' << r.replicate << ',' << fmt(r.accuracy) << ','
        << fmt(r.inferred_density) << ',' << fmt(r.psrf_density) << ',';
    if (r.psrf_fp) out << fmt(*r.psrf_fp);
    out << ',';
    if (r.psrf_fn) out << fmt(*r.psrf_fn);
    out << '\n';
  }
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          std::ostream& out) {
  out << "family,deviance,df,aic\n";
  for (const ComparisonRow& r : rows)
    out << r.family << ',' << fmt(r.deviance) << ',' << r.df << ','
        << fmt(r.aic) << '\n';
}

}  // namespace graphmix
