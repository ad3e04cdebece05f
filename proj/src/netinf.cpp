#include "graphmix/netinf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "graphmix/parallel.hpp"
#include "graphmix/samplers.hpp"

namespace graphmix {

namespace {

double xlog(double count, double p) {
  if (count == 0.0) return 0.0;
  return count * std::log(p);
}

void require_dyadic(const GraphSpace& space, const char* op) {
  if (!space.directed || space.loops)
    throw std::invalid_argument(std::string(op) +
                                ": requires a directed loopless space");
}

std::string format_params(const double* vals, int k) {
  char buf[96];
  std::string out = "(";
  for (int i = 0; i < k; ++i) {
    std::snprintf(buf, sizeof buf, "%g", vals[i]);
    if (i) out += ",";
    out += buf;
  }
  return out + ")";
}

}  // namespace

std::string GraphPrior::name() const {
  switch (family) {
    case Family::bernoulli: {
      const double v[1] = {bernoulli.delta};
      return "bernoulli" + format_params(v, 1);
    }
    case Family::beta_bernoulli: {
      const double v[2] = {bb.alpha, bb.beta};
      return "beta-bernoulli" + format_params(v, 2);
    }
    case Family::dirichlet_categorical: {
      const double v[3] = {dc.alpha, dc.beta, dc.gamma};
      return "dirichlet-categorical" + format_params(v, 3);
    }
  }
  return "?";
}

void validate(const ObservationSet& obs) {
  require_dyadic(obs.space, "ObservationSet");
  validate(obs.space);
  const int n = obs.space.n_vertices;
  for (std::size_t k = 0; k < obs.slices.size(); ++k) {
    const auto& s = obs.slices[k];
    if (s.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("ObservationSet: slice " +
                                  std::to_string(k) + " has the wrong shape");
    for (int i = 0; i < n; ++i) {
      if (s[static_cast<std::size_t>(i) * n + i] != 0)
        throw std::invalid_argument(
            "ObservationSet: slice " + std::to_string(k) +
            " reports a loop at vertex " + std::to_string(i + 1));
      for (int j = 0; j < n; ++j)
        if (s[static_cast<std::size_t>(i) * n + j] > 1)
          throw std::invalid_argument("ObservationSet: entries must be 0/1");
    }
  }
}

ObservationSet truncate(const ObservationSet& obs, std::size_t n_slices) {
  if (n_slices > obs.slices.size())
    throw std::invalid_argument("truncate: not enough slices");
  ObservationSet out{obs.space, {}};
  out.slices.assign(obs.slices.begin(), obs.slices.begin() + n_slices);
  return out;
}

UmanParams uman_from_density_reciprocity(double density, double reciprocity) {
  if (!(density >= 0.0) || !(density <= 1.0) || !(reciprocity >= 0.0) ||
      !(reciprocity <= 1.0))
    throw std::domain_error(
        "uman_from_density_reciprocity: density and reciprocity must lie in "
        "[0,1]");
  const double m = density * reciprocity;
  const double a = 2.0 * density * (1.0 - reciprocity);
  const double n = 1.0 - m - a;
  if (a > 1.0 || n < -1e-12)
    throw std::domain_error(
        "uman_from_density_reciprocity: infeasible pair (implied dyad rates "
        "leave the simplex)");
  return {m, a, std::max(n, 0.0)};
}

ObservationSet simulate_css(const Graph& criterion, double fp, double fn,
                            int n_slices, Rng& rng) {
  require_dyadic(criterion.space(), "simulate_css");
  if (!(fp >= 0.0) || !(fp <= 1.0) || !(fn >= 0.0) || !(fn <= 1.0))
    throw std::domain_error("simulate_css: rates must lie in [0,1]");
  if (n_slices < 0)
    throw std::invalid_argument("simulate_css: n_slices must be >= 0");
  const int n = criterion.space().n_vertices;
  ObservationSet obs{criterion.space(), {}};
  obs.slices.reserve(n_slices);
  for (int k = 0; k < n_slices; ++k) {
    std::vector<std::uint8_t> slice(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double p_report = criterion.edge(i, j) ? 1.0 - fn : fp;
        slice[static_cast<std::size_t>(i) * n + j] =
            rng.bernoulli(p_report) ? 1 : 0;
      }
    obs.slices.push_back(std::move(slice));
  }
  return obs;
}

namespace {

// Per-chain Gibbs state.  Global pooling keeps one (fp, fn) pair and
// O(1) error-count bookkeeping; per-source keeps a pair per slice.
struct GibbsChain {
  const ObservationSet& obs;
  const GraphPrior& prior;
  const ErrorModel& em;
  const GibbsConfig& config;
  Rng rng;

  int n;
  long long e_max;
  int n_slices;
  bool per_source;
  bool fixed;

  std::vector<int> n1;          // per cell: slices reporting 1
  long long total_n1 = 0;
  Graph y;
  DyadCensus census;
  long long tp = 0;  // sum of n1 over cells where y = 1 (global pooling)
  std::vector<long long> tp_k;  // per-source analog
  std::vector<double> fp, fn;

  // Per-sweep likelihood tables, global pooling, rates in (0,1):
  // like1[c] = Pr(reports | edge), like0[c] = Pr(reports | no edge)
  // for a cell with c positive reports.  Scaled by a common factor to
  // keep them in range; only ratios matter.
  std::vector<double> like1, like0;

  GibbsChain(const ObservationSet& o, const GraphPrior& pr,
             const ErrorModel& e, const GibbsConfig& cfg, std::uint64_t seed)
      : obs(o),
        prior(pr),
        em(e),
        config(cfg),
        rng(seed),
        n(o.space.n_vertices),
        e_max(o.space.max_edges()),
        n_slices(static_cast<int>(o.slices.size())),
        per_source(e.pooling == ErrorModel::Pooling::per_source),
        fixed(cfg.fixed_rates.has_value()),
        y(o.space) {
    n1.assign(static_cast<std::size_t>(n) * n, 0);
    for (const auto& slice : obs.slices)
      for (std::size_t c = 0; c < slice.size(); ++c) n1[c] += slice[c];
    for (int v : n1) total_n1 += v;

    // Majority-vote start; ties start absent.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && 2 * n1[cell(i, j)] > n_slices) y.set_edge(i, j, true);
    census = dyad_census(y);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && y.edge(i, j)) tp += n1[cell(i, j)];

    const int n_rates = per_source ? n_slices : 1;
    if (per_source) {
      tp_k.assign(n_slices, 0);
      for (int k = 0; k < n_slices; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j && y.edge(i, j)) tp_k[k] += obs.slices[k][cell(i, j)];
    }
    const double fp0 =
        fixed ? config.fixed_rates->first : em.fp_a / (em.fp_a + em.fp_b);
    const double fn0 =
        fixed ? config.fixed_rates->second : em.fn_a / (em.fn_a + em.fn_b);
    fp.assign(n_rates, fp0);
    fn.assign(n_rates, fn0);
    like1.resize(n_slices + 1);
    like0.resize(n_slices + 1);
  }

  std::size_t cell(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }

  long long edges_on_cells() const { return y.edge_count(); }

  void update_rates() {
    if (fixed) return;
    if (!per_source) {
      const long long e = y.edge_count();
      const long long fn_count = static_cast<long long>(n_slices) * e - tp;
      const long long fp_count = total_n1 - tp;
      const long long tn_count =
          static_cast<long long>(n_slices) * (e_max - e) - fp_count;
      fp[0] = rng.beta(em.fp_a + static_cast<double>(fp_count),
                       em.fp_b + static_cast<double>(tn_count));
      fn[0] = rng.beta(em.fn_a + static_cast<double>(fn_count),
                       em.fn_b + static_cast<double>(tp));
    } else {
      const long long e = y.edge_count();
      for (int k = 0; k < n_slices; ++k) {
        long long ones_k = 0;
        for (std::uint8_t v : obs.slices[k]) ones_k += v;
        const long long tp_here = tp_k[k];
        const long long fn_count = e - tp_here;
        const long long fp_count = ones_k - tp_here;
        const long long tn_count = (e_max - e) - fp_count;
        fp[k] = rng.beta(em.fp_a + static_cast<double>(fp_count),
                         em.fp_b + static_cast<double>(tn_count));
        fn[k] = rng.beta(em.fn_a + static_cast<double>(fn_count),
                         em.fn_b + static_cast<double>(tp_here));
      }
    }
  }

  bool rates_interior() const {
    for (double v : fp)
      if (!(v > 0.0) || !(v < 1.0)) return false;
    for (double v : fn)
      if (!(v > 0.0) || !(v < 1.0)) return false;
    return true;
  }

  // Global pooling, interior rates: build count-indexed likelihood
  // tables scaled so the larger entry of each pair is 1.
  void build_tables() {
    const double l1p = std::log(1.0 - fn[0]), l1m = std::log(fn[0]);
    const double l0p = std::log(fp[0]), l0m = std::log(1.0 - fp[0]);
    for (int c = 0; c <= n_slices; ++c) {
      const double a = c * l1p + (n_slices - c) * l1m;
      const double b = c * l0p + (n_slices - c) * l0m;
      const double mx = std::max(a, b);
      like1[c] = std::exp(a - mx);
      like0[c] = std::exp(b - mx);
    }
  }

  // Log-likelihood of one cell's reports given its edge state; handles
  // boundary rates exactly (impossible states come back -inf).
  double cell_loglik(std::size_t c, bool edge) const {
    if (!per_source) {
      const double k1 = static_cast<double>(n1[c]);
      const double k0 = static_cast<double>(n_slices - n1[c]);
      if (edge) return xlog(k1, 1.0 - fn[0]) + xlog(k0, fn[0]);
      return xlog(k1, fp[0]) + xlog(k0, 1.0 - fp[0]);
    }
    double acc = 0.0;
    for (int k = 0; k < n_slices; ++k) {
      const bool r = obs.slices[k][c] != 0;
      const double p = edge ? (r ? 1.0 - fn[k] : fn[k])
                            : (r ? fp[k] : 1.0 - fp[k]);
      if (p == 0.0) return -std::numeric_limits<double>::infinity();
      acc += std::log(p);
    }
    return acc;
  }

  void flip_cell(int i, int j, bool value) {
    const std::size_t c = cell(i, j);
    const bool old = y.edge(i, j);
    if (old == value) return;
    y.set_edge(i, j, value);
    const long long delta = value ? 1 : -1;
    tp += delta * n1[c];
    if (per_source)
      for (int k = 0; k < n_slices; ++k)
        tp_k[k] += delta * obs.slices[k][c];
  }

  // Edge-at-a-time sweep for the Bernoulli and beta-Bernoulli priors.
  void sweep_edges() {
    const bool fast = !per_source && rates_interior();
    if (fast) build_tables();
    const bool is_bb = prior.family == GraphPrior::Family::beta_bernoulli;
    const double delta = prior.bernoulli.delta;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const std::size_t c = cell(i, j);
        double prior1, prior0;
        if (is_bb) {
          const long long e_rest = y.edge_count() - (y.edge(i, j) ? 1 : 0);
          prior1 = cond_edge_prob_bb(e_rest, obs.space, prior.bb);
          prior0 = 1.0 - prior1;
        } else {
          prior1 = delta;
          prior0 = 1.0 - delta;
        }
        double w1, w0;
        if (fast) {
          w1 = prior1 * like1[n1[c]];
          w0 = prior0 * like0[n1[c]];
        } else {
          const double a = (prior1 > 0.0 ? std::log(prior1) : kLogZero) +
                           cell_loglik(c, true);
          const double b = (prior0 > 0.0 ? std::log(prior0) : kLogZero) +
                           cell_loglik(c, false);
          const double mx = std::max(a, b);
          if (mx == kLogZero)
            throw NumericalError(
                "posterior_gibbs: observations impossible under the error "
                "model in both edge states");
          w1 = std::exp(a - mx);
          w0 = std::exp(b - mx);
        }
        const double total = w1 + w0;
        if (!(total > 0.0))
          throw NumericalError(
              "posterior_gibbs: zero posterior mass for an edge variable");
        flip_cell(i, j, rng.uniform() * total < w1);
      }
    }
  }

  // Dyad-block sweep for the Dirichlet-categorical prior: the four
  // joint states of (y_ij, y_ji) are redrawn together.
  void sweep_dyads() {
    const bool fast = !per_source && rates_interior();
    if (fast) build_tables();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const std::size_t cf = cell(i, j), cr = cell(j, i);
        const bool fwd = y.edge(i, j), rev = y.edge(j, i);
        DyadCensus rest = census;
        if (fwd && rev)
          --rest.mutuals;
        else if (fwd || rev)
          --rest.asymmetrics;
        else
          --rest.nulls;
        const DyadStateWeights pw = dyad_state_weights(rest, prior.dc);
        double w[4];
        if (fast) {
          const double f1 = like1[n1[cf]], f0 = like0[n1[cf]];
          const double r1 = like1[n1[cr]], r0 = like0[n1[cr]];
          w[0] = pw.mutual * f1 * r1;
          w[1] = pw.asym_fwd * f1 * r0;
          w[2] = pw.asym_rev * f0 * r1;
          w[3] = pw.null * f0 * r0;
        } else {
          const double lf1 = cell_loglik(cf, true), lf0 = cell_loglik(cf, false);
          const double lr1 = cell_loglik(cr, true), lr0 = cell_loglik(cr, false);
          double lw[4] = {std::log(pw.mutual) + lf1 + lr1,
                          std::log(pw.asym_fwd) + lf1 + lr0,
                          std::log(pw.asym_rev) + lf0 + lr1,
                          std::log(pw.null) + lf0 + lr0};
          const double mx = std::max(std::max(lw[0], lw[1]),
                                     std::max(lw[2], lw[3]));
          if (mx == kLogZero)
            throw NumericalError(
                "posterior_gibbs: observations impossible under the error "
                "model in every dyad state");
          for (int s = 0; s < 4; ++s) w[s] = std::exp(lw[s] - mx);
        }
        const double total = w[0] + w[1] + w[2] + w[3];
        if (!(total > 0.0))
          throw NumericalError(
              "posterior_gibbs: zero posterior mass for a dyad");
        const double u = rng.uniform() * total;
        int state = 3;
        if (u < w[0])
          state = 0;
        else if (u < w[0] + w[1])
          state = 1;
        else if (u < w[0] + w[1] + w[2])
          state = 2;
        const bool nf = state == 0 || state == 1;
        const bool nr = state == 0 || state == 2;
        flip_cell(i, j, nf);
        flip_cell(j, i, nr);
        census = rest;
        if (nf && nr)
          ++census.mutuals;
        else if (nf || nr)
          ++census.asymmetrics;
        else
          ++census.nulls;
      }
    }
  }

  void iterate() {
    update_rates();
    if (prior.family == GraphPrior::Family::dirichlet_categorical)
      sweep_dyads();
    else
      sweep_edges();
  }

  ChainDraws run() {
    ChainDraws out;
    out.graphs.reserve(config.draws);
    const int total = config.burn_in + config.draws * config.thin;
    for (int t = 1; t <= total; ++t) {
      iterate();
      if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
        out.graphs.push_back(y);
        out.fp.push_back(fp);
        out.fn.push_back(fn);
        out.density.push_back(static_cast<double>(y.edge_count()) /
                              static_cast<double>(e_max));
      }
    }
    return out;
  }
};

}  // namespace

PosteriorDraws posterior_gibbs(const ObservationSet& obs,
                               const GraphPrior& prior, const ErrorModel& em,
                               const GibbsConfig& config) {
  validate(obs);
  if (obs.slices.empty())
    throw std::invalid_argument("posterior_gibbs: need at least one slice");
  switch (prior.family) {
    case GraphPrior::Family::bernoulli:
      validate(prior.bernoulli);
      break;
    case GraphPrior::Family::beta_bernoulli:
      validate(prior.bb);
      break;
    case GraphPrior::Family::dirichlet_categorical:
      validate(prior.dc);
      break;
  }
  if (!(em.fp_a > 0.0) || !(em.fp_b > 0.0) || !(em.fn_a > 0.0) ||
      !(em.fn_b > 0.0))
    throw std::domain_error("ErrorModel: hyperparameters must be positive");
  if (config.fixed_rates) {
    const auto [pfp, pfn] = *config.fixed_rates;
    if (!(pfp >= 0.0) || !(pfp <= 1.0) || !(pfn >= 0.0) || !(pfn <= 1.0))
      throw std::domain_error("GibbsConfig: fixed rates must lie in [0,1]");
  }
  if (config.chains < 1 || config.burn_in < 0 || config.draws < 1 ||
      config.thin < 1)
    throw std::invalid_argument("GibbsConfig: invalid chain settings");

  PosteriorDraws out{obs.space, {}, config.burn_in, config.thin};
  out.chains.resize(config.chains);
  parallel_for(config.chains, [&](std::size_t c) {
    GibbsChain chain(obs, prior, em, config,
                     derive_seed(config.seed, {0x636861696eull, c}));
    out.chains[c] = chain.run();
  });
  return out;
}

Graph point_estimate(const PosteriorDraws& draws) {
  const auto marg_counts = [&] {
    std::vector<long long> counts;
    long long total = 0;
    const auto vars = edge_variables(draws.space);
    counts.assign(vars.size(), 0);
    for (const auto& chain : draws.chains) {
      for (const auto& g : chain.graphs) {
        ++total;
        for (std::size_t v = 0; v < vars.size(); ++v)
          if (g.edge(vars[v].first, vars[v].second)) ++counts[v];
      }
    }
    return std::pair(counts, total);
  }();
  const auto& [counts, total] = marg_counts;
  if (total == 0)
    throw std::invalid_argument("point_estimate: no retained draws");
  Graph est(draws.space);
  const auto vars = edge_variables(draws.space);
  for (std::size_t v = 0; v < vars.size(); ++v)
    if (2 * counts[v] > total)  // ties resolve to absent
      est.set_edge(vars[v].first, vars[v].second, true);
  return est;
}

std::vector<double> edge_marginals(const PosteriorDraws& draws) {
  const auto vars = edge_variables(draws.space);
  std::vector<long long> counts(vars.size(), 0);
  long long total = 0;
  for (const auto& chain : draws.chains)
    for (const auto& g : chain.graphs) {
      ++total;
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (g.edge(vars[v].first, vars[v].second)) ++counts[v];
    }
  if (total == 0)
    throw std::invalid_argument("edge_marginals: no retained draws");
  std::vector<double> out(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v)
    out[v] = static_cast<double>(counts[v]) / static_cast<double>(total);
  return out;
}

double hamming_accuracy(const Graph& est, const Graph& criterion) {
  if (!(est.space() == criterion.space()))
    throw std::invalid_argument("hamming_accuracy: space mismatch");
  const auto vars = edge_variables(est.space());
  if (vars.empty())
    throw std::invalid_argument("hamming_accuracy: empty edge-variable set");
  long long agree = 0;
  for (const auto& [i, j] : vars)
    if (est.edge(i, j) == criterion.edge(i, j)) ++agree;
  return static_cast<double>(agree) / static_cast<double>(vars.size());
}

double psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("psrf: need at least 2 chains");
  const std::size_t n = chains[0].size();
  if (n < 10) throw std::invalid_argument("psrf: need chain length >= 10");
  for (const auto& c : chains)
    if (c.size() != n)
      throw std::invalid_argument("psrf: chains must have equal lengths");

  double grand = 0.0;
  std::vector<double> means(m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (double v : chains[j]) s += v;
    means[j] = s / static_cast<double>(n);
    grand += means[j];
  }
  grand /= static_cast<double>(m);

  double w = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double ss = 0.0;
    for (double v : chains[j]) ss += (v - means[j]) * (v - means[j]);
    w += ss / static_cast<double>(n - 1);
  }
  w /= static_cast<double>(m);

  double b_over_n = 0.0;
  for (double mu : means) b_over_n += (mu - grand) * (mu - grand);
  b_over_n /= static_cast<double>(m - 1);

  const double nn = static_cast<double>(n);
  if (b_over_n <= 1e-300 && w <= 1e-300) return 1.0;  // everything constant
  return std::sqrt((nn - 1.0) / nn + b_over_n / std::max(w, 1e-300));
}

double posterior_density_summary(const PosteriorDraws& draws) {
  double sum = 0.0;
  long long total = 0;
  for (const auto& chain : draws.chains)
    for (double d : chain.density) {
      sum += d;
      ++total;
    }
  if (total == 0)
    throw std::invalid_argument("posterior_density_summary: no draws");
  return sum / static_cast<double>(total);
}

void validate(const ExperimentDesign& design) {
  if (design.n_vertices < 2)
    throw std::invalid_argument("ExperimentDesign: need n_vertices >= 2");
  if (design.conditions.empty())
    throw std::invalid_argument("ExperimentDesign: no conditions");
  if (design.n_criterion < 1)
    throw std::invalid_argument("ExperimentDesign: need n_criterion >= 1");
  if (!(design.fp_rate > 0.0) || !(design.fp_rate < 1.0) ||
      !(design.fn_rate > 0.0) || !(design.fn_rate < 1.0))
    throw std::domain_error("ExperimentDesign: rates must lie in (0,1)");
  if (design.slice_schedule.empty())
    throw std::invalid_argument("ExperimentDesign: empty slice schedule");
  for (std::size_t s = 0; s < design.slice_schedule.size(); ++s) {
    if (design.slice_schedule[s] < 1)
      throw std::invalid_argument("ExperimentDesign: slice counts must be >= 1");
    if (s > 0 && design.slice_schedule[s] < design.slice_schedule[s - 1])
      throw std::invalid_argument(
          "ExperimentDesign: slice schedule must be non-decreasing");
  }
  if (design.priors.empty())
    throw std::invalid_argument("ExperimentDesign: no priors");
  if (design.gibbs.chains < 2 || design.gibbs.draws < 10)
    throw std::invalid_argument(
        "ExperimentDesign: diagnostics need >= 2 chains and >= 10 draws");
  for (const auto& [d, r] : design.conditions)
    uman_from_density_reciprocity(d, r);  // throws when infeasible
}

std::vector<ExperimentRow> run_experiment(const ExperimentDesign& design,
                                          std::uint64_t seed) {
  validate(design);
  const GraphSpace space{design.n_vertices, true, false};
  const int max_slices = design.slice_schedule.back();
  const std::size_t n_cond = design.conditions.size();
  const std::size_t n_rep = static_cast<std::size_t>(design.n_criterion);
  const std::size_t n_sched = design.slice_schedule.size();
  const std::size_t n_prior = design.priors.size();

  // One task per (condition, replicate); each task fills its own row
  // slots, so scheduling order never affects output.
  std::vector<ExperimentRow> rows(n_cond * n_rep * n_sched * n_prior);
  const auto slot = [&](std::size_t c, std::size_t p, std::size_t s,
                        std::size_t r) {
    return ((c * n_prior + p) * n_sched + s) * n_rep + r;
  };

  parallel_for(n_cond * n_rep, [&](std::size_t task) {
    const std::size_t c = task / n_rep;
    const std::size_t r = task % n_rep;
    const auto [density, reciprocity] = design.conditions[c];
    const UmanParams rates = uman_from_density_reciprocity(density, reciprocity);

    Rng gen_rng(derive_seed(seed, {1, c, r}));
    const Graph criterion = sample_uman(space, rates, gen_rng);
    const ObservationSet full_obs = simulate_css(
        criterion, design.fp_rate, design.fn_rate, max_slices, gen_rng);

    for (std::size_t s = 0; s < n_sched; ++s) {
      const ObservationSet obs =
          truncate(full_obs, design.slice_schedule[s]);
      for (std::size_t p = 0; p < n_prior; ++p) {
        GibbsConfig cfg = design.gibbs;
        cfg.seed = derive_seed(seed, {2, c, r, s, p});
        const PosteriorDraws draws =
            posterior_gibbs(obs, design.priors[p], design.error_model, cfg);

        ExperimentRow& row = rows[slot(c, p, s, r)];
        row.density = density;
        row.reciprocity = reciprocity;
        row.prior = design.priors[p].name();
        row.n_slices = design.slice_schedule[s];
        row.replicate = static_cast<int>(r) + 1;
        row.accuracy = hamming_accuracy(point_estimate(draws), criterion);
        row.inferred_density = posterior_density_summary(draws);

        std::vector<std::vector<double>> dens, fps, fns;
        for (const auto& chain : draws.chains) {
          dens.push_back(chain.density);
          std::vector<double> f1, f2;
          for (const auto& v : chain.fp)
            f1.push_back(std::accumulate(v.begin(), v.end(), 0.0) /
                         static_cast<double>(v.size()));
          for (const auto& v : chain.fn)
            f2.push_back(std::accumulate(v.begin(), v.end(), 0.0) /
                         static_cast<double>(v.size()));
          fps.push_back(std::move(f1));
          fns.push_back(std::move(f2));
        }
        row.psrf_density = psrf(dens);
        if (!cfg.fixed_rates) {
          row.psrf_fp = psrf(fps);
          row.psrf_fn = psrf(fns);
        }
      }
    }
  });
  return rows;
}

}  // namespace graphmix
