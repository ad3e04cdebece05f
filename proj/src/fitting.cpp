#include "graphmix/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include "graphmix/rng.hpp"
#include "graphmix/special.hpp"

namespace graphmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double xlog(double count, double p) {
  if (count == 0.0) return 0.0;
  return count * std::log(p);
}

// Cached per-graph sufficient statistics.
struct GraphStats {
  long long e = 0, e_max = 0;
  int n_vertices = 0;
  bool dyadic = false;
  DyadCensus census;
};

std::vector<GraphStats> collect_stats(const GraphSet& gs, bool need_census) {
  std::vector<GraphStats> out;
  out.reserve(gs.graphs.size());
  for (const Graph& g : gs.graphs) {
    GraphStats st;
    st.e = g.edge_count();
    st.e_max = g.space().max_edges();
    st.n_vertices = g.space().n_vertices;
    st.dyadic = g.space().directed && !g.space().loops;
    if (need_census) st.census = dyad_census(g);
    out.push_back(st);
  }
  return out;
}

}  // namespace

void validate(const GraphSet& gs) {
  if (gs.graphs.empty())
    throw std::invalid_argument("GraphSet: need at least one graph");
  const bool directed = gs.graphs.front().space().directed;
  const bool loops = gs.graphs.front().space().loops;
  for (std::size_t i = 1; i < gs.graphs.size(); ++i)
    if (gs.graphs[i].space().directed != directed ||
        gs.graphs[i].space().loops != loops)
      throw std::invalid_argument(
          "GraphSet: graphs must share directedness and loop policy");
}

std::uint64_t graphset_fingerprint(const GraphSet& gs) {
  validate(gs);
  std::uint64_t h = mix64(gs.graphs.size());
  for (const Graph& g : gs.graphs) {
    const GraphSpace& sp = g.space();
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(sp.n_vertices) |
                        (sp.directed ? 1ull << 40 : 0) |
                        (sp.loops ? 1ull << 41 : 0)));
    std::uint64_t bits = 0;
    int filled = 0;
    for (const auto& [i, j] : edge_variables(sp)) {
      bits = (bits << 1) | (g.edge(i, j) ? 1 : 0);
      if (++filled == 64) {
        h = mix64(h ^ bits);
        bits = 0;
        filled = 0;
      }
    }
    h = mix64(h ^ bits);
  }
  return h;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::bernoulli:
      return "bernoulli";
    case Family::beta_bernoulli:
      return "beta-bernoulli";
    case Family::dirichlet_categorical:
      return "dirichlet-categorical";
    case Family::beta_bernoulli_meandeg:
      return "beta-bernoulli-meandeg";
    case Family::dc_nnd:
      return "dc-nnd";
  }
  return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "beta-bernoulli") return Family::beta_bernoulli;
  if (name == "dirichlet-categorical") return Family::dirichlet_categorical;
  if (name == "beta-bernoulli-meandeg") return Family::beta_bernoulli_meandeg;
  if (name == "dc-nnd") return Family::dc_nnd;
  return std::nullopt;
}

double pooled_loglik(const GraphSet& gs, const BernoulliParams& p) {
  validate(gs);
  validate(p);
  double acc = 0.0;
  for (const Graph& g : gs.graphs) acc += log_pmf_bernoulli(g, p);
  return acc;
}

double pooled_loglik(const GraphSet& gs, const BetaBernoulliParams& p) {
  validate(gs);
  double acc = 0.0;
  for (const Graph& g : gs.graphs) acc += log_pmf_beta_bernoulli(g, p);
  return acc;
}

double pooled_loglik(const GraphSet& gs, const DirichletCategoricalParams& p) {
  validate(gs);
  double acc = 0.0;
  for (const Graph& g : gs.graphs) acc += log_pmf_dirichlet_categorical(g, p);
  return acc;
}

double pooled_loglik(const GraphSet& gs, const MeanDegreeParams& p) {
  validate(gs);
  double acc = 0.0;
  for (std::size_t i = 0; i < gs.graphs.size(); ++i) {
    try {
      const BetaBernoulliParams bb =
          params_from_mean_degree(p, gs.graphs[i].space());
      acc += log_pmf_beta_bernoulli(gs.graphs[i], bb);
    } catch (const InvalidDispersionError& err) {
      throw InvalidDispersionError(err.what(), static_cast<int>(i));
    }
  }
  return acc;
}

double pooled_loglik(const GraphSet& gs, const NonNullDegreeParams& p) {
  validate(gs);
  double acc = 0.0;
  for (std::size_t i = 0; i < gs.graphs.size(); ++i) {
    try {
      const DirichletCategoricalParams dc =
          params_from_nnd(p, gs.graphs[i].space());
      acc += log_pmf_dirichlet_categorical(gs.graphs[i], dc);
    } catch (const InvalidDispersionError& err) {
      throw InvalidDispersionError(err.what(), static_cast<int>(i));
    }
  }
  return acc;
}

double pooled_loglik_offset_approx(const GraphSet& gs,
                                   const BetaBernoulliParams& p) {
  validate(gs);
  if (!(p.alpha >= 1.0) || !(p.beta >= 1.0))
    throw std::domain_error(
        "pooled_loglik_offset_approx: needs alpha, beta >= 1");
  double acc = 0.0;
  for (const Graph& g : gs.graphs) {
    const double e = static_cast<double>(g.edge_count());
    const double n = static_cast<double>(g.space().max_edges() - g.edge_count());
    if (e <= 0.0 || n <= 0.0)
      throw std::domain_error(
          "pooled_loglik_offset_approx: zero edge or non-edge count");
    acc += log_gamma(e) + log_gamma(n) + p.alpha * std::log(e) +
           p.beta * std::log(n);
  }
  return acc;
}

double pooled_loglik_offset_approx(const GraphSet& gs,
                                   const DirichletCategoricalParams& p) {
  validate(gs);
  if (!(p.alpha > 1.0) || !(p.beta > 1.0) || !(p.gamma > 1.0))
    throw std::domain_error(
        "pooled_loglik_offset_approx: needs alpha, beta, gamma > 1");
  constexpr double kLog2 = 0.69314718055994530942;
  double acc = 0.0;
  for (const Graph& g : gs.graphs) {
    const DyadCensus c = dyad_census(g);
    const double m = static_cast<double>(c.mutuals);
    const double a = static_cast<double>(c.asymmetrics);
    const double n = static_cast<double>(c.nulls);
    if (m <= 0.0 || a <= 0.0 || n <= 0.0)
      throw std::domain_error(
          "pooled_loglik_offset_approx: zero dyad-census statistic");
    acc += log_gamma(m) + log_gamma(a) + log_gamma(n) - kLog2 * a +
           p.alpha * std::log(m) + p.beta * std::log(a) +
           p.gamma * std::log(n);
  }
  return acc;
}

namespace {

// Per-graph gradient of the edge-count family log pmf.
void bb_grad_terms(const GraphStats& st, const BetaBernoulliParams& p,
                   double* ga, double* gb) {
  const double s = p.alpha + p.beta;
  *ga = digamma(s) - digamma(p.alpha) +
        digamma(static_cast<double>(st.e) + p.alpha) -
        digamma(static_cast<double>(st.e_max) + s);
  *gb = digamma(s) - digamma(p.beta) +
        digamma(static_cast<double>(st.e_max - st.e) + p.beta) -
        digamma(static_cast<double>(st.e_max) + s);
}

void dc_grad_terms(const GraphStats& st, const DirichletCategoricalParams& p,
                   double* ga, double* gb, double* gc) {
  const double s = p.alpha + p.beta + p.gamma;
  const double d_star =
      static_cast<double>(st.census.mutuals + st.census.asymmetrics +
                          st.census.nulls);
  const double tail = digamma(s) - digamma(d_star + s);
  *ga = tail - digamma(p.alpha) +
        digamma(static_cast<double>(st.census.mutuals) + p.alpha);
  *gb = tail - digamma(p.beta) +
        digamma(static_cast<double>(st.census.asymmetrics) + p.beta);
  *gc = tail - digamma(p.gamma) +
        digamma(static_cast<double>(st.census.nulls) + p.gamma);
}

}  // namespace

std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const BetaBernoulliParams& p) {
  validate(gs);
  validate(p);
  double da = 0.0, db = 0.0;
  for (const GraphStats& st : collect_stats(gs, false)) {
    double ga, gb;
    bb_grad_terms(st, p, &ga, &gb);
    da += ga;
    db += gb;
  }
  return {da, db};
}

std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const DirichletCategoricalParams& p) {
  validate(gs);
  validate(p);
  double da = 0.0, db = 0.0, dc = 0.0;
  for (const GraphStats& st : collect_stats(gs, true)) {
    double ga, gb, gc;
    dc_grad_terms(st, p, &ga, &gb, &gc);
    da += ga;
    db += gb;
    dc += gc;
  }
  return {da, db, dc};
}

std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const MeanDegreeParams& p) {
  validate(gs);
  double dmu = 0.0, dsigma = 0.0;
  const auto stats = collect_stats(gs, false);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const GraphStats& st = stats[i];
    const double n1 = static_cast<double>(st.n_vertices - 1);
    BetaBernoulliParams bb;
    try {
      bb = params_from_mean_degree(p, gs.graphs[i].space());
    } catch (const InvalidDispersionError& err) {
      throw InvalidDispersionError(err.what(), static_cast<int>(i));
    }
    double ga, gb;
    bb_grad_terms(st, bb, &ga, &gb);
    // Chain rule through q = mu/n1, v = (sigma/n1)^2,
    // s = q(1-q)/v - 1, alpha = q s, beta = (1-q) s.
    const double q = p.mu_d / n1;
    const double v = (p.sigma_d / n1) * (p.sigma_d / n1);
    const double s = q * (1.0 - q) / v - 1.0;
    const double ds_dq = (1.0 - 2.0 * q) / v;
    const double ds_dv = -q * (1.0 - q) / (v * v);
    const double da_dq = s + q * ds_dq;
    const double db_dq = -s + (1.0 - q) * ds_dq;
    const double da_dv = q * ds_dv;
    const double db_dv = (1.0 - q) * ds_dv;
    const double dq_dmu = 1.0 / n1;
    const double dv_dsigma = 2.0 * p.sigma_d / (n1 * n1);
    dmu += (ga * da_dq + gb * db_dq) * dq_dmu;
    dsigma += (ga * da_dv + gb * db_dv) * dv_dsigma;
  }
  return {dmu, dsigma};
}

std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const NonNullDegreeParams& p) {
  validate(gs);
  double dmu = 0.0, dr = 0.0, dsigma = 0.0;
  const auto stats = collect_stats(gs, true);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const GraphStats& st = stats[i];
    const double n1 = static_cast<double>(st.n_vertices - 1);
    DirichletCategoricalParams dcp;
    try {
      dcp = params_from_nnd(p, gs.graphs[i].space());
    } catch (const InvalidDispersionError& err) {
      throw InvalidDispersionError(err.what(), static_cast<int>(i));
    }
    double ga, gb, gc;
    dc_grad_terms(st, dcp, &ga, &gb, &gc);
    // Chain rule through t = (mu(n1-mu) - sigma^2)/(n1 sigma^2),
    // alpha = r mu t, beta = (1-r) mu t, gamma = (n1-mu) t.
    const double sig2 = p.sigma_nnd * p.sigma_nnd;
    const double t = (p.mu_nnd * (n1 - p.mu_nnd) - sig2) / (n1 * sig2);
    const double dt_dmu = (n1 - 2.0 * p.mu_nnd) / (n1 * sig2);
    const double dt_dsigma =
        -2.0 * p.mu_nnd * (n1 - p.mu_nnd) / (n1 * sig2 * p.sigma_nnd);
    const double common_mu = t + p.mu_nnd * dt_dmu;
    dmu += ga * p.r * common_mu + gb * (1.0 - p.r) * common_mu +
           gc * (-t + (n1 - p.mu_nnd) * dt_dmu);
    dr += (ga - gb) * p.mu_nnd * t;
    dsigma += (ga * p.r + gb * (1.0 - p.r)) * p.mu_nnd * dt_dsigma +
              gc * (n1 - p.mu_nnd) * dt_dsigma;
  }
  return {dmu, dr, dsigma};
}

IdentifiabilityReport identifiability_check(const GraphSet& gs, Family family) {
  validate(gs);
  const std::size_t k = gs.graphs.size();

  if (family == Family::bernoulli) return {true, {}};

  const bool dyadic =
      family == Family::dirichlet_categorical || family == Family::dc_nnd;
  const std::size_t k_min = dyadic ? 3 : 2;
  if (k < k_min) {
    std::string reason = "insufficient observations: need at least " +
                         std::to_string(k_min) + " graphs, got " +
                         std::to_string(k);
    if (!dyadic && k == 1) {
      const Graph& g = gs.graphs.front();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g",
                    static_cast<double>(g.edge_count()) /
                        static_cast<double>(g.space().max_edges()));
      reason += "; likelihood has a direction of recession along "
                "alpha/(alpha+beta) = e/e* = " +
                std::string(buf);
    }
    return {false, reason};
  }

  if (!dyadic) {
    // Densities compared exactly via cross products of integer counts.
    const auto stats = collect_stats(gs, false);
    bool all_equal = true;
    for (std::size_t i = 1; i < k && all_equal; ++i)
      all_equal = stats[i].e * stats[0].e_max == stats[0].e * stats[i].e_max;
    if (all_equal)
      return {false,
              "zero dispersion: every graph has the same density, so the "
              "mixing variance is not identified"};
  } else {
    for (const Graph& g : gs.graphs)
      if (!g.space().directed || g.space().loops)
        return {false, "dyad-census family requires directed loopless graphs"};
    const auto stats = collect_stats(gs, true);
    bool all_equal = true;
    for (std::size_t i = 1; i < k && all_equal; ++i) {
      const auto& a = stats[i];
      const auto& b = stats[0];
      const long long da = a.census.mutuals + a.census.asymmetrics + a.census.nulls;
      const long long db = b.census.mutuals + b.census.asymmetrics + b.census.nulls;
      all_equal = a.census.mutuals * db == b.census.mutuals * da &&
                  a.census.asymmetrics * db == b.census.asymmetrics * da;
    }
    if (all_equal)
      return {false,
              "zero dispersion: every graph has the same dyad-census "
              "proportions, so the mixing variance is not identified"};
  }
  return {true, {}};
}

namespace {

// -------- generic small-dimension maximizer --------

using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using GradientFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct OptimResult {
  std::vector<double> u;
  double value = kNegInf;
  bool converged = false;
  bool used_fallback = false;
  int iterations = 0;
};

double safe_eval(const ObjectiveFn& f, const std::vector<double>& u) {
  try {
    const double v = f(u);
    return std::isfinite(v) ? v : kNegInf;
  } catch (const std::exception&) {
    return kNegInf;  // infeasible point acts as a barrier
  }
}

void clamp_to_cap(std::vector<double>& u, double cap) {
  for (double& v : u) v = std::clamp(v, -cap, cap);
}

double inf_norm(const std::vector<double>& g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::fabs(v));
  return m;
}

// Solves m x = b for symmetric positive-definite m of dimension <= 3.
bool solve_spd(const std::vector<std::vector<double>>& m,
               const std::vector<double>& b, std::vector<double>& x) {
  const std::size_t d = b.size();
  x.assign(d, 0.0);
  if (d == 1) {
    if (!(m[0][0] > 0.0)) return false;
    x[0] = b[0] / m[0][0];
    return true;
  }
  if (d == 2) {
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (!(m[0][0] > 0.0) || !(det > 0.0)) return false;
    x[0] = (m[1][1] * b[0] - m[0][1] * b[1]) / det;
    x[1] = (m[0][0] * b[1] - m[1][0] * b[0]) / det;
    return true;
  }
  if (d == 3) {
    // Cholesky; fails on non-positive pivots.
    double l[3][3] = {};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = m[i][j];
        for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          if (!(s > 0.0)) return false;
          l[i][i] = std::sqrt(s);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    }
    double y[3];
    for (int i = 0; i < 3; ++i) {
      double s = b[i];
      for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
      y[i] = s / l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < 3; ++k) s -= l[k][i] * x[k];
      x[i] = s / l[i][i];
    }
    return true;
  }
  return false;
}

// Gradient evaluation that degrades to NaN instead of throwing when a
// probe point violates a family constraint.
std::vector<double> safe_grad(const GradientFn& grad,
                              const std::vector<double>& u) {
  try {
    return grad(u);
  } catch (const std::exception&) {
    return std::vector<double>(u.size(),
                               std::numeric_limits<double>::quiet_NaN());
  }
}

// Central-difference Hessian of the log-likelihood from its analytic
// gradient; symmetrized.  NaN entries mark probe points outside the
// family's feasible region.
std::vector<std::vector<double>> fd_hessian(const GradientFn& grad,
                                            const std::vector<double>& u,
                                            double h) {
  const std::size_t d = u.size();
  std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    const auto gu = safe_grad(grad, up);
    const auto gd = safe_grad(grad, dn);
    for (std::size_t i = 0; i < d; ++i)
      hess[i][j] = (gu[i] - gd[i]) / (2.0 * h);
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double s = 0.5 * (hess[i][j] + hess[j][i]);
      hess[i][j] = hess[j][i] = s;
    }
  return hess;
}

// Line searches stall once the remaining improvement drops below the
// objective's floating-point resolution, which on well-conditioned data
// happens while the gradient is still ~1e-4.  Newton steps judged by
// gradient reduction alone push through that floor.
void newton_polish(const ObjectiveFn& f, const GradientFn& grad,
                   std::vector<double>& u, double& fu,
                   const FitConfig& config) {
  const std::size_t d = u.size();
  for (int iter = 0; iter < 12; ++iter) {
    const std::vector<double> g = safe_grad(grad, u);
    const double gn = inf_norm(g);
    if (!std::isfinite(gn) || gn < config.grad_tol) break;
    const auto hess = fd_hessian(grad, u, 1e-5);
    // Newton direction for a maximum: solve (-H) delta = g.
    std::vector<std::vector<double>> neg(d, std::vector<double>(d));
    bool finite = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(hess[i][j])) finite = false;
        neg[i][j] = -hess[i][j];
      }
    std::vector<double> delta;
    if (!finite || !solve_spd(neg, g, delta)) break;
    bool accepted = false;
    for (double t : {1.0, 0.5, 0.25, 0.125}) {
      std::vector<double> u_try(d);
      for (std::size_t i = 0; i < d; ++i) u_try[i] = u[i] + t * delta[i];
      clamp_to_cap(u_try, config.transform_cap);
      const double f_try = safe_eval(f, u_try);
      if (f_try == kNegInf) continue;
      const double gn_try = inf_norm(safe_grad(grad, u_try));
      if (std::isfinite(gn_try) && gn_try < gn) {
        u = u_try;
        fu = f_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
}

// BFGS with backtracking line search, maximizing f.  Coordinates are
// clamped to |u_i| <= cap; stalls at the cap end the run.
OptimResult bfgs_maximize(const ObjectiveFn& f, const GradientFn& grad,
                          std::vector<double> u, const FitConfig& config) {
  const std::size_t d = u.size();
  const double cap = config.transform_cap;
  clamp_to_cap(u, cap);
  OptimResult res;
  double fu = safe_eval(f, u);
  if (fu == kNegInf) return res;  // infeasible start

  std::vector<double> g = grad(u);
  std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) h[i][i] = 1.0;

  for (int iter = 0; iter < config.max_iter; ++iter) {
    res.iterations = iter;
    // Convergence on the projected gradient: components pinned at the
    // cap and pushing outward do not count.
    double pg = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const bool pinned = (u[i] >= cap && g[i] > 0.0) ||
                          (u[i] <= -cap && g[i] < 0.0);
      if (!pinned) pg = std::max(pg, std::fabs(g[i]));
    }
    if (pg < config.grad_tol) {
      res.converged = inf_norm(g) < config.grad_tol;
      break;
    }

    std::vector<double> dir(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) dir[i] += h[i][j] * g[j];
    double slope = 0.0;
    for (std::size_t i = 0; i < d; ++i) slope += dir[i] * g[i];
    if (!(slope > 0.0)) {
      // Reset a non-ascent direction to steepest ascent.
      dir = g;
      slope = 0.0;
      for (double v : g) slope += v * v;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) h[i][j] = i == j ? 1.0 : 0.0;
    }

    double step = 1.0;
    std::vector<double> u_new(d);
    double f_new = kNegInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < d; ++i) u_new[i] = u[i] + step * dir[i];
      clamp_to_cap(u_new, cap);
      f_new = safe_eval(f, u_new);
      if (f_new > fu + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent possible along this direction

    std::vector<double> g_new = grad(u_new);
    std::vector<double> s(d), yv(d);
    double sy = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = u_new[i] - u[i];
      yv[i] = g[i] - g_new[i];  // gradient of -f changes sign twice
      sy += s[i] * yv[i];
    }
    u = u_new;
    fu = f_new;
    g = g_new;
    if (sy > 1e-12) {
      // Inverse-Hessian BFGS update.
      const double rho = 1.0 / sy;
      std::vector<double> hy(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) hy[i] += h[i][j] * yv[j];
      double yhy = 0.0;
      for (std::size_t i = 0; i < d; ++i) yhy += yv[i] * hy[i];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          h[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] -
                            s[i] * hy[j]);
    }
  }
  res.u = u;
  res.value = fu;
  if (!res.converged) {
    std::vector<double> gf = grad(u);
    res.converged = inf_norm(gf) < config.grad_tol;
  }
  return res;
}

// Nelder-Mead fallback, maximizing f within the same cap box.
OptimResult simplex_maximize(const ObjectiveFn& f, std::vector<double> start,
                             const FitConfig& config) {
  const std::size_t d = start.size();
  const double cap = config.transform_cap;
  clamp_to_cap(start, cap);
  std::vector<std::vector<double>> pts(d + 1, start);
  std::vector<double> vals(d + 1);
  for (std::size_t i = 0; i < d; ++i)
    pts[i + 1][i] += start[i] == cap ? -0.5 : 0.5;
  for (std::size_t i = 0; i <= d; ++i) vals[i] = safe_eval(f, pts[i]);

  const auto order = [&] {
    std::vector<std::size_t> idx(d + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    std::vector<std::vector<double>> p2;
    std::vector<double> v2;
    for (std::size_t i : idx) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = p2;
    vals = v2;
  };

  for (int iter = 0; iter < 4000; ++iter) {
    order();
    if (std::fabs(vals[0] - vals[d]) < 1e-12) break;
    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += pts[i][j] / d;

    const auto blend = [&](double t) {
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j)
        p[j] = centroid[j] + t * (centroid[j] - pts[d][j]);
      clamp_to_cap(p, cap);
      return p;
    };

    const auto refl = blend(1.0);
    const double fr = safe_eval(f, refl);
    if (fr > vals[0]) {
      const auto exp_p = blend(2.0);
      const double fe = safe_eval(f, exp_p);
      if (fe > fr) {
        pts[d] = exp_p;
        vals[d] = fe;
      } else {
        pts[d] = refl;
        vals[d] = fr;
      }
    } else if (fr > vals[d - 1]) {
      pts[d] = refl;
      vals[d] = fr;
    } else {
      const auto con = blend(-0.5);
      const double fc = safe_eval(f, con);
      if (fc > vals[d]) {
        pts[d] = con;
        vals[d] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = safe_eval(f, pts[i]);
        }
      }
    }
  }
  order();
  OptimResult res;
  res.u = pts[0];
  res.value = vals[0];
  res.used_fallback = true;
  return res;
}

}  // namespace

namespace {

// Family-specific plumbing for fit_mle: transform, objective, gradient,
// initialization, and naming.
struct FitProblem {
  std::vector<std::string> names;
  std::string scale;
  ObjectiveFn loglik_u;         // exact pooled log-likelihood at transform u
  GradientFn grad_u;            // its gradient on the u scale
  std::function<std::vector<double>(const std::vector<double>&)> to_natural;
  std::function<std::vector<double>(const std::vector<double>&)> dnatural_du;
  std::vector<double> u0;
  // Start used for zero-dispersion data, sitting at the transform cap
  // along the known direction of recession with the mean preserved.
  std::vector<double> u_runaway;
};

std::vector<double> log_transform_init(const std::vector<double>& theta,
                                       bool offset) {
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    u[i] = offset ? std::log(std::max(theta[i], 1.05) - 1.0)
                  : std::log(theta[i]);
  return u;
}

FitProblem make_problem(const GraphSet& gs, Family family,
                        const FitConfig& config) {
  FitProblem pb;
  const bool offset = config.offset_transform;
  pb.scale = offset ? "log-minus-one" : "log";
  const auto stats = collect_stats(
      gs, family == Family::dirichlet_categorical || family == Family::dc_nnd);

  const auto theta_of = [offset](const std::vector<double>& u) {
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      t[i] = offset ? 1.0 + std::exp(u[i]) : std::exp(u[i]);
    return t;
  };
  const auto dtheta_of = [offset](const std::vector<double>& u) {
    std::vector<double> dt(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) dt[i] = std::exp(u[i]);
    return dt;
  };

  switch (family) {
    case Family::beta_bernoulli: {
      pb.names = {"alpha", "beta"};
      pb.to_natural = theta_of;
      pb.dnatural_du = dtheta_of;
      pb.loglik_u = [&gs, theta_of](const std::vector<double>& u) {
        const auto t = theta_of(u);
        return pooled_loglik(gs, BetaBernoulliParams{t[0], t[1]});
      };
      pb.grad_u = [&gs, theta_of, dtheta_of](const std::vector<double>& u) {
        const auto t = theta_of(u);
        auto g = grad_pooled_loglik(gs, BetaBernoulliParams{t[0], t[1]});
        const auto dt = dtheta_of(u);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= dt[i];
        return g;
      };
      // Method of moments on the observed densities.
      double mean = 0.0, var = 0.0;
      for (const auto& st : stats)
        mean += static_cast<double>(st.e) / static_cast<double>(st.e_max);
      mean /= static_cast<double>(stats.size());
      for (const auto& st : stats) {
        const double d =
            static_cast<double>(st.e) / static_cast<double>(st.e_max) - mean;
        var += d * d;
      }
      var /= static_cast<double>(stats.size());
      std::vector<double> theta0 = {1.0, 1.0};
      if (var > 1e-12 && mean > 0.0 && mean < 1.0 &&
          var < mean * (1.0 - mean)) {
        const double s = mean * (1.0 - mean) / var - 1.0;
        if (s > 0.0) theta0 = {mean * s, (1.0 - mean) * s};
      }
      pb.u0 = log_transform_init(theta0, offset);
      {
        const double q = std::clamp(mean, 1e-12, 1.0 - 1e-12);
        const double ls =
            config.transform_cap - std::max(std::log(q), std::log1p(-q));
        pb.u_runaway = log_transform_init(
            {std::exp(std::log(q) + ls), std::exp(std::log1p(-q) + ls)},
            offset);
        clamp_to_cap(pb.u_runaway, config.transform_cap);
      }
      break;
    }
    case Family::dirichlet_categorical: {
      pb.names = {"alpha", "beta", "gamma"};
      pb.to_natural = theta_of;
      pb.dnatural_du = dtheta_of;
      pb.loglik_u = [&gs, theta_of](const std::vector<double>& u) {
        const auto t = theta_of(u);
        return pooled_loglik(gs, DirichletCategoricalParams{t[0], t[1], t[2]});
      };
      pb.grad_u = [&gs, theta_of, dtheta_of](const std::vector<double>& u) {
        const auto t = theta_of(u);
        auto g = grad_pooled_loglik(gs,
                                    DirichletCategoricalParams{t[0], t[1], t[2]});
        const auto dt = dtheta_of(u);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= dt[i];
        return g;
      };
      // Dirichlet method of moments from the census proportions.
      double mm = 0.0, ma = 0.0, vm = 0.0;
      for (const auto& st : stats) {
        const double d = static_cast<double>(
            st.census.mutuals + st.census.asymmetrics + st.census.nulls);
        mm += st.census.mutuals / d;
        ma += st.census.asymmetrics / d;
      }
      mm /= static_cast<double>(stats.size());
      ma /= static_cast<double>(stats.size());
      for (const auto& st : stats) {
        const double d = static_cast<double>(
            st.census.mutuals + st.census.asymmetrics + st.census.nulls);
        const double dev = st.census.mutuals / d - mm;
        vm += dev * dev;
      }
      vm /= static_cast<double>(stats.size());
      std::vector<double> theta0 = {1.0, 1.0, 1.0};
      if (vm > 1e-12 && mm > 0.0 && ma > 0.0 && mm + ma < 1.0 &&
          vm < mm * (1.0 - mm)) {
        const double s = mm * (1.0 - mm) / vm - 1.0;
        if (s > 0.0)
          theta0 = {mm * s, ma * s, (1.0 - mm - ma) * s};
      }
      pb.u0 = log_transform_init(theta0, offset);
      {
        std::vector<double> p = {std::max(mm, 1e-12), std::max(ma, 1e-12),
                                 std::max(1.0 - mm - ma, 1e-12)};
        const double lmax =
            std::log(std::max(p[0], std::max(p[1], p[2])));
        const double ls = config.transform_cap - lmax;
        std::vector<double> tr(3);
        for (int i = 0; i < 3; ++i) tr[i] = std::exp(std::log(p[i]) + ls);
        pb.u_runaway = log_transform_init(tr, offset);
        clamp_to_cap(pb.u_runaway, config.transform_cap);
      }
      break;
    }
    case Family::beta_bernoulli_meandeg: {
      pb.names = {"mu_d", "sigma_d"};
      // Moment parameters live on their own scale; the shifted transform
      // for weight parameters does not apply to them.
      pb.scale = "log";
      pb.to_natural = [](const std::vector<double>& u) {
        return std::vector<double>{std::exp(u[0]), std::exp(u[1])};
      };
      pb.dnatural_du = pb.to_natural;
      pb.loglik_u = [&gs](const std::vector<double>& u) {
        return pooled_loglik(gs,
                             MeanDegreeParams{std::exp(u[0]), std::exp(u[1])});
      };
      pb.grad_u = [&gs](const std::vector<double>& u) {
        const double m = std::exp(u[0]), s = std::exp(u[1]);
        auto g = grad_pooled_loglik(gs, MeanDegreeParams{m, s});
        g[0] *= m;
        g[1] *= s;
        return g;
      };
      double mean = 0.0, var = 0.0, min_bound = 1e300;
      for (const auto& st : stats)
        mean += static_cast<double>(st.e) / static_cast<double>(st.e_max) *
                (st.n_vertices - 1);
      mean /= static_cast<double>(stats.size());
      for (const auto& st : stats) {
        const double md = static_cast<double>(st.e) /
                          static_cast<double>(st.e_max) * (st.n_vertices - 1);
        var += (md - mean) * (md - mean);
        min_bound =
            std::min(min_bound, mean * (st.n_vertices - 1 - mean));
      }
      var /= static_cast<double>(stats.size());
      double mu0 = std::clamp(mean, 1e-6, 1e300);
      double sig0 = std::sqrt(var);
      if (!(sig0 > 0.0) || !(sig0 * sig0 < min_bound))
        sig0 = 0.5 * std::sqrt(std::max(min_bound, 1e-12));
      pb.u0 = {std::log(mu0), std::log(sig0)};
      pb.u_runaway = {std::log(mu0), -config.transform_cap};
      clamp_to_cap(pb.u_runaway, config.transform_cap);
      break;
    }
    case Family::dc_nnd: {
      pb.names = {"mu_nnd", "r", "sigma_nnd"};
      pb.scale = "log";
      // mu and sigma use log; r uses a logit transform.
      pb.to_natural = [](const std::vector<double>& u) {
        return std::vector<double>{std::exp(u[0]),
                                   1.0 / (1.0 + std::exp(-u[1])),
                                   std::exp(u[2])};
      };
      pb.dnatural_du = [](const std::vector<double>& u) {
        const double r = 1.0 / (1.0 + std::exp(-u[1]));
        return std::vector<double>{std::exp(u[0]), r * (1.0 - r),
                                   std::exp(u[2])};
      };
      pb.loglik_u = [&gs, to = pb.to_natural](const std::vector<double>& u) {
        const auto t = to(u);
        return pooled_loglik(gs, NonNullDegreeParams{t[0], t[1], t[2]});
      };
      pb.grad_u = [&gs, to = pb.to_natural,
                   dn = pb.dnatural_du](const std::vector<double>& u) {
        const auto t = to(u);
        auto g = grad_pooled_loglik(gs, NonNullDegreeParams{t[0], t[1], t[2]});
        const auto dt = dn(u);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= dt[i];
        return g;
      };
      double mean_nnd = 0.0, var_nnd = 0.0, r_sum = 0.0, min_bound = 1e300;
      int r_n = 0;
      for (const auto& st : stats) {
        const double d = static_cast<double>(
            st.census.mutuals + st.census.asymmetrics + st.census.nulls);
        const double nnd =
            (st.census.mutuals + st.census.asymmetrics) / d *
            (st.n_vertices - 1);
        mean_nnd += nnd;
        const long long adj = st.census.mutuals + st.census.asymmetrics;
        if (adj > 0) {
          r_sum += static_cast<double>(st.census.mutuals) /
                   static_cast<double>(adj);
          ++r_n;
        }
      }
      mean_nnd /= static_cast<double>(stats.size());
      for (const auto& st : stats) {
        const double d = static_cast<double>(
            st.census.mutuals + st.census.asymmetrics + st.census.nulls);
        const double nnd =
            (st.census.mutuals + st.census.asymmetrics) / d *
            (st.n_vertices - 1);
        var_nnd += (nnd - mean_nnd) * (nnd - mean_nnd);
        min_bound = std::min(min_bound,
                             mean_nnd * (st.n_vertices - 1 - mean_nnd));
      }
      var_nnd /= static_cast<double>(stats.size());
      double mu0 = std::clamp(mean_nnd, 1e-6, 1e300);
      double sig0 = std::sqrt(var_nnd);
      if (!(sig0 > 0.0) || !(sig0 * sig0 < min_bound))
        sig0 = 0.5 * std::sqrt(std::max(min_bound, 1e-12));
      double r0 = r_n > 0 ? std::clamp(r_sum / r_n, 0.01, 0.99) : 0.5;
      pb.u0 = {std::log(mu0), std::log(r0 / (1.0 - r0)), std::log(sig0)};
      pb.u_runaway = {std::log(mu0), std::log(r0 / (1.0 - r0)),
                      -config.transform_cap};
      clamp_to_cap(pb.u_runaway, config.transform_cap);
      break;
    }
    case Family::bernoulli:
      throw std::logic_error("make_problem: bernoulli is closed form");
  }
  return pb;
}

double null_loglik(const GraphSet& gs) {
  long long e_total = 0, emax_total = 0;
  for (const Graph& g : gs.graphs) {
    e_total += g.edge_count();
    emax_total += g.space().max_edges();
  }
  const double delta =
      static_cast<double>(e_total) / static_cast<double>(emax_total);
  double acc = 0.0;
  for (const Graph& g : gs.graphs) {
    const double e = static_cast<double>(g.edge_count());
    const double n = static_cast<double>(g.space().max_edges() - g.edge_count());
    acc += xlog(e, delta) + xlog(n, 1.0 - delta);
  }
  return acc;
}

long long total_edge_vars(const GraphSet& gs) {
  long long t = 0;
  for (const Graph& g : gs.graphs) t += g.space().max_edges();
  return t;
}

}  // namespace

FitResult fit_mle(const GraphSet& gs, Family family, const FitConfig& config) {
  validate(gs);
  FitResult res;
  res.family = family_name(family);
  res.data_fingerprint = graphset_fingerprint(gs);
  res.null_deviance = -2.0 * null_loglik(gs);

  const IdentifiabilityReport ident = identifiability_check(gs, family);
  const bool hard_degenerate =
      !ident.ok && ident.reason.find("insufficient observations") !=
                       std::string::npos;
  const bool wrong_space =
      !ident.ok &&
      ident.reason.find("requires directed loopless") != std::string::npos;
  if (hard_degenerate || wrong_space) {
    res.degenerate = ident.reason;
    res.flags.push_back("degenerate");
    res.converged = false;
    res.scale = "none";
    res.log_likelihood = kNaN;
    res.deviance = kNaN;
    res.aic = kNaN;
    return res;
  }
  if (!ident.ok) res.flags.push_back("zero-dispersion");

  if (family == Family::bernoulli) {
    long long e_total = 0, emax_total = 0;
    for (const Graph& g : gs.graphs) {
      e_total += g.edge_count();
      emax_total += g.space().max_edges();
    }
    const double delta =
        static_cast<double>(e_total) / static_cast<double>(emax_total);
    res.param_names = {"delta"};
    res.estimates = {delta};
    res.std_errors = {std::sqrt(delta * (1.0 - delta) /
                                static_cast<double>(emax_total))};
    res.scale = "identity";
    res.log_likelihood = null_loglik(gs);
    res.converged = true;
    res.n_params = 1;
    if (delta == 0.0 || delta == 1.0) {
      res.flags.push_back("boundary");
      res.converged = false;
    }
    res.deviance = -2.0 * res.log_likelihood;
    res.aic = res.deviance + 2.0 * res.n_params;
    res.residual_df = total_edge_vars(gs) - res.n_params;
    return res;
  }

  FitProblem pb = make_problem(gs, family, config);
  res.param_names = pb.names;
  res.scale = pb.scale;
  res.n_params = static_cast<int>(pb.names.size());

  // Zero dispersion across the whole set: the likelihood increases along
  // a known direction without bound, so start at the cap instead of
  // crawling toward it.
  if (!ident.ok && !pb.u_runaway.empty()) pb.u0 = pb.u_runaway;

  OptimResult opt = bfgs_maximize(pb.loglik_u, pb.grad_u, pb.u0, config);
  if (opt.u.empty() || !opt.converged) {
    OptimResult fallback = simplex_maximize(
        pb.loglik_u, opt.u.empty() ? pb.u0 : opt.u, config);
    if (fallback.value > opt.value || opt.u.empty()) {
      opt = fallback;
      // Re-polish with BFGS from the simplex optimum.
      OptimResult polish = bfgs_maximize(pb.loglik_u, pb.grad_u, opt.u, config);
      if (polish.value >= opt.value && !polish.u.empty()) {
        polish.used_fallback = true;
        opt = polish;
      }
      res.flags.push_back("fallback-simplex");
    }
  }
  if (opt.u.empty()) {
    res.degenerate = "optimizer could not find a feasible parameter point";
    res.flags.push_back("degenerate");
    res.scale = "none";
    res.log_likelihood = kNaN;
    res.deviance = kNaN;
    res.aic = kNaN;
    return res;
  }

  newton_polish(pb.loglik_u, pb.grad_u, opt.u, opt.value, config);
  {
    const auto gf = safe_grad(pb.grad_u, opt.u);
    bool finite = true;
    for (double v : gf)
      if (!std::isfinite(v)) finite = false;
    opt.converged = finite && inf_norm(gf) < config.grad_tol;
  }

  bool boundary = false;
  for (double v : opt.u)
    if (std::fabs(v) >= config.transform_cap - 1e-9) boundary = true;
  if (boundary) res.flags.push_back("boundary");

  res.converged = opt.converged && !boundary;
  if (!res.converged && !boundary) res.flags.push_back("not-converged");

  res.estimates = pb.to_natural(opt.u);
  res.log_likelihood = opt.value;
  res.deviance = -2.0 * res.log_likelihood;
  res.aic = res.deviance + 2.0 * res.n_params;
  res.residual_df = total_edge_vars(gs) - res.n_params;

  // Observed-information standard errors: finite-difference Hessian of
  // the analytic transformed-scale gradient, inverted, delta method.
  const std::size_t d = opt.u.size();
  const auto hess_ll = fd_hessian(pb.grad_u, opt.u, 1e-4);
  std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
  bool hess_ok = true;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(hess_ll[i][j])) hess_ok = false;
      hess[i][j] = -hess_ll[i][j];  // observed information
    }
  res.std_errors.assign(d, kNaN);
  if (hess_ok) {
    // Invert the (at most 3x3) information matrix.
    std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
    bool inverted = false;
    if (d == 1) {
      if (hess[0][0] > 0.0) {
        inv[0][0] = 1.0 / hess[0][0];
        inverted = true;
      }
    } else if (d == 2) {
      const double det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
      if (std::fabs(det) > 1e-300) {
        inv[0][0] = hess[1][1] / det;
        inv[1][1] = hess[0][0] / det;
        inv[0][1] = inv[1][0] = -hess[0][1] / det;
        inverted = true;
      }
    } else if (d == 3) {
      const auto& m = hess;
      const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      if (std::fabs(det) > 1e-300) {
        inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
        inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
        inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
        inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
        inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
        inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
        inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
        inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
        inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
        inverted = true;
      }
    }
    if (inverted) {
      const auto dt = pb.dnatural_du(opt.u);
      bool any_bad = false;
      for (std::size_t i = 0; i < d; ++i) {
        const double var_u = inv[i][i];
        if (var_u > 0.0)
          res.std_errors[i] = dt[i] * std::sqrt(var_u);
        else
          any_bad = true;
      }
      if (any_bad) res.flags.push_back("hessian-not-positive-definite");
    } else {
      res.flags.push_back("hessian-singular");
    }
  } else {
    res.flags.push_back("hessian-singular");
  }

  if (opt.used_fallback &&
      std::find(res.flags.begin(), res.flags.end(), "fallback-simplex") ==
          res.flags.end())
    res.flags.push_back("fallback-simplex");
  return res;
}

std::vector<ComparisonRow> model_comparison(
    const std::vector<FitResult>& fits) {
  if (fits.empty())
    throw std::invalid_argument("model_comparison: no fits given");
  for (const FitResult& f : fits)
    if (f.data_fingerprint != fits.front().data_fingerprint)
      throw std::invalid_argument(
          "model_comparison: fits come from different data");
  std::vector<ComparisonRow> rows;
  rows.reserve(fits.size());
  for (const FitResult& f : fits)
    rows.push_back({f.family, f.deviance, f.residual_df, f.aic});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.aic < b.aic;
                   });
  return rows;
}

}  // namespace graphmix
