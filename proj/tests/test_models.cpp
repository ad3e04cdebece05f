#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/models.hpp"
#include "graphmix/oracle.hpp"

using namespace graphmix;

namespace {

Graph make_graph(const GraphSpace& space,
                 const std::vector<std::pair<int, int>>& edges) {
  Graph g(space);
  for (const auto& [i, j] : edges) g.set_edge(i, j, true);
  return g;
}

// Dyad census of g with dyad {i, j} removed.
DyadCensus census_without(const Graph& g, int i, int j) {
  DyadCensus c = dyad_census(g);
  const bool fwd = g.edge(i, j), rev = g.edge(j, i);
  if (fwd && rev)
    --c.mutuals;
  else if (fwd || rev)
    --c.asymmetrics;
  else
    --c.nulls;
  return c;
}

}  // namespace

TEST_CASE("bernoulli log pmf") {
  const GraphSpace space{3, true, false};  // e* = 6
  const Graph empty(space);
  CHECK(log_pmf_bernoulli(empty, {0.5}) == doctest::Approx(std::log(1.0 / 64)));
  const Graph one = make_graph(space, {{0, 1}});
  CHECK(log_pmf_bernoulli(one, {0.5}) == doctest::Approx(std::log(1.0 / 64)));
  const GraphSpace sp_pair{2, true, true};  // e* = 4
  const Graph g1 = make_graph(sp_pair, {{0, 1}});
  CHECK(log_pmf_bernoulli(g1, {0.25}) ==
        doctest::Approx(std::log(0.25) + 3 * std::log(0.75)).epsilon(1e-12));
  CHECK_THROWS_AS(log_pmf_bernoulli(empty, {0.0}), std::domain_error);
  CHECK_THROWS_AS(log_pmf_bernoulli(empty, {1.0}), std::domain_error);

  // Normalization by enumeration.
  for (double delta : {0.1, 0.5, 0.9}) {
    const auto dist = exact_distribution(space, [&](const Graph& g) {
      return log_pmf_bernoulli(g, {delta});
    });
    CHECK(dist.total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditional uniform log pmf") {
  const GraphSpace space{3, true, false};
  const Graph empty(space);
  CHECK(log_pmf_cug(empty, 0) == doctest::Approx(0.0));
  const Graph three = make_graph(space, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(log_pmf_cug(three, 3) == doctest::Approx(-std::log(20.0)));
  const Graph two = make_graph(space, {{0, 1}, {1, 2}});
  CHECK(log_pmf_cug(two, 3) == kLogZero);
  CHECK_THROWS_AS(log_pmf_cug(empty, 7), std::domain_error);
  CHECK_THROWS_AS(log_pmf_cug(empty, -1), std::domain_error);

  const auto dist = exact_distribution(
      space, [&](const Graph& g) { return log_pmf_cug(g, 3); });
  CHECK(dist.total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("categorical dyad log pmf") {
  const GraphSpace pair{2, true, false};
  const UmanParams third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const Graph mutual = make_graph(pair, {{0, 1}, {1, 0}});
  CHECK(log_pmf_uman(mutual, third) ==
        doctest::Approx(std::log(1.0 / 3)).epsilon(1e-12));
  const Graph asym = make_graph(pair, {{0, 1}});
  CHECK(log_pmf_uman(asym, third) ==
        doctest::Approx(std::log(1.0 / 6)).epsilon(1e-12));
  const auto dist = exact_distribution(
      pair, [&](const Graph& g) { return log_pmf_uman(g, third); });
  CHECK(dist.total == doctest::Approx(1.0).epsilon(1e-12));

  // 0 * log 0 convention: zero rates are fine when the count is zero.
  const UmanParams no_asym{0.5, 0.0, 0.5};
  CHECK(log_pmf_uman(mutual, no_asym) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(log_pmf_uman(asym, no_asym) == kLogZero);

  const GraphSpace undirected{3, false, false};
  CHECK_THROWS_AS(log_pmf_uman(Graph(undirected), third),
                  std::invalid_argument);
}

TEST_CASE("edge-count mixture log pmf") {
  const GraphSpace single{2, false, false};  // e* = 1
  const Graph one_edge = make_graph(single, {{0, 1}});
  CHECK(log_pmf_beta_bernoulli(one_edge, {1, 1}) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));

  const GraphSpace tri{3, false, false};  // e* = 3
  const Graph two = make_graph(tri, {{0, 1}, {1, 2}});
  CHECK(log_pmf_beta_bernoulli(two, {1, 1}) ==
        doctest::Approx(std::log(1.0 / 12)).epsilon(1e-12));

  // alpha=2, beta=5 on e*=6 with e=3: gamma-ratio arithmetic gives
  // 30 * 24 * 5040 / 12! = 1/132.
  const GraphSpace six{3, true, false};
  const Graph three = make_graph(six, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(log_pmf_beta_bernoulli(three, {2, 5}) ==
        doctest::Approx(std::log(1.0 / 132)).epsilon(1e-12));
  CHECK(log_pmf_bb_counts(3, 6, {2, 5}) ==
        doctest::Approx(std::log(1.0 / 132)).epsilon(1e-12));

  CHECK_THROWS_AS(log_pmf_beta_bernoulli(three, {0.0, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(log_pmf_beta_bernoulli(three, {1.0, -2.0}),
                  std::domain_error);
}

TEST_CASE("dyad-census mixture log pmf") {
  const GraphSpace pair{2, true, false};
  const DirichletCategoricalParams unit{1, 1, 1};
  CHECK(log_pmf_dirichlet_categorical(make_graph(pair, {{0, 1}, {1, 0}}),
                                      unit) ==
        doctest::Approx(std::log(1.0 / 3)).epsilon(1e-12));
  CHECK(log_pmf_dirichlet_categorical(make_graph(pair, {{0, 1}}), unit) ==
        doctest::Approx(std::log(1.0 / 6)).epsilon(1e-12));

  // N_V=3 with census (1,1,1): (1/2) * 2 * 1 / 120.
  const GraphSpace tri{3, true, false};
  const Graph mixed = make_graph(tri, {{0, 1}, {1, 0}, {1, 2}});
  const DyadCensus c = dyad_census(mixed);
  CHECK(c.mutuals == 1);
  CHECK(c.asymmetrics == 1);
  CHECK(c.nulls == 1);
  CHECK(log_pmf_dirichlet_categorical(mixed, unit) ==
        doctest::Approx(std::log(1.0 / 120)).epsilon(1e-12));
  CHECK(log_pmf_dc_census(c, unit) ==
        doctest::Approx(std::log(1.0 / 120)).epsilon(1e-12));

  const GraphSpace undirected{3, false, false};
  CHECK_THROWS_AS(
      log_pmf_dirichlet_categorical(Graph(undirected), unit),
      std::invalid_argument);
  CHECK_THROWS_AS(
      log_pmf_dirichlet_categorical(Graph(tri), {1, 0, 1}),
      std::domain_error);
}

TEST_CASE("edge-count conditional") {
  const GraphSpace tri{3, false, false};  // e* = 3
  CHECK(cond_edge_prob_bb(0, tri, {1, 1}) == doctest::Approx(0.25));
  // Midpoint symmetry: alpha == beta and e_rest = (e* - 1)/2 give 1/2.
  const GraphSpace sp55{11, false, false};  // e* = 55
  CHECK(cond_edge_prob_bb(27, sp55, {2.5, 2.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cond_edge_prob_bb(3, tri, {1, 1}), std::domain_error);
  CHECK_THROWS_AS(cond_edge_prob_bb(-1, tri, {1, 1}), std::domain_error);

  // Agreement with the pmf ratio on every edge variable of every
  // enumerated graph.
  const GraphSpace six{3, true, false};
  const BetaBernoulliParams p{2, 5};
  for (const Graph& y : enumerate_graphs(six)) {
    for (const auto& [i, j] : edge_variables(six)) {
      Graph up = y, down = y;
      up.set_edge(i, j, true);
      down.set_edge(i, j, false);
      const double num = std::exp(log_pmf_beta_bernoulli(up, p));
      const double den = num + std::exp(log_pmf_beta_bernoulli(down, p));
      const long long e_rest = down.edge_count();
      CHECK(cond_edge_prob_bb(e_rest, six, p) ==
            doctest::Approx(num / den).epsilon(1e-12));
    }
  }
}

TEST_CASE("dyad conditional equals pmf ratio and closed form") {
  // Single-dyad space: with alpha=beta=gamma=1 the four graphs have
  // probabilities (1/3, 1/6, 1/6, 1/3), so Pr(edge | reverse present)
  // is (1/3)/(1/3 + 1/6) = 2/3 and Pr(edge | reverse absent) is
  // (1/6)/(1/6 + 1/3) = 1/3.
  const DirichletCategoricalParams unit{1, 1, 1};
  CHECK(cond_edge_prob_dc({0, 0, 0}, true, unit) ==
        doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(cond_edge_prob_dc({0, 0, 0}, false, unit) ==
        doctest::Approx(1.0 / 3).epsilon(1e-12));

  // N_V=3, rest census (0,0,2), reverse edge absent:
  // (A/2 + beta/2) / (A/2 + beta/2 + N + gamma) = 0.5 / 3.5.
  CHECK(cond_edge_prob_dc({0, 0, 2}, false, unit) ==
        doctest::Approx(1.0 / 7).epsilon(1e-12));

  // Mutual-dominated limit.
  CHECK(cond_edge_prob_dc({0, 0, 2}, true, {1e9, 1, 1}) ==
        doctest::Approx(1.0).epsilon(1e-8));

  // Full agreement with both the enumeration ratio and the closed form
  // (M + alpha) / (M + alpha + (A + beta)/2)          when y_ji = 1,
  // ((A + beta)/2) / ((A + beta)/2 + N + gamma)       when y_ji = 0,
  // with (M, A, N) the census of the other dyads.
  const GraphSpace tri{3, true, false};
  for (const DirichletCategoricalParams p :
       {DirichletCategoricalParams{1, 1, 1}, {0.5, 2, 1.5}, {3, 0.25, 2}}) {
    for (const Graph& y : enumerate_graphs(tri)) {
      for (const auto& [i, j] : edge_variables(tri)) {
        Graph up = y, down = y;
        up.set_edge(i, j, true);
        down.set_edge(i, j, false);
        const double num = std::exp(log_pmf_dirichlet_categorical(up, p));
        const double den =
            num + std::exp(log_pmf_dirichlet_categorical(down, p));
        const DyadCensus rest = census_without(y, i, j);
        const bool y_ji = y.edge(j, i);
        const double got = cond_edge_prob_dc(rest, y_ji, p);
        CHECK(got == doctest::Approx(num / den).epsilon(1e-12));
        const double m = static_cast<double>(rest.mutuals) + p.alpha;
        const double a2 = (static_cast<double>(rest.asymmetrics) + p.beta) / 2;
        const double n = static_cast<double>(rest.nulls) + p.gamma;
        const double closed = y_ji ? m / (m + a2) : a2 / (a2 + n);
        CHECK(got == doctest::Approx(closed).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dyad-state weights match the pmf") {
  const GraphSpace tri{3, true, false};
  const DirichletCategoricalParams p{0.5, 2, 1.5};
  for (const Graph& y : enumerate_graphs(tri)) {
    for (int i = 0; i < 2; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const DyadCensus rest = census_without(y, i, j);
        const DyadStateWeights w = dyad_state_weights(rest, p);
        // Complete the dyad four ways and compare unnormalized masses.
        Graph base = y;
        base.set_edge(i, j, false);
        base.set_edge(j, i, false);
        Graph gm = base, gf = base, gr = base;
        gm.set_edge(i, j, true);
        gm.set_edge(j, i, true);
        gf.set_edge(i, j, true);
        gr.set_edge(j, i, true);
        const double pm = std::exp(log_pmf_dirichlet_categorical(gm, p));
        const double pf = std::exp(log_pmf_dirichlet_categorical(gf, p));
        const double pr = std::exp(log_pmf_dirichlet_categorical(gr, p));
        const double pn = std::exp(log_pmf_dirichlet_categorical(base, p));
        const double mass = pm + pf + pr + pn;
        const double wsum = w.mutual + w.asym_fwd + w.asym_rev + w.null;
        CHECK(w.mutual / wsum == doctest::Approx(pm / mass).epsilon(1e-12));
        CHECK(w.asym_fwd / wsum == doctest::Approx(pf / mass).epsilon(1e-12));
        CHECK(w.asym_rev / wsum == doctest::Approx(pr / mass).epsilon(1e-12));
        CHECK(w.null / wsum == doctest::Approx(pn / mass).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("mean-degree reparameterization") {
  const GraphSpace sp{11, true, false};
  const auto p = params_from_mean_degree({5.0, std::sqrt(5.0)}, sp);
  CHECK(p.alpha == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(p.beta == doctest::Approx(2.0).epsilon(1e-10));

  // Symmetric target keeps alpha == beta.
  const auto sym = params_from_mean_degree({5.0, 1.0}, sp);
  CHECK(sym.alpha == doctest::Approx(sym.beta).epsilon(1e-12));

  // Round trip through the moments.
  for (const MeanDegreeParams md :
       {MeanDegreeParams{5.0, std::sqrt(5.0)}, {2.5, 1.0}, {8.0, 0.5}}) {
    const auto bb = params_from_mean_degree(md, sp);
    const auto mom = moments(bb, sp);
    CHECK(mom.mean_degree == doctest::Approx(md.mu_d).epsilon(1e-10));
    CHECK(mom.sd_degree == doctest::Approx(md.sigma_d).epsilon(1e-10));
  }

  CHECK_THROWS_AS(params_from_mean_degree({5.0, 5.0}, sp),
                  InvalidDispersionError);
  CHECK_THROWS_AS(params_from_mean_degree({0.0, 1.0}, sp), std::domain_error);
  CHECK_THROWS_AS(params_from_mean_degree({10.0, 1.0}, sp), std::domain_error);
  try {
    params_from_mean_degree({5.0, 5.0}, sp);
  } catch (const InvalidDispersionError& e) {
    CHECK(e.graph_index == -1);
  }
}

TEST_CASE("non-null degree reparameterization") {
  const GraphSpace sp{11, true, false};
  const auto p = params_from_nnd({5.0, 0.5, std::sqrt(5.0)}, sp);
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.gamma == doctest::Approx(2.0).epsilon(1e-10));

  const auto sym = params_from_nnd({3.0, 0.5, 1.0}, sp);
  CHECK(sym.alpha == doctest::Approx(sym.beta).epsilon(1e-12));

  for (const NonNullDegreeParams nn :
       {NonNullDegreeParams{5.0, 0.5, std::sqrt(5.0)},
        {2.5, 0.25, 1.0},
        {7.0, 0.8, 1.2}}) {
    const auto dc = params_from_nnd(nn, sp);
    const double s = dc.alpha + dc.beta + dc.gamma;
    const double mean_nn = (dc.alpha + dc.beta) / s;       // E(m + a)
    const double var_nn = mean_nn * (1.0 - mean_nn) / (s + 1.0);
    CHECK(mean_nn == doctest::Approx(nn.mu_nnd / 10.0).epsilon(1e-10));
    CHECK(var_nn ==
          doctest::Approx(nn.sigma_nnd * nn.sigma_nnd / 100.0).epsilon(1e-10));
    CHECK(dc.alpha / (dc.alpha + dc.beta) ==
          doctest::Approx(nn.r).epsilon(1e-10));
  }

  CHECK_THROWS_AS(params_from_nnd({5.0, 0.5, std::sqrt(30.0)}, sp),
                  InvalidDispersionError);
  CHECK_THROWS_AS(params_from_nnd({5.0, 0.0, 1.0}, sp), std::domain_error);
  CHECK_THROWS_AS(params_from_nnd({11.0, 0.5, 1.0}, sp), std::domain_error);
}

TEST_CASE("moment records") {
  const GraphSpace sp{11, true, false};
  const auto bb = moments(BetaBernoulliParams{1, 1}, sp);
  CHECK(bb.mean_density == doctest::Approx(0.5));
  CHECK(bb.var_density == doctest::Approx(1.0 / 12).epsilon(1e-12));

  const auto bb22 = moments(BetaBernoulliParams{2, 2}, sp);
  CHECK(bb22.mean_degree == doctest::Approx(5.0));
  CHECK(bb22.sd_degree == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

  const auto dc = moments(DirichletCategoricalParams{1, 1, 1});
  CHECK(dc.mean_m == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(dc.mean_a == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(dc.mean_n == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(dc.mean_density == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dc.reciprocation_rate == doctest::Approx(0.5).epsilon(1e-12));

  const auto um = moments(UmanParams{0.25, 0.5, 0.25});
  CHECK(um.density == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(um.edgewise_reciprocity == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pmf depends only on sufficient statistics") {
  const GraphSpace six{3, true, false};
  const BetaBernoulliParams bb{0.7, 2.3};
  const DirichletCategoricalParams dc{1.2, 0.6, 2.0};
  std::vector<double> by_edge_count(7,
                                    std::numeric_limits<double>::quiet_NaN());
  for (const Graph& y : enumerate_graphs(six)) {
    const double lp = log_pmf_beta_bernoulli(y, bb);
    const long long e = y.edge_count();
    if (std::isnan(by_edge_count[e]))
      by_edge_count[e] = lp;
    else
      CHECK(lp == doctest::Approx(by_edge_count[e]).epsilon(1e-15));

    // Same dyad census, same pmf: compare against the census overload.
    CHECK(log_pmf_dirichlet_categorical(y, dc) ==
          doctest::Approx(log_pmf_dc_census(dyad_census(y), dc))
              .epsilon(1e-15));
  }
}

TEST_CASE("concentrated mixing approaches independent edges") {
  const GraphSpace six{3, true, false};
  const Graph y = make_graph(six, {{0, 1}, {1, 2}, {2, 0}, {0, 2}});
  const double delta = 0.3;
  const double target = log_pmf_bernoulli(y, {delta});
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double c : {1e2, 1e4, 1e6}) {
    const double lp =
        log_pmf_beta_bernoulli(y, {c * delta, c * (1.0 - delta)});
    const double gap = std::fabs(lp - target);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-4);
}
