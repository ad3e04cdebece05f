#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/models.hpp"
#include "graphmix/netinf.hpp"
#include "graphmix/oracle.hpp"
#include "graphmix/special.hpp"

using namespace graphmix;

TEST_CASE("enumeration counts and cap") {
  CHECK(enumerate_graphs({2, true, false}).size() == 4);
  CHECK(enumerate_graphs({3, true, false}).size() == 64);
  CHECK(enumerate_graphs({4, false, false}).size() == 64);
  CHECK_THROWS_AS(enumerate_graphs({8, true, false}), std::invalid_argument);
}

TEST_CASE("encode and decode round trip in order") {
  for (const GraphSpace space :
       {GraphSpace{3, true, false}, {4, false, false}, {2, true, true}}) {
    const auto graphs = enumerate_graphs(space);
    for (std::size_t code = 0; code < graphs.size(); ++code) {
      CHECK(encode_graph(graphs[code]) == code);
      CHECK(decode_graph(space, static_cast<std::uint32_t>(code)) ==
            graphs[code]);
    }
  }
  CHECK_THROWS_AS(decode_graph({2, true, false}, 4), std::invalid_argument);
}

TEST_CASE("exact distributions of the closed-form families") {
  const GraphSpace tri{3, true, false};
  const auto uniform = exact_distribution(
      tri, [](const Graph& g) { return log_pmf_bernoulli(g, {0.5}); });
  CHECK(uniform.total == doctest::Approx(1.0).epsilon(1e-12));
  for (double p : uniform.prob)
    CHECK(p == doctest::Approx(1.0 / 64).epsilon(1e-12));

  // Edge-count mixture with unit weights: an e-edge graph has mass
  // e!(6-e)!/7!, and the edge-count law is uniform on 0..6.
  const auto bb = exact_distribution(tri, [](const Graph& g) {
    return log_pmf_beta_bernoulli(g, {1, 1});
  });
  CHECK(bb.total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t code = 0; code < bb.prob.size(); ++code) {
    const long long e = decode_graph(tri, code).edge_count();
    const double want = std::exp(log_gamma(e + 1.0) + log_gamma(7.0 - e) -
                                 log_gamma(8.0));
    CHECK(bb.prob[code] == doctest::Approx(want).epsilon(1e-12));
  }
  const auto law = edge_count_distribution(bb);
  REQUIRE(law.size() == 7);
  for (double p : law) CHECK(p == doctest::Approx(1.0 / 7).epsilon(1e-12));

  const GraphSpace pair{2, true, false};
  const auto dc = exact_distribution(pair, [](const Graph& g) {
    return log_pmf_dirichlet_categorical(g, {1, 1, 1});
  });
  REQUIRE(dc.prob.size() == 4);
  CHECK(dc.prob[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));  // null
  CHECK(dc.prob[1] == doctest::Approx(1.0 / 6).epsilon(1e-12));  // 1 -> 2
  CHECK(dc.prob[2] == doctest::Approx(1.0 / 6).epsilon(1e-12));  // 2 -> 1
  CHECK(dc.prob[3] == doctest::Approx(1.0 / 3).epsilon(1e-12));  // mutual
}

TEST_CASE("marginals of independent edges") {
  const GraphSpace tri{3, true, false};
  const auto dist = exact_distribution(
      tri, [](const Graph& g) { return log_pmf_bernoulli(g, {0.3}); });
  for (double m : marginals(dist))
    CHECK(m == doctest::Approx(0.3).epsilon(1e-12));
}

namespace {

ObservationSet one_slice(const GraphSpace& space,
                         const std::vector<std::pair<int, int>>& ones) {
  const int n = space.n_vertices;
  ObservationSet obs{space, {std::vector<std::uint8_t>(
                        static_cast<std::size_t>(n) * n, 0)}};
  for (const auto& [i, j] : ones)
    obs.slices[0][static_cast<std::size_t>(i) * n + j] = 1;
  return obs;
}

}  // namespace

TEST_CASE("exact posterior recovers hand-computed cases") {
  const GraphSpace pair{2, true, false};
  const auto prior = [](const Graph& g) { return log_pmf_bernoulli(g, {0.5}); };

  // One slice reporting a single present cell at fp=0.05, fn=0.5:
  // posterior odds for that cell are 0.5/0.05, so its marginal is 10/11.
  const auto post = exact_posterior(pair, prior,
                                    one_slice(pair, {{0, 1}}), 0.05, 0.5);
  CHECK(post.total == doctest::Approx(1.0).epsilon(1e-12));
  const auto marg = marginals(post);
  CHECK(marg[0] == doctest::Approx(10.0 / 11).epsilon(1e-12));
  // The silent cell moves the other way: odds fn/(1-fp) = 0.5/0.95.
  CHECK(marg[1] == doctest::Approx((0.5 / 0.95) / (1.0 + 0.5 / 0.95))
                       .epsilon(1e-12));

  // No slices: the posterior is the prior.
  const ObservationSet empty{pair, {}};
  const auto same = exact_posterior(pair, prior, empty, 0.05, 0.5);
  for (std::size_t k = 0; k < same.prob.size(); ++k)
    CHECK(same.prob[k] == doctest::Approx(0.25).epsilon(1e-12));

  // Noiseless observations concentrate on the observed graph.
  const auto sharp = exact_posterior(pair, prior,
                                     one_slice(pair, {{1, 0}}), 0.0, 0.0);
  CHECK(sharp.prob[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sharp.prob[0] == doctest::Approx(0.0));
  CHECK(sharp.prob[1] == doctest::Approx(0.0));
  CHECK(sharp.prob[3] == doctest::Approx(0.0));

  // Contradictory noiseless slices are impossible under every graph.
  ObservationSet clash = one_slice(pair, {{0, 1}});
  clash.slices.push_back(one_slice(pair, {}).slices[0]);
  CHECK_THROWS_AS(exact_posterior(pair, prior, clash, 0.0, 0.0),
                  NumericalError);
}

TEST_CASE("posterior marginals ignore slice order") {
  const GraphSpace tri{3, true, false};
  const auto prior = [](const Graph& g) {
    return log_pmf_beta_bernoulli(g, {0.5, 0.5});
  };
  ObservationSet obs = one_slice(tri, {{0, 1}, {1, 2}});
  obs.slices.push_back(one_slice(tri, {{2, 0}, {0, 1}}).slices[0]);
  obs.slices.push_back(one_slice(tri, {}).slices[0]);

  ObservationSet flipped = obs;
  std::swap(flipped.slices[0], flipped.slices[2]);
  std::swap(flipped.slices[1], flipped.slices[2]);

  const auto a = exact_posterior(tri, prior, obs, 0.1, 0.3);
  const auto b = exact_posterior(tri, prior, flipped, 0.1, 0.3);
  const auto ma = marginals(a), mb = marginals(b);
  for (std::size_t k = 0; k < ma.size(); ++k) CHECK(ma[k] == mb[k]);
}
