#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "tsdbn/graph/algorithms.hpp"
#include "tsdbn/rng.hpp"
#include "tsdbn/search/constraint.hpp"
#include "tsdbn/search/score_search.hpp"

using namespace tsdbn;

namespace {

using EdgeSet = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<std::string> names(std::size_t m) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}

// Linear Gaussian SEM in index order: x_j = sum_i w[i][j] x_i + e_j.
Matrix sem(const std::vector<std::vector<double>>& w, std::size_t n, Rng& rng, double noise_sd = 1.0) {
  const auto m = static_cast<Eigen::Index>(w.size());
  Matrix x(static_cast<Eigen::Index>(n), m);
  for (Eigen::Index t = 0; t < x.rows(); ++t)
    for (Eigen::Index j = 0; j < m; ++j) {
      double v = noise_sd * rng.normal();
      for (Eigen::Index i = 0; i < j; ++i) v += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x(t, i);
      x(t, j) = v;
    }
  return x;
}

std::vector<std::vector<double>> weights(std::size_t m, const std::vector<std::tuple<std::size_t, std::size_t, double>>& e) {
  std::vector<std::vector<double>> w(m, std::vector<double>(m, 0.0));
  for (auto [i, j, b] : e) w[i][j] = b;
  return w;
}

Matrix noise(std::size_t n, std::size_t m, Rng& rng) { return sem(weights(m, {}), n, rng); }

// Local score by explicit OLS with intercept: ML variance RSS / n.
double ols_local(const Matrix& x, std::size_t node, const std::vector<std::size_t>& parents, double gamma) {
  const auto n = x.rows();
  Matrix z(n, static_cast<Eigen::Index>(parents.size()) + 1);
  z.col(0).setOnes();
  for (std::size_t i = 0; i < parents.size(); ++i) z.col(static_cast<Eigen::Index>(i) + 1) = x.col(static_cast<Eigen::Index>(parents[i]));
  const Vector y = x.col(static_cast<Eigen::Index>(node));
  const Vector beta = z.colPivHouseholderQr().solve(y);
  const double var = (y - z * beta).squaredNorm() / static_cast<double>(n);
  const double d = static_cast<double>(parents.size()) + 2;
  const double dn = static_cast<double>(n);
  return -0.5 * dn * (std::log(2 * M_PI * var) + 1) - 0.5 * d * std::log(dn) -
         gamma * d * std::log(static_cast<double>(x.cols()));
}

// Markov equivalence: same skeleton and same v-structures.
bool markov_equivalent(const Dag& a, const Dag& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a.adjacent(i, j) != b.adjacent(i, j)) return false;
  auto va = v_structures(Cpdag(a)), vb = v_structures(Cpdag(b));
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  return va == vb;
}

std::vector<Dag> all_dags(const std::vector<std::string>& nm) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nm.size(); ++i)
    for (std::size_t j = i + 1; j < nm.size(); ++j) pairs.emplace_back(i, j);
  std::size_t states = 1;
  for (std::size_t p = 0; p < pairs.size(); ++p) states *= 3;
  std::vector<Dag> out;
  for (std::size_t code = 0; code < states; ++code) {
    Dag g(nm);
    std::size_t c = code;
    bool ok = true;
    for (auto [i, j] : pairs) {
      const auto s = c % 3;
      c /= 3;
      if (s == 1) ok = ok && g.try_add(i, j);
      if (s == 2) ok = ok && g.try_add(j, i);
    }
    if (ok) out.push_back(g);
  }
  return out;
}

// CPDAG edges in node names so graphs over permuted columns compare.
std::set<std::string> named_edges(const Cpdag& g) {
  std::set<std::string> out;
  for (auto [a, b] : g.directed_edges()) out.insert(g.nodes()[a] + "->" + g.nodes()[b]);
  for (auto [a, b] : g.undirected_edges()) {
    auto x = g.nodes()[a], y = g.nodes()[b];
    if (y < x) std::swap(x, y);
    out.insert(x + "--" + y);
  }
  return out;
}

}  // namespace

TEST(GaussScore, LocalMatchesOls) {
  Rng rng(1);
  const Matrix x = sem(weights(4, {{0, 1, 0.8}, {1, 2, -0.5}, {0, 3, 0.3}, {2, 3, 1.1}}), 150, rng);
  const auto d = plain_numeric(x, names(4));
  for (double gamma : {0.0, 0.5, 1.0}) {
    GaussScore s(d, gamma);
    for (std::size_t node = 0; node < 4; ++node) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < 4; ++i)
        if (i != node) others.push_back(i);
      for (std::size_t mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> ps;
        for (std::size_t b = 0; b < 3; ++b)
          if (mask >> b & 1) ps.push_back(others[b]);
        EXPECT_NEAR(s.local(node, ps), ols_local(x, node, ps, gamma), 1e-7 * std::fabs(s.local(node, ps)));
      }
    }
  }
}

TEST(GaussScore, GammaZeroIsBicAndPenaltyDifference) {
  Rng rng(2);
  const auto d = plain_numeric(noise(80, 5, rng), names(5));
  GaussScore bic(d, 0.0), ebic(d, 0.5);
  for (const std::vector<std::size_t>& ps : {std::vector<std::size_t>{}, {1}, {1, 3, 4}})
    EXPECT_NEAR(bic.local(0, ps) - ebic.local(0, ps), 0.5 * static_cast<double>(ps.size() + 2) * std::log(5.0), 1e-9);
}

TEST(GaussScore, IrrelevantParentLowersScore) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    GaussScore s(plain_numeric(noise(200, 2, rng), names(2)), 0.5);
    wins += s.local(0, {}) > s.local(0, {1});
  }
  EXPECT_EQ(wins, 50);
}

TEST(GaussScore, PlantedParentRaisesScore) {
  Rng rng(3);
  GaussScore s(plain_numeric(sem(weights(2, {{0, 1, 2.0}}), 500, rng), names(2)), 1.0);
  EXPECT_GT(s.local(1, {0}), s.local(1, {}) + 100);
}

TEST(GaussScore, SingularParentsRejected) {
  Rng rng(4);
  Matrix x = noise(50, 3, rng);
  x.col(2) = 2 * x.col(1);
  GaussScore s(plain_numeric(x, names(3)), 0.5);
  EXPECT_EQ(s.local(0, {1, 2}), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(s.local(0, {0}), ValidationError);
  Matrix c = noise(50, 2, rng);
  c.col(1).setConstant(1.0);
  EXPECT_THROW(GaussScore(plain_numeric(c, names(2))), DataError);
}

TEST(HillClimb, ChainRecoversEquivalenceClass) {
  const auto nm = names(4);
  Dag truth(nm);
  truth.try_add(0, 1);
  truth.try_add(1, 2);
  truth.try_add(2, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto d = plain_numeric(sem(weights(4, {{0, 1, 0.9}, {1, 2, -0.8}, {2, 3, 0.7}}), 2000, rng), nm);
    const auto hc = hill_climb(d);
    EXPECT_TRUE(markov_equivalent(hc.graph, truth)) << seed;
  }
}

TEST(HillClimb, IndependentColumnsGiveEmptyGraph) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed + 40);
    empty += hill_climb(plain_numeric(noise(300, 5, rng), names(5))).graph.edge_count() == 0;
  }
  EXPECT_GE(empty, 27);
}

TEST(HillClimb, SingleVariable) {
  Rng rng(5);
  const auto hc = hill_climb(plain_numeric(noise(30, 1, rng), names(1)));
  EXPECT_EQ(hc.graph.edge_count(), 0u);
  EXPECT_EQ(hc.iterations, 0u);
}

TEST(HillClimb, TraceReplaysWithOneEdgeChangePerStep) {
  Rng rng(6);
  const auto nm = names(7);
  const auto d = plain_numeric(
      sem(weights(7, {{0, 2, 1}, {1, 2, -1}, {2, 4, 0.7}, {3, 4, 0.5}, {4, 6, 1.2}, {5, 6, -0.4}, {0, 5, 0.6}}), 400, rng),
      nm);
  GaussScore score(d, 0.5);
  SearchOptions opt;
  opt.record_trace = true;
  for (int variant = 0; variant < 2; ++variant) {
    const auto res = variant == 0 ? hill_climb(score, nm, opt) : tabu_search(score, nm, TabuOptions{5, 8}, opt);
    Dag g(nm);
    double last = score.total(g);
    double best = last;
    for (const auto& mv : res.trace) {
      const auto before = g.edges();
      if (mv.kind == MoveKind::add) {
        ASSERT_TRUE(g.try_add(mv.from, mv.to));
      } else if (mv.kind == MoveKind::remove) {
        g.remove_edge(mv.from, mv.to);
      } else {
        ASSERT_TRUE(g.try_reverse(mv.from, mv.to));
      }
      ASSERT_EQ(g.topological_order().size(), nm.size());
      const auto after = g.edges();
      EdgeSet diff;
      std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(diff));
      EXPECT_EQ(diff.size(), mv.kind == MoveKind::reverse ? 2u : 1u);
      // Incremental delta equals the from-scratch change.
      const double now = score.total(g);
      EXPECT_NEAR(now - last, mv.delta, 1e-6 * std::max(1.0, std::fabs(now)));
      if (variant == 0) {
        EXPECT_GT(now, last);
      }
      last = now;
      best = std::max(best, now);
    }
    if (variant == 0) {
      EXPECT_TRUE(res.graph.edges() == g.edges());
    }
    // Decomposability: cached total equals uncached recomputation.
    double fresh = 0;
    for (std::size_t v = 0; v < nm.size(); ++v) fresh += score.compute(v, res.graph.parents(v));
    EXPECT_NEAR(res.score, fresh, 1e-6 * std::fabs(fresh));
    EXPECT_NEAR(res.score, best, 1e-6 * std::fabs(best));
  }
}

TEST(HillClimb, TiersForbidBackwardEdges) {
  Rng rng(7);
  Matrix x = noise(400, 3, rng);
  for (Eigen::Index t = 1; t < 400; ++t) x(t, 1) += 0.9 * x(t - 1, 0);
  const auto d = two_slice_numeric(build_lagged(x, {"p", "q", "r"}, 1));
  EXPECT_EQ(d.names, (std::vector<std::string>{"p@t-1", "q@t-1", "r@t-1", "p", "q", "r"}));
  SearchOptions opt;
  opt.tiers = d.tiers;
  const auto hc = hill_climb(GaussScore(d), d.names, opt);
  EXPECT_TRUE(hc.graph.has_edge(0, 4));
  for (auto [a, b] : hc.graph.edges()) EXPECT_LE(d.tiers[a], d.tiers[b]);
}

TEST(Tabu, NeverWorseThanHillClimb) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const auto d = plain_numeric(
        sem(weights(6, {{0, 1, 1.2}, {0, 2, -0.7}, {1, 3, 0.9}, {2, 3, -1.1}, {3, 4, 0.5}, {1, 5, 0.8}}), 150, rng),
        names(6));
    GaussScore score(d, 0.5);
    const auto hc = hill_climb(score, d.names);
    const auto tabu = tabu_search(score, d.names, TabuOptions{});
    EXPECT_GE(tabu.score, hc.score) << seed;
    EXPECT_NEAR(tabu.score, score.total(tabu.graph), 1e-6 * std::fabs(tabu.score));
  }
}

TEST(Tabu, ChainSameOrBetter) {
  Rng rng(8);
  const auto d = plain_numeric(sem(weights(4, {{0, 1, 0.9}, {1, 2, -0.8}, {2, 3, 0.7}}), 2000, rng), names(4));
  EXPECT_GE(tabu_search(d).score, hill_climb(d).score);
}

TEST(Tabu, EscapesDiamondLocalOptimum) {
  // a -> b, a -> c, b -> d, c -> d with strong weights and columns shuffled:
  // greedy search tends to commit to a wrong orientation early. The global
  // optimum comes from enumerating all 543 four-node DAGs.
  const auto nm = names(4);
  const auto dags = all_dags(nm);
  ASSERT_EQ(dags.size(), 543u);
  const auto w = weights(4, {{0, 1, 1.9936}, {0, 2, 0.9849}, {1, 3, -1.8854}, {2, 3, -0.8945}});
  const int perm[4] = {3, 1, 0, 2};
  int stuck = 0, escaped = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed * 7 + 1));
    const Matrix x = sem(w, 200, rng);
    Matrix y(x.rows(), 4);
    for (int j = 0; j < 4; ++j) y.col(j) = x.col(perm[j]);
    GaussScore score(plain_numeric(y, nm), 0.5);
    double global = -std::numeric_limits<double>::infinity();
    for (const auto& g : dags) global = std::max(global, score.total(g));
    const auto hc = hill_climb(score, nm);
    const auto tabu = tabu_search(score, nm, TabuOptions{10, 10});
    EXPECT_LE(tabu.score, global + 1e-6);
    if (hc.score < global - 1e-6) {
      ++stuck;
      escaped += tabu.score > hc.score + 1e-6;
    }
  }
  ASSERT_GE(stuck, 10);
  EXPECT_GE(2 * escaped, stuck);
}

TEST(Tabu, Preconditions) {
  Rng rng(9);
  const auto d = plain_numeric(noise(20, 3, rng), names(3));
  EXPECT_THROW(tabu_search(d, 0.5, TabuOptions{0, 10}), ValidationError);
  EXPECT_THROW(GaussScore(d, -1.0), ValidationError);
}

TEST(CiTest, MatchesDirectComputation) {
  Rng rng(10);
  const Matrix x = sem(weights(5, {{0, 1, 0.7}, {1, 2, 0.5}, {0, 3, -0.4}, {3, 4, 0.9}}), 60, rng);
  const auto d = plain_numeric(x, names(5));
  CiTest test(d, 0.05);
  const std::vector<std::vector<std::size_t>> zs{{}, {1}, {3, 4}, {1, 3, 4}};
  for (const auto& z : zs) {
    std::vector<std::size_t> cols{0, 2};
    cols.insert(cols.end(), z.begin(), z.end());
    Matrix sub(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(cols[c]));
    const double pcor = partial_correlations(shrink_correlation(sub))(0, 1);
    const double mi = -0.5 * std::log(1 - pcor * pcor);
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(1.0), 2 * 60 * mi));
    const auto r = test(0, 2, z);
    EXPECT_NEAR(r.pcor, pcor, 1e-12);
    EXPECT_NEAR(r.mutual_information, mi, 1e-12);
    EXPECT_NEAR(r.p_value, p, 1e-10);
    EXPECT_EQ(r.independent, p > 0.05);
  }
}

TEST(CiTest, IndependentPairsMostlyAccepted) {
  int independent = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed + 1000);
    CiTest test(plain_numeric(noise(1000, 2, rng), names(2)));
    independent += test(0, 1, {}).independent;
  }
  EXPECT_GE(independent, 185);
}

TEST(CiTest, NearCopyStronglyDependent) {
  Rng rng(11);
  Matrix x = noise(200, 2, rng);
  x.col(1) = x.col(0) + 0.05 * x.col(1);
  const auto r = CiTest(plain_numeric(x, names(2)))(0, 1, {});
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_FALSE(r.independent);
}

TEST(CiTest, ZeroPcorIsUnitPValue) {
  // Two exactly orthogonal centred columns.
  Matrix x(4, 2);
  x << 1, 1, -1, 1, 1, -1, -1, -1;
  const auto r = CiTest(plain_numeric(x, names(2)))(0, 1, {});
  EXPECT_EQ(r.pcor, 0.0);
  EXPECT_EQ(r.mutual_information, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(CiTest, Preconditions) {
  Rng rng(12);
  const auto d = plain_numeric(noise(6, 5, rng), names(5));
  CiTest test(d);
  EXPECT_THROW(test(0, 0, {}), ValidationError);
  EXPECT_THROW(test(0, 1, {1}), ValidationError);
  EXPECT_THROW(test(0, 1, {2, 3, 4}), ValidationError);
  EXPECT_NO_THROW(test(0, 1, {2, 3}));
  EXPECT_THROW(CiTest(d, 0.0), ValidationError);
}

TEST(PcStable, ColliderOriented) {
  Rng rng(13);
  const auto d = plain_numeric(sem(weights(3, {{0, 2, 0.8}, {1, 2, 0.8}}), 5000, rng), names(3));
  const auto pc = pc_stable(d, CiTest(d));
  EXPECT_EQ(pc.graph.directed_edges(), (EdgeSet{{0, 2}, {1, 2}}));
  EXPECT_TRUE(pc.graph.undirected_edges().empty());
}

TEST(PcStable, ChainLeftUndirected) {
  Rng rng(14);
  const auto d = plain_numeric(sem(weights(3, {{0, 1, 0.8}, {1, 2, 0.8}}), 3000, rng), names(3));
  const auto pc = pc_stable(d, CiTest(d));
  EXPECT_TRUE(pc.graph.directed_edges().empty());
  EXPECT_EQ(pc.graph.undirected_edges(), (EdgeSet{{0, 1}, {1, 2}}));
  EXPECT_EQ(pc.sepsets.at({0, 2}), std::vector<std::size_t>{1});
}

TEST(PcStable, IndependentAndTwoVariable) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 200);
    const auto d = plain_numeric(noise(300, 5, rng), names(5));
    empty += pc_stable(d, CiTest(d)).graph.edge_count() == 0;
  }
  EXPECT_GE(empty, 16);
  Rng rng(15);
  const auto d = plain_numeric(sem(weights(2, {{0, 1, 1.5}}), 300, rng), names(2));
  const auto pc = pc_stable(d, CiTest(d));
  EXPECT_EQ(pc.graph.undirected_edges(), (EdgeSet{{0, 1}}));
  EXPECT_TRUE(pc.graph.directed_edges().empty());
}

TEST(PcStable, ColumnOrderInvariant) {
  Rng rng(16);
  const auto w = weights(7, {{0, 2, 0.9}, {1, 2, -0.8}, {2, 3, 0.7}, {3, 5, 0.6}, {4, 5, 0.8}, {0, 6, 0.5}, {5, 6, -0.7}});
  const Matrix x = sem(w, 400, rng);
  const auto nm = names(7);
  const auto base_data = plain_numeric(x, nm);
  const auto base = named_edges(pc_stable(base_data, CiTest(base_data)).graph);
  EXPECT_GE(base.size(), 5u);
  std::vector<std::size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffle(99);
  for (int trial = 0; trial < 6; ++trial) {
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[shuffle.below(i)]);
    Matrix y(x.rows(), 7);
    std::vector<std::string> pn;
    for (std::size_t j = 0; j < 7; ++j) {
      y.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(perm[j]));
      pn.push_back(nm[perm[j]]);
    }
    const auto d = plain_numeric(y, pn);
    EXPECT_EQ(named_edges(pc_stable(d, CiTest(d)).graph), base) << trial;
  }
}

TEST(PcStable, TiersOrientAcrossSlices) {
  Rng rng(17);
  Matrix x = noise(600, 2, rng);
  for (Eigen::Index t = 1; t < x.rows(); ++t) x(t, 1) += 0.8 * x(t - 1, 0);
  const auto d = two_slice_numeric(build_lagged(x, {"u", "v"}, 1));
  ConstraintOptions opt;
  opt.tiers = d.tiers;
  const auto pc = pc_stable(d, CiTest(d), opt);
  EXPECT_TRUE(pc.graph.has_directed(0, 3));
  for (auto [a, b] : pc.graph.directed_edges()) EXPECT_LE(d.tiers[a], d.tiers[b]);
}

TEST(Iamb, ChainBlanket) {
  Rng rng(18);
  const auto d = plain_numeric(sem(weights(3, {{0, 1, 0.8}, {1, 2, 0.8}}), 3000, rng), names(3));
  CiTest test(d);
  EXPECT_EQ(iamb_blanket(1, 3, test), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(iamb_blanket(0, 3, test), (std::vector<std::size_t>{1}));
  const auto res = iamb(d, test);
  EXPECT_EQ(res.blankets[1], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(res.graph.undirected_edges(), (EdgeSet{{0, 1}, {1, 2}}));
}

TEST(Iamb, ColliderSpousesSeparatedAndOriented) {
  Rng rng(19);
  const auto d = plain_numeric(sem(weights(3, {{0, 2, 0.8}, {1, 2, 0.8}}), 5000, rng), names(3));
  const auto res = iamb(d, CiTest(d));
  EXPECT_EQ(res.blankets[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(res.graph.directed_edges(), (EdgeSet{{0, 2}, {1, 2}}));
}

TEST(Iamb, IndependentDataEmptyBlankets) {
  // Each pair is a separate level-alpha decision, so the per-pair false
  // blanket rate is what is bounded; two variables give one decision.
  std::size_t false_pairs = 0, pairs = 0;
  int empty_two = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 300);
    const auto d = plain_numeric(noise(300, 5, rng), names(5));
    const auto res = iamb(d, CiTest(d));
    for (const auto& b : res.blankets) false_pairs += b.size();
    pairs += 20;
    const auto d2 = plain_numeric(noise(300, 2, rng), names(2));
    const auto r2 = iamb(d2, CiTest(d2));
    empty_two += r2.blankets[0].empty() && r2.blankets[1].empty();
  }
  EXPECT_LE(static_cast<double>(false_pairs), 0.05 * static_cast<double>(pairs));
  EXPECT_GE(empty_two, 36);
}

TEST(Iamb, BlanketsSymmetric) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 400);
    const auto d = plain_numeric(
        sem(weights(6, {{0, 1, 0.5}, {1, 2, 0.4}, {0, 3, 0.3}, {2, 4, 0.6}, {3, 4, 0.2}, {4, 5, 0.5}}), 120, rng),
        names(6));
    const auto res = iamb(d, CiTest(d));
    for (std::size_t x = 0; x < 6; ++x)
      for (auto y : res.blankets[x]) {
        const auto& by = res.blankets[y];
        EXPECT_TRUE(std::find(by.begin(), by.end(), x) != by.end());
      }
    for (auto [a, b] : res.graph.undirected_edges()) {
      const auto& ba = res.blankets[a];
      EXPECT_TRUE(std::find(ba.begin(), ba.end(), b) != ba.end());
    }
  }
}
