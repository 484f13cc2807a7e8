#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <dynspan/engine.hpp>
#include <dynspan/oracle.hpp>
#include <dynspan/workload.hpp>

using namespace dynspan;

namespace {

Config practical() {
  ConfigOverrides ov;
  ov.lambda = 8;
  ov.c = 1.05;
  ov.k = 8;
  ov.eps_prime = 0.1;
  return derive_config(2, 0.5, 2.0, Mode::practical, ov);
}

PointStore store(const std::vector<std::vector<double>>& xs) {
  PointStore pts(static_cast<int>(xs.front().size()));
  for (const auto& x : xs) pts.insert(x);
  return pts;
}

PointPair pp(std::size_t a, std::size_t b) { return PointPair(make_id(a), make_id(b)); }

// Random points with every pair registered and a random membership. Small
// boxes give several sizes under c = 1.05, k = 8.
struct RandomInstance {
  RandomInstance(const Config& c, std::size_t n, std::mt19937_64& rng) : cfg(c), pts(2), ls(cfg, pts) {
    std::uniform_real_distribution<double> coord(0, 20);
    std::bernoulli_distribution coin(0.5);
    while (pts.size() < n) {
      try {
        pts.insert(std::vector<double>{coord(rng), coord(rng)});
      } catch (const Error&) {
      }
    }
    const auto ids = pts.sorted_alive_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const PointPair e(ids[i], ids[j]);
        ls.register_pair({e, pair_bucket(cfg, pts, e.a, e.b), pts.distance(e.a, e.b)}, coin(rng));
      }
  }
  const Config& cfg;
  PointStore pts;
  LightSpanner ls;
};

}  // namespace

TEST(ExactStretch, Examples) {
  const PointStore two = store({{0, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(oracle::exact_stretch(two, {pp(0, 1)}).max_ratio, 1.0);

  const PointStore tri = store({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  const auto r = oracle::exact_stretch(tri, {pp(0, 1), pp(1, 2)});
  EXPECT_NEAR(r.max_ratio, 2.0, 1e-12);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(*r.witness, pp(0, 2));

  EXPECT_EQ(oracle::exact_stretch(tri, {pp(0, 1)}).max_ratio, kInf);
  EXPECT_THROW(oracle::exact_stretch(store({{0, 0}}), {}), Error);
}

TEST(Mst, Examples) {
  EXPECT_DOUBLE_EQ(oracle::mst_weight(store({{0, 0}})), 0.0);
  EXPECT_DOUBLE_EQ(oracle::mst_weight(store({{0}, {1}, {2}})), 2.0);
  EXPECT_DOUBLE_EQ(oracle::mst_weight(store({{0, 0}, {1, 0}, {1, 1}, {0, 1}})), 3.0);
}

TEST(AspectRatio, Examples) {
  EXPECT_DOUBLE_EQ(oracle::aspect_ratio(store({{0, 0}, {3, 4}})), 1.0);
  EXPECT_DOUBLE_EQ(oracle::aspect_ratio(store({{0}, {1}, {10}})), 10.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 100);
  PointStore pts(3);
  for (int i = 0; i < 40; ++i) pts.insert(std::vector<double>{u(rng), u(rng), u(rng)});
  double lo = kInf, hi = 0;
  const auto ids = pts.sorted_alive_ids();
  for (PointId a : ids)
    for (PointId b : ids)
      if (a != b) {
        lo = std::min(lo, pts.distance(a, b));
        hi = std::max(hi, pts.distance(a, b));
      }
  EXPECT_DOUBLE_EQ(oracle::aspect_ratio(pts), hi / lo);
}

TEST(Separation, CleanAndCorrupted) {
  PointStore pts(2);
  Hierarchy h(pts, 2.0);
  h.insert(pts.insert(std::vector<double>{0, 0}));
  EXPECT_TRUE(oracle::verify_separation(h).empty());
  h.insert(pts.insert(std::vector<double>{10, 0}));
  EXPECT_TRUE(oracle::verify_separation(h).empty());
  EXPECT_TRUE(oracle::verify_tree(h).empty());

  // Point 1 pretends to reach level 4, where the two centers are too close.
  const std::vector<Hierarchy::ChainSpec> bad{{make_id(0), 0, 5, std::nullopt}, {make_id(1), 4, 4, make_id(0)}};
  const Hierarchy broken = Hierarchy::from_chains(pts, 2.0, bad, make_id(0));
  const auto v = oracle::verify_separation(broken);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].level, 4);
  EXPECT_EQ(v[0].pair, pp(0, 1));
}

TEST(Tree, CorruptedParent) {
  PointStore pts(2);
  pts.insert(std::vector<double>{0, 0});
  pts.insert(std::vector<double>{10, 0});
  const std::vector<Hierarchy::ChainSpec> far{{make_id(0), 0, 4, std::nullopt}, {make_id(1), 1, 1, make_id(0)}};
  const auto v = oracle::verify_tree(Hierarchy::from_chains(pts, 2.0, far, make_id(0)));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].what, "parent does not cover child");
}

TEST(BruteDStar, TrivialCases) {
  const Config cfg = practical();
  PointStore pts(2);
  LightSpanner ls(cfg, pts);
  const PointId u = pts.insert(std::vector<double>{0, 0}), v = pts.insert(std::vector<double>{10, 0});
  EXPECT_EQ(oracle::brute_dstar(cfg, pts, ls, 7, u, v), kInf);
  const PointId w = pts.insert(std::vector<double>{5, 0.1});
  const double legs = pts.distance(u, w) + pts.distance(w, v);
  EXPECT_NEAR(oracle::brute_dstar(cfg, pts, ls, 7, u, v), (1 + cfg.eps) * legs, 1e-12);
}

// Exhaustive paths, Floyd-Warshall and the pruned search agree.
TEST(BruteDStar, MatchesDStarOnSmallInstances) {
  const Config cfg = practical();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> size(3, 8);
  std::size_t finite = 0;
  for (int t = 0; t < 100; ++t) {
    RandomInstance inst(cfg, size(rng), rng);
    for (PointPair e : inst.ls.registered_pairs()) {
      const std::int64_t i = inst.ls.entry(e).coord.index;
      const double brute = oracle::brute_dstar(cfg, inst.pts, inst.ls, i, e.a, e.b);
      const double cap = 1e9;
      const double fast = inst.ls.d_star(i, e.a, e.b, cap);
      const double fw = oracle::reference_dstar(cfg, inst.pts, inst.ls, i, e.a, e.b, cap);
      if (brute == kInf) {
        ASSERT_EQ(fast, kInf);
        ASSERT_EQ(fw, kInf);
        continue;
      }
      ++finite;
      ASSERT_NEAR(fast, brute, 1e-9 * brute);
      ASSERT_NEAR(fw, brute, 1e-9 * brute);
    }
  }
  EXPECT_GT(finite, 100u);
}

TEST(VerifyInvariants, MatchesCheckPair) {
  const Config cfg = practical();
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> size(2, 30);
  std::size_t seen = 0;
  for (int t = 0; t < 200; ++t) {
    RandomInstance inst(cfg, size(rng), rng);
    const auto slow = oracle::verify_invariants(cfg, inst.pts, inst.ls);
    const auto fast = inst.ls.scan();
    ASSERT_EQ(slow.size(), fast.size());
    for (std::size_t j = 0; j < slow.size(); ++j) {
      ASSERT_EQ(slow[j].kind, fast[j].kind);
      ASSERT_EQ(slow[j].pair, fast[j].pair);
      ASSERT_EQ(slow[j].index, fast[j].index);
      if (slow[j].dstar == kInf) {
        ASSERT_EQ(fast[j].dstar, kInf);
      } else {
        ASSERT_NEAR(slow[j].dstar, fast[j].dstar, 1e-9 * slow[j].dstar);
      }
    }
    seen += slow.size();
  }
  EXPECT_GT(seen, 0u);
}

TEST(VerifyInvariants, EmptyAndConverged) {
  const Config cfg = practical();
  PointStore pts(2);
  LightSpanner ls(cfg, pts);
  EXPECT_TRUE(oracle::verify_invariants(cfg, pts, ls).empty());
  DynamicSpanner ds(cfg);
  for (const TraceOp& op : gen_clustered(60, 2, 2, 4, 15.0).ops) ds.insert(op.coords);
  EXPECT_TRUE(oracle::verify_invariants(cfg, ds.points(), ds.light()).empty());
}

TEST(Greedy, Examples) {
  EXPECT_EQ(oracle::greedy_spanner(store({{0, 0}, {1, 0}}), 2.0).size(), 1u);
  const auto line = oracle::greedy_spanner(store({{0}, {1}, {2}}), 1.5);
  EXPECT_EQ(line, (std::vector<PointPair>{pp(0, 1), pp(1, 2)}));
  // The last side's detour is 3 > 2, so all four sides are kept.
  EXPECT_EQ(oracle::greedy_spanner(store({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 2.0).size(), 4u);
  // At t = 3 the fourth side is covered.
  EXPECT_EQ(oracle::greedy_spanner(store({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 3.0).size(), 3u);
  EXPECT_THROW(oracle::greedy_spanner(store({{0}, {1}}), 1.0), Error);
}

TEST(Greedy, StretchWithinT) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PointStore pts(2);
    for (const TraceOp& op : gen_uniform(80, 2, seed).ops) pts.insert(op.coords);
    const auto g = oracle::greedy_spanner(pts, 1.5);
    EXPECT_LE(oracle::exact_stretch(pts, g).max_ratio, 1.5 + 1e-12);
    EXPECT_GE(oracle::edge_weight(pts, g), oracle::mst_weight(pts) - 1e-9);
  }
}

TEST(Report, CleanRunAndJson) {
  const Config cfg = practical();
  DynamicSpanner ds(cfg);
  for (const TraceOp& op : gen_uniform(30, 2, 4).ops) ds.insert(op.coords);
  const auto rep = ds.verify(30);
  EXPECT_TRUE(rep.sparse_matches_rebuild);
  EXPECT_TRUE(rep.invariants_match_check);
  EXPECT_TRUE(rep.invariant_violations.empty());
  EXPECT_EQ(rep.n, 30u);
  EXPECT_GE(rep.lightness, 1.0);
  const auto j = oracle::to_json(rep);
  EXPECT_EQ(j.at("op_seq"), 30);
  EXPECT_DOUBLE_EQ(j.at("max_stretch").get<double>(), rep.max_stretch);
}
