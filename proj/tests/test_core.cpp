#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include <dynspan/core.hpp>

using namespace dynspan;

namespace {

Config cfg_c2k3() {
  ConfigOverrides ov;
  ov.c = 2.0;
  ov.k = 3;
  ov.lambda = 8;
  ov.eps_prime = 0.1;
  return derive_config(2, 0.5, 2.0, Mode::practical, ov);
}

}  // namespace

TEST(DeriveConfig, TheoryLambdaIsForty) {
  const Config c = derive_config(2, 0.5, 2.0, Mode::theory);
  EXPECT_DOUBLE_EQ(c.lambda, 4.0 * 2.5 / 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(c.lambda, 40.0);
  for (const ConfigCheck& k : c.checks) EXPECT_TRUE(k.holds) << k.name;
}

TEST(DeriveConfig, PracticalEpsPrimeClosedForm) {
  ConfigOverrides ov;
  ov.lambda = 8;
  ov.c = 1.01;
  const Config c = derive_config(2, 0.5, 2.0, Mode::practical, ov);
  EXPECT_NEAR(c.eps_prime, (1.0 + 1.0 / 64.0) / 1.01 - 1.0, 1e-15);
  EXPECT_NEAR(c.eps_prime, 0.00556, 1e-5);
  EXPECT_GT(c.eps_prime, 0.0);
}

TEST(DeriveConfig, CTooLargeIsInfeasible) {
  ConfigOverrides ov;
  ov.lambda = 40;
  ov.c = 1.2;
  try {
    derive_config(2, 0.5, 2.0, Mode::practical, ov);
    FAIL() << "expected infeasible config";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible_config);
  }
}

TEST(DeriveConfig, RejectsBadInputs) {
  EXPECT_THROW(derive_config(2, 0.0, 2.0, Mode::practical), Error);
  EXPECT_THROW(derive_config(2, -1.0, 2.0, Mode::practical), Error);
  EXPECT_THROW(derive_config(2, 0.5, 1.0, Mode::practical), Error);
  EXPECT_THROW(derive_config(0, 0.5, 2.0, Mode::practical), Error);
  ConfigOverrides ov;
  ov.eps_prime = 0.01;
  EXPECT_THROW(derive_config(2, 0.5, 2.0, Mode::theory, ov), Error);
}

TEST(DeriveConfig, Deterministic) {
  ConfigOverrides ov;
  ov.lambda = 8;
  ov.c = 1.005;
  ov.k = 8;
  const Config a = derive_config(3, 0.4, 2.0, Mode::practical, ov);
  const Config b = derive_config(3, 0.4, 2.0, Mode::practical, ov);
  EXPECT_EQ(std::memcmp(&a.C5, &b.C5, sizeof(double)), 0);
  EXPECT_EQ(a.d_max, b.d_max);
  EXPECT_EQ(a.eps_prime, b.eps_prime);
  EXPECT_EQ(a.C, b.C);
}

TEST(DeriveConfig, TheoryInequalitiesRecomputed) {
  const Config c = derive_config(2, 0.5, 2.0, Mode::theory);
  const double e = c.eps, ep = c.eps_prime;
  EXPECT_NEAR(c.eps, std::sqrt(1.5) - 1.0, 1e-15);
  EXPECT_LE(ep, (1.0 + 1.0 / (c.lambda * c.lambda)) / c.c - 1.0 + 1e-15);
  const double kd = static_cast<double>(c.k);
  EXPECT_GE(kd, std::log1p(c.C3 / ((c.cphi - 1.0) * (e - ep))) / std::log(c.c));
  EXPECT_GE(kd, std::log1p(2.0 * c.C5 / (e - ep)) / std::log(c.c));
}

TEST(DeriveConfig, PracticalReportsWaivedChecks) {
  ConfigOverrides ov;
  ov.lambda = 8;
  ov.c = 1.05;
  ov.k = 8;
  ov.eps_prime = 0.05;
  const Config c = derive_config(2, 0.5, 2.0, Mode::practical, ov);
  EXPECT_TRUE(c.eps_prime_pinned);
  bool any_waived = false;
  for (const ConfigCheck& k : c.checks) any_waived |= k.waived;
  EXPECT_TRUE(any_waived);
  EXPECT_EQ(c.block_len, 3);
}

TEST(PairBucket, SpecExamples) {
  EXPECT_EQ(bucket_of_length(1.0, 2.0, 3), (BucketCoord{0, 0}));
  EXPECT_EQ(bucket_of_length(5.0, 2.0, 3), (BucketCoord{2, 0}));
  EXPECT_EQ(bucket_of_length(0.5, 2.0, 3), (BucketCoord{2, -1}));

  const Config cfg = cfg_c2k3();
  PointStore pts(2);
  const PointId a = pts.insert(std::vector<double>{0, 0});
  const PointId b = pts.insert(std::vector<double>{3, 4});
  EXPECT_EQ(pair_bucket(cfg, pts, a, b), (BucketCoord{2, 0}));
  EXPECT_THROW(bucket_of_length(0.0, 2.0, 3), Error);
}

TEST(PairBucket, BracketPropertyRandom) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-100, 100), cdist(1.001, 3.0);
  std::uniform_int_distribution<int> kdist(1, 12);
  for (int t = 0; t < 20000; ++t) {
    const double c = cdist(rng);
    const int k = kdist(rng);
    const double len = std::hypot(coord(rng), coord(rng));
    const BucketCoord bc = bucket_of_length(len, c, k);
    ASSERT_GE(bc.index, 0);
    ASSERT_LT(bc.index, k);
    const double m = static_cast<double>(k * bc.size + bc.index);
    // Relative slack matches the documented boundary snap.
    ASSERT_LE(std::pow(c, m), len * (1 + 1e-9)) << len << " " << c << " " << k;
    ASSERT_LT(len, std::pow(c, m + 1) * (1 + 1e-9));
  }
}

TEST(PairBucket, ExactPowersSnap) {
  for (int m = -20; m <= 20; ++m) {
    const BucketCoord bc = bucket_of_length(std::pow(1.05, m), 1.05, 8);
    EXPECT_EQ(bc.size * 8 + bc.index, m);
  }
}

TEST(Distance, Examples) {
  PointStore pts(2);
  const PointId a = pts.insert(std::vector<double>{0, 0});
  const PointId b = pts.insert(std::vector<double>{3, 4});
  const PointId c = pts.insert(std::vector<double>{1, 1});
  EXPECT_DOUBLE_EQ(distance(pts, a, b), 5.0);
  EXPECT_DOUBLE_EQ(distance(pts, c, c), 0.0);
  EXPECT_DOUBLE_EQ(distance(pts, a, c), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(distance(pts, b, a), distance(pts, a, b));
}

TEST(PointStore, DuplicatesAndDeadIds) {
  PointStore pts(2);
  const PointId a = pts.insert(std::vector<double>{1, 2});
  try {
    pts.insert(std::vector<double>{1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_point);
  }
  EXPECT_THROW(pts.insert(std::vector<double>{1}), Error);
  EXPECT_THROW(pts.insert(std::vector<double>{NAN, 0}), Error);
  pts.erase(a);
  EXPECT_FALSE(pts.alive(a));
  EXPECT_THROW(pts.erase(a), Error);
  // Coordinates may be reused once the old point is gone; ids never are.
  const PointId b = pts.insert(std::vector<double>{1, 2});
  EXPECT_EQ(idx(b), 1u);
  EXPECT_EQ(pts.size(), 1u);
}

TEST(Levels, CeilLevelAndFloorDiv) {
  EXPECT_EQ(ceil_level(10.0, 2.0), 4);
  EXPECT_EQ(ceil_level(16.0, 2.0), 4);
  EXPECT_EQ(ceil_level(10.0 / 8.0, 2.0), 1);
  EXPECT_EQ(ceil_level(8.0, 2.0), 3);
  EXPECT_EQ(ceil_level(0.6, 2.0), 0);
  EXPECT_EQ(ceil_level(0.5, 2.0), -1);
  EXPECT_EQ(floor_div(-1, 3), -1);
  EXPECT_EQ(floor_mod(-1, 3), 2);
  EXPECT_EQ(floor_div(7, 3), 2);
}
