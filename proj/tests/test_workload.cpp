#include <gtest/gtest.h>

#include <cmath>

#include <dynspan/workload.hpp>

using namespace dynspan;

namespace {

std::size_t count_kind(const Trace& t, TraceOp::Kind k) {
  std::size_t n = 0;
  for (const TraceOp& op : t.ops) n += op.kind == k;
  return n;
}

Errc parse_error_code(const std::string& text) {
  try {
    parse_trace(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

}  // namespace

TEST(GenUniform, SinglePointAndDeterminism) {
  const Trace one = gen_uniform(1, 2, 7);
  ASSERT_EQ(one.ops.size(), 1u);
  EXPECT_EQ(one.ops[0].kind, TraceOp::Kind::insert);
  EXPECT_EQ(render_trace(gen_uniform(100, 2, 7)), render_trace(gen_uniform(100, 2, 7)));
  EXPECT_NE(render_trace(gen_uniform(100, 2, 7)), render_trace(gen_uniform(100, 2, 8)));
  EXPECT_THROW(gen_uniform(0, 2, 7), Error);
}

TEST(GenUniform, ChiSquarePerAxis) {
  const Trace t = gen_uniform(10000, 2, 42);
  constexpr int bins = 20;
  // 0.999 quantile of chi-square with 19 degrees of freedom.
  constexpr double critical = 43.82;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<int> h(bins, 0);
    for (const TraceOp& op : t.ops) {
      const double x = op.coords[axis];
      ASSERT_GE(x, 0.0);
      ASSERT_LT(x, 1000.0);
      ++h[static_cast<int>(x / 1000.0 * bins)];
    }
    const double expect = 10000.0 / bins;
    double chi = 0;
    for (int c : h) chi += (c - expect) * (c - expect) / expect;
    EXPECT_LT(chi, critical) << "axis " << axis;
  }
}

TEST(GenClustered, DeterminismAndVariance) {
  EXPECT_EQ(gen_clustered(1, 3, 2, 4, 1.0).ops.size(), 1u);
  EXPECT_EQ(gen_clustered(50, 2, 9, 3, 5.0), gen_clustered(50, 2, 9, 3, 5.0));
  const Trace t = gen_clustered(5000, 2, 3, 1, 10.0);
  for (int axis = 0; axis < 2; ++axis) {
    double mean = 0;
    for (const TraceOp& op : t.ops) mean += op.coords[axis];
    mean /= 5000;
    double var = 0;
    for (const TraceOp& op : t.ops) var += (op.coords[axis] - mean) * (op.coords[axis] - mean);
    var /= 4999;
    // The sample variance has relative standard error about sqrt(2/n) = 2%.
    EXPECT_NEAR(var, 100.0, 8.0) << "axis " << axis;
  }
  EXPECT_THROW(gen_clustered(10, 2, 1, 0, 1.0), Error);
  EXPECT_THROW(gen_clustered(10, 2, 1, 2, 0.0), Error);
}

TEST(GenChurn, ZeroDeletesIsInsertOnly) {
  const Trace t = gen_churn(10, 50, 1, 0.0);
  EXPECT_EQ(count_kind(t, TraceOp::Kind::erase), 0u);
  EXPECT_EQ(t.ops.size(), 60u);
}

TEST(GenChurn, AliveNeverBelowTwo) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Trace t = gen_churn(3, 300, seed, 0.9);
    std::size_t alive = 0;
    for (const TraceOp& op : t.ops) {
      if (op.kind == TraceOp::Kind::insert) {
        ++alive;
      } else {
        --alive;
        ASSERT_GE(alive, 2u);
      }
    }
    // Replays cleanly through the parser's liveness checks.
    EXPECT_EQ(parse_trace(render_trace(t)), t);
  }
}

TEST(GenChurn, DeleteFrequencyWithinThreeSigma) {
  const Trace t = gen_churn(100, 10000, 5, 0.3);
  const double deletes = static_cast<double>(count_kind(t, TraceOp::Kind::erase));
  const double sigma = std::sqrt(10000 * 0.3 * 0.7);
  EXPECT_NEAR(deletes, 3000.0, 3 * sigma);
  EXPECT_THROW(gen_churn(10, 10, 1, 1.0), Error);
  EXPECT_THROW(gen_churn(10, 10, 1, -0.1), Error);
}

TEST(GenChurn, SpreadPlacementWidensAspectRatio) {
  Placement pl;
  pl.kind = Placement::Kind::spread;
  pl.levels = 12;
  const Trace t = gen_churn(40, 0, 3, 0.3, 2, pl);
  double lo = kInf, hi = 0;
  for (std::size_t i = 0; i < t.ops.size(); ++i)
    for (std::size_t j = i + 1; j < t.ops.size(); ++j) {
      const double d = std::hypot(t.ops[i].coords[0] - t.ops[j].coords[0], t.ops[i].coords[1] - t.ops[j].coords[1]);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  EXPECT_GT(std::log2(hi / lo), 12.0);
  EXPECT_EQ(t.params.at("placement"), "spread");
}

TEST(ParseTrace, Examples) {
  const Trace t = parse_trace("dim 2\n+ 0 0\n+ 10 0\n- 0\n");
  ASSERT_EQ(t.ops.size(), 3u);
  EXPECT_EQ(t.dim, 2);
  EXPECT_EQ(t.ops[1].coords, (std::vector<double>{10, 0}));
  EXPECT_EQ(t.ops[2].kind, TraceOp::Kind::erase);
  EXPECT_EQ(t.ops[2].target, make_id(0));
  EXPECT_EQ(render_trace(t), "dim 2\n+ 0 0\n+ 10 0\n- 0\n");
}

TEST(ParseTrace, WhitespaceAndComments) {
  const Trace t = parse_trace("# hello\n\n  dim   2  # two\n+\t1.5   -2\n");
  ASSERT_EQ(t.ops.size(), 1u);
  EXPECT_EQ(t.ops[0].coords, (std::vector<double>{1.5, -2}));
  EXPECT_EQ(render_trace(t), "dim 2\n+ 1.5 -2\n");
}

TEST(ParseTrace, Errors) {
  EXPECT_EQ(parse_error_code("dim 2\n- 5\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("- 5\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("dim 2\n+ 1 2 3\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("dim 2\n+ 1 x\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("dim 2\n+ 1 2\n+ 1 2\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("dim 2\n+ 1 2\n- 0\n- 0\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code("dim 2\n* 1 2\n"), Errc::parse_error);
  EXPECT_EQ(parse_error_code(""), Errc::parse_error);
  try {
    parse_trace("dim 2\n+ 0 0\n- 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  // A coordinate may come back once its point is gone.
  EXPECT_NO_THROW(parse_trace("dim 1\n+ 4\n- 0\n+ 4\n"));
}

TEST(ParseTrace, RoundTripGenerated) {
  Placement pl;
  pl.kind = Placement::Kind::spread;
  const std::vector<Trace> ts{gen_uniform(200, 3, 1), gen_clustered(200, 2, 2, 5, 0.001),
                              gen_churn(50, 200, 3, 0.4, 2, pl), gen_churn(20, 100, 4, 0.2, 1)};
  for (const Trace& t : ts) {
    const std::string text = render_trace(t);
    const Trace back = parse_trace(text);
    EXPECT_EQ(back, t) << t.generator;
    EXPECT_EQ(render_trace(back), text);
  }
}
