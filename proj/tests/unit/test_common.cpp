#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "nsfde/common.h"

using namespace nsfde;

TEST(TimeGrid, NodesAndHorizon) {
  const TimeGrid g = TimeGrid::uniform(2.0, 8);
  EXPECT_EQ(g.n_steps(), 8u);
  EXPECT_EQ(g.n_nodes(), 9u);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_DOUBLE_EQ(g.horizon(), 2.0);
  EXPECT_EQ(g.node(0), 0.0);
  const auto nodes = g.nodes();
  for (std::size_t j = 1; j < nodes.size(); ++j) EXPECT_GT(nodes[j], nodes[j - 1]);
  EXPECT_LE(nodes.back(), g.horizon());
}

TEST(TimeGrid, RejectsInvalid) {
  EXPECT_THROW(TimeGrid(0.0, 4), DomainError);
  EXPECT_THROW(TimeGrid(-1.0, 4), DomainError);
  EXPECT_THROW(TimeGrid(0.1, 0), DomainError);
  EXPECT_THROW(TimeGrid::uniform(0.0, 4), DomainError);
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}

TEST(EstimateMean, ConstantSamplesHaveZeroError) {
  const MeanEstimate e = estimate_mean(std::vector<double>(100, 0.3));
  EXPECT_DOUBLE_EQ(e.mean, 0.3);
  EXPECT_EQ(e.std_err, 0.0);
  EXPECT_EQ(e.n, 100u);
}

TEST(EstimateMean, KnownValues) {
  const MeanEstimate e = estimate_mean({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  // sample variance 5/3, se = sqrt(5/12)
  EXPECT_NEAR(e.std_err, std::sqrt(5.0 / 12.0), 1e-15);
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 200; ++a)
    for (std::uint64_t b = 0; b < 5; ++b) seen.insert(derive_seed(42, a, b));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw DomainError("boom");
                            }),
               DomainError);
}
