// Replay buffer: ring eviction order, sampling determinism and uniformity.

#include "ctsim/replay.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace ctsim {
namespace {

Transition tagged(double tag) {
  Transition t;
  t.s = VecX::Constant(2, tag);
  t.a_unit = VecX::Constant(1, 0.0);
  t.a = VecX::Constant(1, tag * 10);
  t.r = tag;
  t.s_next = VecX::Constant(2, tag + 0.5);
  t.done = (static_cast<long>(tag) % 2) == 0;
  return t;
}

TEST(Replay, RejectsZeroCapacity) {
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
}

TEST(Replay, FillsThenEvictsOldestFirst) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 3; ++i) replay_push(buf, tagged(i));
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).r, 0.0);

  replay_push(buf, tagged(3));  // overwrites tag 0
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.at(0).r, 3.0);
  EXPECT_EQ(buf.at(1).r, 1.0);
  EXPECT_EQ(buf.at(2).r, 2.0);

  replay_push(buf, tagged(4));  // overwrites tag 1
  EXPECT_EQ(buf.at(1).r, 4.0);
}

TEST(Replay, ThrowsWhenBatchExceedsContents) {
  ReplayBuffer buf(10);
  replay_push(buf, tagged(1));
  Rng rng(0);
  EXPECT_THROW(buf.sample_indices(2, rng), std::runtime_error);
  EXPECT_NO_THROW(buf.sample_indices(1, rng));
}

TEST(Replay, SamplingIsSeedDeterministic) {
  ReplayBuffer buf(100);
  for (int i = 0; i < 100; ++i) replay_push(buf, tagged(i));
  Rng a(7), b(7);
  auto ia = buf.sample_indices(32, a);
  auto ib = buf.sample_indices(32, b);
  EXPECT_EQ(ia, ib);
}

TEST(Replay, BatchRowsMatchStoredTransitions) {
  ReplayBuffer buf(50);
  for (int i = 0; i < 50; ++i) replay_push(buf, tagged(i));
  Rng rng(3);
  Rng replayed(3);
  auto idx = buf.sample_indices(8, rng);
  Batch b = replay_sample(buf, 8, replayed);
  for (size_t i = 0; i < idx.size(); ++i) {
    const Transition& t = buf.at(idx[i]);
    ASSERT_EQ(b.r[i], t.r);
    ASSERT_EQ(b.done[i], t.done ? 1.0 : 0.0);
    ASSERT_LT((b.s.row(i).transpose() - t.s).norm(), 1e-15);
    ASSERT_LT((b.a.row(i).transpose() - t.a).norm(), 1e-15);
    ASSERT_LT((b.s_next.row(i).transpose() - t.s_next).norm(), 1e-15);
  }
}

// Chi-square bound on index frequencies: 100 cells, 1e5 draws. The 99.9th
// percentile of chi2(99) is about 148; use a slightly generous cap.
TEST(Replay, SamplingIsCloseToUniform) {
  ReplayBuffer buf(100);
  for (int i = 0; i < 100; ++i) replay_push(buf, tagged(i));
  Rng rng(12345);
  std::vector<long> counts(100, 0);
  const long draws = 100000;
  for (long k = 0; k < draws / 100; ++k) {
    auto idx = buf.sample_indices(100, rng);
    for (size_t i : idx) counts[i]++;
  }
  double expected = static_cast<double>(draws) / 100.0;
  double chi2 = 0.0;
  for (long c : counts) {
    double d = c - expected;
    chi2 += d * d / expected;
  }
  EXPECT_LT(chi2, 160.0);
}

}  // namespace
}  // namespace ctsim
