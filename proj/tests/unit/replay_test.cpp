#include "rmm/replay.hpp"

#include <set>
#include <stdexcept>

#include <gtest/gtest.h>

namespace rmm {
namespace {

void add_tagged(ReplayBuffer& buffer, double tag) {
    const double obs[2] = {tag, -tag};
    const double act[1] = {tag * 10};
    buffer.add(obs, act, tag, obs, static_cast<int>(tag) % 2 == 0);
}

TEST(ReplayBufferTest, StoresTransitionsVerbatim) {
    ReplayBuffer buffer(4, 2, 1);
    add_tagged(buffer, 1.0);
    ASSERT_EQ(buffer.size(), 1u);
    EXPECT_EQ(buffer.obs(0)[1], -1.0);
    EXPECT_EQ(buffer.action(0)[0], 10.0);
    EXPECT_EQ(buffer.reward(0), 1.0);
    EXPECT_FALSE(buffer.terminal(0));
}

TEST(ReplayBufferTest, OverwritesOldestWhenFull) {
    ReplayBuffer buffer(3, 2, 1);
    for (int i = 1; i <= 5; ++i) add_tagged(buffer, i);
    EXPECT_EQ(buffer.size(), 3u);
    std::multiset<double> rewards;
    for (std::size_t i = 0; i < buffer.size(); ++i) rewards.insert(buffer.reward(i));
    EXPECT_EQ(rewards, (std::multiset<double>{3.0, 4.0, 5.0}));
}

TEST(ReplayBufferTest, SampleHasDistinctConsistentRows) {
    ReplayBuffer buffer(100, 2, 1);
    for (int i = 0; i < 100; ++i) add_tagged(buffer, i);
    Rng rng(1);
    const ReplayBatch batch = buffer.sample(100, rng);
    std::set<std::size_t> seen(batch.indices.begin(), batch.indices.end());
    EXPECT_EQ(seen.size(), 100u);
    for (Eigen::Index j = 0; j < batch.reward.size(); ++j) {
        const double tag = batch.reward(j);
        EXPECT_EQ(batch.obs(0, j), tag);
        EXPECT_EQ(batch.next_obs(1, j), -tag);
        EXPECT_EQ(batch.action(0, j), tag * 10);
        EXPECT_EQ(batch.done(j), static_cast<int>(tag) % 2 == 0 ? 1.0 : 0.0);
    }
}

TEST(ReplayBufferTest, SamplingIsRoughlyUniform) {
    ReplayBuffer buffer(10, 2, 1);
    for (int i = 0; i < 10; ++i) add_tagged(buffer, i);
    Rng rng(2);
    std::vector<int> counts(10, 0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) ++counts[buffer.sample(3, rng).indices[0]];
    for (int c : counts) EXPECT_NEAR(c, draws / 10.0, 5 * std::sqrt(draws * 0.1 * 0.9));
}

TEST(ReplayBufferTest, RejectsOversizedBatchAndBadShapes) {
    ReplayBuffer buffer(10, 2, 1);
    add_tagged(buffer, 1.0);
    Rng rng(3);
    EXPECT_THROW(buffer.sample(2, rng), std::invalid_argument);
    const double wrong[3] = {0, 0, 0};
    const double act[1] = {0};
    EXPECT_THROW(buffer.add(wrong, act, 0.0, wrong, false), std::invalid_argument);
}

}  // namespace
}  // namespace rmm
