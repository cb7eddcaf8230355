#include "rmm/sac.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rmm/replay.hpp"

#include "oracles.hpp"

namespace rmm {
namespace {

SacConfig small_config() {
    SacConfig cfg;
    cfg.hidden = {16, 16};
    cfg.batch = 32;
    return cfg;
}

ReplayBuffer filled_buffer(int obs_dim, int action_dim, Rng& rng, int n = 500) {
    ReplayBuffer buffer(static_cast<std::size_t>(n), obs_dim, action_dim);
    std::vector<double> obs(static_cast<std::size_t>(obs_dim)), next(obs.size()), act(static_cast<std::size_t>(action_dim));
    for (int i = 0; i < n; ++i) {
        for (auto& v : obs) v = uniform01(rng);
        for (auto& v : next) v = uniform01(rng);
        for (auto& v : act) v = 2.0 * uniform01(rng) - 1.0;
        buffer.add(obs, act, standard_normal(rng), next, i % 5 == 0);
    }
    return buffer;
}

TEST(ActionBoxTest, MapsUnitCubeAffinely) {
    const ActionBox box{{-3.0, 105.0}, {3.0, 175.0}};
    const auto a = box.to_box(std::vector<double>{0.5, -1.0});
    EXPECT_DOUBLE_EQ(a[0], 1.5);
    EXPECT_DOUBLE_EQ(a[1], 105.0);
    EXPECT_DOUBLE_EQ(box.to_box(std::vector<double>{9.0, 9.0})[1], 175.0);
}

TEST(SacActTest, ActionsStayInTheBoxForWildWeights) {
    Rng rng(1);
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), small_config(), rng);
    std::vector<double> wild = agent.actor().flat_parameters();
    for (auto& w : wild) w = 50.0 * standard_normal(rng);
    agent.mutable_actor().set_flat_parameters(wild);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> obs{uniform01(rng), 2.0 * uniform01(rng) - 1.0};
        for (bool det : {true, false}) {
            const SacSample s = agent.act(obs, det, rng);
            for (std::size_t k = 0; k < 2; ++k) {
                ASSERT_GE(s.action[k], -3.0);
                ASSERT_LE(s.action[k], 3.0);
                ASSERT_GE(s.normalized[k], -1.0);
                ASSERT_LE(s.normalized[k], 1.0);
            }
        }
    }
}

TEST(SacActTest, DeterministicIsRepeatable) {
    Rng rng(2);
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), small_config(), rng);
    const std::vector<double> obs{0.3, -0.1};
    const SacSample a = agent.act(obs, true, rng);
    const SacSample b = agent.act(obs, true, rng);
    EXPECT_EQ(a.action, b.action);
}

TEST(SacActTest, StochasticMeanMatchesSquashedGaussian) {
    Rng rng(3);
    SacAgent agent(1, ActionBox::symmetric(1, 3.0), small_config(), rng);
    // Output layer: mean 0.4, log std log(0.6), independent of the input.
    std::vector<double> p = agent.actor().flat_parameters();
    std::fill(p.begin(), p.end(), 0.0);
    const auto& layers = agent.actor().layers();
    const std::size_t bias_offset = p.size() - static_cast<std::size_t>(layers.back().bias.size());
    p[bias_offset] = 0.4;
    p[bias_offset + 1] = std::log(0.6);
    agent.mutable_actor().set_flat_parameters(p);

    // Oracle: E[3 tanh(0.4 + 0.6 z)] and its variance by quadrature.
    double mean = 0.0, second = 0.0;
    const double h = 1e-4;
    for (double z = -10.0; z <= 10.0; z += h) {
        const double w = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) * h;
        const double a = 3.0 * std::tanh(0.4 + 0.6 * z);
        mean += w * a;
        second += w * a * a;
    }
    const int n = 100000;
    double sum = 0.0;
    const std::vector<double> obs{0.0};
    for (int i = 0; i < n; ++i) sum += agent.act(obs, false, rng).action[0];
    const double se = std::sqrt((second - mean * mean) / n);
    EXPECT_NEAR(sum / n, mean, 3 * se);
    EXPECT_NEAR(agent.act(obs, true, rng).action[0], 3.0 * std::tanh(0.4), 1e-12);
}

TEST(SacActorObjectiveTest, GradientMatchesFiniteDifferences) {
    Rng rng(4);
    SacConfig cfg = small_config();
    cfg.initial_alpha = 0.3;
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), cfg, rng);
    // Spread the actor output so the policy is not near-deterministic.
    std::vector<double> p = agent.actor().flat_parameters();
    for (auto& v : p) v = 0.3 * standard_normal(rng);
    agent.mutable_actor().set_flat_parameters(p);

    const Matrix obs = Matrix::Random(2, 8);
    Matrix noise(2, 8);
    for (Eigen::Index j = 0; j < noise.cols(); ++j)
        for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = standard_normal(rng);

    const std::vector<double> analytic = Mlp::flatten(agent.actor_objective(obs, noise).gradients);
    const double eps = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<double> q = p;
        q[i] = p[i] + eps;
        agent.mutable_actor().set_flat_parameters(q);
        const double up = agent.actor_objective(obs, noise).loss;
        q[i] = p[i] - eps;
        agent.mutable_actor().set_flat_parameters(q);
        const double down = agent.actor_objective(obs, noise).loss;
        const double numeric = (up - down) / (2 * eps);
        worst = std::max(worst, std::abs(numeric - analytic[i]) / std::max(1.0, std::abs(analytic[i])));
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(SacUpdateTest, WaitsForABatchThenTrains) {
    Rng rng(5);
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), small_config(), rng);
    ReplayBuffer tiny(100, 2, 2);
    EXPECT_FALSE(agent.update(tiny, rng));
    ReplayBuffer buffer = filled_buffer(2, 2, rng);
    const auto before = agent.actor().flat_parameters();
    const auto losses = agent.update(buffer, rng);
    ASSERT_TRUE(losses);
    EXPECT_TRUE(std::isfinite(losses->critic));
    EXPECT_NE(agent.actor().flat_parameters(), before);
    EXPECT_EQ(agent.updates(), 1);
}

TEST(SacUpdateTest, TargetsTrackCriticsSlowly) {
    Rng rng(6);
    SacConfig cfg = small_config();
    cfg.tau = 0.1;
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), cfg, rng);
    ReplayBuffer buffer = filled_buffer(2, 2, rng);
    const auto target_before = agent.target_critic(0).flat_parameters();
    agent.update(buffer, rng);
    const auto critic = agent.critic(0).flat_parameters();
    const auto target = agent.target_critic(0).flat_parameters();
    for (std::size_t i = 0; i < target.size(); ++i)
        ASSERT_NEAR(target[i], 0.1 * critic[i] + 0.9 * target_before[i], 1e-12);
}

TEST(SacUpdateTest, SameSeedSameWeights) {
    auto train = [] {
        Rng rng(7);
        SacAgent agent(2, ActionBox::symmetric(2, 3.0), small_config(), rng);
        ReplayBuffer buffer = filled_buffer(2, 2, rng);
        for (int i = 0; i < 20; ++i) agent.update(buffer, rng);
        return agent.actor().flat_parameters();
    };
    EXPECT_EQ(train(), train());
}

TEST(SacUpdateTest, FixedTemperatureStaysFixed) {
    Rng rng(8);
    SacConfig cfg = small_config();
    cfg.fixed_alpha = 0.05;
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), cfg, rng);
    ReplayBuffer buffer = filled_buffer(2, 2, rng);
    for (int i = 0; i < 10; ++i) agent.update(buffer, rng);
    EXPECT_EQ(agent.alpha(), 0.05);
}

TEST(SacUpdateTest, CriticRegressesToConstantTarget) {
    Rng rng(9);
    SacConfig cfg = small_config();
    cfg.gamma = 0.0;
    cfg.lr_critic = 1e-3;
    SacAgent agent(2, ActionBox::symmetric(2, 3.0), cfg, rng);
    ReplayBuffer buffer(64, 2, 2);
    const std::vector<double> obs{0.2, -0.4}, act{0.1, -0.3};
    for (int i = 0; i < 64; ++i) buffer.add(obs, act, 1.7, obs, false);
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double loss = agent.update(buffer, rng)->critic;
        if (i == 0) first = loss;
        last = loss;
    }
    EXPECT_LT(last, 1e-4);
    EXPECT_LT(last, first);
}

TEST(SacConfigTest, Validation) {
    SacConfig cfg;
    cfg.tau = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SacConfig{};
    cfg.gamma = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SacConfig{};
    EXPECT_EQ(cfg.steps_per_round(), cfg.update_interval);
    cfg.gradient_steps = 7;
    EXPECT_EQ(cfg.steps_per_round(), 7);
}

TEST(SacLearningTest, BanditConvergesToKnownOptimum) {
    EXPECT_NEAR(testing::bandit_sac_action(6000, 11), 0.5, 0.05);
}

TEST(SacLearningTest, OneStepQuotingFindsMyopicOffsets) {
    const double oracle = testing::myopic_offset_grid_search(140.0, 1.5, 0.005);
    const auto [bid, ask] = testing::one_step_quoting_offsets(60000, 12);
    EXPECT_NEAR(bid, oracle, 0.15);
    EXPECT_NEAR(ask, oracle, 0.15);
}

}  // namespace
}  // namespace rmm
