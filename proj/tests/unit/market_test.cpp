#include "rmm/market.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace rmm {
namespace {

TEST(MarketParamsTest, DefaultsAreTheStatedConstants) {
    const MarketParams p;
    EXPECT_EQ(p.z0, 100.0);
    EXPECT_EQ(p.volatility, 2.0);
    EXPECT_EQ(p.dt, 0.005);
    EXPECT_EQ(p.n_steps, 200);
    EXPECT_DOUBLE_EQ(p.horizon(), 1.0);
    EXPECT_EQ(p.h_min, -50);
    EXPECT_EQ(p.h_max, 50);
    EXPECT_NO_THROW(p.validate());
}

TEST(MarketParamsTest, RejectsBadValues) {
    MarketParams p;
    p.decay = -1.0;
    try {
        p.validate();
        FAIL() << "negative decay accepted";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("decay must be positive"), std::string::npos);
    }
    p = MarketParams{};
    p.h_min = 1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = MarketParams{};
    p.dt = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    RiskConfig r{-0.1, 0.0};
    EXPECT_THROW(r.validate(), std::invalid_argument);
}

TEST(StepPriceTest, Examples) {
    MarketParams p;
    p.volatility = 0.0;
    EXPECT_DOUBLE_EQ(step_price(100.0, p, 3.7), 100.0);
    p.drift = 2.0;
    EXPECT_NEAR(step_price(100.0, p, -1.0), 100.01, 1e-12);
    p = MarketParams{};
    EXPECT_NEAR(step_price(100.0, p, 1.0), 100.0 + 2.0 * std::sqrt(0.005), 1e-12);
    EXPECT_NEAR(step_price(100.0, p, 1.0), 100.1414, 1e-4);
}

TEST(FillProbabilityTest, ClosedForm) {
    EXPECT_EQ(fill_probability(Offset::infinite(), 140.0, 1.5, 0.005), 0.0);
    EXPECT_NEAR(fill_probability(Offset::at(0.0), 140.0, 1.5, 0.005), 1.0 - std::exp(-0.7), 1e-15);
    EXPECT_NEAR(fill_probability(Offset::at(0.0), 140.0, 1.5, 0.005), 0.5034, 1e-4);
    EXPECT_NEAR(fill_probability(Offset::at(1.0), 140.0, 1.5, 0.005), 0.1447, 1e-4);
}

TEST(FillProbabilityTest, MonotoneInOffsetAndBounded) {
    double previous = 1.0;
    for (double d = -3.0; d <= 3.0; d += 0.05) {
        const double p = fill_probability(Offset::at(d), 140.0, 1.5, 0.005);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_LE(p, previous);
        previous = p;
    }
}

TEST(FillProbabilityTest, InfiniteOffsetIsNotANumber) {
    EXPECT_TRUE(Offset::infinite().is_infinite());
    EXPECT_FALSE(Offset::at(1e300).is_infinite());
    EXPECT_THROW((void)Offset::infinite().value(), std::logic_error);
    EXPECT_TRUE(std::isinf(Offset::infinite().as_double()));
}

TEST(SampleFillsTest, ZeroProbabilitiesNeverFill) {
    Rng rng(1);
    const MarketParams p;
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_fills(0.0, 0.0, Portfolio{}, p, rng), (Fills{0, 0}));
}

TEST(SampleFillsTest, BuySuppressedAtUpperBound) {
    Rng rng(2);
    const MarketParams p;
    Portfolio at_max;
    at_max.inventory = p.h_max;
    EXPECT_EQ(sample_fills(1.0, 1.0, at_max, p, rng), (Fills{0, 1}));
    Portfolio at_min;
    at_min.inventory = p.h_min;
    EXPECT_EQ(sample_fills(1.0, 1.0, at_min, p, rng), (Fills{1, 0}));
}

TEST(SampleFillsTest, EmpiricalRatesMatchProbability) {
    Rng rng(3);
    const MarketParams p;
    const int n = 1'000'000;
    long bids = 0, asks = 0;
    for (int i = 0; i < n; ++i) {
        const Fills f = sample_fills(0.5, 0.5, Portfolio{}, p, rng);
        bids += f.bid;
        asks += f.ask;
    }
    const double sigma = std::sqrt(0.25 / n);
    EXPECT_NEAR(static_cast<double>(bids) / n, 0.5, 3 * sigma);
    EXPECT_NEAR(static_cast<double>(asks) / n, 0.5, 3 * sigma);
}

TEST(SampleFillsTest, ConsumesTwoDrawsRegardlessOfOutcome) {
    Rng a(4), b(4);
    const MarketParams p;
    Portfolio full;
    full.inventory = p.h_max;
    sample_fills(0.0, 1.0, Portfolio{}, p, a);
    sample_fills(1.0, 0.0, full, p, b);
    EXPECT_EQ(a(), b());
}

TEST(UpdateCashTest, Examples) {
    EXPECT_NEAR(update_cash(0.0, 100.0, Offset::at(0.5), Offset::at(0.7), {1, 1}), 1.2, 1e-12);
    EXPECT_NEAR(update_cash(0.0, 100.0, Offset::at(0.5), Offset::infinite(), {1, 0}), -99.5, 1e-12);
    EXPECT_EQ(update_cash(42.0, 100.0, Offset::at(0.5), Offset::at(0.7), {0, 0}), 42.0);
    EXPECT_THROW(update_cash(0.0, 100.0, Offset::infinite(), Offset::at(0.7), {1, 0}), std::invalid_argument);
}

TEST(WealthTest, Examples) {
    static_assert(wealth(0.0, 0, 100.0) == 0.0);
    EXPECT_EQ(wealth(10.0, 3, 100.0), 310.0);
    EXPECT_NEAR(wealth(-99.5, 1, 101.0), 1.5, 1e-12);
}

TEST(RewardTest, Examples) {
    EXPECT_NEAR(reward(1.2, 3, {0.0, 0.01}, false), 1.11, 1e-12);
    EXPECT_NEAR(reward(0.0, 3, {1.0, 0.0}, true), -9.0, 1e-12);
    EXPECT_EQ(reward(5.0, 0, {0.7, 0.3}, true), 5.0);
    EXPECT_EQ(reward(0.0, 3, {1.0, 0.0}, false), 0.0);
    EXPECT_EQ(adversary_reward(1.25), -1.25);
}

TEST(WealthIdentityTest, HoldsOnRandomizedSteps) {
    Rng rng(5);
    const MarketParams p;
    std::uniform_real_distribution<double> offset(-3.0, 3.0);
    std::uniform_int_distribution<int> inventory(p.h_min, p.h_max);
    for (int i = 0; i < 100000; ++i) {
        Portfolio pf;
        pf.cash = 1000.0 * (uniform01(rng) - 0.5);
        pf.inventory = inventory(rng);
        const double z = 50.0 + 100.0 * uniform01(rng);
        const Offset bid = uniform01(rng) < 0.2 ? Offset::infinite() : Offset::at(offset(rng));
        const Offset ask = uniform01(rng) < 0.2 ? Offset::infinite() : Offset::at(offset(rng));
        const Fills f = sample_fills(fill_probability(bid, p), fill_probability(ask, p), pf, p, rng);
        const Portfolio next = apply_fills(pf, z, bid, ask, f);
        const double z2 = step_price(z, p, standard_normal(rng));
        const double dpi = wealth(next.cash, next.inventory, z2) - wealth(pf.cash, pf.inventory, z);
        const double income = (f.bid ? bid.value() : 0.0) + (f.ask ? ask.value() : 0.0);
        ASSERT_NEAR(dpi, income + next.inventory * (z2 - z), 1e-9);
        ASSERT_GE(next.inventory, p.h_min);
        ASSERT_LE(next.inventory, p.h_max);
    }
}

TEST(MyopicOffsetTest, GridSearchMaximizerIsNearInverseDecay) {
    const double best = testing::myopic_offset_grid_search(140.0, 1.5, 0.005);
    EXPECT_NEAR(best, 0.7487, 1e-3);
    // In the small-intensity limit the maximizer tends to 1/k.
    EXPECT_NEAR(testing::myopic_offset_grid_search(1.0, 1.5, 0.005, 1e-4), 1.0 / 1.5, 1e-3);
    const double at_best = expected_spread_income(best, 140.0, 1.5, 0.005);
    for (double d : {0.5, 0.7, 0.8, 1.0})
        EXPECT_LE(expected_spread_income(d, 140.0, 1.5, 0.005), at_best + 1e-12);
}

}  // namespace
}  // namespace rmm
