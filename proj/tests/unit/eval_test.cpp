#include "rmm/eval.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "reported_tables.hpp"

namespace rmm {
namespace {

StepRecord record(QuoteAction action) {
    StepRecord r;
    r.action = action;
    return r;
}

// Straight-line simulation of a constant two-sided quote, written without the
// environment module. Returns terminal wealths.
std::vector<double> constant_quote_oracle(double bid, double ask, int episodes, std::uint64_t seed) {
    const double A = 140.0, k = 1.5, dt = 0.005, sigma = 2.0;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    const double p_bid = 1.0 - std::exp(-A * dt * std::exp(-k * bid));
    const double p_ask = 1.0 - std::exp(-A * dt * std::exp(-k * ask));
    std::vector<double> out;
    for (int e = 0; e < episodes; ++e) {
        double price = 100.0, cash = 0.0;
        int inv = 0;
        for (int n = 0; n < 200; ++n) {
            const bool buy = u(gen) < p_bid && inv < 50;
            const bool sell = u(gen) < p_ask && inv > -50;
            if (buy) { cash -= price - bid; ++inv; }
            if (sell) { cash += price + ask; --inv; }
            price += sigma * std::sqrt(dt) * z(gen);
        }
        out.push_back(cash + inv * price);
    }
    return out;
}

TEST(SharpeTest, MatchesReportedCell) {
    ASSERT_TRUE(sharpe(66.77, 11.26));
    EXPECT_NEAR(*sharpe(66.77, 11.26), 5.93, 0.01);
    EXPECT_NEAR(*sharpe(61.00, 4.12), 14.79, 0.05);
    EXPECT_DOUBLE_EQ(*sharpe(3.5, 3.5), 1.0);
    EXPECT_FALSE(sharpe(10.0, 0.0));
    EXPECT_FALSE(sharpe(10.0, std::nan("")));
}

TEST(SharpeTest, EveryReportedCellRecomputes) {
    for (const auto& c : testing::kReportedCells) EXPECT_NEAR(*sharpe(c.mean, c.std), c.sharpe, 0.05) << c.mean;
}

TEST(RoundingTest, TwoDecimalsHalfAwayFromZero) {
    EXPECT_DOUBLE_EQ(round2(1.234), 1.23);
    EXPECT_DOUBLE_EQ(round2(0.125), 0.13);
    EXPECT_DOUBLE_EQ(round2(-0.125), -0.13);
    EXPECT_DOUBLE_EQ(round2(2.0), 2.0);
}

TEST(QuotingRatioTest, CountsModes) {
    const std::vector<StepRecord> records{record(QuoteAction::no_quote()), record(QuoteAction::two_sided(1, 1)),
                                          record(QuoteAction::two_sided(1, 1)), record(QuoteAction::two_sided(1, 1))};
    const QuotingRatio q = quoting_ratio(records);
    EXPECT_DOUBLE_EQ(q.no_quote(), 25.0);
    EXPECT_DOUBLE_EQ(q.two_sided(), 75.0);
    EXPECT_DOUBLE_EQ(q.ask_only(), 0.0);
    EXPECT_DOUBLE_EQ(q.bid_only(), 0.0);
    EXPECT_THROW(quoting_ratio({}), std::invalid_argument);
}

TEST(QuotingRatioTest, RoundedTuplesCloseToHundred) {
    Rng rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        std::array<long, kQuoteModeCount> counts{};
        for (auto& c : counts) c = std::uniform_int_distribution<long>(0, 5000)(rng);
        if (counts[0] + counts[1] + counts[2] + counts[3] == 0) continue;
        EXPECT_NEAR(quoting_ratio_from_counts(counts).sum(), 100.0, 0.02);
    }
}

TEST(SpreadStatsTest, TwoSidedStepsOnly) {
    const std::vector<StepRecord> records{record(QuoteAction::two_sided(0.8, 0.88)), record(QuoteAction::no_quote()),
                                          record(QuoteAction::ask_only(0.1)), record(QuoteAction::two_sided(0.8, 0.88))};
    const auto s = spread_stats(records);
    ASSERT_TRUE(s);
    EXPECT_NEAR(s->mean, 1.68, 1e-12);
    EXPECT_NEAR(s->std, 0.0, 1e-12);
    EXPECT_FALSE(spread_stats(std::vector<StepRecord>{record(QuoteAction::no_quote())}));
}

EvalConfig small_eval(int runs, int episodes, unsigned threads = 1) {
    EvalConfig c;
    c.runs = runs;
    c.episodes_per_run = episodes;
    c.threads = threads;
    c.seed = 42;
    return c;
}

TEST(EvaluateTest, NoQuoteEarnsNothing) {
    const EvalStats s = evaluate(NoQuotePolicy{}, EnvConfig{}, scripted_adversary(AdversaryKind::Fixed), small_eval(2, 20));
    EXPECT_EQ(s.episodes, 40);
    EXPECT_DOUBLE_EQ(s.return_mean, 0.0);
    EXPECT_DOUBLE_EQ(s.return_std, 0.0);
    EXPECT_FALSE(s.sharpe);
    EXPECT_FALSE(s.spread);
    EXPECT_DOUBLE_EQ(s.quoting.no_quote(), 100.0);
}

TEST(EvaluateTest, ConstantQuoteMatchesIndependentSimulation) {
    const double delta = 1.0 / 1.5;
    const int n = 3000;
    const EvalStats s = evaluate(ConstantQuotePolicy(delta, delta), EnvConfig{},
                                 scripted_adversary(AdversaryKind::Fixed), small_eval(3, n / 3));
    const auto oracle = constant_quote_oracle(delta, delta, n, 99);
    double m = 0.0, ss = 0.0;
    for (double w : oracle) m += w;
    m /= n;
    for (double w : oracle) ss += (w - m) * (w - m);
    const double sd = std::sqrt(ss / (n - 1));
    const double se = std::sqrt(sd * sd / n + s.return_std * s.return_std / n);
    EXPECT_NEAR(s.return_mean, m, 3 * se);
    EXPECT_NEAR(s.return_std, sd, 0.1 * sd);
    EXPECT_DOUBLE_EQ(s.quoting.two_sided(), 100.0);
    ASSERT_TRUE(s.spread);
    EXPECT_NEAR(s.spread->mean, 2 * delta, 1e-12);
    ASSERT_EQ(s.run_means.size(), 3u);
}

TEST(EvaluateTest, StandardErrorShrinksWithEpisodes) {
    const ConstantQuotePolicy agent(0.7, 0.7);
    const auto fixed = scripted_adversary(AdversaryKind::Fixed);
    // Spread of run means across many runs approximates the standard error.
    const EvalStats small = evaluate(agent, EnvConfig{}, fixed, small_eval(40, 100));
    const EvalStats large = evaluate(agent, EnvConfig{}, fixed, small_eval(40, 200));
    const double ratio = large.run_mean_std / small.run_mean_std;
    EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2);
}

TEST(EvaluateTest, ThreadCountDoesNotChangeResults) {
    const ConstantQuotePolicy agent(0.6, 0.9);
    const auto rnd = scripted_adversary(AdversaryKind::Random);
    const EvalStats a = evaluate(agent, EnvConfig{}, rnd, small_eval(2, 50, 1));
    const EvalStats b = evaluate(agent, EnvConfig{}, rnd, small_eval(2, 50, 4));
    EXPECT_EQ(a.return_mean, b.return_mean);
    EXPECT_EQ(a.return_std, b.return_std);
    EXPECT_EQ(a.run_means, b.run_means);
    EXPECT_EQ(a.spread->std, b.spread->std);
}

TEST(EvaluateTest, RejectsBadConfig) {
    EXPECT_THROW(evaluate(NoQuotePolicy{}, EnvConfig{}, scripted_adversary(AdversaryKind::Fixed), small_eval(0, 1)),
                 std::invalid_argument);
    EXPECT_THROW(scripted_adversary(AdversaryKind::StrategicA), std::invalid_argument);
}

TEST(ExperimentMatrixTest, ShapeAndSkipping) {
    MatrixConfig cfg;
    cfg.agents = {AgentKind::AlwaysQuote};
    cfg.risks = standard_risk_settings();
    cfg.adversaries = standard_adversaries();
    cfg.eval = small_eval(1, 2);
    int calls = 0;
    const auto cells = experiment_matrix(cfg, [&](AgentKind, const RiskConfig&, AdversaryKind adv) -> std::shared_ptr<const QuotePolicy> {
        ++calls;
        if (adv == AdversaryKind::Random) return nullptr;
        return std::make_shared<NoQuotePolicy>();
    });
    // One risk-neutral row with six columns, six risk-averse rows with three.
    EXPECT_EQ(cells.size(), 6u + 6u * 3u);
    EXPECT_EQ(calls, static_cast<int>(cells.size()));
    for (const auto& c : cells) EXPECT_EQ(c.stats.has_value(), c.adversary != AdversaryKind::Random);

    cfg.skip_single_coefficient_risk_averse = false;
    EXPECT_EQ(experiment_matrix(cfg, [](auto, auto&, auto) { return nullptr; }).size(), 42u);
    cfg.agents.clear();
    EXPECT_TRUE(experiment_matrix(cfg, [](auto, auto&, auto) { return nullptr; }).empty());
}

TEST(CsvTest, HeaderAndRows) {
    std::ostringstream out;
    ExperimentCell missing{AgentKind::Gate2, {0.1, 0.0}, AdversaryKind::StrategicAll, std::nullopt, {}};
    EvalStats s;
    s.return_mean = 66.774;
    s.return_std = 11.256;
    s.sharpe = sharpe(s.return_mean, s.return_std);
    s.quoting.percent = {0.0, 100.0, 0.0, 0.0};
    s.spread = SpreadStats{1.684, 0.255};
    s.episodes = 10000;
    ExperimentCell full{AgentKind::AlwaysQuote, {0.0, 0.0}, AdversaryKind::Fixed, s, {}};
    ExperimentCell labelled{AgentKind::AlwaysQuote, {0.0, 0.01}, AdversaryKind::Random, s, "constant"};
    labelled.stats->spread.reset();
    write_csv(out, std::vector<ExperimentCell>{full, missing, labelled});
    EXPECT_EQ(out.str(),
              "agent,eta,zeta,adversary,return_mean,return_std,sharpe,qr_none,qr_two_sided,qr_ask_only,qr_bid_only,"
              "spread_mean,spread_std,episodes\n"
              "always_quote,0,0,fixed,66.77,11.26,5.93,0.00,100.00,0.00,0.00,1.68,0.26,10000\n"
              "gate2,0.1,0,all,,,,,,,,,,\n"
              "constant,0,0.01,random,66.77,11.26,5.93,0.00,100.00,0.00,0.00,,,10000\n");
}

TEST(AgentKindTest, NamesRoundTrip) {
    for (AgentKind k : {AgentKind::AlwaysQuote, AgentKind::Gate2, AgentKind::Gate4})
        EXPECT_EQ(parse_agent_kind(to_string(k)), k);
    EXPECT_THROW(parse_agent_kind("oracle"), std::invalid_argument);
}

}  // namespace
}  // namespace rmm
