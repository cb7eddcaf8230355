#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/adversary.hpp"
#include "rmm/environment.hpp"

namespace rmm {

/// Two decimals, half away from zero.
double round2(double x) noexcept;

/// mean / std; absent when std is not positive.
std::optional<double> sharpe(double mean, double std) noexcept;

/// Percent of steps per quote mode, indexed by QuoteMode
/// (no quote, two-sided, ask only, bid only), rounded to two decimals.
struct QuotingRatio {
    std::array<double, kQuoteModeCount> percent{};

    double no_quote() const noexcept { return percent[0]; }
    double two_sided() const noexcept { return percent[1]; }
    double ask_only() const noexcept { return percent[2]; }
    double bid_only() const noexcept { return percent[3]; }
    double sum() const noexcept { return percent[0] + percent[1] + percent[2] + percent[3]; }
};

QuotingRatio quoting_ratio_from_counts(const std::array<long, kQuoteModeCount>& counts);
/// Throws std::invalid_argument on an empty record list.
QuotingRatio quoting_ratio(std::span<const StepRecord> records);

struct SpreadStats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (0 for a single quote)
};

/// Statistics of bid + ask over two-sided steps only; absent without any.
std::optional<SpreadStats> spread_stats(std::span<const StepRecord> records);

struct EvalStats {
    double return_mean = 0.0;
    double return_std = 0.0;  // pooled across all episodes
    std::optional<double> sharpe;
    QuotingRatio quoting;
    std::optional<SpreadStats> spread;
    long episodes = 0;
    std::vector<double> run_means;
    double run_mean_std = 0.0;
};

struct EvalConfig {
    int runs = 10;
    int episodes_per_run = 1000;
    unsigned threads = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

using AdversaryFactory = std::function<std::unique_ptr<AdversaryPolicy>()>;

/// Runs runs * episodes_per_run independent episodes. Episode i draws from its
/// own stream seeded by derive_seed(seed, i) and results are reduced in episode
/// order, so the outcome does not depend on the thread count.
EvalStats evaluate(const QuotePolicy& agent, const EnvConfig& env, const AdversaryFactory& adversary,
                   const EvalConfig& config);

enum class AgentKind : int { AlwaysQuote = 0, Gate2 = 1, Gate4 = 2 };
std::string_view to_string(AgentKind kind) noexcept;
AgentKind parse_agent_kind(std::string_view name);

struct ExperimentCell {
    AgentKind agent = AgentKind::AlwaysQuote;
    RiskConfig risk;
    AdversaryKind adversary = AdversaryKind::Fixed;  // adversary the agent was trained against
    std::optional<EvalStats> stats;                  // absent when the agent is missing
    std::string label;                               // replaces to_string(agent) when set
};

/// Table rows: risk-neutral plus six risk-averse settings.
std::vector<RiskConfig> standard_risk_settings();
std::vector<AdversaryKind> standard_adversaries();

struct MatrixConfig {
    std::vector<AgentKind> agents;
    std::vector<RiskConfig> risks;
    std::vector<AdversaryKind> adversaries;
    /// Skip the single-coefficient adversary columns for risk-averse rows.
    bool skip_single_coefficient_risk_averse = true;
    EnvConfig env;  // risk is replaced per cell
    EvalConfig eval;
    AdversaryKind eval_adversary = AdversaryKind::Fixed;
};

/// Returns nullptr when no trained agent exists for the cell.
using AgentProvider =
    std::function<std::shared_ptr<const QuotePolicy>(AgentKind, const RiskConfig&, AdversaryKind)>;

/// Evaluation adversary for a matrix; only Fixed and Random are scripted.
AdversaryFactory scripted_adversary(AdversaryKind kind);

/// One cell per (agent, risk, adversary); cell i is evaluated with seed
/// derive_seed(eval.seed, i).
std::vector<ExperimentCell> experiment_matrix(const MatrixConfig& config, const AgentProvider& provider);

inline constexpr std::string_view kEvalCsvHeader =
    "agent,eta,zeta,adversary,return_mean,return_std,sharpe,qr_none,qr_two_sided,qr_ask_only,qr_bid_only,"
    "spread_mean,spread_std,episodes";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ExperimentCell& cell);
void write_csv(std::ostream& out, std::span<const ExperimentCell> cells);

}  // namespace rmm
