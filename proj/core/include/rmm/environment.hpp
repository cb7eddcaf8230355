#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rmm/market.hpp"
#include "rmm/rng.hpp"

namespace rmm {

/// What the agents see: time and own inventory. Price, cash and the market
/// coefficients stay hidden.
struct Observation {
    double time = 0.0;
    int inventory = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Network input for an observation: (t, H / 50).
constexpr int kObservationDim = 2;
constexpr double kInventoryScale = 50.0;
std::array<double, kObservationDim> observation_features(const Observation& obs) noexcept;

enum class QuoteMode : int { NoQuote = 0, TwoSided = 1, AskOnly = 2, BidOnly = 3 };
constexpr int kQuoteModeCount = 4;
std::string_view to_string(QuoteMode mode) noexcept;

/// Mode plus offsets. The factories are the only way to build one, so the
/// mode/offset consistency holds by construction.
class QuoteAction {
public:
    static QuoteAction two_sided(double bid, double ask);
    static QuoteAction no_quote() noexcept;
    static QuoteAction ask_only(double ask);
    static QuoteAction bid_only(double bid);

    QuoteMode mode() const noexcept { return mode_; }
    Offset bid() const noexcept { return bid_; }
    Offset ask() const noexcept { return ask_; }
    /// bid + ask for two-sided quotes.
    std::optional<double> spread() const noexcept;

    friend bool operator==(const QuoteAction&, const QuoteAction&) = default;

private:
    QuoteAction(QuoteMode mode, Offset bid, Offset ask) noexcept : mode_(mode), bid_(bid), ask_(ask) {}
    QuoteMode mode_ = QuoteMode::NoQuote;
    Offset bid_;
    Offset ask_;
};

/// Offsets accepted for a quoted side.
constexpr double kMinOffset = -3.0;
constexpr double kMaxOffset = 3.0;

enum class InitialInventory { Zero, Uniform };

struct EnvConfig {
    MarketParams market;
    RiskConfig risk;
    InitialInventory initial_inventory = InitialInventory::Zero;
    /// Overrides the rule when set.
    std::optional<int> fixed_initial_inventory;

    void validate() const;
};

struct EnvState {
    int step = 0;
    Portfolio portfolio;
    double price = 0.0;
    MarketParams params;  // coefficients in force for the last step taken

    double time() const noexcept { return step * params.dt; }
    bool terminal() const noexcept { return step >= params.n_steps; }
    Observation observe() const noexcept { return {time(), portfolio.inventory}; }
    double wealth() const noexcept { return rmm::wealth(portfolio.cash, portfolio.inventory, price); }
};

struct StepRecord {
    Observation observation;
    QuoteAction action = QuoteAction::no_quote();
    Fills fills;
    double mm_reward = 0.0;
    double wealth_change = 0.0;
    MarketParams params;  // coefficients chosen by the adversary for this step

    QuoteMode mode() const noexcept { return action.mode(); }
    std::optional<double> spread() const noexcept { return action.spread(); }
};

/// Supplies the market coefficients each step. Implementations may keep
/// per-episode state, so one instance belongs to one episode stream.
class AdversaryPolicy {
public:
    virtual ~AdversaryPolicy() = default;
    virtual void begin_episode(const MarketParams& base, Rng& rng) { (void)base; (void)rng; }
    virtual MarketParams act(const Observation& obs, const MarketParams& base, Rng& rng) = 0;
};

/// Market maker behaviour at evaluation/rollout time.
class QuotePolicy {
public:
    virtual ~QuotePolicy() = default;
    virtual QuoteAction quote(const Observation& obs, Rng& rng) const = 0;
};

/// A continuous (bid, ask) offset generator, e.g. a frozen always-quoting
/// actor evaluated deterministically.
class OffsetPolicy {
public:
    virtual ~OffsetPolicy() = default;
    virtual std::pair<double, double> offsets(const Observation& obs) const = 0;
};

/// Initial state. Inventory comes from the rule (or the fixed override) and is
/// financed at z0, so the starting wealth is zero.
EnvState reset(const EnvConfig& config, Rng& rng);

struct StepResult {
    EnvState next;
    double mm_reward = 0.0;
    double adversary_reward = 0.0;
    StepRecord record;
};

/// One transition: adversary picks coefficients, quotes are turned into fill
/// probabilities, fills are sampled and booked, the price moves, and the reward
/// is computed on the post-step inventory. Throws std::logic_error on a
/// terminal state.
StepResult step(const EnvConfig& config, const EnvState& state, const QuoteAction& action,
                AdversaryPolicy& adversary, Rng& rng);

/// Same as step() with explicit coefficients (used when the caller drives the
/// adversary itself, e.g. while training it).
StepResult step_with_params(const EnvConfig& config, const EnvState& state, const QuoteAction& action,
                            const MarketParams& params, Rng& rng);

struct Episode {
    double terminal_wealth = 0.0;
    double initial_wealth = 0.0;
    std::vector<StepRecord> records;
};

Episode run_episode(const EnvConfig& config, const QuotePolicy& policy, AdversaryPolicy& adversary,
                    Rng& rng);

/// Maps a discrete gate action onto a quote. 0 = no quote, 1 = two-sided from
/// the frozen policy; with four actions 2 = ask only and 3 = bid only.
/// Throws std::invalid_argument on a missing frozen policy or bad index.
QuoteAction expand_quote_mode(int action, int n_actions, const OffsetPolicy* frozen,
                              const Observation& obs);

// Scripted behaviours.

class NoQuotePolicy final : public QuotePolicy {
public:
    QuoteAction quote(const Observation&, Rng&) const override { return QuoteAction::no_quote(); }
};

class ConstantQuotePolicy final : public QuotePolicy, public OffsetPolicy {
public:
    ConstantQuotePolicy(double bid, double ask) : bid_(bid), ask_(ask) {}
    QuoteAction quote(const Observation&, Rng&) const override { return QuoteAction::two_sided(bid_, ask_); }
    std::pair<double, double> offsets(const Observation&) const override { return {bid_, ask_}; }

private:
    double bid_;
    double ask_;
};

/// Always quotes both sides with the offsets of a frozen offset policy.
class AlwaysQuotePolicy final : public QuotePolicy {
public:
    explicit AlwaysQuotePolicy(std::shared_ptr<const OffsetPolicy> offsets) : offsets_(std::move(offsets)) {}
    QuoteAction quote(const Observation& obs, Rng&) const override;

private:
    std::shared_ptr<const OffsetPolicy> offsets_;
};

}  // namespace rmm
