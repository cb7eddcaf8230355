#include "rmm/environment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rmm {

namespace {

double checked_offset(double value, const char* side) {
    if (!std::isfinite(value) || value < kMinOffset || value > kMaxOffset)
        throw std::invalid_argument(std::string(side) + " offset must lie in [-3, 3]");
    return value;
}

}  // namespace

std::array<double, kObservationDim> observation_features(const Observation& obs) noexcept {
    return {obs.time, obs.inventory / kInventoryScale};
}

std::string_view to_string(QuoteMode mode) noexcept {
    switch (mode) {
        case QuoteMode::NoQuote: return "no_quote";
        case QuoteMode::TwoSided: return "two_sided";
        case QuoteMode::AskOnly: return "ask_only";
        case QuoteMode::BidOnly: return "bid_only";
    }
    return "unknown";
}

QuoteAction QuoteAction::two_sided(double bid, double ask) {
    return {QuoteMode::TwoSided, Offset::at(checked_offset(bid, "bid")), Offset::at(checked_offset(ask, "ask"))};
}

QuoteAction QuoteAction::no_quote() noexcept {
    return {QuoteMode::NoQuote, Offset::infinite(), Offset::infinite()};
}

QuoteAction QuoteAction::ask_only(double ask) {
    return {QuoteMode::AskOnly, Offset::infinite(), Offset::at(checked_offset(ask, "ask"))};
}

QuoteAction QuoteAction::bid_only(double bid) {
    return {QuoteMode::BidOnly, Offset::at(checked_offset(bid, "bid")), Offset::infinite()};
}

std::optional<double> QuoteAction::spread() const noexcept {
    if (mode_ != QuoteMode::TwoSided) return std::nullopt;
    return bid_.as_double() + ask_.as_double();
}

void EnvConfig::validate() const {
    market.validate();
    risk.validate();
    if (fixed_initial_inventory &&
        (*fixed_initial_inventory < market.h_min || *fixed_initial_inventory > market.h_max))
        throw std::invalid_argument("initial inventory must lie within [h_min, h_max]");
}

EnvState reset(const EnvConfig& config, Rng& rng) {
    EnvState state;
    state.params = config.market;
    state.price = config.market.z0;
    if (config.fixed_initial_inventory) {
        state.portfolio.inventory = *config.fixed_initial_inventory;
    } else if (config.initial_inventory == InitialInventory::Uniform) {
        state.portfolio.inventory =
            std::uniform_int_distribution<int>(config.market.h_min, config.market.h_max)(rng);
    }
    // Starting inventory is booked at the initial mid, so initial wealth is zero.
    state.portfolio.cash = -state.portfolio.inventory * state.price;
    return state;
}

StepResult step_with_params(const EnvConfig& config, const EnvState& state, const QuoteAction& action,
                            const MarketParams& params, Rng& rng) {
    if (state.terminal()) throw std::logic_error("step called on a terminal state");

    const Observation obs = state.observe();
    const double p_bid = fill_probability(action.bid(), params);
    const double p_ask = fill_probability(action.ask(), params);
    const Fills fills = sample_fills(p_bid, p_ask, state.portfolio, params, rng);

    StepResult out;
    EnvState& next = out.next;
    next.step = state.step + 1;
    next.params = params;
    next.portfolio = apply_fills(state.portfolio, state.price, action.bid(), action.ask(), fills);
    next.price = step_price(state.price, params, standard_normal(rng));

    const double wealth_change = next.wealth() - state.wealth();
    out.mm_reward = reward(wealth_change, next.portfolio.inventory, config.risk, next.terminal());
    out.adversary_reward = adversary_reward(out.mm_reward);

    out.record.observation = obs;
    out.record.action = action;
    out.record.fills = fills;
    out.record.mm_reward = out.mm_reward;
    out.record.wealth_change = wealth_change;
    out.record.params = params;
    return out;
}

StepResult step(const EnvConfig& config, const EnvState& state, const QuoteAction& action,
                AdversaryPolicy& adversary, Rng& rng) {
    if (state.terminal()) throw std::logic_error("step called on a terminal state");
    const MarketParams params = adversary.act(state.observe(), config.market, rng);
    return step_with_params(config, state, action, params, rng);
}

Episode run_episode(const EnvConfig& config, const QuotePolicy& policy, AdversaryPolicy& adversary,
                    Rng& rng) {
    Episode episode;
    EnvState state = reset(config, rng);
    adversary.begin_episode(config.market, rng);
    episode.initial_wealth = state.wealth();
    episode.records.reserve(static_cast<std::size_t>(config.market.n_steps));
    while (!state.terminal()) {
        const QuoteAction action = policy.quote(state.observe(), rng);
        StepResult result = step(config, state, action, adversary, rng);
        episode.records.push_back(std::move(result.record));
        state = result.next;
    }
    episode.terminal_wealth = state.wealth();
    return episode;
}

QuoteAction expand_quote_mode(int action, int n_actions, const OffsetPolicy* frozen, const Observation& obs) {
    if (n_actions != 2 && n_actions != 4) throw std::invalid_argument("gate must have 2 or 4 actions");
    if (action < 0 || action >= n_actions) throw std::invalid_argument("gate action index out of range");
    if (action == 0) return QuoteAction::no_quote();
    if (frozen == nullptr) throw std::invalid_argument("gate requires a frozen quoting policy");
    const auto [bid, ask] = frozen->offsets(obs);
    switch (action) {
        case 1: return QuoteAction::two_sided(bid, ask);
        case 2: return QuoteAction::ask_only(ask);
        default: return QuoteAction::bid_only(bid);
    }
}

QuoteAction AlwaysQuotePolicy::quote(const Observation& obs, Rng&) const {
    const auto [bid, ask] = offsets_->offsets(obs);
    return QuoteAction::two_sided(bid, ask);
}

}  // namespace rmm
