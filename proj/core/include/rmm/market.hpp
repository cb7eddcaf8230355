#pragma once

// Stylized single-asset market: arithmetic Brownian mid-price, exponential
// fill intensities around the mid, and the market maker's cash / inventory /
// wealth accounting. Everything here is a pure function of its arguments plus
// an explicitly passed random stream.

#include <limits>
#include <optional>

#include "rmm/rng.hpp"

namespace rmm {

struct MarketParams {
    double drift = 0.0;            // b, price units per unit time
    double arrival_scale = 140.0;  // A
    double decay = 1.5;            // k, per price unit
    double volatility = 2.0;       // sigma, price units per sqrt(time)
    double dt = 0.005;
    double z0 = 100.0;
    int n_steps = 200;
    int h_min = -50;
    int h_max = 50;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
    double horizon() const noexcept { return dt * n_steps; }

    friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

struct RiskConfig {
    double eta = 0.0;   // terminal inventory penalty
    double zeta = 0.0;  // running inventory penalty

    void validate() const;
    bool risk_neutral() const noexcept { return eta == 0.0 && zeta == 0.0; }

    friend bool operator==(const RiskConfig&, const RiskConfig&) = default;
};

/// Distance of a quote from the mid-price. A side that is not quoted carries
/// the infinite offset, which is a distinct state rather than a large number.
class Offset {
public:
    constexpr Offset() = default;  // infinite
    static constexpr Offset infinite() noexcept { return Offset{}; }
    static constexpr Offset at(double value) noexcept { return Offset{value}; }

    constexpr bool quoted() const noexcept { return value_.has_value(); }
    constexpr bool is_infinite() const noexcept { return !value_.has_value(); }
    /// Precondition: quoted().
    double value() const;
    /// Finite value, or +inf for an unquoted side (for display only).
    double as_double() const noexcept {
        return value_.value_or(std::numeric_limits<double>::infinity());
    }

    friend constexpr bool operator==(const Offset&, const Offset&) = default;

private:
    constexpr explicit Offset(double v) noexcept : value_(v) {}
    std::optional<double> value_;
};

struct Portfolio {
    double cash = 0.0;
    int inventory = 0;
    long cum_buys = 0;
    long cum_sells = 0;
};

struct Fills {
    int bid = 0;  // units bought at the bid this step (0 or 1)
    int ask = 0;  // units sold at the ask this step (0 or 1)

    int inventory_change() const noexcept { return bid - ask; }
    friend bool operator==(const Fills&, const Fills&) = default;
};

/// z + b*dt + sigma*sqrt(dt)*noise, with noise ~ N(0,1).
double step_price(double z, const MarketParams& params, double noise) noexcept;

/// Per-step execution probability 1 - exp(-A exp(-k delta) dt); zero for an
/// infinite offset.
double fill_probability(Offset offset, double arrival_scale, double decay, double dt);
double fill_probability(Offset offset, const MarketParams& params);

/// One Bernoulli draw per side (bid first, then ask; both draws are always
/// consumed). A fill that would leave inventory outside [h_min, h_max] is
/// suppressed.
Fills sample_fills(double p_bid, double p_ask, const Portfolio& portfolio,
                   const MarketParams& params, Rng& rng);

/// X + ask*dN- + bid*dN+ - z*dH. Throws std::invalid_argument if a side with an
/// infinite offset is reported as filled.
double update_cash(double cash, double z, Offset bid, Offset ask, Fills fills);

/// Applies fills to the portfolio: cash update plus inventory and counters.
Portfolio apply_fills(const Portfolio& portfolio, double z, Offset bid, Offset ask, Fills fills);

constexpr double wealth(double cash, int inventory, double z) noexcept {
    return cash + inventory * z;
}

/// dPi - zeta*h^2 - (eta*h^2 at the terminal step).
double reward(double wealth_change, int inventory_next, const RiskConfig& risk, bool terminal) noexcept;

constexpr double adversary_reward(double mm_reward) noexcept { return -mm_reward; }

/// delta * fill_probability(delta): the single-step expected spread income of
/// one side.
double expected_spread_income(double offset, double arrival_scale, double decay, double dt);

}  // namespace rmm
