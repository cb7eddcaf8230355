#include "rmm/market.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rmm {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void MarketParams::validate() const {
    require(std::isfinite(drift), "drift must be finite");
    require(arrival_scale > 0.0 && std::isfinite(arrival_scale), "arrival_scale must be positive");
    require(decay > 0.0 && std::isfinite(decay), "decay must be positive");
    require(volatility >= 0.0 && std::isfinite(volatility), "volatility must be non-negative");
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    require(std::isfinite(z0), "z0 must be finite");
    require(n_steps >= 1, "n_steps must be at least 1");
    require(h_min < h_max, "h_min must be less than h_max");
    require(h_min <= 0 && h_max >= 0, "inventory bounds must contain zero");
}

void RiskConfig::validate() const {
    require(eta >= 0.0 && std::isfinite(eta), "eta must be non-negative");
    require(zeta >= 0.0 && std::isfinite(zeta), "zeta must be non-negative");
}

double Offset::value() const {
    if (!value_) throw std::logic_error("offset is infinite (side not quoted)");
    return *value_;
}

double step_price(double z, const MarketParams& params, double noise) noexcept {
    return z + params.drift * params.dt + params.volatility * std::sqrt(params.dt) * noise;
}

double fill_probability(Offset offset, double arrival_scale, double decay, double dt) {
    if (offset.is_infinite()) return 0.0;
    const double intensity = arrival_scale * std::exp(-decay * offset.value());
    return -std::expm1(-intensity * dt);
}

double fill_probability(Offset offset, const MarketParams& params) {
    return fill_probability(offset, params.arrival_scale, params.decay, params.dt);
}

Fills sample_fills(double p_bid, double p_ask, const Portfolio& portfolio,
                   const MarketParams& params, Rng& rng) {
    const double u_bid = uniform01(rng);
    const double u_ask = uniform01(rng);
    Fills fills;
    fills.bid = (u_bid < p_bid && portfolio.inventory + 1 <= params.h_max) ? 1 : 0;
    fills.ask = (u_ask < p_ask && portfolio.inventory - 1 >= params.h_min) ? 1 : 0;
    return fills;
}

double update_cash(double cash, double z, Offset bid, Offset ask, Fills fills) {
    if (fills.bid != 0 && bid.is_infinite())
        throw std::invalid_argument("bid filled on an unquoted side");
    if (fills.ask != 0 && ask.is_infinite())
        throw std::invalid_argument("ask filled on an unquoted side");
    double income = 0.0;
    if (fills.ask != 0) income += ask.value() * fills.ask;
    if (fills.bid != 0) income += bid.value() * fills.bid;
    return cash + income - z * fills.inventory_change();
}

Portfolio apply_fills(const Portfolio& portfolio, double z, Offset bid, Offset ask, Fills fills) {
    Portfolio next = portfolio;
    next.cash = update_cash(portfolio.cash, z, bid, ask, fills);
    next.inventory += fills.inventory_change();
    next.cum_buys += fills.bid;
    next.cum_sells += fills.ask;
    return next;
}

double reward(double wealth_change, int inventory_next, const RiskConfig& risk, bool terminal) noexcept {
    const double h2 = static_cast<double>(inventory_next) * inventory_next;
    double r = wealth_change - risk.zeta * h2;
    if (terminal) r -= risk.eta * h2;
    return r;
}

double expected_spread_income(double offset, double arrival_scale, double decay, double dt) {
    return offset * fill_probability(Offset::at(offset), arrival_scale, decay, dt);
}

}  // namespace rmm
