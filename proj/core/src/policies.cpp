#include "rmm/policies.hpp"

#include <stdexcept>

#include "rmm/dqn.hpp"
#include "rmm/sac.hpp"

namespace rmm {

ActorOffsetPolicy::ActorOffsetPolicy(Mlp actor) : actor_(std::move(actor)) {
    if (actor_.input_dim() != kObservationDim || actor_.output_dim() != 4)
        throw std::invalid_argument("market maker actor must map 2 inputs to 4 outputs");
}

std::pair<double, double> ActorOffsetPolicy::offsets(const Observation& obs) const {
    const auto f = observation_features(obs);
    const std::vector<double> y = deterministic_action(actor_, f);
    return {kOffsetBound * y[0], kOffsetBound * y[1]};
}

ActorAdversaryPolicy::ActorAdversaryPolicy(Mlp actor) : actor_(std::move(actor)) {
    if (actor_.input_dim() != kObservationDim || actor_.output_dim() % 2 != 0)
        throw std::invalid_argument("adversary actor has an unexpected shape");
}

std::vector<double> ActorAdversaryPolicy::act(const Observation& obs) const {
    const auto f = observation_features(obs);
    return deterministic_action(actor_, f);
}

GatePolicy::GatePolicy(Mlp q_net, std::shared_ptr<const OffsetPolicy> frozen)
    : q_(std::move(q_net)), frozen_(std::move(frozen)) {
    if (q_.input_dim() != kObservationDim) throw std::invalid_argument("gate network must take 2 inputs");
    if (q_.output_dim() != 2 && q_.output_dim() != 4) throw std::invalid_argument("gate must have 2 or 4 actions");
    if (!frozen_) throw std::invalid_argument("gate requires a frozen quoting policy");
}

std::vector<double> GatePolicy::q_values(const Observation& obs) const {
    const auto f = observation_features(obs);
    Matrix x(kObservationDim, 1);
    x << f[0], f[1];
    const Matrix q = q_.predict(x);
    return {q.data(), q.data() + q.size()};
}

int GatePolicy::choose(const Observation& obs) const { return greedy_action(q_values(obs)); }

QuoteAction GatePolicy::quote(const Observation& obs, Rng&) const {
    return expand_quote_mode(choose(obs), n_actions(), frozen_.get(), obs);
}

ConstantQuotePolicy myopic_quote_policy(const MarketParams& params) {
    return {1.0 / params.decay, 1.0 / params.decay};
}

}  // namespace rmm
