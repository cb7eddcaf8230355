#pragma once

// Frozen (read-only) policies built from trained networks. All of them only
// call Mlp::predict, so one instance can be shared across threads.

#include <memory>
#include <utility>
#include <vector>

#include "rmm/adversary.hpp"
#include "rmm/environment.hpp"
#include "rmm/neural.hpp"

namespace rmm {

/// Half-width of the market maker's offset box.
constexpr double kOffsetBound = 3.0;

/// Always-quoting actor evaluated at its squashed mean: offsets 3 * tanh(mean).
class ActorOffsetPolicy final : public OffsetPolicy {
public:
    explicit ActorOffsetPolicy(Mlp actor);
    std::pair<double, double> offsets(const Observation& obs) const override;
    const Mlp& actor() const noexcept { return actor_; }

private:
    Mlp actor_;
};

/// Strategic adversary actor evaluated at its squashed mean.
class ActorAdversaryPolicy final : public NormalizedPolicy {
public:
    explicit ActorAdversaryPolicy(Mlp actor);
    int action_dim() const noexcept override { return actor_.output_dim() / 2; }
    std::vector<double> act(const Observation& obs) const override;
    const Mlp& actor() const noexcept { return actor_; }

private:
    Mlp actor_;
};

/// Discrete quote gate: greedy Q-network action expanded through the frozen
/// always-quoting policy.
class GatePolicy final : public QuotePolicy {
public:
    GatePolicy(Mlp q_net, std::shared_ptr<const OffsetPolicy> frozen);
    int n_actions() const noexcept { return q_.output_dim(); }
    int choose(const Observation& obs) const;
    std::vector<double> q_values(const Observation& obs) const;
    QuoteAction quote(const Observation& obs, Rng& rng) const override;
    const Mlp& q_net() const noexcept { return q_; }
    const std::shared_ptr<const OffsetPolicy>& frozen() const noexcept { return frozen_; }

private:
    Mlp q_;
    std::shared_ptr<const OffsetPolicy> frozen_;
};

/// Symmetric quotes at 1/k, the maximizer of delta * exp(-k delta).
ConstantQuotePolicy myopic_quote_policy(const MarketParams& params);

}  // namespace rmm
