#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "rmm/adversary.hpp"
#include "rmm/dqn.hpp"
#include "rmm/environment.hpp"
#include "rmm/sac.hpp"

namespace rmm {

struct EpisodeLog {
    int episode = 0;
    double total_reward = 0.0;  // from the learner's point of view
    double terminal_wealth = 0.0;
    int terminal_inventory = 0;
    double loss = 0.0;          // mean critic / TD loss over the episode's updates
    double exploration = 0.0;   // SAC temperature or DQN epsilon at episode end
    long env_steps = 0;         // cumulative
};

struct TrainingLog {
    std::vector<EpisodeLog> episodes;
    void write_csv(std::ostream& out) const;
};

using ProgressFn = std::function<void(const EpisodeLog&)>;

struct SacTrainingResult {
    Mlp actor;
    TrainingLog log;
};

struct DqnTrainingResult {
    Mlp q_net;
    TrainingLog log;
};

/// Always-quoting market maker over the (bid, ask) box [-3, 3]^2, trained
/// against `adversary`.
SacTrainingResult train_mm_sac(const EnvConfig& env, AdversaryPolicy& adversary, const SacConfig& config, Rng& rng,
                               const ProgressFn& progress = {});

/// Strategic adversary of the given kind, rewarded with the negated market
/// maker reward while `opponent` quotes.
SacTrainingResult train_adversary_sac(const EnvConfig& env, const QuotePolicy& opponent, AdversaryKind kind,
                                      const SacConfig& config, Rng& rng, const ProgressFn& progress = {});

/// Quote gate with 2 or 4 actions on top of a frozen always-quoting policy.
/// Throws std::invalid_argument when the frozen policy is missing.
DqnTrainingResult train_gate_dqn(const EnvConfig& env, std::shared_ptr<const OffsetPolicy> frozen_mm,
                                 AdversaryPolicy& adversary, int n_actions, const DqnConfig& config, Rng& rng,
                                 const ProgressFn& progress = {});

}  // namespace rmm
