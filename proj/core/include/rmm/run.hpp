#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rmm/checkpoint.hpp"
#include "rmm/config.hpp"

namespace rmm {

/// Files written by a run, all inside config.out.
struct RunArtifacts {
    std::vector<std::filesystem::path> files;
};

/// Checkpoint file name used by the train modes and looked up by `report`,
/// e.g. "gate2_eta0.1_zeta0_fixed.ckpt".
std::string checkpoint_name(std::string_view agent, const RiskConfig& risk, AdversaryKind adversary);

/// Environment used for evaluation: the training environment with the
/// evaluation initial-inventory rule (unless a fixed inventory is pinned).
EnvConfig evaluation_env(const RunConfig& config);

/// Validates and executes one command. Progress goes to `log`.
/// Module errors propagate as exceptions.
RunArtifacts run(const RunConfig& config, std::ostream& log);

}  // namespace rmm
