#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/adversary.hpp"
#include "rmm/dqn.hpp"
#include "rmm/environment.hpp"
#include "rmm/eval.hpp"
#include "rmm/sac.hpp"

namespace rmm {

enum class Mode { TrainAdversary, TrainMm, TrainGate, Evaluate, Report };
std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

/// Evaluated agents, including the two scripted baselines.
enum class EvalAgent { Checkpoint, NoQuote, Constant };

struct RunConfig {
    Mode mode = Mode::Evaluate;
    EnvConfig env;  // training environment; initial inventory defaults to uniform
    InitialInventory eval_initial_inventory = InitialInventory::Zero;

    AdversaryKind adversary = AdversaryKind::Fixed;
    bool adversary_per_episode = false;

    EvalAgent agent = EvalAgent::Checkpoint;
    double agent_bid_offset = 1.0 / 1.5;
    double agent_ask_offset = 1.0 / 1.5;
    int actions = 2;

    SacConfig sac;
    DqnConfig dqn;
    EvalConfig eval;

    std::vector<AgentKind> report_agents = {AgentKind::AlwaysQuote, AgentKind::Gate2, AgentKind::Gate4};
    std::vector<AdversaryKind> report_adversaries = standard_adversaries();
    bool report_skip_single_coefficient_risk_averse = true;

    std::uint64_t seed = 0;
    std::filesystem::path out;
    std::optional<std::filesystem::path> checkpoint;  // agent evaluated by `evaluate`
    std::optional<std::filesystem::path> mm_checkpoint;
    std::optional<std::filesystem::path> adversary_checkpoint;
    std::optional<std::filesystem::path> checkpoint_dir;  // inputs of `report`

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// Defaults for a mode before any file or flag is applied.
RunConfig default_config(Mode mode);

/// Applies an INI-style text (sections [env] [risk] [adversary] [agent] [sac]
/// [dqn] [eval] [report] [run]) on top of `base`. Unknown sections or keys and
/// malformed values throw std::invalid_argument naming the key.
RunConfig apply_config_text(RunConfig base, std::string_view text);
RunConfig load_config_file(RunConfig base, const std::filesystem::path& path);

/// Fully resolved configuration in the same INI format; feeding it back
/// through apply_config_text reproduces the configuration.
std::string to_config_text(const RunConfig& config);

/// Name of the environment variable holding the default output root.
inline constexpr const char* kOutputRootEnv = "RMM_OUTPUT_ROOT";
std::filesystem::path default_output_dir(Mode mode);

}  // namespace rmm
