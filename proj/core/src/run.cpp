#include "rmm/run.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rmm/policies.hpp"
#include "rmm/training.hpp"

namespace rmm {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

// Resolved configuration and master seed next to every artifact.
fs::path write_run_record(const RunConfig& config, const fs::path& artifact) {
    fs::path path = artifact;
    path.replace_extension(".run.ini");
    auto out = open_output(path);
    out << "# " << to_string(config.mode) << " -> " << artifact.filename().string() << '\n';
    out << to_config_text(config);
    return path;
}

ProgressFn progress_printer(std::ostream& log, int total) {
    const int every = std::max(1, total / 20);
    return [&log, every, total](const EpisodeLog& e) {
        if ((e.episode + 1) % every == 0 || e.episode + 1 == total)
            fmt::print(log, "episode {}/{}  reward {:.3f}  wealth {:.3f}  loss {:.4f}  explore {:.4f}\n",
                       e.episode + 1, total, e.total_reward, e.terminal_wealth, e.loss, e.exploration);
    };
}

std::unique_ptr<AdversaryPolicy> make_adversary(const RunConfig& config) {
    switch (config.adversary) {
        case AdversaryKind::Fixed: return std::make_unique<FixedAdversary>();
        case AdversaryKind::Random: return std::make_unique<RandomAdversary>();
        default: break;
    }
    if (!config.adversary_checkpoint)
        throw std::invalid_argument("adversary " + std::string(to_string(config.adversary)) +
                                    " needs --adversary-checkpoint");
    const Checkpoint ckpt = load_checkpoint(*config.adversary_checkpoint);
    auto policy = adversary_policy_from(ckpt);
    if (ckpt.adversary != config.adversary)
        throw CheckpointError("adversary checkpoint holds kind " + std::string(to_string(ckpt.adversary)) +
                              ", expected " + std::string(to_string(config.adversary)));
    return std::make_unique<StrategicAdversary>(config.adversary, policy, config.adversary_per_episode);
}

AdversaryFactory adversary_factory(const RunConfig& config) {
    if (!is_strategic(config.adversary)) return scripted_adversary(config.adversary);
    make_adversary(config);  // fail early on a bad checkpoint
    return [config] { return make_adversary(config); };
}

fs::path save_training(const RunConfig& config, Checkpoint ckpt, const TrainingLog& log, std::string_view agent,
                       RunArtifacts& artifacts) {
    ckpt.risk = config.env.risk;
    ckpt.seed = config.seed;
    ckpt.config_text = to_config_text(config);
    const fs::path path = config.out / checkpoint_name(agent, config.env.risk, ckpt.adversary);
    save_checkpoint(ckpt, path);
    fs::path curve = path;
    curve.replace_extension(".training.csv");
    auto out = open_output(curve);
    log.write_csv(out);
    artifacts.files.push_back(path);
    artifacts.files.push_back(curve);
    artifacts.files.push_back(write_run_record(config, path));
    return path;
}

RunArtifacts do_train_adversary(const RunConfig& config, std::ostream& log) {
    std::shared_ptr<const QuotePolicy> opponent;
    if (config.mm_checkpoint) {
        opponent = std::make_shared<AlwaysQuotePolicy>(mm_policy_from(load_checkpoint(*config.mm_checkpoint)));
    } else {
        opponent = std::make_shared<ConstantQuotePolicy>(myopic_quote_policy(config.env.market));
    }
    Rng rng(config.seed);
    fmt::print(log, "training adversary {} for {} episodes\n", to_string(config.adversary), config.sac.episodes);
    auto result = train_adversary_sac(config.env, *opponent, config.adversary, config.sac, rng,
                                      progress_printer(log, config.sac.episodes));
    Checkpoint ckpt;
    ckpt.kind = CheckpointKind::Adversary;
    ckpt.adversary = config.adversary;
    ckpt.networks.push_back({"actor", std::move(result.actor)});
    RunArtifacts artifacts;
    save_training(config, std::move(ckpt), result.log, "adversary", artifacts);
    return artifacts;
}

RunArtifacts do_train_mm(const RunConfig& config, std::ostream& log) {
    auto adversary = make_adversary(config);
    Rng rng(config.seed);
    fmt::print(log, "training market maker against {} for {} episodes\n", to_string(config.adversary),
               config.sac.episodes);
    auto result = train_mm_sac(config.env, *adversary, config.sac, rng, progress_printer(log, config.sac.episodes));
    Checkpoint ckpt;
    ckpt.kind = CheckpointKind::MarketMaker;
    ckpt.adversary = config.adversary;
    ckpt.networks.push_back({"actor", std::move(result.actor)});
    RunArtifacts artifacts;
    save_training(config, std::move(ckpt), result.log, to_string(AgentKind::AlwaysQuote), artifacts);
    return artifacts;
}

RunArtifacts do_train_gate(const RunConfig& config, std::ostream& log) {
    const Checkpoint mm = load_checkpoint(*config.mm_checkpoint);
    auto frozen = mm_policy_from(mm);
    auto adversary = make_adversary(config);
    Rng rng(config.seed);
    fmt::print(log, "training {}-action gate against {} for {} episodes\n", config.actions,
               to_string(config.adversary), config.dqn.episodes);
    auto result = train_gate_dqn(config.env, frozen, *adversary, config.actions, config.dqn, rng,
                                 progress_printer(log, config.dqn.episodes));
    Checkpoint ckpt;
    ckpt.kind = config.actions == 2 ? CheckpointKind::Gate2 : CheckpointKind::Gate4;
    ckpt.adversary = config.adversary;
    ckpt.networks.push_back({"q", std::move(result.q_net)});
    ckpt.networks.push_back({"mm_actor", frozen->actor()});
    RunArtifacts artifacts;
    save_training(config, std::move(ckpt), result.log,
                  to_string(config.actions == 2 ? AgentKind::Gate2 : AgentKind::Gate4), artifacts);
    return artifacts;
}

struct LoadedAgent {
    std::shared_ptr<const QuotePolicy> policy;
    std::string label;
    AgentKind kind = AgentKind::AlwaysQuote;
};

LoadedAgent agent_from_checkpoint(const Checkpoint& ckpt) {
    switch (ckpt.kind) {
        case CheckpointKind::MarketMaker:
            return {std::make_shared<AlwaysQuotePolicy>(mm_policy_from(ckpt)), {}, AgentKind::AlwaysQuote};
        case CheckpointKind::Gate2: return {gate_policy_from(ckpt), {}, AgentKind::Gate2};
        case CheckpointKind::Gate4: return {gate_policy_from(ckpt), {}, AgentKind::Gate4};
        case CheckpointKind::Adversary: break;
    }
    throw CheckpointError("cannot evaluate an adversary checkpoint as a market maker");
}

RunArtifacts do_evaluate(const RunConfig& config, std::ostream& log) {
    LoadedAgent agent;
    switch (config.agent) {
        case EvalAgent::NoQuote:
            agent = {std::make_shared<NoQuotePolicy>(), "no_quote", AgentKind::AlwaysQuote};
            break;
        case EvalAgent::Constant:
            agent = {std::make_shared<ConstantQuotePolicy>(config.agent_bid_offset, config.agent_ask_offset), "constant",
                     AgentKind::AlwaysQuote};
            break;
        case EvalAgent::Checkpoint:
            agent = agent_from_checkpoint(load_checkpoint(config.checkpoint ? *config.checkpoint : *config.mm_checkpoint));
            break;
    }
    EvalConfig eval = config.eval;
    eval.seed = config.seed;
    const EnvConfig env = evaluation_env(config);
    fmt::print(log, "evaluating {} runs x {} episodes against {} on {} thread(s)\n", eval.runs, eval.episodes_per_run,
               to_string(config.adversary), eval.threads);
    ExperimentCell cell{agent.kind, env.risk, config.adversary, evaluate(*agent.policy, env, adversary_factory(config), eval),
                        agent.label};
    const fs::path path = config.out / "evaluation.csv";
    {
        auto out = open_output(path);
        write_csv(out, std::span<const ExperimentCell>(&cell, 1));
    }
    const fs::path runs = config.out / "evaluation.runs.csv";
    {
        auto out = open_output(runs);
        out << "run,return_mean\n";
        for (std::size_t i = 0; i < cell.stats->run_means.size(); ++i)
            fmt::print(out, "{},{:.6f}\n", i, cell.stats->run_means[i]);
    }
    fmt::print(log, "return {:.2f} +- {:.2f}, run-mean std {:.2f}\n", cell.stats->return_mean, cell.stats->return_std,
               cell.stats->run_mean_std);
    return {{path, runs, write_run_record(config, path)}};
}

RunArtifacts do_report(const RunConfig& config, std::ostream& log) {
    const fs::path dir = config.checkpoint_dir ? *config.checkpoint_dir : config.out;
    MatrixConfig matrix;
    matrix.agents = config.report_agents;
    matrix.risks = standard_risk_settings();
    matrix.adversaries = config.report_adversaries;
    matrix.skip_single_coefficient_risk_averse = config.report_skip_single_coefficient_risk_averse;
    matrix.env = evaluation_env(config);
    matrix.eval = config.eval;
    matrix.eval.seed = config.seed;
    matrix.eval_adversary = AdversaryKind::Fixed;

    auto provider = [&](AgentKind agent, const RiskConfig& risk,
                        AdversaryKind adversary) -> std::shared_ptr<const QuotePolicy> {
        const fs::path path = dir / checkpoint_name(to_string(agent), risk, adversary);
        if (!fs::exists(path)) {
            fmt::print(log, "missing {}\n", path.string());
            return nullptr;
        }
        LoadedAgent loaded = agent_from_checkpoint(load_checkpoint(path));
        if (loaded.kind != agent) throw CheckpointError(path.string() + ": agent kind does not match file name");
        fmt::print(log, "evaluating {}\n", path.filename().string());
        return loaded.policy;
    };
    const auto cells = experiment_matrix(matrix, provider);
    const fs::path path = config.out / "report.csv";
    {
        auto out = open_output(path);
        write_csv(out, cells);
    }
    return {{path, write_run_record(config, path)}};
}

}  // namespace

std::string checkpoint_name(std::string_view agent, const RiskConfig& risk, AdversaryKind adversary) {
    return fmt::format("{}_eta{}_zeta{}_{}.ckpt", agent, risk.eta, risk.zeta, to_string(adversary));
}

EnvConfig evaluation_env(const RunConfig& config) {
    EnvConfig env = config.env;
    env.initial_inventory = config.eval_initial_inventory;
    return env;
}

RunArtifacts run(const RunConfig& config, std::ostream& log) {
    config.validate();
    fs::create_directories(config.out);
    fmt::print(log, "{} seed={} out={}\n", to_string(config.mode), config.seed, config.out.string());
    switch (config.mode) {
        case Mode::TrainAdversary: return do_train_adversary(config, log);
        case Mode::TrainMm: return do_train_mm(config, log);
        case Mode::TrainGate: return do_train_gate(config, log);
        case Mode::Evaluate: return do_evaluate(config, log);
        case Mode::Report: return do_report(config, log);
    }
    throw std::logic_error("unhandled mode");
}

}  // namespace rmm
