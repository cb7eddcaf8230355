// rmm: train, evaluate and tabulate robust market-making agents.
//
//   rmm train-adversary --adversary all --seed 1
//   rmm train-mm --adversary all --adversary-checkpoint out/adversary_eta0_zeta0_all.ckpt
//   rmm train-gate --actions 4 --mm-checkpoint out/always_quote_eta0_zeta0_fixed.ckpt
//   rmm evaluate --checkpoint out/gate4_eta0_zeta0_fixed.ckpt
//   rmm report --checkpoint-dir out
//
// Settings are layered: built-in defaults, then --config FILE, then flags.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rmm/run.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> episodes;
    std::string agent;
    std::string adversary;
    std::optional<double> eta;
    std::optional<double> zeta;
    std::string mm_checkpoint;
    std::string adversary_checkpoint;
    std::string checkpoint;
    std::string checkpoint_dir;
    std::optional<int> actions;
    std::optional<unsigned> threads;
    std::optional<int> runs;
};

void add_common(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config, "INI file with [env] [risk] [adversary] [agent] [sac] [dqn] [eval] [report] [run]")
        ->check(CLI::ExistingFile);
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--out", f.out, "output directory (default $RMM_OUTPUT_ROOT/<command>)");
    cmd.add_option("--adversary", f.adversary, "fixed | random | a | b | k | all");
    cmd.add_option("--eta", f.eta, "terminal inventory penalty");
    cmd.add_option("--zeta", f.zeta, "running inventory penalty");
    cmd.add_option("--adversary-checkpoint", f.adversary_checkpoint, "trained strategic adversary");
}

rmm::RunConfig resolve(rmm::Mode mode, const Flags& f) {
    rmm::RunConfig c = rmm::default_config(mode);
    if (!f.config.empty()) c = rmm::load_config_file(std::move(c), f.config);
    if (f.seed) c.seed = *f.seed;
    if (!f.out.empty()) c.out = f.out;
    if (f.episodes) {
        switch (mode) {
            case rmm::Mode::TrainAdversary:
            case rmm::Mode::TrainMm: c.sac.episodes = *f.episodes; break;
            case rmm::Mode::TrainGate: c.dqn.episodes = *f.episodes; break;
            case rmm::Mode::Evaluate:
            case rmm::Mode::Report: c.eval.episodes_per_run = *f.episodes; break;
        }
    }
    if (!f.agent.empty()) {
        if (mode == rmm::Mode::Report) {
            c.report_agents.clear();
            std::stringstream ss(f.agent);
            for (std::string item; std::getline(ss, item, ',');) c.report_agents.push_back(rmm::parse_agent_kind(item));
        } else if (f.agent == "noquote" || f.agent == "no_quote") {
            c.agent = rmm::EvalAgent::NoQuote;
        } else if (f.agent == "constant") {
            c.agent = rmm::EvalAgent::Constant;
        } else if (f.agent == "checkpoint") {
            c.agent = rmm::EvalAgent::Checkpoint;
        } else {
            throw std::invalid_argument("--agent: expected checkpoint, noquote or constant, got '" + f.agent + "'");
        }
    }
    if (!f.adversary.empty()) {
        if (mode == rmm::Mode::Report) {
            c.report_adversaries.clear();
            std::stringstream ss(f.adversary);
            for (std::string item; std::getline(ss, item, ',');)
                c.report_adversaries.push_back(rmm::parse_adversary_kind(item));
        } else {
            c.adversary = rmm::parse_adversary_kind(f.adversary);
        }
    }
    if (f.eta) c.env.risk.eta = *f.eta;
    if (f.zeta) c.env.risk.zeta = *f.zeta;
    if (!f.mm_checkpoint.empty()) c.mm_checkpoint = f.mm_checkpoint;
    if (!f.adversary_checkpoint.empty()) c.adversary_checkpoint = f.adversary_checkpoint;
    if (!f.checkpoint.empty()) c.checkpoint = f.checkpoint;
    if (!f.checkpoint_dir.empty()) c.checkpoint_dir = f.checkpoint_dir;
    if (f.actions) c.actions = *f.actions;
    if (f.threads) c.eval.threads = *f.threads;
    if (f.runs) c.eval.runs = *f.runs;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust market making: adversarial training and evaluation"};
    app.require_subcommand(1);
    Flags f;

    auto* adv = app.add_subcommand("train-adversary", "train a strategic adversary against a market maker");
    add_common(*adv, f);
    adv->add_option("--episodes", f.episodes, "training episodes");
    adv->add_option("--mm-checkpoint", f.mm_checkpoint, "opponent (default: scripted quotes at 1/k)");

    auto* mm = app.add_subcommand("train-mm", "train the always-quoting market maker");
    add_common(*mm, f);
    mm->add_option("--episodes", f.episodes, "training episodes");

    auto* gate = app.add_subcommand("train-gate", "train a quote gate on top of a frozen market maker");
    add_common(*gate, f);
    gate->add_option("--episodes", f.episodes, "training episodes");
    gate->add_option("--mm-checkpoint", f.mm_checkpoint, "frozen always-quoting market maker")->required();
    gate->add_option("--actions", f.actions, "gate size")->check(CLI::IsMember({2, 4}));

    auto* ev = app.add_subcommand("evaluate", "evaluate one agent");
    add_common(*ev, f);
    ev->add_option("--episodes", f.episodes, "episodes per run");
    ev->add_option("--runs", f.runs, "independent runs");
    ev->add_option("--threads", f.threads, "worker threads (results do not depend on it)");
    ev->add_option("--agent", f.agent, "checkpoint | noquote | constant");
    ev->add_option("--checkpoint", f.checkpoint, "market maker or gate checkpoint");
    ev->add_option("--mm-checkpoint", f.mm_checkpoint, "always-quoting market maker (alias of --checkpoint)");

    auto* rep = app.add_subcommand("report", "evaluate every trained cell into one CSV");
    add_common(*rep, f);
    rep->add_option("--episodes", f.episodes, "episodes per run");
    rep->add_option("--runs", f.runs, "independent runs");
    rep->add_option("--threads", f.threads, "worker threads");
    rep->add_option("--agent", f.agent, "comma-separated always_quote,gate2,gate4");
    rep->add_option("--checkpoint-dir", f.checkpoint_dir, "directory holding the trained checkpoints (default --out)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        const rmm::Mode mode = rmm::parse_mode(sub->get_name());
        const rmm::RunConfig config = resolve(mode, f);
        const rmm::RunArtifacts artifacts = rmm::run(config, std::cerr);
        for (const auto& path : artifacts.files) std::cout << path.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "rmm: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
