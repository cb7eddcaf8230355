#include "rmm/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace rmm {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
    throw std::invalid_argument(key + ": " + what);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) bad_value(key, "expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) bad_value(key, "expected an integer, got '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad_value(key, "out of range");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad_value(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<int> to_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) out.push_back(to_int(key, item));
    if (out.empty()) bad_value(key, "expected a comma-separated list of integers");
    return out;
}

Activation to_activation(const std::string& key, const std::string& text) {
    if (text == "tanh") return Activation::Tanh;
    if (text == "relu") return Activation::Relu;
    bad_value(key, "expected tanh or relu, got '" + text + "'");
}

InitialInventory to_initial_inventory(const std::string& key, const std::string& text) {
    if (text == "zero") return InitialInventory::Zero;
    if (text == "uniform") return InitialInventory::Uniform;
    bad_value(key, "expected zero or uniform, got '" + text + "'");
}

std::string_view initial_inventory_name(InitialInventory rule) {
    return rule == InitialInventory::Zero ? "zero" : "uniform";
}

std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
    return out;
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        if (msg.rfind(key, 0) == 0) throw;
        bad_value(key, msg);
    }
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        // [env]
        t["env.drift"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.drift = to_double(k, v); };
        t["env.arrival_scale"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.arrival_scale = to_double(k, v); };
        t["env.decay"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.decay = to_double(k, v); };
        t["env.volatility"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.volatility = to_double(k, v); };
        t["env.dt"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.dt = to_double(k, v); };
        t["env.z0"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.z0 = to_double(k, v); };
        t["env.n_steps"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.n_steps = to_int(k, v); };
        t["env.h_min"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.h_min = to_int(k, v); };
        t["env.h_max"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.market.h_max = to_int(k, v); };
        t["env.initial_inventory"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "zero" || v == "uniform") {
                c.env.initial_inventory = to_initial_inventory(k, v);
                c.env.fixed_initial_inventory.reset();
            } else {
                c.env.fixed_initial_inventory = to_int(k, v);
            }
        };
        t["env.eval_initial_inventory"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.eval_initial_inventory = to_initial_inventory(k, v); };
        // [risk]
        t["risk.eta"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.risk.eta = to_double(k, v); };
        t["risk.zeta"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.env.risk.zeta = to_double(k, v); };
        // [adversary]
        t["adversary.kind"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.adversary = wrap(k, [&] { return parse_adversary_kind(v); }); };
        t["adversary.per_episode"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.adversary_per_episode = to_bool(k, v); };
        // [agent]
        t["agent.kind"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "checkpoint") c.agent = EvalAgent::Checkpoint;
            else if (v == "noquote") c.agent = EvalAgent::NoQuote;
            else if (v == "constant") c.agent = EvalAgent::Constant;
            else bad_value(k, "expected checkpoint, noquote or constant, got '" + v + "'");
        };
        t["agent.bid_offset"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.agent_bid_offset = to_double(k, v); };
        t["agent.ask_offset"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.agent_ask_offset = to_double(k, v); };
        t["agent.actions"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.actions = to_int(k, v); };
        // [sac]
        t["sac.episodes"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.episodes = to_int(k, v); };
        t["sac.update_interval"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.update_interval = to_int(k, v); };
        t["sac.gradient_steps"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.gradient_steps = to_int(k, v); };
        t["sac.lr_actor"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.lr_actor = to_double(k, v); };
        t["sac.lr_critic"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.lr_critic = to_double(k, v); };
        t["sac.lr_alpha"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.lr_alpha = to_double(k, v); };
        t["sac.batch"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.batch = to_int(k, v); };
        t["sac.gamma"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.gamma = to_double(k, v); };
        t["sac.tau"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.tau = to_double(k, v); };
        t["sac.alpha"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "auto") c.sac.fixed_alpha.reset();
            else c.sac.fixed_alpha = to_double(k, v);
        };
        t["sac.initial_alpha"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.initial_alpha = to_double(k, v); };
        t["sac.hidden"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.hidden = to_int_list(k, v); };
        t["sac.activation"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.activation = to_activation(k, v); };
        t["sac.warmup_steps"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.sac.warmup_steps = to_int(k, v); };
        t["sac.buffer_capacity"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const long long n = to_integer(k, v);
            if (n < 1) bad_value(k, "must be positive");
            c.sac.buffer_capacity = static_cast<std::size_t>(n);
        };
        // [dqn]
        t["dqn.episodes"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.episodes = to_int(k, v); };
        t["dqn.update_interval"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.update_interval = to_int(k, v); };
        t["dqn.lr"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.lr = to_double(k, v); };
        t["dqn.batch"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.batch = to_int(k, v); };
        t["dqn.gamma"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.gamma = to_double(k, v); };
        t["dqn.epsilon_start"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.epsilon_start = to_double(k, v); };
        t["dqn.epsilon_end"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.epsilon_end = to_double(k, v); };
        t["dqn.epsilon_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.epsilon_fraction = to_double(k, v); };
        t["dqn.target_sync"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.target_sync = to_int(k, v); };
        t["dqn.hidden"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.hidden = to_int_list(k, v); };
        t["dqn.activation"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.activation = to_activation(k, v); };
        t["dqn.warmup_steps"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dqn.warmup_steps = to_int(k, v); };
        t["dqn.buffer_capacity"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const long long n = to_integer(k, v);
            if (n < 1) bad_value(k, "must be positive");
            c.dqn.buffer_capacity = static_cast<std::size_t>(n);
        };
        // [eval]
        t["eval.runs"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.eval.runs = to_int(k, v); };
        t["eval.episodes_per_run"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.eval.episodes_per_run = to_int(k, v); };
        t["eval.threads"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const int n = to_int(k, v);
            if (n < 1) bad_value(k, "must be at least 1");
            c.eval.threads = static_cast<unsigned>(n);
        };
        // [report]
        t["report.agents"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.report_agents.clear();
            for (const auto& item : split_list(v)) c.report_agents.push_back(wrap(k, [&] { return parse_agent_kind(item); }));
        };
        t["report.adversaries"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.report_adversaries.clear();
            for (const auto& item : split_list(v)) c.report_adversaries.push_back(wrap(k, [&] { return parse_adversary_kind(item); }));
        };
        t["report.skip_single_coefficient_risk_averse"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.report_skip_single_coefficient_risk_averse = to_bool(k, v); };
        t["report.checkpoint_dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.checkpoint_dir = v; };
        // [run]
        t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            std::uint64_t s = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
            if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(k, "expected a non-negative integer");
            c.seed = s;
        };
        t["run.out"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["run.checkpoint"] = [](RunConfig& c, const std::string&, const std::string& v) { c.checkpoint = v; };
        t["run.mm_checkpoint"] = [](RunConfig& c, const std::string&, const std::string& v) { c.mm_checkpoint = v; };
        t["run.adversary_checkpoint"] = [](RunConfig& c, const std::string&, const std::string& v) { c.adversary_checkpoint = v; };
        return t;
    }();
    return table;
}

template <typename F>
void check(const char* key, F&& f) {
    wrap(key, std::forward<F>(f));
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::TrainAdversary: return "train-adversary";
        case Mode::TrainMm: return "train-mm";
        case Mode::TrainGate: return "train-gate";
        case Mode::Evaluate: return "evaluate";
        case Mode::Report: return "report";
    }
    return "unknown";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : {Mode::TrainAdversary, Mode::TrainMm, Mode::TrainGate, Mode::Evaluate, Mode::Report})
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

RunConfig default_config(Mode mode) {
    RunConfig c;
    c.mode = mode;
    const bool training = mode == Mode::TrainAdversary || mode == Mode::TrainMm || mode == Mode::TrainGate;
    c.env.initial_inventory = training ? InitialInventory::Uniform : InitialInventory::Zero;
    c.out = default_output_dir(mode);
    return c;
}

std::filesystem::path default_output_dir(Mode mode) {
    const char* root = std::getenv(kOutputRootEnv);
    const std::filesystem::path base = (root != nullptr && *root != '\0') ? root : "rmm-out";
    return base / std::string(to_string(mode));
}

void RunConfig::validate() const {
    check("env", [&] { env.market.validate(); });
    check("risk", [&] { env.risk.validate(); });
    check("env.initial_inventory", [&] { env.validate(); });
    if (agent == EvalAgent::Constant) {
        check("agent.bid_offset", [&] { (void)QuoteAction::two_sided(agent_bid_offset, 0.0); });
        check("agent.ask_offset", [&] { (void)QuoteAction::two_sided(0.0, agent_ask_offset); });
    }
    if (actions != 2 && actions != 4) bad_value("agent.actions", "must be 2 or 4");
    check("sac", [&] { sac.validate(); });
    check("dqn", [&] { dqn.validate(); });
    check("eval", [&] { eval.validate(); });
    if (mode == Mode::TrainAdversary && !is_strategic(adversary))
        bad_value("adversary.kind", "train-adversary needs a strategic kind (a, b, k or all)");
    if (mode == Mode::TrainGate && !mm_checkpoint)
        bad_value("run.mm_checkpoint", "train-gate needs the always-quoting market maker checkpoint");
    if ((mode == Mode::TrainMm || mode == Mode::TrainGate) && is_strategic(adversary) && !adversary_checkpoint)
        bad_value("run.adversary_checkpoint", "a strategic adversary needs its checkpoint");
    if (mode == Mode::Evaluate && agent == EvalAgent::Checkpoint && !checkpoint && !mm_checkpoint)
        bad_value("run.checkpoint", "evaluate needs an agent checkpoint or a scripted agent");
    if (out.empty()) bad_value("run.out", "output directory must be set");
}

RunConfig apply_config_text(RunConfig base, std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    const auto& table = setters();
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty())
            throw std::invalid_argument(section + ": key outside of any section");
        for (const auto& [key, value] : keys) {
            const std::string full = section + "." + key;
            const auto it = table.find(full);
            if (it == table.end()) throw std::invalid_argument(full + ": unknown key");
            it->second(base, full, trim(value.data()));
        }
    }
    return base;
}

RunConfig load_config_file(RunConfig base, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return apply_config_text(std::move(base), buffer.str());
}

std::string to_config_text(const RunConfig& c) {
    std::string s;
    auto line = [&](std::string_view key, const auto& value) { s += fmt::format("{} = {}\n", key, value); };
    s += "[env]\n";
    line("drift", c.env.market.drift);
    line("arrival_scale", c.env.market.arrival_scale);
    line("decay", c.env.market.decay);
    line("volatility", c.env.market.volatility);
    line("dt", c.env.market.dt);
    line("z0", c.env.market.z0);
    line("n_steps", c.env.market.n_steps);
    line("h_min", c.env.market.h_min);
    line("h_max", c.env.market.h_max);
    if (c.env.fixed_initial_inventory)
        line("initial_inventory", *c.env.fixed_initial_inventory);
    else
        line("initial_inventory", initial_inventory_name(c.env.initial_inventory));
    line("eval_initial_inventory", initial_inventory_name(c.eval_initial_inventory));
    s += "\n[risk]\n";
    line("eta", c.env.risk.eta);
    line("zeta", c.env.risk.zeta);
    s += "\n[adversary]\n";
    line("kind", to_string(c.adversary));
    line("per_episode", c.adversary_per_episode ? "true" : "false");
    s += "\n[agent]\n";
    line("kind", c.agent == EvalAgent::Checkpoint ? "checkpoint" : c.agent == EvalAgent::NoQuote ? "noquote" : "constant");
    line("bid_offset", c.agent_bid_offset);
    line("ask_offset", c.agent_ask_offset);
    line("actions", c.actions);
    s += "\n[sac]\n";
    line("episodes", c.sac.episodes);
    line("update_interval", c.sac.update_interval);
    line("gradient_steps", c.sac.gradient_steps);
    line("lr_actor", c.sac.lr_actor);
    line("lr_critic", c.sac.lr_critic);
    line("lr_alpha", c.sac.lr_alpha);
    line("batch", c.sac.batch);
    line("gamma", c.sac.gamma);
    line("tau", c.sac.tau);
    if (c.sac.fixed_alpha)
        line("alpha", *c.sac.fixed_alpha);
    else
        line("alpha", "auto");
    line("initial_alpha", c.sac.initial_alpha);
    line("hidden", join_ints(c.sac.hidden));
    line("activation", to_string(c.sac.activation));
    line("warmup_steps", c.sac.warmup_steps);
    line("buffer_capacity", c.sac.buffer_capacity);
    s += "\n[dqn]\n";
    line("episodes", c.dqn.episodes);
    line("update_interval", c.dqn.update_interval);
    line("lr", c.dqn.lr);
    line("batch", c.dqn.batch);
    line("gamma", c.dqn.gamma);
    line("epsilon_start", c.dqn.epsilon_start);
    line("epsilon_end", c.dqn.epsilon_end);
    line("epsilon_fraction", c.dqn.epsilon_fraction);
    line("target_sync", c.dqn.target_sync);
    line("hidden", join_ints(c.dqn.hidden));
    line("activation", to_string(c.dqn.activation));
    line("warmup_steps", c.dqn.warmup_steps);
    line("buffer_capacity", c.dqn.buffer_capacity);
    s += "\n[eval]\n";
    line("runs", c.eval.runs);
    line("episodes_per_run", c.eval.episodes_per_run);
    line("threads", c.eval.threads);
    s += "\n[report]\n";
    std::string agents, adversaries;
    for (std::size_t i = 0; i < c.report_agents.size(); ++i)
        agents += (i ? "," : "") + std::string(to_string(c.report_agents[i]));
    for (std::size_t i = 0; i < c.report_adversaries.size(); ++i)
        adversaries += (i ? "," : "") + std::string(to_string(c.report_adversaries[i]));
    line("agents", agents);
    line("adversaries", adversaries);
    line("skip_single_coefficient_risk_averse", c.report_skip_single_coefficient_risk_averse ? "true" : "false");
    if (c.checkpoint_dir) line("checkpoint_dir", c.checkpoint_dir->string());
    s += "\n[run]\n";
    line("seed", c.seed);
    line("out", c.out.string());
    if (c.checkpoint) line("checkpoint", c.checkpoint->string());
    if (c.mm_checkpoint) line("mm_checkpoint", c.mm_checkpoint->string());
    if (c.adversary_checkpoint) line("adversary_checkpoint", c.adversary_checkpoint->string());
    return s;
}

}  // namespace rmm
