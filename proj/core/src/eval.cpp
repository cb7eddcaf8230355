#include "rmm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace rmm {

namespace {

struct EpisodeSummary {
    double wealth = 0.0;
    std::array<long, kQuoteModeCount> counts{};
    long spread_n = 0;
    double spread_mean = 0.0;
    double spread_m2 = 0.0;
};

// Chan et al. pairwise combination of (n, mean, M2).
void merge_moments(long& n, double& mean, double& m2, long n_b, double mean_b, double m2_b) {
    if (n_b == 0) return;
    if (n == 0) {
        n = n_b;
        mean = mean_b;
        m2 = m2_b;
        return;
    }
    const long total = n + n_b;
    const double delta = mean_b - mean;
    mean += delta * static_cast<double>(n_b) / static_cast<double>(total);
    m2 += m2_b + delta * delta * static_cast<double>(n) * static_cast<double>(n_b) / static_cast<double>(total);
    n = total;
}

EpisodeSummary run_one(const QuotePolicy& agent, const EnvConfig& env, const AdversaryFactory& make_adversary,
                       std::uint64_t seed) {
    Rng rng(seed);
    std::unique_ptr<AdversaryPolicy> adversary = make_adversary();
    EpisodeSummary s;
    EnvState state = reset(env, rng);
    adversary->begin_episode(env.market, rng);
    while (!state.terminal()) {
        const QuoteAction action = agent.quote(state.observe(), rng);
        StepResult r = step(env, state, action, *adversary, rng);
        ++s.counts[static_cast<std::size_t>(action.mode())];
        if (auto spread = action.spread()) {
            ++s.spread_n;
            const double delta = *spread - s.spread_mean;
            s.spread_mean += delta / static_cast<double>(s.spread_n);
            s.spread_m2 += delta * (*spread - s.spread_mean);
        }
        state = r.next;
    }
    s.wealth = state.wealth();
    return s;
}

double sample_std(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double ordered_mean(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

std::string fmt2(double x) {
    double r = round2(x);
    if (r == 0.0) r = 0.0;  // no "-0.00"
    return fmt::format("{:.2f}", r);
}

}  // namespace

double round2(double x) noexcept {
    const double scaled = x * 100.0;
    // Nudge values sitting a hair below a representable half (e.g. 0.125*100).
    const double nudged = scaled + std::copysign(1e-9, scaled);
    return std::round(nudged) / 100.0;
}

std::optional<double> sharpe(double mean, double std) noexcept {
    if (!(std > 0.0)) return std::nullopt;
    return mean / std;
}

QuotingRatio quoting_ratio_from_counts(const std::array<long, kQuoteModeCount>& counts) {
    long total = 0;
    for (long c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("quoting ratio needs at least one step");
    QuotingRatio q;
    for (std::size_t i = 0; i < counts.size(); ++i)
        q.percent[i] = round2(100.0 * static_cast<double>(counts[i]) / static_cast<double>(total));
    return q;
}

QuotingRatio quoting_ratio(std::span<const StepRecord> records) {
    std::array<long, kQuoteModeCount> counts{};
    for (const auto& r : records) ++counts[static_cast<std::size_t>(r.mode())];
    return quoting_ratio_from_counts(counts);
}

std::optional<SpreadStats> spread_stats(std::span<const StepRecord> records) {
    std::vector<double> spreads;
    for (const auto& r : records)
        if (auto s = r.spread()) spreads.push_back(*s);
    if (spreads.empty()) return std::nullopt;
    SpreadStats out;
    out.mean = ordered_mean(spreads);
    out.std = sample_std(spreads, out.mean);
    return out;
}

void EvalConfig::validate() const {
    if (runs < 1) throw std::invalid_argument("eval.runs must be at least 1");
    if (episodes_per_run < 1) throw std::invalid_argument("eval.episodes_per_run must be at least 1");
    if (threads < 1) throw std::invalid_argument("eval.threads must be at least 1");
}

EvalStats evaluate(const QuotePolicy& agent, const EnvConfig& env, const AdversaryFactory& adversary,
                   const EvalConfig& config) {
    config.validate();
    env.validate();
    const std::size_t total = static_cast<std::size_t>(config.runs) * static_cast<std::size_t>(config.episodes_per_run);
    std::vector<EpisodeSummary> summaries(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
            summaries[i] = run_one(agent, env, adversary, derive_seed(config.seed, i));
    };
    const unsigned n_threads = std::min<unsigned>(config.threads, static_cast<unsigned>(total));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    EvalStats stats;
    stats.episodes = static_cast<long>(total);
    std::vector<double> wealths(total);
    std::array<long, kQuoteModeCount> counts{};
    long spread_n = 0;
    double spread_mean = 0.0, spread_m2 = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const EpisodeSummary& s = summaries[i];
        wealths[i] = s.wealth;
        for (std::size_t m = 0; m < counts.size(); ++m) counts[m] += s.counts[m];
        merge_moments(spread_n, spread_mean, spread_m2, s.spread_n, s.spread_mean, s.spread_m2);
    }
    stats.return_mean = ordered_mean(wealths);
    stats.return_std = sample_std(wealths, stats.return_mean);
    stats.sharpe = sharpe(stats.return_mean, stats.return_std);
    stats.quoting = quoting_ratio_from_counts(counts);
    if (spread_n > 0) {
        SpreadStats sp;
        sp.mean = spread_mean;
        sp.std = spread_n > 1 ? std::sqrt(spread_m2 / static_cast<double>(spread_n - 1)) : 0.0;
        stats.spread = sp;
    }
    const auto per_run = static_cast<std::size_t>(config.episodes_per_run);
    for (int run = 0; run < config.runs; ++run) {
        const std::span<const double> slice(wealths.data() + static_cast<std::size_t>(run) * per_run, per_run);
        stats.run_means.push_back(ordered_mean(slice));
    }
    stats.run_mean_std = sample_std(stats.run_means, ordered_mean(stats.run_means));
    return stats;
}

std::string_view to_string(AgentKind kind) noexcept {
    switch (kind) {
        case AgentKind::AlwaysQuote: return "always_quote";
        case AgentKind::Gate2: return "gate2";
        case AgentKind::Gate4: return "gate4";
    }
    return "unknown";
}

AgentKind parse_agent_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "always_quote" || lower == "mm") return AgentKind::AlwaysQuote;
    if (lower == "gate2") return AgentKind::Gate2;
    if (lower == "gate4") return AgentKind::Gate4;
    throw std::invalid_argument("unknown agent kind '" + std::string(name) + "' (expected always_quote, gate2 or gate4)");
}

std::vector<RiskConfig> standard_risk_settings() {
    return {{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}, {0.1, 0.0}, {0.01, 0.0}, {0.0, 0.01}, {0.0, 0.001}};
}

std::vector<AdversaryKind> standard_adversaries() {
    return {AdversaryKind::Fixed,      AdversaryKind::Random,     AdversaryKind::StrategicA,
            AdversaryKind::StrategicB, AdversaryKind::StrategicK, AdversaryKind::StrategicAll};
}

AdversaryFactory scripted_adversary(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::Fixed: return [] { return std::make_unique<FixedAdversary>(); };
        case AdversaryKind::Random: return [] { return std::make_unique<RandomAdversary>(); };
        default: throw std::invalid_argument("evaluation adversary must be fixed or random");
    }
}

std::vector<ExperimentCell> experiment_matrix(const MatrixConfig& config, const AgentProvider& provider) {
    const AdversaryFactory adversary = scripted_adversary(config.eval_adversary);
    std::vector<ExperimentCell> cells;
    std::uint64_t index = 0;
    for (AgentKind agent : config.agents) {
        for (const RiskConfig& risk : config.risks) {
            for (AdversaryKind adv : config.adversaries) {
                const bool single = adv == AdversaryKind::StrategicA || adv == AdversaryKind::StrategicB ||
                                    adv == AdversaryKind::StrategicK;
                if (config.skip_single_coefficient_risk_averse && single && !risk.risk_neutral()) continue;
                ExperimentCell cell{agent, risk, adv, std::nullopt, {}};
                EvalConfig eval = config.eval;
                eval.seed = derive_seed(config.eval.seed, index++);
                if (auto policy = provider(agent, risk, adv)) {
                    EnvConfig env = config.env;
                    env.risk = risk;
                    cell.stats = evaluate(*policy, env, adversary, eval);
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

void write_csv_header(std::ostream& out) { out << kEvalCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const ExperimentCell& cell) {
    fmt::print(out, "{},{},{},{},", cell.label.empty() ? to_string(cell.agent) : std::string_view(cell.label), cell.risk.eta, cell.risk.zeta, to_string(cell.adversary));
    if (!cell.stats) {
        out << ",,,,,,,,,\n";
        return;
    }
    const EvalStats& s = *cell.stats;
    fmt::print(out, "{},{},{},{},{},{},{},", fmt2(s.return_mean), fmt2(s.return_std),
               s.sharpe ? fmt2(*s.sharpe) : std::string(), fmt2(s.quoting.no_quote()), fmt2(s.quoting.two_sided()),
               fmt2(s.quoting.ask_only()), fmt2(s.quoting.bid_only()));
    fmt::print(out, "{},{},{}\n", s.spread ? fmt2(s.spread->mean) : std::string(),
               s.spread ? fmt2(s.spread->std) : std::string(), s.episodes);
}

void write_csv(std::ostream& out, std::span<const ExperimentCell> cells) {
    write_csv_header(out);
    for (const auto& c : cells) write_csv_row(out, c);
}

}  // namespace rmm
