#include "rmm/adversary.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace rmm {

namespace {

double to_range(const CoefficientRange& range, double normalized) noexcept {
    const double clamped = std::clamp(normalized, -1.0, 1.0);
    const double value = range.lo + 0.5 * (clamped + 1.0) * (range.hi - range.lo);
    return std::clamp(value, range.lo, range.hi);
}

}  // namespace

std::string_view to_string(AdversaryKind kind) noexcept {
    switch (kind) {
        case AdversaryKind::Fixed: return "fixed";
        case AdversaryKind::Random: return "random";
        case AdversaryKind::StrategicB: return "b";
        case AdversaryKind::StrategicA: return "a";
        case AdversaryKind::StrategicK: return "k";
        case AdversaryKind::StrategicAll: return "all";
    }
    return "unknown";
}

AdversaryKind parse_adversary_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "fixed" || lower == "fix") return AdversaryKind::Fixed;
    if (lower == "random") return AdversaryKind::Random;
    if (lower == "b") return AdversaryKind::StrategicB;
    if (lower == "a") return AdversaryKind::StrategicA;
    if (lower == "k") return AdversaryKind::StrategicK;
    if (lower == "all") return AdversaryKind::StrategicAll;
    throw std::invalid_argument("unknown adversary kind '" + std::string(name) +
                                "' (expected fixed, random, a, b, k or all)");
}

bool is_strategic(AdversaryKind kind) noexcept {
    return kind != AdversaryKind::Fixed && kind != AdversaryKind::Random;
}

int action_dim(AdversaryKind kind) noexcept {
    switch (kind) {
        case AdversaryKind::StrategicB:
        case AdversaryKind::StrategicA:
        case AdversaryKind::StrategicK: return 1;
        case AdversaryKind::StrategicAll: return 3;
        default: return 0;
    }
}

MarketParams fixed_params(const MarketParams& base) noexcept {
    MarketParams p = base;
    p.drift = kFixedDrift;
    p.arrival_scale = kFixedArrival;
    p.decay = kFixedDecay;
    return p;
}

MarketParams sample_random_params(const MarketParams& base, Rng& rng) {
    MarketParams p = base;
    p.drift = std::uniform_real_distribution<double>(kDriftRange.lo, kDriftRange.hi)(rng);
    p.arrival_scale = std::uniform_real_distribution<double>(kArrivalRange.lo, kArrivalRange.hi)(rng);
    p.decay = std::uniform_real_distribution<double>(kDecayRange.lo, kDecayRange.hi)(rng);
    return p;
}

MarketParams strategic_params(AdversaryKind kind, std::span<const double> action, const MarketParams& base) {
    if (!is_strategic(kind)) throw std::invalid_argument("adversary kind is not strategic");
    if (static_cast<int>(action.size()) != action_dim(kind))
        throw std::invalid_argument("adversary action has " + std::to_string(action.size()) +
                                    " components, expected " + std::to_string(action_dim(kind)));
    MarketParams p = fixed_params(base);
    switch (kind) {
        case AdversaryKind::StrategicB: p.drift = to_range(kDriftRange, action[0]); break;
        case AdversaryKind::StrategicA: p.arrival_scale = to_range(kArrivalRange, action[0]); break;
        case AdversaryKind::StrategicK: p.decay = to_range(kDecayRange, action[0]); break;
        case AdversaryKind::StrategicAll:
            p.drift = to_range(kDriftRange, action[0]);
            p.arrival_scale = to_range(kArrivalRange, action[1]);
            p.decay = to_range(kDecayRange, action[2]);
            break;
        default: break;
    }
    return p;
}

double normalize_coefficient(const CoefficientRange& range, double value) noexcept {
    return 2.0 * (value - range.lo) / (range.hi - range.lo) - 1.0;
}

void RandomAdversary::begin_episode(const MarketParams& base, Rng& rng) {
    current_ = sample_random_params(base, rng);
    drawn_ = true;
}

MarketParams RandomAdversary::act(const Observation&, const MarketParams& base, Rng& rng) {
    if (!drawn_) begin_episode(base, rng);
    return current_;
}

StrategicAdversary::StrategicAdversary(AdversaryKind kind, std::shared_ptr<const NormalizedPolicy> policy,
                                       bool per_episode)
    : kind_(kind), policy_(std::move(policy)), per_episode_(per_episode) {
    if (!is_strategic(kind_)) throw std::invalid_argument("strategic adversary needs a strategic kind");
    if (!policy_) throw std::invalid_argument("strategic adversary needs a policy");
    if (policy_->action_dim() != action_dim(kind_))
        throw std::invalid_argument("adversary policy dimension does not match its kind");
}

void StrategicAdversary::begin_episode(const MarketParams&, Rng&) { held_ = false; }

MarketParams StrategicAdversary::act(const Observation& obs, const MarketParams& base, Rng&) {
    if (per_episode_ && held_) return current_;
    const std::vector<double> action = policy_->act(obs);
    current_ = strategic_params(kind_, action, base);
    held_ = true;
    return current_;
}

}  // namespace rmm
