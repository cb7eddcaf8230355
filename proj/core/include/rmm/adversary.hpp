#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "rmm/environment.hpp"

namespace rmm {

enum class AdversaryKind : int { Fixed = 0, Random = 1, StrategicB = 2, StrategicA = 3, StrategicK = 4, StrategicAll = 5 };

std::string_view to_string(AdversaryKind kind) noexcept;
/// Accepts fixed, random, a, b, k, all (case-insensitive). Throws std::invalid_argument.
AdversaryKind parse_adversary_kind(std::string_view name);
bool is_strategic(AdversaryKind kind) noexcept;
/// Policy output dimension: 1 for the single-coefficient kinds, 3 for All, 0 otherwise.
int action_dim(AdversaryKind kind) noexcept;

struct CoefficientRange {
    double lo;
    double hi;
    double center() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

inline constexpr CoefficientRange kDriftRange{-5.0, 5.0};
inline constexpr CoefficientRange kArrivalRange{105.0, 175.0};
inline constexpr CoefficientRange kDecayRange{1.125, 1.875};

inline constexpr double kFixedDrift = 0.0;
inline constexpr double kFixedArrival = 140.0;
inline constexpr double kFixedDecay = 1.5;

/// b = 0, A = 140, k = 1.5 on top of the base constants.
MarketParams fixed_params(const MarketParams& base) noexcept;

/// Independent uniform draws of (b, A, k) within the strategic ranges.
MarketParams sample_random_params(const MarketParams& base, Rng& rng);

/// Maps a normalized policy action (nominally in [-1, 1] per dimension, as
/// produced by a tanh-squashed actor) affinely onto the coefficient ranges,
/// clamping anything outside. Dimensions are ordered (b, A, k) for All.
/// Uncontrolled coefficients keep their fixed values.
MarketParams strategic_params(AdversaryKind kind, std::span<const double> action, const MarketParams& base);

/// Inverse of the affine part of strategic_params for one coefficient.
double normalize_coefficient(const CoefficientRange& range, double value) noexcept;

/// Deterministic normalized action of a frozen continuous policy.
class NormalizedPolicy {
public:
    virtual ~NormalizedPolicy() = default;
    virtual int action_dim() const noexcept = 0;
    virtual std::vector<double> act(const Observation& obs) const = 0;
};

class FixedAdversary final : public AdversaryPolicy {
public:
    MarketParams act(const Observation&, const MarketParams& base, Rng&) override { return fixed_params(base); }
};

/// Draws coefficients at the start of each episode and holds them.
class RandomAdversary final : public AdversaryPolicy {
public:
    void begin_episode(const MarketParams& base, Rng& rng) override;
    MarketParams act(const Observation&, const MarketParams& base, Rng& rng) override;

private:
    bool drawn_ = false;
    MarketParams current_;
};

/// Frozen strategic adversary. Acts every step by default; with per_episode
/// it keeps the coefficients chosen at the first step of the episode.
class StrategicAdversary final : public AdversaryPolicy {
public:
    StrategicAdversary(AdversaryKind kind, std::shared_ptr<const NormalizedPolicy> policy, bool per_episode = false);

    void begin_episode(const MarketParams& base, Rng& rng) override;
    MarketParams act(const Observation& obs, const MarketParams& base, Rng& rng) override;

private:
    AdversaryKind kind_;
    std::shared_ptr<const NormalizedPolicy> policy_;
    bool per_episode_;
    bool held_ = false;
    MarketParams current_;
};

}  // namespace rmm
