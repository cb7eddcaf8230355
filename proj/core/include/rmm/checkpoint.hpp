#pragma once

// Binary checkpoint of trained networks.
//
// Layout (all integers and floats little-endian):
//   magic "RMMCKPT\0" | u32 version | u32 kind | u32 adversary | f64 eta | f64 zeta
//   | u64 seed | u32 network count | networks | u64 config length | config text
//   | u32 crc32 of every preceding byte
// Each network: u32 name length | name | u32 activation | u32 layer count
//   | u32 sizes... | u64 parameter count | f64 parameters...

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmm/adversary.hpp"
#include "rmm/market.hpp"
#include "rmm/neural.hpp"
#include "rmm/policies.hpp"

namespace rmm {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointKind : std::uint32_t { MarketMaker = 1, Adversary = 2, Gate2 = 3, Gate4 = 4 };
std::string_view to_string(CheckpointKind kind) noexcept;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NamedNetwork {
    std::string name;
    Mlp net;
};

struct Checkpoint {
    std::uint32_t version = kCheckpointVersion;
    CheckpointKind kind = CheckpointKind::MarketMaker;
    AdversaryKind adversary = AdversaryKind::Fixed;
    RiskConfig risk;
    std::uint64_t seed = 0;
    std::vector<NamedNetwork> networks;
    std::string config_text;

    /// Throws CheckpointError when the network is absent.
    const Mlp& network(std::string_view name) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError on truncation, bad magic, unsupported version or checksum mismatch.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws CheckpointError unless ckpt.kind == expected.
void require_kind(const Checkpoint& ckpt, CheckpointKind expected);

std::shared_ptr<ActorOffsetPolicy> mm_policy_from(const Checkpoint& ckpt);
std::shared_ptr<ActorAdversaryPolicy> adversary_policy_from(const Checkpoint& ckpt);
/// Gate checkpoints carry both the Q-network ("q") and the frozen actor ("mm_actor").
std::shared_ptr<GatePolicy> gate_policy_from(const Checkpoint& ckpt);

}  // namespace rmm
