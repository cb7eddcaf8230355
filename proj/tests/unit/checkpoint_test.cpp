#include "rmm/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

namespace rmm {
namespace {

Checkpoint sample_checkpoint(CheckpointKind kind = CheckpointKind::MarketMaker) {
    Rng rng(3);
    Checkpoint c;
    c.kind = kind;
    c.adversary = AdversaryKind::Random;
    c.risk = {0.1, 0.001};
    c.seed = 0xfeedfacecafebeefULL;
    c.networks.push_back({"actor", Mlp({2, 8, 4}, Activation::Tanh, rng)});
    c.config_text = "[env]\ndecay = 1.5\n";
    return c;
}

TEST(CheckpointTest, RoundTripIsBitExact) {
    const Checkpoint c = sample_checkpoint();
    const auto bytes = encode_checkpoint(c);
    const Checkpoint d = decode_checkpoint(bytes);
    EXPECT_EQ(d.version, kCheckpointVersion);
    EXPECT_EQ(d.kind, c.kind);
    EXPECT_EQ(d.adversary, c.adversary);
    EXPECT_EQ(d.risk, c.risk);
    EXPECT_EQ(d.seed, c.seed);
    EXPECT_EQ(d.config_text, c.config_text);
    ASSERT_EQ(d.networks.size(), 1u);
    EXPECT_EQ(d.networks[0].name, "actor");
    EXPECT_EQ(d.network("actor").sizes(), c.network("actor").sizes());
    const auto a = c.network("actor").flat_parameters();
    const auto b = d.network("actor").flat_parameters();
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
    EXPECT_EQ(encode_checkpoint(d), bytes);
}

TEST(CheckpointTest, LayoutStartsWithMagicAndLittleEndianVersion) {
    const auto bytes = encode_checkpoint(sample_checkpoint());
    ASSERT_GT(bytes.size(), 16u);
    EXPECT_EQ(std::memcmp(bytes.data(), "RMMCKPT\0", 8), 0);
    EXPECT_EQ(bytes[8], 1);
    EXPECT_EQ(bytes[9], 0);
    EXPECT_EQ(bytes[12], 1);  // kind: market maker
}

TEST(CheckpointTest, CorruptionIsDetected) {
    auto bytes = encode_checkpoint(sample_checkpoint());
    for (std::size_t pos : {std::size_t{40}, bytes.size() / 2, bytes.size() - 20}) {
        auto corrupt = bytes;
        corrupt[pos] ^= 0x10;
        EXPECT_THROW(decode_checkpoint(corrupt), CheckpointError) << pos;
    }
    try {
        auto corrupt = bytes;
        corrupt[bytes.size() / 2] ^= 0x01;
        decode_checkpoint(corrupt);
        FAIL();
    } catch (const CheckpointError& e) {
        EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos) << e.what();
    }
}

TEST(CheckpointTest, VersionTruncationAndMagic) {
    const auto bytes = encode_checkpoint(sample_checkpoint());
    auto wrong_version = bytes;
    wrong_version[8] = 2;
    try {
        decode_checkpoint(wrong_version);
        FAIL();
    } catch (const CheckpointError& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
    }
    for (std::size_t len : {std::size_t{0}, std::size_t{5}, std::size_t{30}, bytes.size() - 1})
        EXPECT_THROW(decode_checkpoint(std::span(bytes.data(), len)), CheckpointError) << len;
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(decode_checkpoint(bad_magic), CheckpointError);
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_THROW(decode_checkpoint(longer), CheckpointError);
}

TEST(CheckpointTest, KindMismatchIsRejected) {
    Checkpoint adv = sample_checkpoint(CheckpointKind::Adversary);
    adv.adversary = AdversaryKind::StrategicAll;
    Rng rng(1);
    adv.networks[0].net = Mlp({2, 8, 6}, Activation::Tanh, rng);
    EXPECT_THROW(mm_policy_from(adv), CheckpointError);
    EXPECT_NO_THROW(adversary_policy_from(adv));
    EXPECT_THROW(gate_policy_from(adv), CheckpointError);
    EXPECT_THROW(require_kind(adv, CheckpointKind::Gate2), CheckpointError);
    EXPECT_THROW(adv.network("q"), CheckpointError);
}

TEST(CheckpointTest, PolicyLoadersCheckShapes) {
    EXPECT_NO_THROW(mm_policy_from(sample_checkpoint()));
    Checkpoint gate = sample_checkpoint(CheckpointKind::Gate2);
    Rng rng(2);
    gate.networks.push_back({"q", Mlp({2, 8, 4}, Activation::Tanh, rng)});
    gate.networks[0].name = "mm_actor";
    EXPECT_THROW(gate_policy_from(gate), CheckpointError);  // four outputs in a two-action gate
    gate.kind = CheckpointKind::Gate4;
    EXPECT_NO_THROW(gate_policy_from(gate));
}

TEST(CheckpointTest, FileRoundTripAndMissingFile) {
    const auto dir = std::filesystem::temp_directory_path() / "rmm_ckpt_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "nested" / "mm.ckpt";
    save_checkpoint(sample_checkpoint(), path);
    EXPECT_EQ(load_checkpoint(path).seed, sample_checkpoint().seed);
    try {
        load_checkpoint(dir / "absent.ckpt");
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("absent.ckpt"), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rmm
