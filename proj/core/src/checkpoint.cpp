#include "rmm/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

namespace rmm {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'M', 'M', 'C', 'K', 'P', 'T', '\0'};

class Writer {
public:
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    void str32(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    template <typename T>
    void le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw CheckpointError("checkpoint truncated");
    }
    template <typename T>
    T le() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(data_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::uint32_t crc(std::span<const std::uint8_t> data) {
    uLong c = crc32(0L, Z_NULL, 0);
    c = crc32(c, data.data(), static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(c);
}

}  // namespace

std::string_view to_string(CheckpointKind kind) noexcept {
    switch (kind) {
        case CheckpointKind::MarketMaker: return "market_maker";
        case CheckpointKind::Adversary: return "adversary";
        case CheckpointKind::Gate2: return "gate2";
        case CheckpointKind::Gate4: return "gate4";
    }
    return "unknown";
}

const Mlp& Checkpoint::network(std::string_view name) const {
    for (const auto& n : networks)
        if (n.name == name) return n.net;
    throw CheckpointError("checkpoint has no network named '" + std::string(name) + "'");
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.u32(ckpt.version);
    w.u32(static_cast<std::uint32_t>(ckpt.kind));
    w.u32(static_cast<std::uint32_t>(ckpt.adversary));
    w.f64(ckpt.risk.eta);
    w.f64(ckpt.risk.zeta);
    w.u64(ckpt.seed);
    w.u32(static_cast<std::uint32_t>(ckpt.networks.size()));
    for (const auto& [name, net] : ckpt.networks) {
        w.str32(name);
        w.u32(static_cast<std::uint32_t>(net.hidden_activation()));
        w.u32(static_cast<std::uint32_t>(net.sizes().size()));
        for (int s : net.sizes()) w.u32(static_cast<std::uint32_t>(s));
        const std::vector<double> params = net.flat_parameters();
        w.u64(params.size());
        for (double p : params) w.f64(p);
    }
    w.u64(ckpt.config_text.size());
    w.bytes(ckpt.config_text.data(), ckpt.config_text.size());
    w.u32(crc(w.buffer()));
    return std::move(w.buffer());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() + 4 + 4) throw CheckpointError("checkpoint truncated");
    if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) throw CheckpointError("not a checkpoint file (bad magic)");

    Reader r(bytes.subspan(kMagic.size()));
    Checkpoint c;
    c.version = r.u32();
    if (c.version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(c.version) + " (expected " +
                              std::to_string(kCheckpointVersion) + ")");

    const auto body = bytes.first(bytes.size() - 4);
    Reader tail(bytes.last(4));
    if (crc(body) != tail.u32()) throw CheckpointError("checkpoint checksum mismatch");

    const std::uint32_t kind = r.u32();
    if (kind < 1 || kind > 4) throw CheckpointError("unknown checkpoint kind " + std::to_string(kind));
    c.kind = static_cast<CheckpointKind>(kind);
    const std::uint32_t adv = r.u32();
    if (adv > static_cast<std::uint32_t>(AdversaryKind::StrategicAll))
        throw CheckpointError("unknown adversary kind " + std::to_string(adv));
    c.adversary = static_cast<AdversaryKind>(adv);
    c.risk.eta = r.f64();
    c.risk.zeta = r.f64();
    c.seed = r.u64();
    const std::uint32_t n_nets = r.u32();
    for (std::uint32_t i = 0; i < n_nets; ++i) {
        NamedNetwork n;
        n.name = r.str(r.u32());
        const std::uint32_t act = r.u32();
        if (act > static_cast<std::uint32_t>(Activation::Relu)) throw CheckpointError("unknown activation");
        const std::uint32_t n_sizes = r.u32();
        if (n_sizes < 2 || n_sizes > 64) throw CheckpointError("bad layer count in network '" + n.name + "'");
        std::vector<int> sizes(n_sizes);
        for (auto& s : sizes) {
            s = static_cast<int>(r.u32());
            if (s < 1) throw CheckpointError("bad layer size in network '" + n.name + "'");
        }
        const std::uint64_t n_params = r.u64();
        if (n_params > r.remaining() / 8) throw CheckpointError("checkpoint truncated");
        std::vector<double> params(n_params);
        for (auto& p : params) p = r.f64();
        try {
            n.net = Mlp(sizes, static_cast<Activation>(act), params);
        } catch (const std::invalid_argument& e) {
            throw CheckpointError("network '" + n.name + "': " + e.what());
        }
        c.networks.push_back(std::move(n));
    }
    const std::uint64_t cfg_len = r.u64();
    if (cfg_len > r.remaining()) throw CheckpointError("checkpoint truncated");
    c.config_text = r.str(cfg_len);
    if (r.remaining() != 4) throw CheckpointError("trailing bytes in checkpoint");
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(ckpt);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read checkpoint '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_checkpoint(bytes);
    } catch (const CheckpointError& e) {
        throw CheckpointError(path.string() + ": " + e.what());
    }
}

void require_kind(const Checkpoint& ckpt, CheckpointKind expected) {
    if (ckpt.kind != expected)
        throw CheckpointError("expected a " + std::string(to_string(expected)) + " checkpoint, got " +
                              std::string(to_string(ckpt.kind)));
}

std::shared_ptr<ActorOffsetPolicy> mm_policy_from(const Checkpoint& ckpt) {
    require_kind(ckpt, CheckpointKind::MarketMaker);
    try {
        return std::make_shared<ActorOffsetPolicy>(ckpt.network("actor"));
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("market maker actor: ") + e.what());
    }
}

std::shared_ptr<ActorAdversaryPolicy> adversary_policy_from(const Checkpoint& ckpt) {
    require_kind(ckpt, CheckpointKind::Adversary);
    if (!is_strategic(ckpt.adversary)) throw CheckpointError("adversary checkpoint must hold a strategic kind");
    const Mlp& actor = ckpt.network("actor");
    if (actor.input_dim() != 2 || actor.output_dim() != 2 * action_dim(ckpt.adversary))
        throw CheckpointError("adversary actor shape does not match kind " + std::string(to_string(ckpt.adversary)));
    return std::make_shared<ActorAdversaryPolicy>(actor);
}

std::shared_ptr<GatePolicy> gate_policy_from(const Checkpoint& ckpt) {
    if (ckpt.kind != CheckpointKind::Gate2 && ckpt.kind != CheckpointKind::Gate4)
        throw CheckpointError("expected a gate checkpoint, got " + std::string(to_string(ckpt.kind)));
    const int n_actions = ckpt.kind == CheckpointKind::Gate2 ? 2 : 4;
    const Mlp& q = ckpt.network("q");
    if (q.input_dim() != 2 || q.output_dim() != n_actions)
        throw CheckpointError("gate Q-network shape does not match " + std::string(to_string(ckpt.kind)));
    try {
        auto frozen = std::make_shared<const ActorOffsetPolicy>(ckpt.network("mm_actor"));
        return std::make_shared<GatePolicy>(q, frozen);
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("gate: ") + e.what());
    }
}

}  // namespace rmm
