#include "tag/actuator_encode.hpp"

#include <stdexcept>

namespace tag {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'A', 'G', 'F'};
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint8_t kLatchByte = 0xff;

}  // namespace

ActuatorFrame encode_frame(const TaxelPattern& pattern, int module_id) {
    ActuatorFrame f;
    f.module_id = module_id;
    for (int k = 0; k < kTaxelCount; ++k) {
        switch (pattern.states[k]) {
            case TaxelState::protrude: f.channel_bits.set(2 * k); break;
            case TaxelState::retract: f.channel_bits.set(2 * k + 1); break;
            case TaxelState::neutral: break;
        }
    }
    return f;
}

TaxelPattern decode_frame(const ActuatorFrame& frame) {
    TaxelPattern p;
    for (int k = 0; k < kTaxelCount; ++k) {
        const bool top = frame.channel_bits.test(2 * k);
        const bool bottom = frame.channel_bits.test(2 * k + 1);
        if (top && bottom) {
            throw std::invalid_argument(
                "taxel " + std::to_string(k) +
                ": both electrodes high (forbidden drive state)");
        }
        p.states[k] = top ? TaxelState::protrude
                          : bottom ? TaxelState::retract : TaxelState::neutral;
    }
    return p;
}

ChainStream serialize_chain(std::span<const ActuatorFrame> frames) {
    const int count = static_cast<int>(frames.size());
    if (count < 1 || count > kMaxModules) {
        throw std::invalid_argument("chain must hold 1 to 5 modules");
    }
    std::vector<const ActuatorFrame*> by_id(count, nullptr);
    for (const ActuatorFrame& f : frames) {
        if (f.module_id < 0 || f.module_id >= count || by_id[f.module_id]) {
            throw std::invalid_argument(
                "module ids must be distinct and dense from 0");
        }
        by_id[f.module_id] = &f;
    }

    ChainStream s;
    s.module_count = count;
    s.payload.reserve(static_cast<std::size_t>(count) * kChannelsPerModule);
    // Last module in the chain is shifted in first; MSB-first within a frame.
    for (int m = count - 1; m >= 0; --m) {
        for (int ch = kChannelsPerModule - 1; ch >= 0; --ch) {
            s.payload.push_back(by_id[m]->channel_bits.test(ch));
        }
    }
    s.latched = true;
    return s;
}

std::vector<ActuatorFrame> deserialize_chain(const ChainStream& stream) {
    if (stream.payload.size() % kChannelsPerModule != 0) {
        throw std::invalid_argument("payload not a multiple of 64");
    }
    const int count = static_cast<int>(stream.payload.size() / kChannelsPerModule);
    if (count < 1 || count > kMaxModules) {
        throw std::invalid_argument("chain must hold 1 to 5 modules");
    }
    if (stream.module_count != count) {
        throw std::invalid_argument("module count does not match payload size");
    }

    std::vector<ActuatorFrame> frames(count);
    std::size_t pos = 0;
    for (int m = count - 1; m >= 0; --m) {
        frames[m].module_id = m;
        for (int ch = kChannelsPerModule - 1; ch >= 0; --ch) {
            frames[m].channel_bits.set(ch, stream.payload[pos++]);
        }
    }
    return frames;
}

std::vector<std::uint8_t> tagf_bytes(const ChainStream& stream) {
    if (stream.payload.size() % 8 != 0) {
        throw std::invalid_argument("payload must pack into whole bytes");
    }
    std::vector<std::uint8_t> out;
    out.reserve(6 + stream.payload.size() / 8 + 1);
    for (std::uint8_t m : kMagic) out.push_back(m);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(stream.module_count));
    for (std::size_t i = 0; i < stream.payload.size(); i += 8) {
        std::uint8_t b = 0;
        for (int j = 0; j < 8; ++j) {
            b = static_cast<std::uint8_t>((b << 1) | (stream.payload[i + j] ? 1 : 0));
        }
        out.push_back(b);
    }
    out.push_back(kLatchByte);
    return out;
}

ChainStream parse_tagf(std::span<const std::uint8_t> bytes, std::size_t* offset) {
    std::size_t pos = offset ? *offset : 0;
    auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) {
            throw std::invalid_argument("truncated TAGF record");
        }
    };
    need(6);
    for (int i = 0; i < 4; ++i) {
        if (bytes[pos + i] != kMagic[i]) {
            throw std::invalid_argument("bad TAGF magic");
        }
    }
    if (bytes[pos + 4] != kVersion) {
        throw std::invalid_argument("unsupported TAGF version");
    }
    const int count = bytes[pos + 5];
    if (count < 1 || count > kMaxModules) {
        throw std::invalid_argument("TAGF module count out of range");
    }
    pos += 6;
    const std::size_t payload_bytes = static_cast<std::size_t>(count) * 8;
    need(payload_bytes + 1);

    ChainStream s;
    s.module_count = count;
    s.payload.reserve(payload_bytes * 8);
    for (std::size_t i = 0; i < payload_bytes; ++i) {
        const std::uint8_t b = bytes[pos + i];
        for (int j = 7; j >= 0; --j) s.payload.push_back((b >> j) & 1);
    }
    pos += payload_bytes;
    if (bytes[pos] != kLatchByte) {
        throw std::invalid_argument("missing TAGF latch byte");
    }
    ++pos;
    s.latched = true;
    if (offset) *offset = pos;
    return s;
}

std::string hex_dump(const ChainStream& stream) {
    static const char* digits = "0123456789abcdef";
    const auto bytes = tagf_bytes(stream);
    std::string out;
    out.reserve(bytes.size() * 3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i) out.push_back(i % 16 == 0 ? '\n' : ' ');
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0xf]);
    }
    return out;
}

}  // namespace tag
