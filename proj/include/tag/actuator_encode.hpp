#pragma once

#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tag/tactile_map.hpp"

// Wire codec for the 64-channel high-voltage serial-to-parallel drivers.
// Each module drives one fingertip array: taxel k owns channel 2k (top
// electrode) and 2k+1 (bottom electrode), with
//   protrude -> top=1 bottom=0, retract -> top=0 bottom=1, neutral -> 0/0.
// Both electrodes high is a forbidden drive state and is rejected on decode.
//
// Up to five modules daisy-chain on one data line; the last module's bits
// are shifted in first, MSB (channel 63) first within a frame, and a latch
// event terminates the payload.

namespace tag {

inline constexpr int kChannelsPerModule = 64;
inline constexpr int kMaxModules = 5;

struct ActuatorFrame {
    std::bitset<kChannelsPerModule> channel_bits;
    int module_id = 0;
};

struct ChainStream {
    std::vector<bool> payload;  // length 64 * module_count, shift order
    int module_count = 0;
    bool latched = false;       // latch-enable marker after the payload
};

ActuatorFrame encode_frame(const TaxelPattern& pattern, int module_id = 0);

// Exact inverse of encode_frame; throws std::invalid_argument on a frame
// with both electrodes of any taxel high.
TaxelPattern decode_frame(const ActuatorFrame& frame);

// Requires 1..5 frames with distinct module ids dense from 0.
ChainStream serialize_chain(std::span<const ActuatorFrame> frames);

// Exact inverse of serialize_chain; throws std::invalid_argument when the
// payload is not a multiple of 64 bits or the module count is out of range.
std::vector<ActuatorFrame> deserialize_chain(const ChainStream& stream);

// TAGF capture format: magic "TAGF", version 0x01, module-count byte,
// payload bytes packed MSB-first, then a 0xff latch byte.
std::vector<std::uint8_t> tagf_bytes(const ChainStream& stream);

// Parses one TAGF record starting at *offset, advancing it past the record.
ChainStream parse_tagf(std::span<const std::uint8_t> bytes, std::size_t* offset);

std::string hex_dump(const ChainStream& stream);

}  // namespace tag
