#include <doctest.h>

#include <random>
#include <stdexcept>

#include "tag/actuator_encode.hpp"

using namespace tag;

namespace {

TaxelPattern random_pattern(std::mt19937_64& rng) {
    TaxelPattern p;
    for (auto& s : p.states) {
        switch (rng() % 3) {
            case 0: s = TaxelState::neutral; break;
            case 1: s = TaxelState::protrude; break;
            default: s = TaxelState::retract; break;
        }
    }
    return p;
}

bool same(const TaxelPattern& a, const TaxelPattern& b) {
    for (int k = 0; k < kTaxelCount; ++k) {
        if (a.states[k] != b.states[k]) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("actuator_encode");

TEST_CASE("tri-state electrode mapping") {
    TaxelPattern p;  // all neutral
    CHECK(encode_frame(p).channel_bits.none());

    p.states[0] = TaxelState::protrude;
    const auto f = encode_frame(p);
    CHECK(f.channel_bits.count() == 1);
    CHECK(f.channel_bits.test(0));  // top electrode of taxel 0 at channel 0

    TaxelPattern r;
    r.states[5] = TaxelState::retract;
    const auto fr = encode_frame(r);
    CHECK(fr.channel_bits.count() == 1);
    CHECK(fr.channel_bits.test(11));  // bottom electrode of taxel 5
}

TEST_CASE("decode rejects the forbidden both-electrodes-high state") {
    ActuatorFrame f;
    f.channel_bits.set(6);
    f.channel_bits.set(7);  // taxel 3: top and bottom
    CHECK_THROWS_WITH_AS(decode_frame(f),
                         "taxel 3: both electrodes high (forbidden drive state)",
                         std::invalid_argument);
}

TEST_CASE("encode/decode round trip on random patterns") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_pattern(rng);
        CHECK(same(decode_frame(encode_frame(p)), p));
    }
}

TEST_CASE("payload lengths for every module count") {
    std::mt19937_64 rng(5);
    for (int count = 1; count <= 5; ++count) {
        std::vector<ActuatorFrame> frames;
        for (int m = 0; m < count; ++m) {
            frames.push_back(encode_frame(random_pattern(rng), m));
        }
        const auto s = serialize_chain(frames);
        CHECK(s.payload.size() == static_cast<std::size_t>(64 * count));
        CHECK(s.module_count == count);
        CHECK(s.latched);
    }
}

TEST_CASE("shift order: last module first, channel 63 first within a frame") {
    std::vector<ActuatorFrame> frames(5);
    for (int m = 0; m < 5; ++m) frames[m].module_id = m;
    frames[0].channel_bits.set(0);   // should land at the very end
    frames[4].channel_bits.set(63);  // should land at the very front
    const auto s = serialize_chain(frames);
    REQUIRE(s.payload.size() == 320);
    CHECK(s.payload[0]);
    CHECK(s.payload[319]);
    int ones = 0;
    for (bool b : s.payload) ones += b;
    CHECK(ones == 2);
}

TEST_CASE("serialize validates module ids") {
    std::vector<ActuatorFrame> dup(2);
    dup[0].module_id = 1;
    dup[1].module_id = 1;
    CHECK_THROWS_AS(serialize_chain(dup), std::invalid_argument);

    std::vector<ActuatorFrame> sparse(2);
    sparse[0].module_id = 0;
    sparse[1].module_id = 3;  // not dense
    CHECK_THROWS_AS(serialize_chain(sparse), std::invalid_argument);

    CHECK_THROWS_AS(serialize_chain(std::vector<ActuatorFrame>{}),
                    std::invalid_argument);
    std::vector<ActuatorFrame> six(6);
    for (int m = 0; m < 6; ++m) six[m].module_id = m;
    CHECK_THROWS_AS(serialize_chain(six), std::invalid_argument);
}

TEST_CASE("deserialize: zero payload, bad lengths") {
    ChainStream s;
    s.payload.assign(64, false);
    s.module_count = 1;
    s.latched = true;
    const auto frames = deserialize_chain(s);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].channel_bits.none());
    CHECK(frames[0].module_id == 0);

    ChainStream bad;
    bad.payload.assign(321, false);
    bad.module_count = 5;
    CHECK_THROWS_WITH_AS(deserialize_chain(bad), "payload not a multiple of 64",
                         std::invalid_argument);

    ChainStream mismatch;
    mismatch.payload.assign(128, false);
    mismatch.module_count = 1;
    CHECK_THROWS_AS(deserialize_chain(mismatch), std::invalid_argument);
}

TEST_CASE("serialize/deserialize round trip on random chains") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const int count = 1 + static_cast<int>(rng() % 5);
        std::vector<ActuatorFrame> frames;
        std::vector<TaxelPattern> patterns;
        for (int m = 0; m < count; ++m) {
            patterns.push_back(random_pattern(rng));
            frames.push_back(encode_frame(patterns.back(), m));
        }
        const auto restored = deserialize_chain(serialize_chain(frames));
        REQUIRE(restored.size() == frames.size());
        for (int m = 0; m < count; ++m) {
            CHECK(restored[m].channel_bits.to_ullong() == frames[m].channel_bits.to_ullong());
            CHECK(restored[m].module_id == m);
            CHECK(same(decode_frame(restored[m]), patterns[m]));
        }
    }
}

TEST_CASE("TAGF layout and byte-identical re-read") {
    std::mt19937_64 rng(11);
    std::vector<ActuatorFrame> frames;
    for (int m = 0; m < 5; ++m) frames.push_back(encode_frame(random_pattern(rng), m));
    const auto stream = serialize_chain(frames);
    const auto bytes = tagf_bytes(stream);

    REQUIRE(bytes.size() == 4 + 1 + 1 + 40 + 1);
    CHECK(bytes[0] == 'T');
    CHECK(bytes[1] == 'A');
    CHECK(bytes[2] == 'G');
    CHECK(bytes[3] == 'F');
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[5] == 5);
    CHECK(bytes.back() == 0xff);

    std::size_t offset = 0;
    const auto parsed = parse_tagf(bytes, &offset);
    CHECK(offset == bytes.size());
    CHECK(parsed.module_count == stream.module_count);
    CHECK((parsed.payload == stream.payload));
    CHECK((tagf_bytes(parsed) == bytes));
}

TEST_CASE("TAGF parse errors") {
    std::mt19937_64 rng(13);
    auto bytes = tagf_bytes(serialize_chain(
        std::vector<ActuatorFrame>{encode_frame(random_pattern(rng), 0)}));

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    std::size_t off = 0;
    CHECK_THROWS_AS(parse_tagf(bad_magic, &off), std::invalid_argument);

    auto bad_version = bytes;
    bad_version[4] = 0x02;
    off = 0;
    CHECK_THROWS_AS(parse_tagf(bad_version, &off), std::invalid_argument);

    auto bad_latch = bytes;
    bad_latch.back() = 0x00;
    off = 0;
    CHECK_THROWS_AS(parse_tagf(bad_latch, &off), std::invalid_argument);

    auto truncated = bytes;
    truncated.pop_back();
    truncated.pop_back();
    off = 0;
    CHECK_THROWS_AS(parse_tagf(truncated, &off), std::invalid_argument);
}

TEST_CASE("hex dump starts with the magic bytes") {
    std::mt19937_64 rng(17);
    const auto stream = serialize_chain(
        std::vector<ActuatorFrame>{encode_frame(random_pattern(rng), 0)});
    const auto dump = hex_dump(stream);
    CHECK(dump.substr(0, 11) == "54 41 47 46");  // "TAGF"
}

TEST_SUITE_END();
