#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "loraflood/error.hpp"
#include "loraflood/wire.hpp"
#include "oracles.hpp"

using namespace loraflood;
using namespace loraflood::testing;
using Bytes = std::vector<std::uint8_t>;

namespace {

Errc decode_error(const Bytes& bytes) {
  try {
    decode_frame(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode succeeded");
  return Errc::InvalidArgument;
}

std::uint32_t random_field(std::mt19937_64& rng) {
  // Mix of zeros, small ids and full-width values so every varint length shows up.
  switch (rng() % 4) {
    case 0: return 0;
    case 1: return static_cast<std::uint32_t>(rng() % 128);
    case 2: return static_cast<std::uint32_t>(rng() % 20000);
    default: return static_cast<std::uint32_t>(rng());
  }
}

}  // namespace

TEST_CASE("encode: small frame") {
  CHECK(encode_frame({1, 2, 1, 1}) == Bytes{0x08, 0x01, 0x10, 0x02, 0x18, 0x01, 0x20, 0x01});
}

TEST_CASE("encode: all-zero frame is empty") {
  CHECK(encode_frame({0, 0, 0, 0}).empty());
}

TEST_CASE("encode: maximal frame matches the division oracle") {
  const std::uint32_t max = 4294967295u;
  const Bytes bytes = encode_frame({max, max, max, max});
  REQUIRE(bytes.size() == 24);

  const Bytes group = oracle_varint(max);
  CHECK(group == Bytes{0xFF, 0xFF, 0xFF, 0xFF, 0x0F});
  Bytes expected;
  for (std::uint8_t field = 1; field <= 4; ++field) {
    expected.push_back(static_cast<std::uint8_t>(field * 8));
    expected.insert(expected.end(), group.begin(), group.end());
  }
  CHECK(bytes == expected);
}

TEST_CASE("varint sizes agree with the oracle at every boundary") {
  for (std::uint64_t v : {0ull, 1ull, 127ull, 128ull, 16383ull, 16384ull, 2097151ull, 2097152ull,
                          268435455ull, 268435456ull, 4294967295ull}) {
    const auto value = static_cast<std::uint32_t>(v);
    Bytes out;
    append_varint(out, value);
    CHECK(out == oracle_varint(v));
    CHECK(varint_size(value) == oracle_varint(v).size());
  }
}

TEST_CASE("decode: examples") {
  CHECK(decode_frame(Bytes{0x08, 0x01, 0x10, 0x02, 0x18, 0x01, 0x20, 0x01}) == ControlFrame{1, 2, 1, 1});
  CHECK(decode_frame(Bytes{}) == ControlFrame{});
  CHECK(decode_frame(Bytes{0x20, 0x05}) == ControlFrame{0, 0, 0, 5});
}

TEST_CASE("decode: errors") {
  CHECK(decode_error({0x08, 0xFF}) == Errc::MalformedVarint);
  CHECK(decode_error({0x08}) == Errc::MalformedVarint);
  CHECK(decode_error({0x28, 0x01}) == Errc::UnknownField);  // field 5
  CHECK(decode_error({0x00, 0x01}) == Errc::UnknownField);  // field 0
  CHECK(decode_error({0x09, 0x01}) == Errc::UnknownField);  // wire type 1
  CHECK(decode_error({0x10, 0x01, 0x08, 0x01}) == Errc::TrailingBytes);
  CHECK(decode_error({0x08, 0x01, 0x08, 0x02}) == Errc::TrailingBytes);
  CHECK(decode_error({0x08, 0x80, 0x80, 0x80, 0x80, 0x10}) == Errc::Overflow);
  CHECK(decode_error({0x08, 0xFF, 0xFF, 0xFF, 0xFF, 0x8F, 0x01}) == Errc::Overflow);
}

TEST_CASE("property: round trip, determinism and size bound") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const ControlFrame f{random_field(rng), random_field(rng), random_field(rng), random_field(rng)};
    const Bytes bytes = encode_frame(f);
    REQUIRE(decode_frame(bytes) == f);
    REQUIRE(encode_frame(f) == bytes);
    REQUIRE(bytes.size() <= kMaxFrameBytes);

    std::size_t expected = 0;
    for (std::uint32_t v : {f.source, f.destination, f.message_id, f.action_id}) {
      if (v != 0) expected += 1 + oracle_varint(v).size();
    }
    REQUIRE(bytes.size() == expected);
  }
}

TEST_CASE("property: single-byte fields give 8 bytes") {
  for (std::uint32_t v = 1; v <= 127; ++v) {
    CHECK(encode_frame({v, 128 - v, v, 128 - v}).size() == 8);
  }
}

TEST_CASE("response packing: examples") {
  CHECK(pack_response(5, 3) == 503);
  CHECK(pack_response(0, 0) == 0);
  CHECK(pack_response(9, 99) == 999);
  CHECK(unpack_response(503) == PackedResponse{5, 3});
  CHECK(unpack_response(0) == PackedResponse{0, 0});
  CHECK(unpack_response(999) == PackedResponse{9, 99});
}

TEST_CASE("response packing: brute force against arithmetic") {
  for (std::uint32_t a = 0; a <= 100; ++a) {
    for (std::uint32_t n = 0; n < 100; ++n) {
      std::uint32_t code = 0;
      for (std::uint32_t i = 0; i < a; ++i) code += 100;
      code += n;
      REQUIRE(pack_response(a, n) == code);
      REQUIRE(unpack_response(code) == PackedResponse{a, n});
    }
  }
}

TEST_CASE("response packing: errors") {
  CHECK_THROWS_AS(pack_response(1, 100), Error);
  try {
    pack_response(1, 100);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValueOutOfRange);
  }
  try {
    pack_response(42949673, 0);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Overflow);
  }
  CHECK(pack_response(42949672, 95) == 4294967295u);
}

TEST_CASE("baseline verbose size counts the rendered template") {
  auto counted = [](const ControlFrame& f) {
    const std::string text = std::string("{\"source\":") + std::to_string(f.source) +
                             ",\"destination\":" + std::to_string(f.destination) +
                             ",\"messageId\":" + std::to_string(f.message_id) +
                             ",\"actionId\":" + std::to_string(f.action_id) + "}";
    return text.size();
  };
  const std::uint32_t max = 4294967295u;
  CHECK(baseline_verbose_size({1, 2, 1, 1}) == counted({1, 2, 1, 1}));
  CHECK(baseline_verbose_size({1, 2, 1, 1}) == 55);
  CHECK(baseline_verbose_size({0, 0, 0, 0}) == 55);
  CHECK(baseline_verbose_size({max, max, max, max}) == 91);
  CHECK(baseline_verbose_text({1, 3, 7, 5}) ==
        R"({"source":1,"destination":3,"messageId":7,"actionId":5})");

  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const ControlFrame f{random_field(rng), random_field(rng), random_field(rng), random_field(rng)};
    REQUIRE(baseline_verbose_size(f) == counted(f));
  }
}

TEST_CASE("to_hex") {
  CHECK(to_hex(encode_frame({1, 2, 1, 1})) == "08 01 10 02 18 01 20 01");
  CHECK(to_hex(Bytes{}).empty());
}
