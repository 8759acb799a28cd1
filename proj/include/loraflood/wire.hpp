#pragma once

// Control-plane wire format.
//
// A frame is four unsigned 32-bit fields. Each non-zero field is written as a
// one-byte key (field_number << 3) followed by the value as a base-128
// little-endian varint, in ascending field order. Zero fields are omitted, so
// an all-zero frame encodes to nothing and the longest frame is 24 bytes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace loraflood {

using DeviceId = std::uint32_t;

/// Destination id addressing every device in the mesh.
inline constexpr DeviceId kBroadcastId = 0;

struct ControlFrame {
  DeviceId source = 0;
  DeviceId destination = 0;
  std::uint32_t message_id = 0;
  std::uint32_t action_id = 0;  // action, or a packed response code

  friend bool operator==(const ControlFrame&, const ControlFrame&) = default;
};

enum class FrameField : std::uint8_t {
  Source = 1,
  Destination = 2,
  MessageId = 3,
  ActionId = 4,
};

inline constexpr std::size_t kMaxFrameBytes = 24;

std::size_t varint_size(std::uint32_t value) noexcept;
void append_varint(std::vector<std::uint8_t>& out, std::uint32_t value);

std::vector<std::uint8_t> encode_frame(const ControlFrame& frame);

/// Throws Error with MalformedVarint, UnknownField, TrailingBytes or Overflow.
///
/// Fields must appear in strictly ascending order; the first key that does not
/// continue the ascending sequence, and everything after it, is reported as
/// TrailingBytes.
ControlFrame decode_frame(std::span<const std::uint8_t> bytes);

// Response packing: a reply carries action_id * 100 + value in its action
// field so the controller can recover both from a single integer.

inline constexpr std::uint32_t kResponseRadix = 100;

struct PackedResponse {
  std::uint32_t action_id = 0;
  std::uint32_t value = 0;

  friend bool operator==(const PackedResponse&, const PackedResponse&) = default;
};

/// Throws ValueOutOfRange when value >= 100 and Overflow when the code would
/// not fit in 32 bits.
std::uint32_t pack_response(std::uint32_t action_id, std::uint32_t value);
PackedResponse unpack_response(std::uint32_t code) noexcept;

/// Length of the JSON rendering the compact encoding replaced:
/// {"source":S,"destination":D,"messageId":M,"actionId":A}
std::size_t baseline_verbose_size(const ControlFrame& frame);
std::string baseline_verbose_text(const ControlFrame& frame);

std::string to_string(const ControlFrame& frame);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace loraflood
