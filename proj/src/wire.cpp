#include "loraflood/wire.hpp"

#include <array>
#include <charconv>
#include <limits>

#include "loraflood/error.hpp"

namespace loraflood {

namespace {

constexpr std::uint8_t kContinuation = 0x80;
constexpr std::uint8_t kPayloadMask = 0x7f;
constexpr std::size_t kMaxVarintBytes = 5;  // ceil(32 / 7)

std::size_t decimal_digits(std::uint32_t value) noexcept {
  std::array<char, 10> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return static_cast<std::size_t>(end - buf.data());
}

struct VarintReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  std::uint32_t read() {
    std::uint64_t value = 0;
    unsigned shift = 0;
    for (std::size_t n = 0;; ++n) {
      if (pos >= bytes.size()) {
        throw Error(Errc::MalformedVarint, "varint truncated at byte " + std::to_string(pos));
      }
      if (n == kMaxVarintBytes) {
        throw Error(Errc::Overflow, "varint longer than 5 bytes at byte " + std::to_string(pos));
      }
      const std::uint8_t byte = bytes[pos++];
      value |= static_cast<std::uint64_t>(byte & kPayloadMask) << shift;
      shift += 7;
      if ((byte & kContinuation) == 0) break;
    }
    if (value > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(Errc::Overflow, "varint value " + std::to_string(value) + " exceeds 32 bits");
    }
    return static_cast<std::uint32_t>(value);
  }
};

}  // namespace

std::size_t varint_size(std::uint32_t value) noexcept {
  std::size_t n = 1;
  while (value >= kContinuation) {
    value >>= 7;
    ++n;
  }
  return n;
}

void append_varint(std::vector<std::uint8_t>& out, std::uint32_t value) {
  while (value >= kContinuation) {
    out.push_back(static_cast<std::uint8_t>(value & kPayloadMask) | kContinuation);
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

std::vector<std::uint8_t> encode_frame(const ControlFrame& frame) {
  const std::array<std::uint32_t, 4> values{frame.source, frame.destination, frame.message_id,
                                            frame.action_id};
  std::vector<std::uint8_t> out;
  out.reserve(kMaxFrameBytes);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) continue;
    out.push_back(static_cast<std::uint8_t>((i + 1) << 3));
    append_varint(out, values[i]);
  }
  return out;
}

ControlFrame decode_frame(std::span<const std::uint8_t> bytes) {
  ControlFrame frame;
  VarintReader reader{bytes};
  unsigned last_field = 0;
  while (reader.pos < bytes.size()) {
    const std::size_t key_pos = reader.pos;
    const std::uint8_t key = bytes[reader.pos];
    // Wire type bits must be zero (varint) and keys are single bytes.
    if ((key & 0x07) != 0 || (key & kContinuation) != 0) {
      throw Error(Errc::UnknownField, "bad key byte at offset " + std::to_string(key_pos));
    }
    const unsigned field = key >> 3;
    if (field < 1 || field > 4) {
      throw Error(Errc::UnknownField,
                  "field " + std::to_string(field) + " at offset " + std::to_string(key_pos));
    }
    if (field <= last_field) {
      throw Error(Errc::TrailingBytes, std::to_string(bytes.size() - key_pos) +
                                           " bytes after complete frame at offset " +
                                           std::to_string(key_pos));
    }
    ++reader.pos;
    const std::uint32_t value = reader.read();
    switch (static_cast<FrameField>(field)) {
      case FrameField::Source: frame.source = value; break;
      case FrameField::Destination: frame.destination = value; break;
      case FrameField::MessageId: frame.message_id = value; break;
      case FrameField::ActionId: frame.action_id = value; break;
    }
    last_field = field;
  }
  return frame;
}

std::uint32_t pack_response(std::uint32_t action_id, std::uint32_t value) {
  if (value >= kResponseRadix) {
    throw Error(Errc::ValueOutOfRange,
                "response value " + std::to_string(value) + " must be below 100");
  }
  const std::uint64_t code = static_cast<std::uint64_t>(action_id) * kResponseRadix + value;
  if (code > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::Overflow, "response code for action " + std::to_string(action_id) +
                                    " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(code);
}

PackedResponse unpack_response(std::uint32_t code) noexcept {
  return {code / kResponseRadix, code % kResponseRadix};
}

std::string baseline_verbose_text(const ControlFrame& frame) {
  return "{\"source\":" + std::to_string(frame.source) +
         ",\"destination\":" + std::to_string(frame.destination) +
         ",\"messageId\":" + std::to_string(frame.message_id) +
         ",\"actionId\":" + std::to_string(frame.action_id) + "}";
}

std::size_t baseline_verbose_size(const ControlFrame& frame) {
  constexpr std::size_t kTemplateChars =
      sizeof("{\"source\":,\"destination\":,\"messageId\":,\"actionId\":}") - 1;
  return kTemplateChars + decimal_digits(frame.source) + decimal_digits(frame.destination) +
         decimal_digits(frame.message_id) + decimal_digits(frame.action_id);
}

std::string to_string(const ControlFrame& frame) {
  return "{src=" + std::to_string(frame.source) + ",dst=" + std::to_string(frame.destination) +
         ",msg=" + std::to_string(frame.message_id) +
         ",action=" + std::to_string(frame.action_id) + "}";
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(bytes.size() * 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out.push_back(kDigits[bytes[i] >> 4]);
    out.push_back(kDigits[bytes[i] & 0x0f]);
  }
  return out;
}

}  // namespace loraflood
