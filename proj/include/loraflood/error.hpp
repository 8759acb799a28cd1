#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loraflood {

enum class Errc {
  // wire
  MalformedVarint,
  UnknownField,
  TrailingBytes,
  Overflow,
  ValueOutOfRange,
  // node / controller
  UnknownAction,
  DuplicateDeviceId,
  InvalidCoordinates,
  ReservedId,
  InvalidRecord,
  NotFound,
  NoTargets,
  GatewayDown,
  // harness
  ScenarioInvalid,
  EmptyCounters,
  IoFailure,
  UnknownFormat,
  InvalidArgument,
};

/// Machine-readable name of an error code, e.g. "DuplicateDeviceId".
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace loraflood
