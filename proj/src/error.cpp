#include "loraflood/error.hpp"

namespace loraflood {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedVarint: return "MalformedVarint";
    case Errc::UnknownField: return "UnknownField";
    case Errc::TrailingBytes: return "TrailingBytes";
    case Errc::Overflow: return "Overflow";
    case Errc::ValueOutOfRange: return "ValueOutOfRange";
    case Errc::UnknownAction: return "UnknownAction";
    case Errc::DuplicateDeviceId: return "DuplicateDeviceId";
    case Errc::InvalidCoordinates: return "InvalidCoordinates";
    case Errc::ReservedId: return "ReservedId";
    case Errc::InvalidRecord: return "InvalidRecord";
    case Errc::NotFound: return "NotFound";
    case Errc::NoTargets: return "NoTargets";
    case Errc::GatewayDown: return "GatewayDown";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::EmptyCounters: return "EmptyCounters";
    case Errc::IoFailure: return "IoFailure";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace loraflood
