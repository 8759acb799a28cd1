#include "loraflood/node.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "loraflood/error.hpp"

namespace loraflood {

namespace {

constexpr std::array<ActionInfo, 11> kCatalog{{
    {Action::SensorOn, "sensor-on", "Sensor On", false},
    {Action::SensorOff, "sensor-off", "Sensor Off", false},
    {Action::WifiOn, "wifi-on", "Wi-Fi On", false},
    {Action::WifiOff, "wifi-off", "Wi-Fi Off", false},
    {Action::ApConnectionCount, "ap-connection-count", "AP Connection Count", true},
    {Action::SensorToAp, "sensor-to-ap", "Sensor-to-AP Switch", false},
    {Action::ApToSensor, "ap-to-sensor", "AP-to-Sensor Switch", false},
    {Action::Reboot, "reboot", "Device Reboot", false},
    {Action::ConnectivityCheck, "connectivity-check", "Connectivity Check", true},
    {Action::SensorStatus, "sensor-status", "Sensor Status Check", true},
    {Action::ApStatus, "ap-status", "AP Status Check", true},
}};

std::string fold(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == ' ' || c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

constexpr std::uint32_t kOk = 1;
constexpr std::uint32_t kFailed = 0;

}  // namespace

std::string_view to_string(MeshRole role) noexcept {
  return role == MeshRole::MPP ? "MPP" : "MP";
}

MeshRole parse_mesh_role(std::string_view text) {
  const std::string folded = fold(text);
  if (folded == "mpp") return MeshRole::MPP;
  if (folded == "mp") return MeshRole::MP;
  throw Error(Errc::InvalidArgument, "mesh role must be MPP or MP, got '" + std::string(text) + "'");
}

std::span<const ActionInfo> action_catalog() noexcept { return kCatalog; }

const ActionInfo* find_action(std::uint32_t action_id) noexcept {
  if (action_id == 0 || action_id > kCatalog.size()) return nullptr;
  return &kCatalog[action_id - 1];
}

const ActionInfo* find_action(std::string_view name) noexcept {
  const std::string folded = fold(name);
  for (const auto& info : kCatalog) {
    if (fold(info.name) == folded || fold(info.label) == folded) return &info;
  }
  return nullptr;
}

MeshNode::MeshNode(const NodeConfig& config)
    : id_(config.id),
      role_(config.role),
      has_sensor_(config.has_sensor),
      sensor_active_(config.has_sensor && config.sensor_active),
      ap_active_(config.ap_active),
      boot_delay_(config.boot_delay),
      received_cache_(config.dedup_capacity),
      forwarded_cache_(config.dedup_capacity) {
  if (id_ == kBroadcastId) throw Error(Errc::ReservedId, "device id 0 is the broadcast address");
  set_ap_clients(config.ap_clients);
}

void MeshNode::set_ap_clients(std::uint32_t clients) {
  if (clients >= kResponseRadix) {
    throw Error(Errc::ValueOutOfRange,
                "ap_clients " + std::to_string(clients) + " does not fit a packed response");
  }
  ap_clients_ = clients;
}

bool MeshNode::duplicate_seen(DeviceId source, std::uint32_t message_id) const {
  return received_cache_.contains(source, message_id) ||
         forwarded_cache_.contains(source, message_id);
}

ControlFrame MeshNode::originate(DeviceId destination, std::uint32_t action_id) {
  ControlFrame frame{id_, destination, next_message_id_++, action_id};
  forwarded_cache_.insert(frame.source, frame.message_id);
  return frame;
}

std::uint32_t MeshNode::execute_action(std::uint32_t action_id, SimTime now) {
  const ActionInfo* info = find_action(action_id);
  if (info == nullptr) {
    throw Error(Errc::UnknownAction, "action " + std::to_string(action_id) + " is not in the catalog");
  }
  switch (info->action) {
    case Action::SensorOn:
      if (!has_sensor_) return kFailed;
      sensor_active_ = true;
      return kOk;
    case Action::SensorOff:
      if (!has_sensor_) return kFailed;
      sensor_active_ = false;
      return kOk;
    case Action::WifiOn:
      ap_active_ = true;
      return kOk;
    case Action::WifiOff:
      ap_active_ = false;
      return kOk;
    case Action::ApConnectionCount:
      return ap_active_ ? ap_clients_ : 0;
    case Action::SensorToAp:
      sensor_active_ = false;
      ap_active_ = true;
      return kOk;
    case Action::ApToSensor:
      if (!has_sensor_) return kFailed;
      ap_active_ = false;
      sensor_active_ = true;
      return kOk;
    case Action::Reboot:
      boot_until_ = now + boot_delay_;
      received_cache_.clear();
      forwarded_cache_.clear();
      return kOk;
    case Action::ConnectivityCheck:
      return kOk;
    case Action::SensorStatus:
      return sensor_active_ ? 1 : 0;
    case Action::ApStatus:
      return ap_active_ ? 1 : 0;
  }
  return kFailed;
}

void MeshNode::respond(ReceptionResult& result, const ControlFrame& request, SimTime now) {
  std::uint32_t value = kFailed;
  try {
    value = execute_action(request.action_id, now);
  } catch (const Error& e) {
    if (e.code() != Errc::UnknownAction) throw;
  }
  // Recorded after execution: a reboot wipes the caches but must still
  // remember the frame that triggered it.
  received_cache_.insert(request.source, request.message_id);
  const ControlFrame reply = originate(request.source, pack_response(request.action_id, value));
  result.effects.push_back({Effect::Kind::Respond, reply, std::max(now, boot_until_)});
}

ReceptionResult MeshNode::handle_reception(const ReceptionOutcome& outcome, SimTime now) {
  ReceptionResult result;
  if (!can_transmit(now)) return result;
  if (!outcome) {
    ++counters_.errors;
    result.classification = ReceptionClass::Error;
    return result;
  }
  const ControlFrame& frame = *outcome;
  if (duplicate_seen(frame.source, frame.message_id)) {
    ++counters_.ignored;
    result.classification = ReceptionClass::Ignored;
    return result;
  }

  const bool to_self = frame.destination == id_;
  const bool broadcast = frame.destination == kBroadcastId;
  if (!to_self && !broadcast) {
    ++counters_.retransmitted;
    forwarded_cache_.insert(frame.source, frame.message_id);
    result.classification = ReceptionClass::Retransmitted;
    result.effects.push_back({Effect::Kind::Forward, frame, now});
    return result;
  }

  ++counters_.received;
  result.classification = ReceptionClass::Received;
  if (is_response_code(frame.action_id)) {
    received_cache_.insert(frame.source, frame.message_id);
    result.effects.push_back({Effect::Kind::Deliver, frame, now});
  } else {
    respond(result, frame, now);
  }
  if (broadcast) {
    result.effects.push_back({Effect::Kind::Forward, frame, std::max(now, boot_until_)});
  }
  return result;
}

}  // namespace loraflood
