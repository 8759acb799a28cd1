#include "loraflood/registry.hpp"

#include <cmath>
#include <fstream>

#include "loraflood/error.hpp"

namespace loraflood {

using nlohmann::json;

nlohmann::json to_json(const DeviceRecord& r) {
  json doc = {{"name", r.name},
              {"device_id", r.device_id},
              {"sensor_type", r.sensor_type},
              {"coordinates", {{"latitude", r.coordinates.latitude},
                               {"longitude", r.coordinates.longitude}}},
              {"notes", r.notes ? json(*r.notes) : json(nullptr)},
              {"mesh_role", std::string(to_string(r.mesh_role))}};
  return doc;
}

DeviceRecord device_from_json(const nlohmann::json& doc) {
  try {
    DeviceRecord r;
    r.name = doc.at("name").get<std::string>();
    r.device_id = doc.at("device_id").get<DeviceId>();
    r.sensor_type = doc.value("sensor_type", std::string{});
    const json& coords = doc.at("coordinates");
    r.coordinates = {coords.at("latitude").get<double>(), coords.at("longitude").get<double>()};
    if (auto it = doc.find("notes"); it != doc.end() && !it->is_null()) {
      r.notes = it->get<std::string>();
    }
    r.mesh_role = parse_mesh_role(doc.at("mesh_role").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidRecord, e.what());
  } catch (const Error& e) {
    throw Error(Errc::InvalidRecord, e.what());
  }
}

Registry::Registry(std::filesystem::path snapshot) : snapshot_(std::move(snapshot)) {
  if (!std::filesystem::exists(*snapshot_)) return;
  std::ifstream in(*snapshot_);
  if (!in) throw Error(Errc::IoFailure, "cannot read registry snapshot " + snapshot_->string());
  try {
    const json doc = json::parse(in);
    for (const json& item : doc.at("devices")) {
      DeviceRecord record = device_from_json(item);
      validate(record);
      devices_.emplace(record.device_id, std::move(record));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::IoFailure, "corrupt registry snapshot: " + std::string(e.what()));
  }
}

void Registry::validate(const DeviceRecord& r) {
  if (r.device_id == kBroadcastId) {
    throw Error(Errc::ReservedId, "device id 0 is reserved for broadcast");
  }
  if (!(std::abs(r.coordinates.latitude) <= 90.0) ||
      !(std::abs(r.coordinates.longitude) <= 180.0)) {
    throw Error(Errc::InvalidCoordinates, "latitude must be in [-90,90] and longitude in [-180,180]");
  }
  if (r.name.empty()) throw Error(Errc::InvalidRecord, "device name is required");
}

const DeviceRecord& Registry::register_device(DeviceRecord record) {
  validate(record);
  const DeviceId id = record.device_id;
  if (devices_.contains(id)) {
    throw Error(Errc::DuplicateDeviceId, "device " + std::to_string(id) + " already registered");
  }
  auto [it, inserted] = devices_.emplace(id, std::move(record));
  persist();
  return it->second;
}

const DeviceRecord& Registry::update_device(DeviceId id, DeviceRecord record) {
  auto it = devices_.find(id);
  if (it == devices_.end()) throw Error(Errc::NotFound, "device " + std::to_string(id));
  if (record.device_id != id) {
    throw Error(Errc::InvalidRecord, "device_id cannot be changed by an update");
  }
  validate(record);
  it->second = std::move(record);
  persist();
  return it->second;
}

void Registry::delete_device(DeviceId id) {
  if (devices_.erase(id) == 0) throw Error(Errc::NotFound, "device " + std::to_string(id));
  persist();
}

const DeviceRecord& Registry::get_device(DeviceId id) const {
  auto it = devices_.find(id);
  if (it == devices_.end()) throw Error(Errc::NotFound, "device " + std::to_string(id));
  return it->second;
}

std::vector<DeviceRecord> Registry::list_devices() const {
  std::vector<DeviceRecord> out;
  out.reserve(devices_.size());
  for (const auto& [id, record] : devices_) out.push_back(record);
  return out;
}

void Registry::persist() const {
  if (!snapshot_) return;
  json devices = json::array();
  for (const auto& [id, record] : devices_) devices.push_back(to_json(record));
  // Atomic replace via rename.
  auto tmp = *snapshot_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot write " + tmp.string());
    out << json{{"devices", std::move(devices)}}.dump(2) << '\n';
    if (!out) throw Error(Errc::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *snapshot_, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot replace " + snapshot_->string() + ": " + ec.message());
}

}  // namespace loraflood
