#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "loraflood/node.hpp"
#include "loraflood/wire.hpp"

namespace loraflood {

struct Coordinates {
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

/// One registered device: name, LoRa id, sensor type, location, notes and
/// mesh role.
struct DeviceRecord {
  std::string name;
  DeviceId device_id = 0;
  std::string sensor_type;
  Coordinates coordinates;
  std::optional<std::string> notes;
  MeshRole mesh_role = MeshRole::MP;

  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

nlohmann::json to_json(const DeviceRecord& record);
/// Throws InvalidRecord for missing or mistyped fields.
DeviceRecord device_from_json(const nlohmann::json& doc);

/// Device registry keyed by id. With a snapshot path, every mutation rewrites
/// the snapshot and construction reloads it.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::filesystem::path snapshot);

  const DeviceRecord& register_device(DeviceRecord record);
  const DeviceRecord& update_device(DeviceId id, DeviceRecord record);
  void delete_device(DeviceId id);
  const DeviceRecord& get_device(DeviceId id) const;
  /// Ascending device id.
  std::vector<DeviceRecord> list_devices() const;

  bool contains(DeviceId id) const { return devices_.contains(id); }
  std::size_t size() const noexcept { return devices_.size(); }
  const std::optional<std::filesystem::path>& snapshot_path() const noexcept { return snapshot_; }

 private:
  static void validate(const DeviceRecord& record);
  void persist() const;

  std::map<DeviceId, DeviceRecord> devices_;
  std::optional<std::filesystem::path> snapshot_;
};

}  // namespace loraflood
