#pragma once

// Scenario files: the devices, link graph, radio parameters and seed of one
// simulated deployment. See docs/scenario.md for the schema.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "loraflood/node.hpp"
#include "loraflood/radio.hpp"

namespace loraflood {

struct NodeSpec {
  DeviceId id = 0;
  std::string name;
  MeshRole role = MeshRole::MP;
  std::string sensor_type;
  double lat = 0.0;
  double lon = 0.0;
  std::uint32_t ap_clients = 0;
  std::optional<std::string> notes;
  bool sensor_active = true;
  bool ap_active = true;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct ProtocolConfig {
  std::size_t dedup_capacity = 1024;
  SimTime boot_delay = std::chrono::seconds(5);

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

struct Scenario {
  std::string name = "scenario";
  std::vector<NodeSpec> nodes;
  std::vector<Link> links;
  RadioConfig radio;
  ProtocolConfig protocol;
  std::uint64_t seed = 1;
  /// Node attached to the controller; defaults to the first listed node.
  std::optional<DeviceId> gateway;

  DeviceId gateway_id() const;
  /// Throws ScenarioInvalid describing the first problem found.
  void validate() const;
  Topology topology() const;
  std::vector<NodeConfig> node_configs() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Four devices on a university campus: the LoRa gateway (1), the HaLow
/// gateway (2), a temperature/humidity sensor (3) and a traffic light (4),
/// all within radio range of each other.
Scenario default_scenario();

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace loraflood
