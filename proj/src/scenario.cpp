#include "loraflood/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "loraflood/error.hpp"

namespace loraflood {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error(Errc::ScenarioInvalid, message); }

template <typename T>
T value_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? fallback : it->get<T>();
}

RadioConfig radio_from_json(const json& doc) {
  RadioConfig radio;
  if (!doc.is_object()) return radio;
  radio.air_rate_bps = value_or(doc, "air_rate_bps", radio.air_rate_bps);
  radio.preamble_bytes = value_or(doc, "preamble_bytes", radio.preamble_bytes);
  radio.channels_mhz = value_or(doc, "channels_mhz", radio.channels_mhz);
  radio.slot = from_millis(value_or(doc, "slot_ms", 500.0));
  radio.hop_mode = parse_hop_mode(value_or<std::string>(doc, "hop_mode", "round-robin"));
  radio.duty_limit = value_or(doc, "duty_limit", radio.duty_limit);
  radio.duty_window = from_seconds(value_or(doc, "duty_window_s", 3600.0));
  radio.jitter = from_millis(value_or(doc, "jitter_ms", 200.0));
  radio.listen_before_talk = value_or(doc, "listen_before_talk", radio.listen_before_talk);
  radio.collisions = value_or(doc, "collisions", radio.collisions);
  return radio;
}

json radio_to_json(const RadioConfig& radio) {
  return {
      {"air_rate_bps", radio.air_rate_bps},
      {"preamble_bytes", radio.preamble_bytes},
      {"channels_mhz", radio.channels_mhz},
      {"slot_ms", static_cast<double>(radio.slot.count()) / 1e3},
      {"hop_mode", std::string(to_string(radio.hop_mode))},
      {"duty_limit", radio.duty_limit},
      {"duty_window_s", to_seconds(radio.duty_window)},
      {"jitter_ms", static_cast<double>(radio.jitter.count()) / 1e3},
      {"listen_before_talk", radio.listen_before_talk},
      {"collisions", radio.collisions},
  };
}

}  // namespace

DeviceId Scenario::gateway_id() const {
  if (gateway) return *gateway;
  if (nodes.empty()) invalid("scenario has no nodes");
  return nodes.front().id;
}

void Scenario::validate() const {
  if (nodes.empty()) invalid("scenario has no nodes");
  std::set<DeviceId> ids;
  for (const NodeSpec& node : nodes) {
    if (node.id == kBroadcastId) invalid("node id 0 is reserved for broadcast");
    if (!ids.insert(node.id).second) invalid("duplicate node id " + std::to_string(node.id));
    if (node.name.empty()) invalid("node " + std::to_string(node.id) + " has no name");
    if (!(std::abs(node.lat) <= 90.0 && std::abs(node.lon) <= 180.0)) {
      invalid("node " + std::to_string(node.id) + " coordinates out of range");
    }
    if (node.ap_clients >= kResponseRadix) {
      invalid("node " + std::to_string(node.id) + " ap_clients must be below 100");
    }
  }
  if (!ids.contains(gateway_id())) invalid("gateway " + std::to_string(gateway_id()) + " is not a node");
  if (protocol.dedup_capacity == 0) invalid("dedup_capacity must be positive");
  if (protocol.boot_delay < SimTime::zero()) invalid("boot_delay_s must be >= 0");
  try {
    radio.validate();
    (void)topology();
  } catch (const Error& e) {
    invalid(e.what());
  }
}

Topology Scenario::topology() const {
  std::vector<DeviceId> ids;
  for (const NodeSpec& node : nodes) ids.push_back(node.id);
  return Topology(std::move(ids), links);
}

std::vector<NodeConfig> Scenario::node_configs() const {
  std::vector<NodeConfig> out;
  for (const NodeSpec& spec : nodes) {
    NodeConfig config;
    config.id = spec.id;
    config.role = spec.role;
    config.has_sensor = !spec.sensor_type.empty();
    config.sensor_active = spec.sensor_active;
    config.ap_active = spec.ap_active;
    config.ap_clients = spec.ap_clients;
    config.dedup_capacity = protocol.dedup_capacity;
    config.boot_delay = protocol.boot_delay;
    out.push_back(config);
  }
  return out;
}

Scenario default_scenario() {
  Scenario s;
  s.name = "campus-star";
  s.seed = 1;
  s.gateway = 1;
  s.nodes = {
      {1, "LoRa Gateway", MeshRole::MPP, "", 39.73462, -8.82115, 0,
       "First floor room; hosts the SDN controller", false, false},
      {2, "HaLow Gateway", MeshRole::MPP, "", 39.73465, -8.82122, 2,
       "Behind an open window of the LoRa gateway room", false, true},
      {3, "Smart Temperature and Humidity Sensor", MeshRole::MP, "temperature,humidity",
       39.73391, -8.82207, 3, "Ground floor of a lower building, near a closed window", true, true},
      {4, "Smart Traffic Light", MeshRole::MP, "traffic-light", 39.73498, -8.82031, 1,
       "Second floor balcony ledge", true, true},
  };
  // Far devices see roughly three times the loss of the gateway pair.
  s.links = {
      {1, 2, 0.02, true}, {1, 3, 0.06, true}, {1, 4, 0.06, true},
      {2, 3, 0.06, true}, {2, 4, 0.06, true}, {3, 4, 0.08, true},
  };
  return s;
}

Scenario scenario_from_json(const json& doc) {
  try {
    if (!doc.is_object()) invalid("scenario must be a JSON object");
    Scenario s;
    s.name = value_or<std::string>(doc, "name", s.name);
    s.seed = value_or<std::uint64_t>(doc, "seed", s.seed);
    if (auto it = doc.find("gateway"); it != doc.end() && !it->is_null()) {
      s.gateway = it->get<DeviceId>();
    }
    for (const json& n : doc.at("nodes")) {
      NodeSpec node;
      node.id = n.at("id").get<DeviceId>();
      node.name = n.at("name").get<std::string>();
      node.role = parse_mesh_role(value_or<std::string>(n, "role", "MP"));
      node.sensor_type = value_or<std::string>(n, "sensor_type", "");
      node.lat = value_or(n, "lat", 0.0);
      node.lon = value_or(n, "lon", 0.0);
      node.ap_clients = value_or<std::uint32_t>(n, "ap_clients", 0);
      if (auto it = n.find("notes"); it != n.end() && !it->is_null()) {
        node.notes = it->get<std::string>();
      }
      node.sensor_active = value_or(n, "sensor_active", !node.sensor_type.empty());
      node.ap_active = value_or(n, "ap_active", true);
      s.nodes.push_back(std::move(node));
    }
    if (auto it = doc.find("links"); it != doc.end()) {
      for (const json& l : *it) {
        s.links.push_back({l.at("a").get<DeviceId>(), l.at("b").get<DeviceId>(),
                           value_or(l, "p_err", 0.0), value_or(l, "enabled", true)});
      }
    }
    if (auto it = doc.find("radio"); it != doc.end()) s.radio = radio_from_json(*it);
    if (auto it = doc.find("protocol"); it != doc.end()) {
      s.protocol.dedup_capacity = value_or<std::size_t>(*it, "dedup_capacity", 1024);
      s.protocol.boot_delay = from_seconds(value_or(*it, "boot_delay_s", 5.0));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    invalid(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::ScenarioInvalid) throw;
    invalid(e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const NodeSpec& n : s.nodes) {
    json node = {{"id", n.id},
                 {"name", n.name},
                 {"role", std::string(to_string(n.role))},
                 {"sensor_type", n.sensor_type},
                 {"lat", n.lat},
                 {"lon", n.lon},
                 {"ap_clients", n.ap_clients},
                 {"sensor_active", n.sensor_active},
                 {"ap_active", n.ap_active}};
    if (n.notes) node["notes"] = *n.notes;
    nodes.push_back(std::move(node));
  }
  json links = json::array();
  for (const Link& l : s.links) {
    links.push_back({{"a", l.a}, {"b", l.b}, {"p_err", l.p_err}, {"enabled", l.enabled}});
  }
  json doc = {{"name", s.name},
              {"seed", s.seed},
              {"nodes", std::move(nodes)},
              {"links", std::move(links)},
              {"radio", radio_to_json(s.radio)},
              {"protocol",
               {{"dedup_capacity", s.protocol.dedup_capacity},
                {"boot_delay_s", to_seconds(s.protocol.boot_delay)}}}};
  if (s.gateway) doc["gateway"] = *s.gateway;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write scenario " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

}  // namespace loraflood
