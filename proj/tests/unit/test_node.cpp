#include <random>

#include "doctest.h"
#include "loraflood/error.hpp"
#include "loraflood/node.hpp"

using namespace loraflood;
using namespace std::chrono_literals;

namespace {

NodeConfig config(DeviceId id, std::uint32_t clients = 3) {
  NodeConfig c;
  c.id = id;
  c.ap_clients = clients;
  c.dedup_capacity = 16;
  c.boot_delay = 5s;
  return c;
}

int count(const ReceptionResult& r, Effect::Kind kind) {
  int n = 0;
  for (const Effect& e : r.effects) n += e.kind == kind ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("unicast to self executes and responds with a packed code") {
  MeshNode node(config(3, 3));
  const auto r = node.handle_reception(ControlFrame{1, 3, 1, 5}, 0s);
  CHECK(r.classification == ReceptionClass::Received);
  CHECK(node.counters().received == 1);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].kind == Effect::Kind::Respond);
  CHECK(r.effects[0].frame.source == 3);
  CHECK(r.effects[0].frame.destination == 1);
  CHECK(r.effects[0].frame.action_id == 503);
}

TEST_CASE("duplicate is ignored without execution") {
  MeshNode node(config(3));
  node.handle_reception(ControlFrame{1, 3, 1, 4}, 0s);
  CHECK_FALSE(node.ap_active());
  node.execute_action(3, 0s);
  const auto r = node.handle_reception(ControlFrame{1, 3, 1, 4}, 1s);
  CHECK(r.classification == ReceptionClass::Ignored);
  CHECK(r.effects.empty());
  CHECK(node.ap_active());
  CHECK(node.counters().ignored == 1);
  CHECK(node.counters().received == 1);
}

TEST_CASE("frame for another node is forwarded once") {
  MeshNode node(config(2));
  const auto r = node.handle_reception(ControlFrame{1, 3, 1, 5}, 0s);
  CHECK(r.classification == ReceptionClass::Retransmitted);
  CHECK(node.counters().retransmitted == 1);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].kind == Effect::Kind::Forward);
  CHECK(r.effects[0].frame == ControlFrame{1, 3, 1, 5});
  CHECK(node.handle_reception(ControlFrame{1, 3, 1, 5}, 0s).classification == ReceptionClass::Ignored);
}

TEST_CASE("broadcast executes, responds and forwards") {
  MeshNode node(config(2));
  const auto r = node.handle_reception(ControlFrame{1, kBroadcastId, 1, 9}, 0s);
  CHECK(r.classification == ReceptionClass::Received);
  CHECK(count(r, Effect::Kind::Respond) == 1);
  CHECK(count(r, Effect::Kind::Forward) == 1);
}

TEST_CASE("response addressed to self is delivered up") {
  MeshNode node(config(1));
  const auto r = node.handle_reception(ControlFrame{3, 1, 1, 503}, 0s);
  CHECK(r.classification == ReceptionClass::Received);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].kind == Effect::Kind::Deliver);
}

TEST_CASE("corrupted reception counts an error only") {
  MeshNode node(config(2));
  const auto r = node.handle_reception(std::nullopt, 0s);
  CHECK(r.classification == ReceptionClass::Error);
  CHECK(r.effects.empty());
  CHECK(node.counters() == MessageCounters{1, 0, 0, 0, 0});
}

TEST_CASE("unknown action answers with value 0") {
  MeshNode node(config(3));
  const auto r = node.handle_reception(ControlFrame{1, 3, 1, 42}, 0s);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].frame.action_id == 4200);
  CHECK_THROWS_AS(node.execute_action(42, 0s), Error);
}

TEST_CASE("execute_action examples") {
  SUBCASE("sensor to AP") {
    MeshNode node(config(3));
    node.execute_action(4, 0s);
    REQUIRE(node.sensor_active());
    REQUIRE_FALSE(node.ap_active());
    CHECK(node.execute_action(6, 0s) == 1);
    CHECK_FALSE(node.sensor_active());
    CHECK(node.ap_active());
  }
  SUBCASE("sensor status readback") {
    MeshNode node(config(3));
    node.execute_action(2, 0s);
    CHECK(node.execute_action(10, 0s) == 0);
    node.execute_action(1, 0s);
    CHECK(node.execute_action(10, 0s) == 1);
  }
  SUBCASE("client count") {
    MeshNode none(config(3, 0));
    CHECK(none.execute_action(5, 0s) == 0);
    MeshNode three(config(3, 3));
    CHECK(three.execute_action(5, 0s) == 3);
    three.execute_action(4, 0s);
    CHECK(three.execute_action(5, 0s) == 0);
    CHECK(three.execute_action(11, 0s) == 0);
  }
  SUBCASE("liveness echo") {
    MeshNode node(config(3));
    CHECK(node.execute_action(9, 0s) == 1);
  }
  SUBCASE("sensorless node") {
    NodeConfig c = config(1);
    c.has_sensor = false;
    MeshNode node(c);
    CHECK(node.execute_action(1, 0s) == 0);
    CHECK(node.execute_action(7, 0s) == 0);
  }
}

TEST_CASE("originate numbers frames sequentially") {
  MeshNode gateway(config(1));
  CHECK(gateway.originate(3, 5) == ControlFrame{1, 3, 1, 5});
  CHECK(gateway.originate(3, 5).message_id == 2);
  const ControlFrame reboot = gateway.originate(kBroadcastId, 8);
  CHECK(reboot.destination == kBroadcastId);
  CHECK(reboot.action_id == 8);
  CHECK(gateway.duplicate_seen(1, 1));
  CHECK(gateway.counters().sent == 0);
  gateway.note_sent();
  CHECK(gateway.counters().sent == 1);
}

TEST_CASE("duplicate_seen queries both caches") {
  MeshNode node(config(2));
  CHECK_FALSE(node.duplicate_seen(1, 1));
  node.handle_reception(ControlFrame{1, 2, 1, 9}, 0s);
  node.handle_reception(ControlFrame{1, 4, 2, 9}, 0s);
  CHECK(node.duplicate_seen(1, 1));
  CHECK(node.duplicate_seen(1, 2));
  CHECK(node.received_cache().size() == 1);
  // The relayed frame plus the node's own reply.
  CHECK(node.forwarded_cache().size() == 2);
}

TEST_CASE("duplicate_seen forgets evicted keys") {
  NodeConfig c = config(2);
  c.dedup_capacity = 4;
  MeshNode node(c);
  for (std::uint32_t m = 1; m <= 6; ++m) node.handle_reception(ControlFrame{1, 9, m, 9}, 0s);
  CHECK_FALSE(node.duplicate_seen(1, 1));
  CHECK_FALSE(node.duplicate_seen(1, 2));
  for (std::uint32_t m = 3; m <= 6; ++m) CHECK(node.duplicate_seen(1, m));
}

TEST_CASE("reboot wipes caches, keeps counters and silences the node") {
  MeshNode node(config(3));
  node.handle_reception(ControlFrame{1, 9, 1, 9}, 0s);
  node.handle_reception(ControlFrame{1, 3, 2, 9}, 0s);
  const MessageCounters before = node.counters();

  const auto r = node.handle_reception(ControlFrame{1, 3, 3, 8}, 10s);
  CHECK(node.boot_until() == 15s);
  CHECK_FALSE(node.duplicate_seen(1, 1));
  CHECK_FALSE(node.duplicate_seen(1, 2));
  CHECK(node.duplicate_seen(1, 3));
  CHECK(node.counters().received == before.received + 1);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].not_before == 15s);

  CHECK_FALSE(node.can_transmit(12s));
  const auto silent = node.handle_reception(ControlFrame{1, 3, 4, 9}, 12s);
  CHECK(silent.classification == ReceptionClass::Discarded);
  CHECK(node.counters().received == before.received + 1);
  CHECK(node.can_transmit(15s));
}

TEST_CASE("dead node discards everything") {
  MeshNode node(config(3));
  node.set_alive(false);
  CHECK(node.handle_reception(std::nullopt, 0s).classification == ReceptionClass::Discarded);
  CHECK(node.counters() == MessageCounters{});
}

TEST_CASE("property: each reception lands in exactly one class") {
  std::mt19937_64 rng(5);
  MeshNode node(config(3));
  for (int i = 0; i < 5000; ++i) {
    const MessageCounters before = node.counters();
    ReceptionOutcome outcome;
    if (rng() % 10 != 0) {
      outcome = ControlFrame{static_cast<DeviceId>(1 + rng() % 4), static_cast<DeviceId>(rng() % 5),
                             static_cast<std::uint32_t>(1 + rng() % 50),
                             static_cast<std::uint32_t>(1 + rng() % 11)};
      if (outcome->action_id == 8) outcome->action_id = 9;
    }
    node.handle_reception(outcome, SimTime(i));
    const MessageCounters& after = node.counters();
    REQUIRE(after.receptions() == before.receptions() + 1);
    const int bumped = (after.errors != before.errors) + (after.received != before.received) +
                       (after.retransmitted != before.retransmitted) + (after.ignored != before.ignored);
    REQUIRE(bumped == 1);
  }
}

TEST_CASE("action catalog lookups") {
  CHECK(action_catalog().size() == 11);
  CHECK(find_action(5)->name == "ap-connection-count");
  CHECK(find_action("AP Connection Count")->action == Action::ApConnectionCount);
  CHECK(find_action("ap-connection-count")->action == Action::ApConnectionCount);
  CHECK(find_action("REBOOT")->action == Action::Reboot);
  CHECK(find_action(0u) == nullptr);
  CHECK(find_action(12u) == nullptr);
  CHECK(find_action("warp-drive") == nullptr);
  CHECK(is_response_code(503));
  CHECK(is_response_code(0));
  CHECK_FALSE(is_response_code(11));
}

TEST_CASE("mesh role parsing") {
  CHECK(parse_mesh_role("mpp") == MeshRole::MPP);
  CHECK(parse_mesh_role("MP") == MeshRole::MP);
  CHECK_THROWS_AS(parse_mesh_role("root"), Error);
  CHECK_THROWS_AS(MeshNode(config(3)).set_ap_clients(100), Error);
}
