#include "loraflood/service.hpp"

#include "loraflood/error.hpp"
#include "loraflood/workload.hpp"

namespace loraflood {

using nlohmann::json;

namespace {

Registry make_registry(const std::optional<std::filesystem::path>& snapshot) {
  return snapshot ? Registry(*snapshot) : Registry();
}

json counters_json(const MessageCounters& c) {
  return {{"errors", c.errors},
          {"retransmitted", c.retransmitted},
          {"received", c.received},
          {"sent", c.sent},
          {"ignored", c.ignored}};
}

json frame_json(const ControlFrame& f) {
  return {{"source", f.source},
          {"destination", f.destination},
          {"message_id", f.message_id},
          {"action_id", f.action_id}};
}

std::string_view cause_name(ErrorCause cause) {
  switch (cause) {
    case ErrorCause::None: return "none";
    case ErrorCause::LinkLoss: return "link";
    case ErrorCause::Collision: return "collision";
    case ErrorCause::HalfDuplex: return "half-duplex";
  }
  return "unknown";
}

}  // namespace

void EventHub::publish(json body) {
  {
    std::lock_guard lock(mutex_);
    events_.push_back({next_seq_++, std::move(body)});
    if (events_.size() > capacity_) events_.pop_front();
  }
  cv_.notify_all();
}

std::vector<ServiceEvent> EventHub::wait_since(std::uint64_t after, std::chrono::milliseconds wait) {
  std::unique_lock lock(mutex_);
  auto available = [&] { return closed_ || (!events_.empty() && events_.back().seq > after); };
  cv_.wait_for(lock, wait, available);
  std::vector<ServiceEvent> out;
  for (const ServiceEvent& e : events_) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

std::uint64_t EventHub::latest_seq() const {
  std::lock_guard lock(mutex_);
  return next_seq_ - 1;
}

void EventHub::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventHub::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

ActionRequest action_request_from_json(const json& body) {
  if (!body.is_object()) throw Error(Errc::InvalidArgument, "request body must be an object");
  ActionRequest request;
  const auto targets = body.find("targets");
  if (targets == body.end()) throw Error(Errc::InvalidArgument, "targets is required");
  if (targets->is_string()) {
    if (targets->get<std::string>() != "all") {
      throw Error(Errc::InvalidArgument, "targets must be a list of ids or \"all\"");
    }
    request.all = true;
  } else if (targets->is_array()) {
    for (const json& id : *targets) {
      if (!id.is_number_unsigned()) throw Error(Errc::InvalidArgument, "target ids must be unsigned");
      request.targets.push_back(id.get<DeviceId>());
    }
  } else if (targets->is_number_unsigned()) {
    request.targets.push_back(targets->get<DeviceId>());
  } else {
    throw Error(Errc::InvalidArgument, "targets must be a list of ids or \"all\"");
  }

  const auto action = body.find("action");
  if (action == body.end()) throw Error(Errc::InvalidArgument, "action is required");
  const ActionInfo* info = nullptr;
  if (action->is_number_unsigned()) {
    info = find_action(action->get<std::uint32_t>());
  } else if (action->is_string()) {
    info = find_action(action->get<std::string>());
  }
  if (info == nullptr) throw Error(Errc::UnknownAction, "unknown action " + action->dump());
  request.action_id = static_cast<std::uint32_t>(info->action);

  if (auto it = body.find("timeout_s"); it != body.end()) {
    if (!it->is_number() || it->get<double>() <= 0.0) {
      throw Error(Errc::InvalidArgument, "timeout_s must be a positive number");
    }
    request.timeout = from_seconds(it->get<double>());
  }
  if (auto it = body.find("retries"); it != body.end()) {
    if (!it->is_number_unsigned()) throw Error(Errc::InvalidArgument, "retries must be unsigned");
    request.retries = it->get<unsigned>();
  }
  return request;
}

json dispatch_result_to_json(const DispatchResult& result) {
  json results = json::object();
  for (const TargetResult& r : result.results) {
    json entry = {{"status", r.answered ? "answered" : "timed-out"}, {"attempts", r.attempts}};
    if (r.answered) {
      entry["value"] = r.response.value;
      entry["response_code"] = r.response.action_id * kResponseRadix + r.response.value;
      entry["round_trip_s"] = to_seconds(r.completed_at - r.issued_at);
    }
    results[std::to_string(r.device)] = std::move(entry);
  }
  const ActionInfo* info = find_action(result.action_id);
  return {{"action", result.action_id},
          {"action_name", info ? std::string(info->name) : std::string()},
          {"broadcast", result.broadcast},
          {"started_s", to_seconds(result.started)},
          {"finished_s", to_seconds(result.finished)},
          {"results", std::move(results)}};
}

ControlService::ControlService(Scenario scenario,
                               std::optional<std::filesystem::path> registry_snapshot,
                               SimTime settle)
    : scenario_((scenario.validate(), std::move(scenario))),
      sim_(scenario_.topology(), scenario_.radio, scenario_.seed, scenario_.node_configs()),
      registry_(make_registry(registry_snapshot)),
      controller_(sim_, registry_, scenario_.gateway_id()),
      settle_(settle) {
  if (registry_.size() == 0) {
    for (const NodeSpec& node : scenario_.nodes) registry_.register_device(device_record(node));
  }
  totals_.scenario = scenario_.name;
  totals_.seed = scenario_.seed;
  sim_.set_observer([this](const TraceRecord& record) { observe(record); });
}

void ControlService::observe(const TraceRecord& r) {
  json event = {{"t_s", to_seconds(r.time)}, {"node", r.node}};
  const std::uint32_t mhz = sim_.radio().channels_mhz.at(r.channel);
  switch (r.kind) {
    case TraceKind::TxStart:
      event["type"] = "tx";
      event["frame"] = frame_json(r.frame);
      event["channel_mhz"] = mhz;
      event["airtime_ms"] = static_cast<double>(r.airtime.count()) / 1e3;
      event["kind"] = r.tx_kind == TxKind::Forwarded ? "forward" : "originate";
      event["counters"] = counters_json(sim_.node(r.node).counters());
      break;
    case TraceKind::RxOk:
    case TraceKind::RxError:
    case TraceKind::RxDropped:
      event["type"] = "rx";
      event["from"] = r.peer;
      event["channel_mhz"] = mhz;
      event["outcome"] = r.kind == TraceKind::RxOk      ? "ok"
                         : r.kind == TraceKind::RxError ? "error"
                                                        : "dropped";
      if (r.kind == TraceKind::RxOk) event["frame"] = frame_json(r.frame);
      if (r.kind == TraceKind::RxError) event["cause"] = cause_name(r.cause);
      event["counters"] = counters_json(sim_.node(r.node).counters());
      break;
  }
  events_.publish(std::move(event));
}

json ControlService::list_devices() {
  std::lock_guard lock(mutex_);
  json out = json::array();
  for (const DeviceRecord& record : registry_.list_devices()) out.push_back(to_json(record));
  return out;
}

json ControlService::get_device(DeviceId id) {
  std::lock_guard lock(mutex_);
  return to_json(registry_.get_device(id));
}

json ControlService::register_device(const json& body) {
  std::lock_guard lock(mutex_);
  return to_json(registry_.register_device(device_from_json(body)));
}

json ControlService::update_device(DeviceId id, const json& body) {
  if (!body.is_object()) throw Error(Errc::InvalidRecord, "update body must be an object");
  std::lock_guard lock(mutex_);
  json merged = to_json(registry_.get_device(id));
  merged.merge_patch(body);
  return to_json(registry_.update_device(id, device_from_json(merged)));
}

void ControlService::delete_device(DeviceId id) {
  std::lock_guard lock(mutex_);
  controller_.delete_device(id);
}

DispatchResult ControlService::dispatch(const ActionRequest& request) {
  std::lock_guard lock(mutex_);
  DispatchResult result = controller_.dispatch(request);
  ++totals_.requests;
  for (const TargetResult& r : result.results) {
    if (r.answered) ++totals_.answered;
    else ++totals_.timed_out;
  }
  sim_.run_until(sim_.now() + settle_);
  events_.publish({{"type", "dispatch"},
                   {"t_s", to_seconds(sim_.now())},
                   {"result", dispatch_result_to_json(result)}});
  return result;
}

json ControlService::dispatch(const json& body) {
  return dispatch_result_to_json(dispatch(action_request_from_json(body)));
}

MetricsReport ControlService::metrics() {
  std::lock_guard lock(mutex_);
  RunMetadata meta = totals_;
  meta.simulated_duration_s = to_seconds(sim_.now());
  std::vector<std::pair<DeviceId, std::string>> names = device_names(scenario_);
  for (const DeviceRecord& record : registry_.list_devices()) {
    for (auto& [id, name] : names) {
      if (id == record.device_id) name = record.name;
    }
  }
  return build_report(sim_, names, meta);
}

json ControlService::topology() {
  std::lock_guard lock(mutex_);
  json nodes = json::array();
  for (DeviceId id : sim_.node_ids()) {
    const MeshNode& node = sim_.node(id);
    json entry = {{"id", id},
                  {"alive", node.alive()},
                  {"booting", node.alive() && sim_.now() < node.boot_until()},
                  {"sensor_active", node.sensor_active()},
                  {"ap_active", node.ap_active()},
                  {"ap_clients", node.ap_clients()},
                  {"gateway", id == controller_.gateway()},
                  {"registered", registry_.contains(id)}};
    if (registry_.contains(id)) {
      const DeviceRecord& record = registry_.get_device(id);
      entry["name"] = record.name;
      entry["coordinates"] = {{"latitude", record.coordinates.latitude},
                              {"longitude", record.coordinates.longitude}};
    }
    nodes.push_back(std::move(entry));
  }
  json links = json::array();
  for (const Link& l : sim_.topology().links()) {
    links.push_back({{"a", l.a}, {"b", l.b}, {"p_err", l.p_err}, {"enabled", l.enabled}});
  }
  return {{"now_s", to_seconds(sim_.now())},
          {"channels_mhz", sim_.radio().channels_mhz},
          {"nodes", std::move(nodes)},
          {"links", std::move(links)}};
}

json ControlService::set_link(DeviceId a, DeviceId b, const json& body) {
  if (!body.is_object()) throw Error(Errc::InvalidArgument, "link body must be an object");
  std::lock_guard lock(mutex_);
  const Link* link = sim_.topology().find_link(a, b);
  if (link == nullptr) {
    throw Error(Errc::NotFound, "no link " + std::to_string(a) + "-" + std::to_string(b));
  }
  bool enabled = link->enabled;
  std::optional<double> p_err;
  if (auto it = body.find("enabled"); it != body.end()) {
    if (!it->is_boolean()) throw Error(Errc::InvalidArgument, "enabled must be a boolean");
    enabled = it->get<bool>();
  }
  if (auto it = body.find("p_err"); it != body.end()) {
    if (!it->is_number()) throw Error(Errc::InvalidArgument, "p_err must be a number");
    p_err = it->get<double>();
  }
  sim_.set_link(a, b, enabled, p_err);
  link = sim_.topology().find_link(a, b);
  json out = {{"a", link->a}, {"b", link->b}, {"p_err", link->p_err}, {"enabled", link->enabled}};
  events_.publish({{"type", "link"}, {"t_s", to_seconds(sim_.now())}, {"link", out}});
  return out;
}

}  // namespace loraflood
