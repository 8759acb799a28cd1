#include "loraflood/controller.hpp"

#include <algorithm>

#include "loraflood/error.hpp"

namespace loraflood {

namespace {
constexpr std::size_t kMaxDiagnostics = 256;
}

const TargetResult* DispatchResult::find(DeviceId id) const {
  auto it = std::find_if(results.begin(), results.end(),
                         [id](const TargetResult& r) { return r.device == id; });
  return it == results.end() ? nullptr : &*it;
}

Controller::Controller(Simulation& sim, Registry& registry, DeviceId gateway)
    : sim_(sim), registry_(registry), gateway_(gateway) {
  sim_.set_frame_sink(gateway_, [this](const ControlFrame& frame, SimTime at) {
    correlate_response(frame, at);
  });
}

void Controller::note(std::string message) {
  diagnostics_.push_back(std::move(message));
  if (diagnostics_.size() > kMaxDiagnostics) diagnostics_.pop_front();
}

bool Controller::all_resolved() const {
  return std::none_of(entries_.begin(), entries_.end(), [](const CorrelationEntry& e) {
    return e.state == CorrelationState::Pending;
  });
}

void Controller::issue(std::size_t index) {
  CorrelationEntry& entry = entries_[index];
  const ControlFrame frame = sim_.originate(gateway_, entry.target, entry.action_id);
  outbound_.push_back(frame);
  entry.message_id = frame.message_id;
  entry.issued_at = sim_.now();
  sim_.schedule_call(sim_.now() + timeout_,
                     [this, index, attempt = entry.attempts, generation = generation_] {
                       if (generation == generation_) on_deadline(index, attempt);
                     });
}

void Controller::on_deadline(std::size_t index, unsigned attempt) {
  CorrelationEntry& entry = entries_[index];
  if (entry.state != CorrelationState::Pending || entry.attempts != attempt) return;
  if (entry.attempts <= retries_) {
    ++entry.attempts;
    issue(index);  // fresh message id
    return;
  }
  entry.state = CorrelationState::TimedOut;
  entry.answered_at = sim_.now();
}

DispatchResult Controller::dispatch(const ActionRequest& request) {
  if (find_action(request.action_id) == nullptr) {
    throw Error(Errc::UnknownAction,
                "action " + std::to_string(request.action_id) + " is not in the catalog");
  }
  std::vector<DeviceId> targets;
  if (request.all) {
    for (const DeviceRecord& record : registry_.list_devices()) {
      if (record.device_id != gateway_) targets.push_back(record.device_id);
    }
  } else {
    targets = request.targets;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (DeviceId id : targets) {
      if (!registry_.contains(id)) {
        throw Error(Errc::NotFound, "target " + std::to_string(id) + " is not registered");
      }
    }
  }
  if (targets.empty()) throw Error(Errc::NoTargets, "request selects no devices");
  if (!sim_.has_node(gateway_) || !sim_.node(gateway_).can_transmit(sim_.now())) {
    throw Error(Errc::GatewayDown, "gateway " + std::to_string(gateway_) + " is not running");
  }

  ++generation_;
  entries_.clear();
  timeout_ = request.timeout;
  retries_ = request.all ? 0 : request.retries;

  DispatchResult result;
  result.action_id = request.action_id;
  result.broadcast = request.all;
  result.started = sim_.now();

  for (DeviceId id : targets) {
    CorrelationEntry entry;
    entry.target = id;
    entry.action_id = request.action_id;
    entry.issued_at = sim_.now();
    if (id == gateway_) {
      // The controller's own radio node: no air hop needed.
      entry.value = sim_.node(gateway_).execute_action(request.action_id, sim_.now());
      entry.state = CorrelationState::Answered;
      entry.answered_at = sim_.now();
    }
    entries_.push_back(entry);
  }

  if (request.all) {
    const ControlFrame frame = sim_.originate(gateway_, kBroadcastId, request.action_id);
    outbound_.push_back(frame);
    for (CorrelationEntry& entry : entries_) entry.message_id = frame.message_id;
    sim_.schedule_call(sim_.now() + timeout_, [this, generation = generation_] {
      if (generation != generation_) return;
      for (std::size_t i = 0; i < entries_.size(); ++i) on_deadline(i, 1);
    });
  } else {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].state == CorrelationState::Pending) issue(i);
    }
  }

  while (!all_resolved()) {
    if (!sim_.step()) break;
  }

  for (const CorrelationEntry& entry : entries_) {
    TargetResult r;
    r.device = entry.target;
    r.answered = entry.state == CorrelationState::Answered;
    if (r.answered) r.response = {entry.action_id, entry.value};
    r.attempts = entry.attempts;
    r.issued_at = entry.issued_at;
    r.completed_at = entry.state == CorrelationState::Pending ? sim_.now() : entry.answered_at;
    result.results.push_back(r);
  }
  result.finished = sim_.now();
  return result;
}

ConnectivityResult Controller::connectivity_check(DeviceId id, SimTime timeout) {
  if (!registry_.contains(id)) throw Error(Errc::NotFound, "device " + std::to_string(id));
  ActionRequest request;
  request.targets = {id};
  request.action_id = static_cast<std::uint32_t>(Action::ConnectivityCheck);
  request.timeout = timeout;
  request.retries = 0;
  const DispatchResult result = dispatch(request);
  const TargetResult& target = result.results.front();
  return {target.answered, target.answered ? target.completed_at - target.issued_at : SimTime{0}};
}

void Controller::correlate_response(const ControlFrame& frame, SimTime at) {
  const PackedResponse response = unpack_response(frame.action_id);
  if (!registry_.contains(frame.source)) {
    note("dropped response " + to_string(frame) + " from unregistered device");
    return;
  }
  for (CorrelationEntry& entry : entries_) {
    if (entry.target != frame.source || entry.action_id != response.action_id) continue;
    if (entry.state == CorrelationState::Pending) {
      entry.state = CorrelationState::Answered;
      entry.value = response.value;
      entry.answered_at = at;
    } else {
      note("discarded duplicate response " + to_string(frame));
    }
    return;
  }
  note("dropped unmatched response " + to_string(frame));
}

void Controller::delete_device(DeviceId id) {
  registry_.delete_device(id);
  for (CorrelationEntry& entry : entries_) {
    if (entry.target == id && entry.state == CorrelationState::Pending) {
      entry.state = CorrelationState::TimedOut;
      entry.answered_at = sim_.now();
    }
  }
}

}  // namespace loraflood
