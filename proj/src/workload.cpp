#include "loraflood/workload.hpp"

#include <algorithm>

#include "loraflood/error.hpp"

namespace loraflood {

DeviceRecord device_record(const NodeSpec& node) {
  return {node.name, node.id, node.sensor_type, {node.lat, node.lon}, node.notes, node.role};
}

std::vector<std::pair<DeviceId, std::string>> device_names(const Scenario& scenario) {
  std::vector<std::pair<DeviceId, std::string>> names;
  for (const NodeSpec& node : scenario.nodes) names.emplace_back(node.id, node.name);
  return names;
}

WorkloadRun run_workload(const Scenario& scenario, const WorkloadOptions& options) {
  scenario.validate();
  if (options.actions.empty()) throw Error(Errc::InvalidArgument, "workload needs actions");
  const std::uint64_t seed = options.seed.value_or(scenario.seed);

  Simulation sim(scenario.topology(), scenario.radio, seed, scenario.node_configs());
  Registry registry;
  for (const NodeSpec& node : scenario.nodes) registry.register_device(device_record(node));
  Controller controller(sim, registry, scenario.gateway_id());

  std::vector<DeviceId> targets;
  for (const NodeSpec& node : scenario.nodes) {
    if (node.id != scenario.gateway_id()) targets.push_back(node.id);
  }
  std::sort(targets.begin(), targets.end());
  if (targets.empty()) throw Error(Errc::ScenarioInvalid, "scenario has no device besides the gateway");

  RunMetadata meta;
  meta.scenario = scenario.name;
  meta.seed = seed;

  for (std::uint64_t i = 0; sim.now() < options.duration; ++i) {
    ActionRequest request;
    request.targets = {targets[i % targets.size()]};
    request.action_id = options.actions[i % options.actions.size()];
    request.timeout = options.timeout;
    request.retries = options.retries;
    try {
      const DispatchResult result = controller.dispatch(request);
      ++meta.requests;
      if (result.results.front().answered) ++meta.answered;
      else ++meta.timed_out;
    } catch (const Error& e) {
      if (e.code() != Errc::GatewayDown) throw;
    }
    sim.run_until(sim.now() + options.pause);
  }
  if (options.drain) sim.run_until_idle(sim.now() + options.drain_limit);

  meta.simulated_duration_s = to_seconds(sim.now());
  WorkloadRun run;
  run.report = build_report(sim, device_names(scenario), meta);
  run.trace = sim.trace();
  run.transmissions = sim.transmissions();
  run.outbound = controller.outbound();
  run.enqueued = sim.enqueued_count();
  run.left_queued = sim.queued_frames();
  return run;
}

bool verify_determinism(const Scenario& scenario, std::uint64_t seed, int repetitions,
                        WorkloadOptions options, const ScenarioMutator& mutate) {
  if (repetitions < 2) throw Error(Errc::InvalidArgument, "need at least two repetitions");
  options.seed = seed;
  std::string first_report;
  std::string first_trace;
  for (int rep = 0; rep < repetitions; ++rep) {
    Scenario copy = scenario;
    if (mutate) mutate(rep, copy);
    const WorkloadRun run = run_workload(copy, options);
    std::string report = serialize_report(run.report, ReportFormat::Json);
    std::string trace = format_trace(run.trace);
    if (rep == 0) {
      first_report = std::move(report);
      first_trace = std::move(trace);
    } else if (report != first_report || trace != first_trace) {
      return false;
    }
  }
  return true;
}

}  // namespace loraflood
