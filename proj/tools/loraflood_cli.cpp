// loraflood: run the evaluation workload, inspect reports, check
// determinism, or serve the northbound API over a simulated mesh.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "loraflood/api_server.hpp"
#include "loraflood/error.hpp"
#include "loraflood/workload.hpp"

using namespace loraflood;

namespace {

Scenario scenario_or_default(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario(path);
}

void print_rates(const MetricsReport& report) {
  std::printf("%-8s %-40s %10s %10s\n", "device", "name", "success", "error");
  for (const DeviceMetrics& d : report.devices) {
    if (d.rates) {
      const Rates rates = compute_rates(d.counters);
      std::printf("%-8u %-40s %9.2f%% %9.2f%%\n", d.device, d.name.c_str(),
                  rates.success_rate * 100.0, rates.error_rate * 100.0);
    } else {
      std::printf("%-8u %-40s %10s %10s\n", d.device, d.name.c_str(), "-", "-");
    }
  }
  MetricsReport recomputed = report;
  for (DeviceMetrics& d : recomputed.devices) {
    if (d.counters.receptions() > 0) d.rates = compute_rates(d.counters);
  }
  finalize_aggregate(recomputed);
  if (recomputed.aggregate) {
    std::printf("%-8s %-40s %9.2f%% %9.2f%%\n", "mean", "", recomputed.aggregate->success_rate * 100.0,
                recomputed.aggregate->error_rate * 100.0);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRa controlled-flooding SDN control plane simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "Run the request workload and write a metrics report");
  double duration_s = 3600.0;
  double pause_s = 1.0;
  std::string out_path;
  std::string trace_path;
  double p_err = -1.0;
  std::vector<std::uint32_t> actions{5, 9, 10, 11};
  run->add_option("--scenario", scenario_path, "Scenario JSON (default: bundled campus scenario)");
  run->add_option("--duration", duration_s, "Workload duration in simulated seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--pause", pause_s, "Pause after each request, seconds")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "Override the scenario seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--out", out_path, "Report path; .json or .csv")->required();
  run->add_option("--trace", trace_path, "Also write the event trace here");
  run->add_option("--p-err", p_err, "Set every link's error probability")->check(CLI::Range(0.0, 1.0));
  run->add_option("--actions", actions, "Action ids cycled by the workload")->delimiter(',');

  auto* rates = app.add_subcommand("rates", "Print success and error rates from a JSON report");
  std::string in_path;
  rates->add_option("--in", in_path, "Report JSON")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Check that repeated runs are identical");
  int reps = 3;
  verify->add_option("--scenario", scenario_path, "Scenario JSON");
  verify->add_option("--seed", seed, "Seed")->each([&](const std::string&) { seed_given = true; });
  verify->add_option("--reps", reps, "Repetitions")->check(CLI::Range(2, 1000));
  verify->add_option("--duration", duration_s, "Workload duration in simulated seconds")
      ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the northbound HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string registry_path;
  serve->add_option("--scenario", scenario_path, "Scenario JSON");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 = any free port)");
  serve->add_option("--registry", registry_path, "Registry snapshot file");

  auto* dump = app.add_subcommand("scenario", "Print the bundled default scenario as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Scenario scenario = scenario_or_default(scenario_path);
      if (p_err >= 0.0) {
        for (Link& link : scenario.links) link.p_err = p_err;
      }
      WorkloadOptions options;
      options.duration = from_seconds(duration_s);
      options.pause = from_seconds(pause_s);
      options.actions = actions;
      if (seed_given) options.seed = seed;
      const ReportFormat format = report_format_for(out_path);
      const WorkloadRun result = run_workload(scenario, options);
      export_report(result.report, format, out_path);
      if (!trace_path.empty()) {
        std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
        trace << format_trace(result.trace);
        if (!trace) throw Error(Errc::IoFailure, "cannot write " + trace_path);
      }
      const RunMetadata& m = result.report.metadata;
      std::printf("requests=%llu answered=%llu timed_out=%llu simulated=%.1fs\n",
                  static_cast<unsigned long long>(m.requests),
                  static_cast<unsigned long long>(m.answered),
                  static_cast<unsigned long long>(m.timed_out), m.simulated_duration_s);
      print_rates(result.report);
      return 0;
    }
    if (*rates) {
      print_rates(load_report(in_path));
      return 0;
    }
    if (*verify) {
      const Scenario scenario = scenario_or_default(scenario_path);
      WorkloadOptions options;
      options.duration = from_seconds(duration_s);
      const bool same =
          verify_determinism(scenario, seed_given ? seed : scenario.seed, reps, options);
      std::printf("%s: %d repetitions %s\n", same ? "deterministic" : "NONDETERMINISTIC", reps,
                  same ? "identical" : "differ");
      return same ? 0 : 1;
    }
    if (*serve) {
      std::optional<std::filesystem::path> snapshot;
      if (!registry_path.empty()) snapshot = registry_path;
      ControlService service(scenario_or_default(scenario_path), snapshot);
      ApiServer server(service);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(Errc::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
      std::printf("listening on http://%s:%d\n", host.c_str(), bound);
      std::fflush(stdout);
      return server.listen() ? 0 : 1;
    }
    if (*dump) {
      std::cout << scenario_to_json(default_scenario()).dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
