#include "loraflood/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "loraflood/error.hpp"

namespace loraflood {

using nlohmann::json;

namespace {

std::string fixed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

json counters_to_json(const MessageCounters& c) {
  return {{"errors", c.errors},
          {"retransmitted", c.retransmitted},
          {"received", c.received},
          {"sent", c.sent},
          {"ignored", c.ignored}};
}

MessageCounters counters_from_json(const json& doc) {
  return {doc.at("errors").get<std::uint64_t>(), doc.at("retransmitted").get<std::uint64_t>(),
          doc.at("received").get<std::uint64_t>(), doc.at("sent").get<std::uint64_t>(),
          doc.at("ignored").get<std::uint64_t>()};
}

json rates_to_json(const std::optional<Rates>& rates) {
  if (!rates) return nullptr;
  return {{"success_rate", rates->success_rate}, {"error_rate", rates->error_rate}};
}

std::optional<Rates> rates_from_json(const json& doc) {
  if (doc.is_null()) return std::nullopt;
  return Rates{doc.at("success_rate").get<double>(), doc.at("error_rate").get<double>()};
}

}  // namespace

Rates compute_rates(const MessageCounters& counters) {
  const std::uint64_t total = counters.receptions();
  if (total == 0) throw Error(Errc::EmptyCounters, "no receptions to rate");
  const double error = static_cast<double>(counters.errors) / static_cast<double>(total);
  return {1.0 - error, error};
}

const DeviceMetrics* MetricsReport::find(DeviceId id) const {
  auto it = std::find_if(devices.begin(), devices.end(),
                         [id](const DeviceMetrics& d) { return d.device == id; });
  return it == devices.end() ? nullptr : &*it;
}

void finalize_aggregate(MetricsReport& report) {
  double success = 0.0;
  double error = 0.0;
  std::size_t rated = 0;
  for (const DeviceMetrics& d : report.devices) {
    if (!d.rates) continue;
    success += d.rates->success_rate;
    error += d.rates->error_rate;
    ++rated;
  }
  if (rated == 0) {
    report.aggregate.reset();
    return;
  }
  report.aggregate = Rates{success / static_cast<double>(rated), error / static_cast<double>(rated)};
}

MetricsReport build_report(const Simulation& sim,
                           const std::vector<std::pair<DeviceId, std::string>>& names,
                           RunMetadata metadata) {
  MetricsReport report;
  report.metadata = std::move(metadata);
  for (DeviceId id : sim.node_ids()) {
    DeviceMetrics d;
    d.device = id;
    auto it = std::find_if(names.begin(), names.end(), [id](const auto& p) { return p.first == id; });
    d.name = it == names.end() ? "device-" + std::to_string(id) : it->second;
    d.counters = sim.node(id).counters();
    if (d.counters.receptions() > 0) d.rates = compute_rates(d.counters);
    report.devices.push_back(std::move(d));
  }
  finalize_aggregate(report);
  return report;
}

ReportFormat parse_report_format(std::string_view token) {
  if (token == "json") return ReportFormat::Json;
  if (token == "csv") return ReportFormat::Csv;
  throw Error(Errc::UnknownFormat, "unknown report format '" + std::string(token) + "'");
}

ReportFormat report_format_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  if (!ext.empty()) ext.erase(0, 1);
  return parse_report_format(ext);
}

json report_to_json(const MetricsReport& report) {
  json devices = json::array();
  for (const DeviceMetrics& d : report.devices) {
    devices.push_back({{"device", d.device},
                       {"name", d.name},
                       {"counters", counters_to_json(d.counters)},
                       {"rates", rates_to_json(d.rates)}});
  }
  const RunMetadata& m = report.metadata;
  return {{"metadata",
           {{"scenario", m.scenario},
            {"seed", m.seed},
            {"simulated_duration_s", m.simulated_duration_s},
            {"requests", m.requests},
            {"answered", m.answered},
            {"timed_out", m.timed_out}}},
          {"devices", std::move(devices)},
          {"aggregate", rates_to_json(report.aggregate)}};
}

MetricsReport report_from_json(const json& doc) {
  try {
    MetricsReport report;
    const json& m = doc.at("metadata");
    report.metadata = {m.at("scenario").get<std::string>(), m.at("seed").get<std::uint64_t>(),
                       m.at("simulated_duration_s").get<double>(),
                       m.at("requests").get<std::uint64_t>(), m.at("answered").get<std::uint64_t>(),
                       m.at("timed_out").get<std::uint64_t>()};
    for (const json& d : doc.at("devices")) {
      report.devices.push_back({d.at("device").get<DeviceId>(), d.at("name").get<std::string>(),
                                counters_from_json(d.at("counters")),
                                rates_from_json(d.at("rates"))});
    }
    report.aggregate = rates_from_json(doc.at("aggregate"));
    return report;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "device,errors,retransmitted,received,sent,ignored,success_rate,error_rate\n";
  MessageCounters total;
  for (const DeviceMetrics& d : report.devices) {
    const MessageCounters& c = d.counters;
    out << d.device << ',' << c.errors << ',' << c.retransmitted << ',' << c.received << ','
        << c.sent << ',' << c.ignored << ',' << (d.rates ? fixed(d.rates->success_rate) : "")
        << ',' << (d.rates ? fixed(d.rates->error_rate) : "") << '\n';
    total.errors += c.errors;
    total.retransmitted += c.retransmitted;
    total.received += c.received;
    total.sent += c.sent;
    total.ignored += c.ignored;
  }
  out << "aggregate," << total.errors << ',' << total.retransmitted << ',' << total.received << ','
      << total.sent << ',' << total.ignored << ','
      << (report.aggregate ? fixed(report.aggregate->success_rate) : "") << ','
      << (report.aggregate ? fixed(report.aggregate->error_rate) : "") << '\n';
  return out.str();
}

std::string serialize_report(const MetricsReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? report_to_json(report).dump(2) + "\n"
                                      : report_to_csv(report);
}

void export_report(const MetricsReport& report, ReportFormat format,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out << serialize_report(report, format);
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

MetricsReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
  }
}

}  // namespace loraflood
