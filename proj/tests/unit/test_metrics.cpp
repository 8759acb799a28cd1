#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "loraflood/error.hpp"
#include "loraflood/metrics.hpp"

using namespace loraflood;

namespace {

MetricsReport sample_report() {
  MetricsReport report;
  report.metadata = {"campus-star", 1, 3600.5, 10, 9, 1};
  const MessageCounters counters[] = {
      {3, 0, 200, 210, 97}, {12, 180, 220, 220, 60}, {26, 200, 230, 230, 50}, {0, 0, 0, 0, 0}};
  for (DeviceId id = 1; id <= 4; ++id) {
    DeviceMetrics d{id, "device " + std::to_string(id), counters[id - 1], std::nullopt};
    if (d.counters.receptions() > 0) d.rates = compute_rates(d.counters);
    report.devices.push_back(d);
  }
  finalize_aggregate(report);
  return report;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("rates from counters") {
  CHECK(compute_rates({0, 40, 50, 0, 10}).success_rate == 1.0);
  const Rates five = compute_rates({5, 30, 60, 0, 5});
  CHECK(five.error_rate == doctest::Approx(0.05));
  CHECK(five.success_rate == doctest::Approx(0.95));

  const MessageCounters sensor{26, 200, 230, 230, 50};
  const double expected = 26.0 / (26.0 + 200.0 + 230.0 + 50.0);
  const Rates r = compute_rates(sensor);
  CHECK(r.error_rate == doctest::Approx(expected));
  CHECK(r.error_rate >= 0.0103);
  CHECK(r.error_rate <= 0.1135);
  // Sent frames are not receptions.
  CHECK(compute_rates({1, 0, 1, 1000, 0}).error_rate == doctest::Approx(0.5));
}

TEST_CASE("empty counters cannot be rated") {
  try {
    compute_rates({0, 0, 0, 50, 0});
    FAIL("expected EmptyCounters");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCounters);
  }
}

TEST_CASE("aggregate is the mean over rated devices") {
  const MetricsReport report = sample_report();
  REQUIRE(report.aggregate);
  double sum = 0;
  for (int i = 0; i < 3; ++i) sum += report.devices[static_cast<std::size_t>(i)].rates->error_rate;
  CHECK(report.aggregate->error_rate == doctest::Approx(sum / 3));
  CHECK_FALSE(report.find(4)->rates);
  CHECK(report.find(9) == nullptr);
}

TEST_CASE("csv layout") {
  const std::string csv = report_to_csv(sample_report());
  std::istringstream lines(csv);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "device,errors,retransmitted,received,sent,ignored,success_rate,error_rate");
  CHECK(rows[3] == "3,26,200,230,230,50,0.948617,0.051383");
  CHECK(rows[4] == "4,0,0,0,0,0,,");
  CHECK(rows[5].rfind("aggregate,41,380,650,660,207,", 0) == 0);
}

TEST_CASE("json round trip and field names") {
  const MetricsReport report = sample_report();
  const auto doc = report_to_json(report);
  CHECK(doc.at("metadata").at("scenario") == "campus-star");
  CHECK(doc.at("devices").at(2).at("counters").at("errors") == 26);
  CHECK(doc.at("devices").at(3).at("rates").is_null());
  CHECK(doc.contains("aggregate"));
  CHECK(report_from_json(doc) == report);
  CHECK(report_from_json(nlohmann::json::parse(doc.dump())) == report);
}

TEST_CASE("re-export is byte identical") {
  const auto dir = std::filesystem::temp_directory_path();
  for (ReportFormat format : {ReportFormat::Json, ReportFormat::Csv}) {
    const auto a = dir / "loraflood_report_a";
    const auto b = dir / "loraflood_report_b";
    export_report(sample_report(), format, a);
    export_report(sample_report(), format, b);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == serialize_report(sample_report(), format));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }
  const auto json_path = dir / "loraflood_report.json";
  export_report(sample_report(), ReportFormat::Json, json_path);
  CHECK(load_report(json_path) == sample_report());
  std::filesystem::remove(json_path);
}

TEST_CASE("format tokens") {
  CHECK(parse_report_format("json") == ReportFormat::Json);
  CHECK(parse_report_format("csv") == ReportFormat::Csv);
  CHECK(report_format_for("out/report.csv") == ReportFormat::Csv);
  CHECK(report_format_for("report.json") == ReportFormat::Json);
  for (const char* bad : {"xml", "", "JSON"}) {
    try {
      parse_report_format(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownFormat);
    }
  }
  CHECK_THROWS_AS(report_format_for("report.txt"), Error);
}

TEST_CASE("export to an unwritable path fails") {
  try {
    export_report(sample_report(), ReportFormat::Csv, "/nonexistent-dir/report.csv");
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IoFailure);
  }
}
