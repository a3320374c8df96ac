#pragma once

#include <span>
#include <string>

#include "dfcv/events.hpp"
#include "dfcv/metrics.hpp"

namespace dfcv {

/// Shortest round-trippable decimal for CSV cells ("%.9g").
std::string format_double(double value);

/// report.csv: one row per run, fixed column order. Undefined metrics
/// (no deliveries, no receptions) become empty fields.
void write_report_csv(const std::string& path,
                      std::span<const RunReport> reports);

/// events.csv: time_s,kind,detail. Details never contain commas.
void write_events_csv(const std::string& path, const EventLog& events);

/// plotdata/{delay,delivery,collision}_vs_vehicles.csv with columns
/// vehicle_count,protocol,mean,stddev_over_seeds; one row per
/// (vehicle_count, protocol) cell, sorted by count then protocol name.
/// Cells whose metric is undefined in every seed keep their row with
/// empty value fields.
void write_plotdata(const std::string& dir,
                    std::span<const RunReport> reports);

/// plotdata/failure_probability_curve.csv: k_max,probability rows for one
/// run's curve. No file content when the curve is empty (still writes the
/// header so consumers see the schema).
void write_failure_curve_csv(const std::string& path,
                             const RunReport& report);

}  // namespace dfcv
