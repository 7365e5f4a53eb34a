#pragma once

#include <string>
#include <vector>

#include "pubbench/analysis/analysis.hpp"
#include "pubbench/report/csv.hpp"

namespace pubbench::report {

/// Flattens a report into (metric, group, value) rows. Groups are "all",
/// "topic<T>", "topic<T>.sub<S>", "topic<T>.pub<P>.sub<S>", "<FROM>><TO>"
/// for stage hops, "publisher"/"wire"/"subscriber" for spans and
/// "bin<K>" for timeline bins. Ratios and percentages use the shortest
/// decimal form that round-trips.
std::vector<ReportRow> report_rows(const analysis::RunReport& report);

/// Human summary in milliseconds.
std::string report_text(const analysis::RunReport& report);

/// Shortest round-trip decimal form of a double.
std::string format_decimal(double value);

}  // namespace pubbench::report
