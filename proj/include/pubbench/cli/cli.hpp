#pragma once

#include <iosfwd>

namespace pubbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kVersion = "1.0.0";

/// Entry point shared by the `pubbench` binary and the tests.
///
///   run      --config FILE [--<field> VALUE ...] [--out DIR] [--verify-payloads] [--in-time-only]
///   sweep    (--matrix FILE | --preset table1|table2) [--<field> VALUE ...] [--out DIR] [--dry-run]
///   analyze  --in DIR [--out DIR] [--in-time-only] [--bin-ms N]
///   version
///
/// The default output directory is $PUBBENCH_OUT, else ./results.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pubbench::cli
