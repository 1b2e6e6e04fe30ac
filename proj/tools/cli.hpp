#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mimodoa::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,      ///< bad flags or invalid configuration
    kIo = 3,         ///< unreadable, malformed or unwritable files
    kDegenerate = 4, ///< DegenerateUpdate
    kPeakDeficit = 5,
    kNumeric = 6,    ///< NonFiniteCost, InconsistentSteering, DimensionMismatch
};

/// Default output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "MIMODOA_OUT_DIR";

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mimodoa::cli
