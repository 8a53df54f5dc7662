// ============================================================================
// cli.hpp -- `sradiag` command-line entry point
//
// Subcommands: simulate, sra, fit, compare, diagnose.
//
// Exit status: 0 success, 2 parse/ordering error in an input file, 3 data
// error (insufficient data, duplicates, domain, model mismatch, ...),
// 4 fit did not converge, 5 configuration or I/O error, 64 usage error.
//
// Relative output paths are resolved against $SRADIAG_OUTPUT_DIR when set.
// ============================================================================
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sradiag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;
inline constexpr int kExitConfig = 5;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kOutputDirEnv = "SRADIAG_OUTPUT_DIR";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sradiag::cli
