#pragma once

namespace wavespec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Parses arguments, honours WAVESPEC_THREADS, runs one subcommand and maps
/// failures to exit codes: 2 for configuration errors, 3 for numerical ones.
int run_cli(int argc, char** argv);

}  // namespace wavespec::cli
