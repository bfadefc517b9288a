#pragma once

namespace mdcrbm {

// Full command-line surface; returns the process exit code (0 success,
// 1 usage, 2 data error, 3 numeric failure). Unit tests call this directly
// with synthetic argv arrays.
int run_cli(int argc, const char* const* argv);

}  // namespace mdcrbm
