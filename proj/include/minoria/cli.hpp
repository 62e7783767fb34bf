#pragma once

#include <string>
#include <vector>

namespace minoria {

// Full command-line entry point (subcommands: synth, mine2d, mine-hd,
// kmeans, report). Exposed as a function so tests can drive it in-process.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 no candidate
// passed the disparity threshold.
int run_cli(const std::vector<std::string>& args);

}  // namespace minoria
