#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace sastbench {

struct ProcessResult {
  int exit_code = 0;  // 128 + signal when killed by a signal
  bool timed_out = false;
  std::chrono::milliseconds duration{0};
  std::string stdout_tail;
  std::string stderr_tail;
};

/// Spawns argv[0] (PATH lookup) in its own process group, captures the last
/// `tail_bytes` of stdout/stderr and kills the group once `timeout` elapses.
/// Throws Error{analyzer_failed} when the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout,
                          const std::filesystem::path& working_dir = {},
                          std::size_t tail_bytes = 4096);

}  // namespace sastbench
