// Copyright 2026 The Debugholes Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEBUGHOLES_SUBPROCESS_H_
#define DEBUGHOLES_SUBPROCESS_H_

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace debugholes {

struct ProcessResult {
  int exit_status = -1;  // exit code, or 128+signal when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
};

struct RunOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(60)};
  std::filesystem::path cwd;
  std::string stdin_data;
};

// Runs argv[0] (PATH lookup applies) to completion or timeout. The child runs
// in its own process group; on timeout the whole group is killed.
ProcessResult RunProcess(const std::vector<std::string>& argv,
                         const RunOptions& options = {});

// Number of child processes spawned by this process so far.
long SpawnCount();

// Renders argv as a shell-quoted command line for logs.
std::string ShellJoin(const std::vector<std::string>& argv);
std::string ShellQuote(const std::string& arg);

// Line-oriented bidirectional pipe to a long-running child (a debugger).
class InteractiveProcess {
 public:
  explicit InteractiveProcess(const std::vector<std::string>& argv,
                              const std::filesystem::path& cwd = {});
  ~InteractiveProcess();
  InteractiveProcess(const InteractiveProcess&) = delete;
  InteractiveProcess& operator=(const InteractiveProcess&) = delete;

  void WriteLine(const std::string& line);
  // Next line from stdout (stderr is merged), or nullopt on EOF/deadline.
  std::optional<std::string> ReadLine(
      std::chrono::steady_clock::time_point deadline);
  bool eof() const { return eof_; }
  void Kill();
  // Waits for exit; returns the exit status.
  int Wait();

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool eof_ = false;
  bool reaped_ = false;
  int status_ = -1;
  std::string buffer_;
};

}  // namespace debugholes

#endif  // DEBUGHOLES_SUBPROCESS_H_
