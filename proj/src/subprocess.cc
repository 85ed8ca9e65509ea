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

#include "debugholes/subprocess.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <string.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>

#include "debugholes/common.h"

namespace debugholes {
namespace {

std::atomic<long> g_spawn_count{0};

std::vector<char*> MakeArgv(const std::vector<std::string>& argv) {
  std::vector<char*> out;
  out.reserve(argv.size() + 1);
  for (const auto& a : argv) out.push_back(const_cast<char*>(a.c_str()));
  out.push_back(nullptr);
  return out;
}

int DecodeStatus(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

// fork+exec with the given fds wired to 0/1/2. Returns the child pid.
pid_t Spawn(const std::vector<std::string>& argv,
            const std::filesystem::path& cwd, int in_fd, int out_fd,
            int err_fd, const std::vector<int>& close_in_child) {
  if (argv.empty()) throw Error(ErrorCode::kIo, "empty argv");
  auto cargv = MakeArgv(argv);
  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::kIo, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(126);
    dup2(in_fd, 0);
    dup2(out_fd, 1);
    dup2(err_fd, 2);
    for (int fd : close_in_child) close(fd);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  setpgid(pid, pid);
  g_spawn_count.fetch_add(1);
  return pid;
}

}  // namespace

long SpawnCount() { return g_spawn_count.load(); }

std::string ShellQuote(const std::string& arg) {
  if (!arg.empty() &&
      arg.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVW"
                            "XYZ0123456789-_=+./:,@%") == std::string::npos) {
    return arg;
  }
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string ShellJoin(const std::vector<std::string>& argv) {
  std::string out;
  for (const auto& a : argv) {
    if (!out.empty()) out += ' ';
    out += ShellQuote(a);
  }
  return out;
}

ProcessResult RunProcess(const std::vector<std::string>& argv,
                         const RunOptions& options) {
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) || pipe2(out_pipe, O_CLOEXEC) ||
      pipe2(err_pipe, O_CLOEXEC)) {
    throw Error(ErrorCode::kIo, "pipe failed");
  }
  pid_t pid = Spawn(argv, options.cwd, in_pipe[0], out_pipe[1], err_pipe[1],
                    {in_pipe[1], out_pipe[0], err_pipe[0]});
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  ProcessResult result;
  size_t written = 0;
  int in_fd = in_pipe[1];
  if (options.stdin_data.empty()) {
    close(in_fd);
    in_fd = -1;
  } else {
    fcntl(in_fd, F_SETFL, O_NONBLOCK);
  }
  int out_fd = out_pipe[0];
  int err_fd = err_pipe[0];
  auto deadline = std::chrono::steady_clock::now() + options.timeout;
  char buf[65536];
  while (out_fd >= 0 || err_fd >= 0) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    pollfd fds[3];
    int n = 0;
    if (out_fd >= 0) fds[n++] = {out_fd, POLLIN, 0};
    if (err_fd >= 0) fds[n++] = {err_fd, POLLIN, 0};
    if (in_fd >= 0) fds[n++] = {in_fd, POLLOUT, 0};
    int rc = poll(fds, n, std::min(wait_ms, 1000));
    if (rc < 0 && errno != EINTR) break;
    for (int i = 0; i < n; ++i) {
      if (!fds[i].revents) continue;
      if (fds[i].fd == in_fd) {
        ssize_t w = write(in_fd, options.stdin_data.data() + written,
                          options.stdin_data.size() - written);
        if (w > 0) written += static_cast<size_t>(w);
        if (w < 0 || written == options.stdin_data.size()) {
          close(in_fd);
          in_fd = -1;
        }
        continue;
      }
      ssize_t r = read(fds[i].fd, buf, sizeof(buf));
      if (r > 0) {
        (fds[i].fd == out_fd ? result.out : result.err).append(buf, r);
      } else if (r == 0 || (r < 0 && errno != EINTR && errno != EAGAIN)) {
        close(fds[i].fd);
        if (fds[i].fd == out_fd) out_fd = -1;
        if (fds[i].fd == err_fd) err_fd = -1;
      }
    }
  }
  if (in_fd >= 0) close(in_fd);
  if (out_fd >= 0) close(out_fd);
  if (err_fd >= 0) close(err_fd);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  // Reap stragglers left in the group (e.g. a compiler's cc1 on timeout).
  kill(-pid, SIGKILL);
  result.exit_status = DecodeStatus(status);
  return result;
}

InteractiveProcess::InteractiveProcess(const std::vector<std::string>& argv,
                                       const std::filesystem::path& cwd) {
  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) || pipe2(out_pipe, O_CLOEXEC)) {
    throw Error(ErrorCode::kIo, "pipe failed");
  }
  pid_ = Spawn(argv, cwd, in_pipe[0], out_pipe[1], out_pipe[1],
               {in_pipe[1], out_pipe[0]});
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

InteractiveProcess::~InteractiveProcess() {
  Kill();
  Wait();
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
}

void InteractiveProcess::WriteLine(const std::string& line) {
  if (to_child_ < 0) return;
  std::string data = line + "\n";
  size_t off = 0;
  while (off < data.size()) {
    ssize_t w = write(to_child_, data.data() + off, data.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      return;  // child gone; the reader will observe EOF
    }
    off += static_cast<size_t>(w);
  }
}

std::optional<std::string> InteractiveProcess::ReadLine(
    std::chrono::steady_clock::time_point deadline) {
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (eof_) {
      if (buffer_.empty()) return std::nullopt;
      std::string rest = std::move(buffer_);
      buffer_.clear();
      return rest;
    }
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return std::nullopt;
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = poll(&pfd, 1, std::min(wait_ms, 1000));
    if (rc < 0 && errno != EINTR) {
      eof_ = true;
      continue;
    }
    if (rc <= 0) continue;
    char buf[65536];
    ssize_t r = read(from_child_, buf, sizeof(buf));
    if (r > 0) {
      buffer_.append(buf, r);
    } else if (r == 0 || errno != EINTR) {
      eof_ = true;
    }
  }
}

void InteractiveProcess::Kill() {
  if (pid_ > 0 && !reaped_) kill(-pid_, SIGKILL);
}

int InteractiveProcess::Wait() {
  if (pid_ <= 0 || reaped_) return status_;
  int status = 0;
  while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
  status_ = DecodeStatus(status);
  return status_;
}

}  // namespace debugholes
