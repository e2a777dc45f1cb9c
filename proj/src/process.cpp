#include "sastbench/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <thread>

#include "sastbench/error.hpp"

extern char** environ;

namespace sastbench {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    reset();
    fd_ = std::exchange(other.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(ErrorKind::analyzer_failed, std::string("pipe: ") + std::strerror(errno));
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

void append_tail(std::string& buf, const char* data, std::size_t n, std::size_t limit) {
  buf.append(data, n);
  if (buf.size() > limit) buf.erase(0, buf.size() - limit);
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return 1;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout,
                          const std::filesystem::path& working_dir, std::size_t tail_bytes) {
  if (argv.empty()) throw Error(ErrorKind::analyzer_failed, "empty command");
  using clock = std::chrono::steady_clock;

  auto [out_r, out_w] = make_pipe();
  auto [err_r, err_w] = make_pipe();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out_w.get(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_w.get(), STDERR_FILENO);
  if (!working_dir.empty()) {
    posix_spawn_file_actions_addchdir_np(&actions, working_dir.c_str());
  }
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const auto start = clock::now();
  pid_t pid = 0;
  int rc = ::posix_spawnp(&pid, cargv[0], &actions, &attr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(ErrorKind::analyzer_failed,
                "cannot execute '" + argv[0] + "': " + std::strerror(rc));
  }
  out_w.reset();
  err_w.reset();

  ProcessResult result;
  const auto deadline = start + timeout;
  std::array<char, 4096> buf{};
  bool out_open = true;
  bool err_open = true;
  bool exited = false;
  int status = 0;

  auto remaining_ms = [&]() {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    return std::max<long long>(0, left.count());
  };

  while (!exited) {
    if (clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      exited = true;
      break;
    }
    if (out_open || err_open) {
      std::array<pollfd, 2> pfds{};
      nfds_t n = 0;
      if (out_open) pfds[n++] = {out_r.get(), POLLIN, 0};
      if (err_open) pfds[n++] = {err_r.get(), POLLIN, 0};
      int wait_ms = static_cast<int>(std::min<long long>(remaining_ms(), 50));
      int ready = ::poll(pfds.data(), n, wait_ms);
      if (ready < 0 && errno != EINTR) break;
      for (nfds_t i = 0; i < n && ready > 0; ++i) {
        if ((pfds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
        ssize_t got = ::read(pfds[i].fd, buf.data(), buf.size());
        bool is_out = pfds[i].fd == out_r.get();
        if (got <= 0) {
          (is_out ? out_open : err_open) = false;
        } else {
          append_tail(is_out ? result.stdout_tail : result.stderr_tail, buf.data(),
                      static_cast<std::size_t>(got), tail_bytes);
        }
      }
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) exited = true;
  }

  // Drain whatever is left in the pipes after exit.
  for (auto* fd : {&out_r, &err_r}) {
    int flags = ::fcntl(fd->get(), F_GETFL);
    ::fcntl(fd->get(), F_SETFL, flags | O_NONBLOCK);
    ssize_t got;
    while ((got = ::read(fd->get(), buf.data(), buf.size())) > 0) {
      append_tail(fd == &out_r ? result.stdout_tail : result.stderr_tail, buf.data(),
                  static_cast<std::size_t>(got), tail_bytes);
    }
  }
  // Reap anything else left in the group.
  ::kill(-pid, SIGKILL);

  result.exit_code = decode_status(status);
  result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
  return result;
}

}  // namespace sastbench
