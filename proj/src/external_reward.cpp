#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>

#include "imagery/error.hpp"
#include "imagery/rewards.hpp"

namespace imagery {
namespace {

using Clock = std::chrono::steady_clock;

std::string unique_temp_path() {
  static std::atomic<std::uint64_t> counter{0};
  auto dir = std::filesystem::temp_directory_path();
  return (dir / ("imagery_x0_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)) + ".json"))
      .string();
}

// Drains both pipes until EOF or deadline; returns false on timeout.
bool drain(int out_fd, int err_fd, Clock::time_point deadline,
           std::string& out, std::string& err) {
  bool out_open = true, err_open = true;
  char buf[4096];
  while (out_open || err_open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                         deadline - Clock::now())
                         .count();
    if (remaining < 0) return false;
    pollfd fds[2] = {{out_fd, POLLIN, 0}, {err_fd, POLLIN, 0}};
    fds[0].fd = out_open ? out_fd : -1;
    fds[1].fd = err_open ? err_fd : -1;
    int pr = ::poll(fds, 2, static_cast<int>(remaining) + 1);
    if (pr == 0) return false;
    if (pr < 0) {
      if (errno == EINTR) continue;
      return true;  // give up draining; wait handles the rest
    }
    if (out_open && (fds[0].revents & (POLLIN | POLLHUP))) {
      ssize_t r = ::read(out_fd, buf, sizeof buf);
      if (r > 0)
        out.append(buf, static_cast<std::size_t>(r));
      else
        out_open = false;
    }
    if (err_open && (fds[1].revents & (POLLIN | POLLHUP))) {
      ssize_t r = ::read(err_fd, buf, sizeof buf);
      if (r > 0)
        err.append(buf, static_cast<std::size_t>(r));
      else
        err_open = false;
    }
  }
  return true;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RewardComponents external_reward(const ExternalRewardSpec& spec, const Vec& x0,
                                 const PromptSpec& prompt) {
  if (spec.command.empty())
    throw Error(ErrorKind::ExternalReward, "external reward: empty command");

  const std::string path = unique_temp_path();
  write_json_file(path, json{{"x0", x0}, {"prompt", prompt.text}});
  struct Cleanup {
    const std::string& p;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{path};

  int out_pipe[2], err_pipe[2];
  if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
    throw Error(ErrorKind::ExternalReward, "external reward: pipe() failed");

  pid_t pid = ::fork();
  if (pid < 0)
    throw Error(ErrorKind::ExternalReward, "external reward: fork() failed");
  if (pid == 0) {
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    ::close(err_pipe[1]);
    std::vector<char*> argv;
    argv.reserve(spec.command.size() + 2);
    for (const std::string& a : spec.command)
      argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(const_cast<char*>(path.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(spec.timeout_s));
  std::string out, err;
  bool in_time = drain(out_pipe[0], err_pipe[0], deadline, out, err);
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);

  int status = 0;
  bool exited = false;
  while (true) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      exited = true;
      break;
    }
    if (r < 0) break;
    if (Clock::now() > deadline) {
      in_time = false;
      break;
    }
    ::usleep(1000);
  }
  if (!in_time && !exited) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
  }

  const std::string captured = out + (err.empty() ? "" : "\n[stderr] " + err);
  if (!in_time)
    throw Error(ErrorKind::ExternalReward,
                "external reward: timeout after " +
                    std::to_string(spec.timeout_s) + "s",
                captured);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw Error(ErrorKind::ExternalReward,
                "external reward: command failed (status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status)
                                                     : -1) +
                    ")",
                captured);

  json parsed = json::parse(trim(out), nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw Error(ErrorKind::ExternalReward,
                "external reward: malformed output", captured);
  RewardComponents c;
  auto take = [&](const char* key, double& slot) {
    if (!parsed.contains(key) || !parsed[key].is_number())
      throw Error(ErrorKind::ExternalReward,
                  std::string("external reward: missing numeric '") + key +
                      "'",
                  captured);
    slot = parsed[key].get<double>();
  };
  take("mq", c.mq);
  take("ta", c.ta);
  take("vq", c.vq);
  take("r_any", c.r_any);
  return c;
}

}  // namespace imagery
