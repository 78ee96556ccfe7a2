#include "skillforge/sandbox/pty.hpp"

#include <fcntl.h>
#include <poll.h>
#include <pty.h>
#include <signal.h>
#include <sys/ioctl.h>
#include <sys/wait.h>
#include <termios.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

namespace skillforge::sandbox {

namespace {

[[noreturn]] void child_exec(int slave_fd, const std::vector<std::string>& argv,
                             const std::map<std::string, std::string>& env,
                             const std::string& cwd) {
  ::setsid();
  ::ioctl(slave_fd, TIOCSCTTY, 0);
  ::dup2(slave_fd, 0);
  ::dup2(slave_fd, 1);
  ::dup2(slave_fd, 2);
  if (slave_fd > 2) ::close(slave_fd);
  if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(127);

  std::vector<std::string> env_strings;
  env_strings.reserve(env.size());
  for (const auto& [k, v] : env) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  ::execve(argv[0].c_str(), args.data(), envp.data());
  ::_exit(127);
}

}  // namespace

PtyProcess::PtyProcess(std::vector<std::string> argv,
                       std::map<std::string, std::string> env, std::string cwd,
                       int tail_chars)
    : tail_chars_(tail_chars) {
  int master = -1, slave = -1;
  struct winsize ws {};
  ws.ws_row = 50;
  ws.ws_col = 200;
  if (::openpty(&master, &slave, nullptr, nullptr, &ws) != 0)
    throw std::runtime_error("openpty failed");

  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(master);
    ::close(slave);
    throw std::runtime_error("fork failed");
  }
  if (pid == 0) {
    ::close(master);
    child_exec(slave, argv, env, cwd);
  }
  ::close(slave);
  master_fd_ = master;
  child_ = pid;
  reader_ = std::thread([this] { reader_loop(); });
}

PtyProcess::~PtyProcess() {
  terminate();
  if (reader_.joinable()) reader_.join();
  if (master_fd_ >= 0) ::close(master_fd_);
}

void PtyProcess::write_input(std::string_view bytes) {
  size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::write(master_fd_, bytes.data() + off, bytes.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("pty write failed");
    }
    off += static_cast<size_t>(n);
  }
}

std::string PtyProcess::tail() const {
  std::lock_guard lk(mu_);
  if (static_cast<int>(screen_.size()) <= tail_chars_) return screen_;
  return screen_.substr(screen_.size() - tail_chars_);
}

std::vector<int> PtyProcess::drain_statuses() {
  std::lock_guard lk(mu_);
  std::vector<int> out;
  out.swap(statuses_);
  return out;
}

bool PtyProcess::alive() const {
  if (child_ <= 0) return false;
  return ::kill(child_, 0) == 0;
}

void PtyProcess::terminate() {
  stop_.store(true);
  if (child_ > 0) {
    ::kill(-child_, SIGKILL);  // child is its own process group leader
    ::kill(child_, SIGKILL);
    int status = 0;
    ::waitpid(child_, &status, 0);
    child_ = -1;
  }
}

void PtyProcess::reader_loop() {
  char buf[4096];
  while (!stop_.load()) {
    struct pollfd pfd {master_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, 50);
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0 || !(pfd.revents & POLLIN)) {
      if (pfd.revents & (POLLHUP | POLLERR)) break;
      continue;
    }
    ssize_t n = ::read(master_fd_, buf, sizeof(buf));
    if (n <= 0) {
      if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
      break;
    }
    ingest(std::string_view(buf, static_cast<size_t>(n)));
  }
}

void PtyProcess::ingest(std::string_view bytes) {
  std::lock_guard lk(mu_);
  pending_.append(bytes.data(), bytes.size());

  std::string cleaned;
  size_t i = 0;
  while (i < pending_.size()) {
    char c = pending_[i];
    if (c == kSentinel) {
      // Complete sentinel: GS digits GS. Hold an unfinished one back.
      size_t j = i + 1;
      while (j < pending_.size() && isdigit(static_cast<unsigned char>(pending_[j])))
        ++j;
      if (j < pending_.size() && pending_[j] == kSentinel && j > i + 1) {
        statuses_.push_back(std::stoi(pending_.substr(i + 1, j - i - 1)));
        i = j + 1;
        continue;
      }
      if (j >= pending_.size() && j - i <= 12) break;  // may still complete
      cleaned += c;  // stray GS, keep it visible
      ++i;
    } else if (c == '\r') {
      // Normalize CRLF / lone CR to plain newlines.
      if (i + 1 < pending_.size() && pending_[i + 1] == '\n') {
        cleaned += '\n';
        i += 2;
      } else if (i + 1 >= pending_.size()) {
        break;  // might be the first half of CRLF
      } else {
        cleaned += '\n';
        ++i;
      }
    } else {
      cleaned += c;
      ++i;
    }
  }
  pending_.erase(0, i);

  screen_ += cleaned;
  // Trim well above the capture tail so captures never lose data.
  size_t cap = static_cast<size_t>(tail_chars_) * 4 + 4096;
  if (screen_.size() > cap) screen_.erase(0, screen_.size() - cap);
}

}  // namespace skillforge::sandbox
