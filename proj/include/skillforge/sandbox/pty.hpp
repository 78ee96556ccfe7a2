#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace skillforge::sandbox {

// A process attached to a pseudo-terminal with a rolling screen buffer.
// The reader thread extracts exit-status sentinels (GS <digits> GS, emitted
// by the shell's PROMPT_COMMAND) out of the stream before they reach the
// screen text, so captures stay clean and statuses stay machine-readable.
class PtyProcess {
 public:
  PtyProcess(std::vector<std::string> argv,
             std::map<std::string, std::string> env, std::string cwd,
             int tail_chars);
  ~PtyProcess();

  PtyProcess(const PtyProcess&) = delete;
  PtyProcess& operator=(const PtyProcess&) = delete;

  void write_input(std::string_view bytes);
  std::string tail() const;             // normalized, sentinel-free
  std::vector<int> drain_statuses();    // statuses seen since last drain
  bool alive() const;
  void terminate();                     // SIGKILL to the process group

  static constexpr char kSentinel = '\x1d';

 private:
  void reader_loop();
  void ingest(std::string_view bytes);

  int master_fd_ = -1;
  pid_t child_ = -1;
  int tail_chars_;
  std::thread reader_;
  mutable std::mutex mu_;
  std::string screen_;
  std::string pending_;  // possible partial sentinel at the stream tail
  std::vector<int> statuses_;
  std::atomic<bool> stop_{false};
};

}  // namespace skillforge::sandbox
