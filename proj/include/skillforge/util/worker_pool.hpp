#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace skillforge::util {

// Bounded worker pool. Submitted jobs run on `workers` threads; wait()
// blocks until the queue drains. Exceptions thrown by jobs are the jobs'
// problem: wrap work in try/catch and convert failures to drop records.
class WorkerPool {
 public:
  explicit WorkerPool(int workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(std::function<void()> job);
  void wait();

  int size() const { return static_cast<int>(threads_.size()); }

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  int active_ = 0;
  bool stop_ = false;
};

// Runs fn(item) for every item with at most `workers` in flight. With
// workers <= 1 the items run inline, in order, on the calling thread.
template <class Item, class Fn>
void parallel_for_each(const std::vector<Item>& items, int workers, Fn fn) {
  if (workers <= 1 || items.size() <= 1) {
    for (const auto& item : items) fn(item);
    return;
  }
  WorkerPool pool(workers);
  for (const auto& item : items) pool.submit([&fn, &item] { fn(item); });
  pool.wait();
}

}  // namespace skillforge::util
