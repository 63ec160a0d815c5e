#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stucco {

/// Fixed-size pool running index-range jobs with static chunking. Work items
/// must be independent; the partition is deterministic, so any computation
/// whose items only touch their own slot produces identical results for every
/// worker count.
class ThreadPool {
public:
    explicit ThreadPool(int workers) : workers_(workers < 1 ? 1 : workers) {
        if (workers_ == 1) return;
        threads_.reserve(static_cast<size_t>(workers_));
        for (int w = 0; w < workers_; ++w) {
            threads_.emplace_back([this, w] { worker_loop(w); });
        }
    }

    ~ThreadPool() {
        if (threads_.empty()) return;
        {
            std::unique_lock lock(mutex_);
            stop_ = true;
        }
        cv_start_.notify_all();
        for (auto& t : threads_) t.join();
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int workers() const { return workers_; }

    /// Runs fn(i) for i in [0, n); blocks until done.
    void run(int n, const std::function<void(int)>& fn) {
        if (n <= 0) return;
        if (workers_ == 1 || n == 1) {
            for (int i = 0; i < n; ++i) fn(i);
            return;
        }
        {
            std::unique_lock lock(mutex_);
            job_ = &fn;
            job_n_ = n;
            ++generation_;
            pending_ = workers_;
        }
        cv_start_.notify_all();
        {
            std::unique_lock lock(mutex_);
            cv_done_.wait(lock, [this] { return pending_ == 0; });
            job_ = nullptr;
        }
    }

private:
    void worker_loop(int w) {
        uint64_t seen = 0;
        for (;;) {
            const std::function<void(int)>* job = nullptr;
            int n = 0;
            {
                std::unique_lock lock(mutex_);
                cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
                n = job_n_;
            }
            const int chunk = (n + workers_ - 1) / workers_;
            const int lo = w * chunk;
            const int hi = std::min(n, lo + chunk);
            for (int i = lo; i < hi; ++i) (*job)(i);
            {
                std::unique_lock lock(mutex_);
                if (--pending_ == 0) cv_done_.notify_all();
            }
        }
    }

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_start_;
    std::condition_variable cv_done_;
    const std::function<void(int)>* job_ = nullptr;
    int job_n_ = 0;
    int pending_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace stucco
