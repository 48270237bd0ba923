#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "tablex/error.hpp"

namespace tablex {

enum class FutureState { dormant, running, ready, failed };

enum class SchedPolicy { global_queue, local_stealing };

struct SchedulerConfig {
    SchedPolicy policy = SchedPolicy::global_queue;
    unsigned workers = 1;
};

class Scheduler;

namespace detail {

// Shared state of one write-once cell. Readers park on the condition
// variable; a reader running on a scheduler worker helps execute queued
// tasks instead of blocking the worker (see Future<T>::read).
template <typename T>
struct CellState {
    std::mutex m;
    std::condition_variable cv;
    FutureState state = FutureState::dormant;
    std::optional<T> value;
    std::exception_ptr error;
    std::function<T()> lazy_action;      // set only for lazy cells
    std::atomic<bool> triggered{false};  // lazy: first-read race winner
    Scheduler* sched = nullptr;

    bool done() const { return state == FutureState::ready || state == FutureState::failed; }
};

}  // namespace detail

template <typename T>
class Future;

class Scheduler {
  public:
    explicit Scheduler(SchedulerConfig cfg);
    ~Scheduler();

    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    // Eager: the task is enqueued at creation and completes whether or not
    // anyone reads it.
    template <typename F>
    auto spawn_eager(F&& f) -> Future<std::invoke_result_t<F>>;

    // Lazy: nothing runs until the first read; exactly one execution.
    template <typename F>
    auto spawn_lazy(F&& f) -> Future<std::invoke_result_t<F>>;

    void submit(std::function<void()> task);

    // Waits until every queued task has run.
    void drain();
    void shutdown();  // drains, then joins workers

    unsigned workers() const { return unsigned(workers_.size()); }

    // Index of the calling worker within *any* scheduler, or nullopt when
    // called from an outside thread.
    static std::optional<unsigned> current_worker_id();

    // Runs one queued task if available; used by readers to stay useful
    // while a value is pending. Returns false when no task was found.
    bool try_run_one();

  private:
    friend struct WorkerAccess;
    struct Worker {
        std::deque<std::function<void()>> queue;
        std::mutex m;
        unsigned index = 0;
    };

    void worker_loop(unsigned index);
    bool pop_task(unsigned self, std::function<void()>& out);

    SchedulerConfig cfg_;
    std::atomic<bool> stopping_{false};
    std::atomic<std::uint64_t> queued_{0};
    std::atomic<std::uint64_t> executed_{0};

    // global_queue policy state
    std::deque<std::function<void()>> global_;
    std::mutex global_m_;

    std::condition_variable wake_cv_;
    std::mutex wake_m_;

    std::vector<std::unique_ptr<Worker>> locals_;
    std::vector<std::thread> workers_;
    std::atomic<unsigned> rr_{0};
};

template <typename T>
class Future {
  public:
    Future() = default;

    bool valid() const { return bool(st_); }
    FutureState state() const {
        std::lock_guard lk(st_->m);
        return st_->state;
    }

    // Blocks (or helps the scheduler) until the value is written; rethrows a
    // stored failure.
    T read() const;
    bool is_ready() const {
        std::lock_guard lk(st_->m);
        return st_->done();
    }

    // External fulfillment; second completion throws DoubleWrite.
    void write(T value) const;
    void fail(std::exception_ptr e) const;

  private:
    friend class Scheduler;
    template <typename U>
    friend Future<U> make_unset_future();
    explicit Future(std::shared_ptr<detail::CellState<T>> st) : st_(std::move(st)) {}

    void trigger_lazy() const;

    std::shared_ptr<detail::CellState<T>> st_;
};

// A cell with no producer task; completed via write()/fail() by whoever
// owns the result (e.g. a network demultiplexer).
template <typename T>
Future<T> make_unset_future() {
    return Future<T>(std::make_shared<detail::CellState<T>>());
}

// ---- calibrated spin workload ------------------------------------------

// Measures spin iterations per microsecond once per process (first call).
void calibrate_workload();
double workload_iters_per_us();

// Busy-executes approximately `us` microseconds of compute.
void run_calibrated_workload(double us);

// ---- implementation ------------------------------------------------------

template <typename T>
void Future<T>::write(T value) const {
    std::unique_lock lk(st_->m);
    if (st_->done()) throw TablexError(ErrorCode::DoubleWrite, "cell already completed");
    st_->value = std::move(value);
    st_->state = FutureState::ready;
    lk.unlock();
    st_->cv.notify_all();
}

template <typename T>
void Future<T>::fail(std::exception_ptr e) const {
    std::unique_lock lk(st_->m);
    if (st_->done()) throw TablexError(ErrorCode::DoubleWrite, "cell already completed");
    st_->error = std::move(e);
    st_->state = FutureState::failed;
    lk.unlock();
    st_->cv.notify_all();
}

template <typename T>
void Future<T>::trigger_lazy() const {
    if (!st_->lazy_action || st_->triggered.exchange(true)) return;
    auto st = st_;
    Future<T> self = *this;
    st->sched->submit([st, self]() {
        {
            std::lock_guard lk(st->m);
            st->state = FutureState::running;
        }
        try {
            self.write(st->lazy_action());
        } catch (...) {
            self.fail(std::current_exception());
        }
    });
}

template <typename T>
T Future<T>::read() const {
    trigger_lazy();
    const bool on_worker = Scheduler::current_worker_id().has_value() && st_->sched;
    std::unique_lock lk(st_->m);
    while (!st_->done()) {
        if (on_worker) {
            lk.unlock();
            if (!st_->sched->try_run_one()) std::this_thread::yield();
            lk.lock();
        } else {
            st_->cv.wait(lk);
        }
    }
    if (st_->state == FutureState::failed) std::rethrow_exception(st_->error);
    return *st_->value;
}

template <typename F>
auto Scheduler::spawn_eager(F&& f) -> Future<std::invoke_result_t<F>> {
    using T = std::invoke_result_t<F>;
    auto st = std::make_shared<detail::CellState<T>>();
    st->sched = this;
    Future<T> fut(st);
    submit([st, fut, fn = std::forward<F>(f)]() mutable {
        {
            std::lock_guard lk(st->m);
            st->state = FutureState::running;
        }
        try {
            fut.write(fn());
        } catch (...) {
            fut.fail(std::current_exception());
        }
    });
    return fut;
}

template <typename F>
auto Scheduler::spawn_lazy(F&& f) -> Future<std::invoke_result_t<F>> {
    using T = std::invoke_result_t<F>;
    if (stopping_.load()) throw TablexError(ErrorCode::SchedulerShutdown, "spawn after shutdown");
    auto st = std::make_shared<detail::CellState<T>>();
    st->sched = this;
    st->lazy_action = std::forward<F>(f);
    return Future<T>(st);
}

}  // namespace tablex
