#include "tablex/futures.hpp"

#include <algorithm>

namespace tablex {

namespace {
thread_local std::optional<unsigned> tl_worker_id;
thread_local Scheduler* tl_scheduler = nullptr;
}  // namespace

Scheduler::Scheduler(SchedulerConfig cfg) : cfg_(cfg) {
    if (cfg_.workers < 1)
        throw TablexError(ErrorCode::BadRequest, "scheduler needs >= 1 worker");
    for (unsigned i = 0; i < cfg_.workers; ++i) {
        auto w = std::make_unique<Worker>();
        w->index = i;
        locals_.push_back(std::move(w));
    }
    for (unsigned i = 0; i < cfg_.workers; ++i)
        workers_.emplace_back([this, i] { worker_loop(i); });
}

Scheduler::~Scheduler() { shutdown(); }

std::optional<unsigned> Scheduler::current_worker_id() { return tl_worker_id; }

void Scheduler::submit(std::function<void()> task) {
    if (stopping_.load())
        throw TablexError(ErrorCode::SchedulerShutdown, "spawn after shutdown");
    queued_.fetch_add(1);
    if (cfg_.policy == SchedPolicy::global_queue) {
        std::lock_guard lk(global_m_);
        global_.push_back(std::move(task));
    } else {
        // A worker pushes to its own queue; outside threads round-robin.
        unsigned target;
        if (tl_scheduler == this && tl_worker_id)
            target = *tl_worker_id;
        else
            target = rr_.fetch_add(1) % locals_.size();
        std::lock_guard lk(locals_[target]->m);
        locals_[target]->queue.push_back(std::move(task));
    }
    wake_cv_.notify_one();
}

bool Scheduler::pop_task(unsigned self, std::function<void()>& out) {
    if (cfg_.policy == SchedPolicy::global_queue) {
        std::lock_guard lk(global_m_);
        if (global_.empty()) return false;
        out = std::move(global_.front());
        global_.pop_front();
        return true;
    }
    {
        std::lock_guard lk(locals_[self]->m);
        if (!locals_[self]->queue.empty()) {
            out = std::move(locals_[self]->queue.front());
            locals_[self]->queue.pop_front();
            return true;
        }
    }
    // Steal: victims scanned round-robin from a random start.
    const unsigned n = unsigned(locals_.size());
    if (n == 1) return false;
    thread_local std::minstd_rand rng(std::random_device{}());
    const unsigned start = rng() % n;
    for (unsigned off = 0; off < n; ++off) {
        const unsigned victim = (start + off) % n;
        if (victim == self) continue;
        std::lock_guard lk(locals_[victim]->m);
        if (!locals_[victim]->queue.empty()) {
            out = std::move(locals_[victim]->queue.back());
            locals_[victim]->queue.pop_back();
            return true;
        }
    }
    return false;
}

bool Scheduler::try_run_one() {
    const unsigned self = (tl_scheduler == this && tl_worker_id) ? *tl_worker_id : 0;
    std::function<void()> task;
    if (!pop_task(self, task)) return false;
    task();
    executed_.fetch_add(1);
    return true;
}

void Scheduler::worker_loop(unsigned index) {
    tl_worker_id = index;
    tl_scheduler = this;
    std::function<void()> task;
    while (true) {
        if (pop_task(index, task)) {
            task();
            task = nullptr;
            executed_.fetch_add(1);
            continue;
        }
        if (stopping_.load() && executed_.load() == queued_.load()) break;
        std::unique_lock lk(wake_m_);
        wake_cv_.wait_for(lk, std::chrono::milliseconds(1));
    }
    tl_worker_id.reset();
    tl_scheduler = nullptr;
}

void Scheduler::drain() {
    while (executed_.load() != queued_.load()) {
        if (!try_run_one()) std::this_thread::yield();
    }
}

void Scheduler::shutdown() {
    if (workers_.empty()) return;
    stopping_.store(true);
    wake_cv_.notify_all();
    for (auto& t : workers_)
        if (t.joinable()) t.join();
    workers_.clear();
}

// ---- calibrated workload --------------------------------------------------

namespace {

volatile double workload_sink = 0.0;

// The spin kernel; `iters` must stay observable so it cannot be elided.
void spin(std::uint64_t iters) {
    double x = 1.000000059604645;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < iters; ++i) acc += x * 1e-9 + double(i & 7);
    workload_sink = acc;
}

double measure_iters_per_us() {
    using clock = std::chrono::steady_clock;
    // Median of several short probes to shrug off scheduler noise.
    std::vector<double> rates;
    const std::uint64_t probe = 200000;
    spin(probe);  // warm up
    for (int r = 0; r < 9; ++r) {
        auto t0 = clock::now();
        spin(probe);
        auto t1 = clock::now();
        const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
        rates.push_back(double(probe) / us);
    }
    std::nth_element(rates.begin(), rates.begin() + rates.size() / 2, rates.end());
    return rates[rates.size() / 2];
}

std::atomic<double> g_iters_per_us{0.0};
std::once_flag g_cal_once;

}  // namespace

void calibrate_workload() {
    std::call_once(g_cal_once, [] { g_iters_per_us.store(measure_iters_per_us()); });
}

double workload_iters_per_us() {
    calibrate_workload();
    return g_iters_per_us.load();
}

void run_calibrated_workload(double us) {
    if (us <= 0.0) return;
    spin(std::uint64_t(us * workload_iters_per_us()));
}

}  // namespace tablex
