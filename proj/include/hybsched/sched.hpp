#pragma once

// Greedy deadline-driven scheduler: initialization-time partition of the
// batch against total private capacity, per-stage priority queues under
// SPT/HCF orders, and adaptive offloading of jobs whose apparent closeness
// to deadline (ACD) turns negative.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybsched/model.hpp"

namespace hybsched {

enum class PriorityOrder { Spt, Hcf, Fifo };

inline std::string to_string(PriorityOrder order) {
    switch (order) {
        case PriorityOrder::Spt: return "spt";
        case PriorityOrder::Hcf: return "hcf";
        case PriorityOrder::Fifo: return "fifo";
    }
    return "?";
}

inline PriorityOrder parse_priority_order(const std::string& s) {
    if (s == "spt") return PriorityOrder::Spt;
    if (s == "hcf") return PriorityOrder::Hcf;
    if (s == "fifo") return PriorityOrder::Fifo;
    throw std::invalid_argument("unknown priority order '" + s + "'");
}

enum class OffloadReason { Initial, Acd };

struct OffloadRecord {
    double time_ms = 0.0;
    JobId job = 0;
    StageId stage = 0;
    OffloadReason reason = OffloadReason::Initial;
};

struct JobPriorityKey {
    JobId job = 0;
    double key = 0.0;  // C_j for SPT, total public cost for HCF, arrival index for FIFO
};

// Single-writer scheduler state. Event handlers are applied serially in
// timestamp order by the caller; decisions use the jobs' estimate latencies.
class SchedulerState {
public:
    SchedulerState(const AppDag& dag, const std::vector<Job>& jobs, double c_max_ms, PriorityOrder order,
                   CostModel cost_model = {})
        : dag_(&dag), jobs_(&jobs), c_max_(c_max_ms), order_(order), cost_model_(cost_model) {
        if (!(c_max_ms > 0.0)) throw std::invalid_argument("SchedulerState: c_max must be positive");
        validate_batch(jobs, dag);
        cost_model_.validate();
        capacity_ = compute_capacity(dag, c_max_ms);

        const std::size_t j_count = jobs.size();
        const std::size_t k_count = dag.stage_count();
        keys_.resize(j_count);
        for (JobId j = 0; j < j_count; ++j) {
            switch (order_) {
                case PriorityOrder::Spt: keys_[j] = job_private_runtime(jobs[j]); break;
                case PriorityOrder::Hcf: keys_[j] = job_public_cost(jobs[j], dag, cost_model_); break;
                case PriorityOrder::Fifo: keys_[j] = static_cast<double>(j); break;
            }
        }
        queues_.assign(k_count, {});
        cells_.assign(j_count * k_count, Cell{});
        preds_done_.assign(j_count * k_count, 0);
        public_chain_.assign(j_count, 0);
        busy_until_.assign(k_count, {});
        for (StageId k = 0; k < k_count; ++k) busy_until_[k].assign(dag.replicas(k), 0.0);
        cp_.assign(j_count, std::vector<double>(k_count, 0.0));
        for (JobId j = 0; j < j_count; ++j)
            for (StageId k = 0; k < k_count; ++k) cp_[j][k] = critical_path_latency(dag, jobs[j], k);
    }

    struct PartitionResult {
        std::vector<JobId> retained;   // in priority order
        std::vector<JobId> offloaded;  // in priority order
        bool capacity_warning = false;
    };

    // Sorts the batch by priority key, retains the maximal prefix whose total
    // private runtime fits T_max and offloads the rest whole. Jobs carrying a
    // must-private constraint are never offloaded; their runtime is charged
    // against capacity first.
    PartitionResult initial_partition() {
        if (partition_done_) throw std::logic_error("initial_partition: already run");
        partition_done_ = true;

        std::vector<JobId> order(jobs_->size());
        for (JobId j = 0; j < order.size(); ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](JobId a, JobId b) { return before(a, b); });

        PartitionResult result;
        double used = 0.0;
        for (JobId j : order)
            if (forced_private(j)) used += job_private_runtime((*jobs_)[j]);
        result.capacity_warning = used > capacity_ + kTimeEps;

        bool overflowed = false;
        for (JobId j : order) {
            if (forced_private(j)) {
                result.retained.push_back(j);
                continue;
            }
            const double c = job_private_runtime((*jobs_)[j]);
            if (!overflowed && used + c <= capacity_ + kTimeEps) {
                used += c;
                result.retained.push_back(j);
            } else {
                overflowed = true;
                result.offloaded.push_back(j);
                mark_job_public(j, min_source(), OffloadReason::Initial, 0.0);
            }
        }
        for (JobId j : result.retained)
            for (StageId s : dag_->sources()) queue_insert(s, j);
        return result;
    }

    // Remaining time before the deadline minus the estimated queue delay
    // ahead of `job` in this stage's queue and the private critical path from
    // the stage to the sinks. Negative means the job should be offloaded.
    double acd(StageId stage, JobId job, double now) const {
        const auto& q = queues_.at(stage);
        const auto it = std::find(q.begin(), q.end(), job);
        if (it == q.end()) throw std::logic_error("acd: job is not queued at this stage");
        double ahead = 0.0;
        for (auto cur = q.begin(); cur != it; ++cur) ahead += (*jobs_)[*cur].p_private_ms[stage];
        const double queue_delay = ahead / static_cast<double>(dag_->replicas(stage));
        return (t0() + c_max_) - (now + queue_delay + cp_[job][stage]);
    }

    struct QueueChangeResult {
        std::vector<JobId> offloaded;
        std::vector<StageId> other_queues_changed;  // queues the offloads were also removed from
    };

    // Walks a snapshot of the queue head to tail and offloads every job whose
    // ACD is negative; the queue-delay term shrinks as jobs ahead leave. Jobs
    // with a must-private constraint are skipped.
    QueueChangeResult on_queue_change(StageId stage, double now) {
        QueueChangeResult result;
        const std::vector<JobId> snapshot = queues_.at(stage);
        std::vector<JobId> survivors;
        survivors.reserve(snapshot.size());
        double ahead = 0.0;
        const double replicas = static_cast<double>(dag_->replicas(stage));
        for (JobId j : snapshot) {
            if (forced_private(j)) {
                survivors.push_back(j);
                ahead += (*jobs_)[j].p_private_ms[stage];
                continue;
            }
            const double slack = (t0() + c_max_) - (now + ahead / replicas + cp_[j][stage]);
            if (slack < 0.0) {
                result.offloaded.push_back(j);
                for (StageId touched : mark_job_public(j, stage, OffloadReason::Acd, now))
                    if (touched != stage) result.other_queues_changed.push_back(touched);
            } else {
                survivors.push_back(j);
                ahead += (*jobs_)[j].p_private_ms[stage];
            }
        }
        queues_[stage] = std::move(survivors);
        std::sort(result.other_queues_changed.begin(), result.other_queues_changed.end());
        result.other_queues_changed.erase(
            std::unique(result.other_queues_changed.begin(), result.other_queues_changed.end()),
            result.other_queues_changed.end());
        return result;
    }

    // Dequeues the head and books it on the replica. The caller must follow
    // up with on_queue_change (a removal happened) and set the busy horizon
    // once the realized latency is known.
    std::optional<JobId> on_replica_available(StageId stage, ReplicaId replica, double now) {
        if (replica >= dag_->replicas(stage))
            throw std::invalid_argument("on_replica_available: bad replica index");
        if (!replica_idle(stage, replica, now))
            throw std::logic_error("on_replica_available: replica is still busy");
        auto& q = queues_.at(stage);
        if (q.empty()) return std::nullopt;
        const JobId j = q.front();
        q.erase(q.begin());
        Cell& c = cell(j, stage);
        if (c.state != CellState::Pending)
            throw std::logic_error("on_replica_available: queued job is not pending");
        c.state = CellState::Dispatched;
        c.replica = replica;
        return j;
    }

    enum class TriggerKind { Enqueued, PublicReady };
    struct StageTrigger {
        StageId stage = 0;
        TriggerKind kind = TriggerKind::Enqueued;
    };

    // Marks the stage complete and readies successors whose predecessors are
    // all done: public-chain jobs skip queueing entirely, others enter the
    // successor queue.
    std::vector<StageTrigger> on_stage_complete(JobId job, StageId stage, double /*now*/) {
        Cell& c = cell(job, stage);
        if (c.state == CellState::Pending)
            throw std::logic_error("on_stage_complete: stage was never dispatched or offloaded");
        if (c.complete) throw std::logic_error("on_stage_complete: stage already complete");
        c.complete = true;

        std::vector<StageTrigger> triggers;
        for (StageId q : dag_->successors(stage)) {
            if (++preds_done_[job * dag_->stage_count() + q] != dag_->predecessors(q).size()) continue;
            if (public_chain_[job]) {
                triggers.push_back({q, TriggerKind::PublicReady});
            } else {
                queue_insert(q, job);
                triggers.push_back({q, TriggerKind::Enqueued});
            }
        }
        return triggers;
    }

    // --- observers -------------------------------------------------------

    double t0() const { return 0.0; }
    double c_max() const { return c_max_; }
    double capacity() const { return capacity_; }
    PriorityOrder order() const { return order_; }
    const AppDag& dag() const { return *dag_; }
    const std::vector<Job>& jobs() const { return *jobs_; }
    double priority_key(JobId j) const { return keys_.at(j); }
    const std::vector<JobId>& queue(StageId k) const { return queues_.at(k); }
    bool on_public_chain(JobId j) const { return public_chain_.at(j) != 0; }
    const std::vector<OffloadRecord>& offload_log() const { return log_; }

    bool is_public(JobId j, StageId k) const { return cell(j, k).state == CellState::Public; }
    bool is_dispatched(JobId j, StageId k) const { return cell(j, k).state == CellState::Dispatched; }
    bool is_pending(JobId j, StageId k) const { return cell(j, k).state == CellState::Pending; }
    bool is_complete(JobId j, StageId k) const { return cell(j, k).complete; }
    bool preds_complete(JobId j, StageId k) const {
        return preds_done_[j * dag_->stage_count() + k] == dag_->predecessors(k).size();
    }
    std::optional<Placement> placement(JobId j, StageId k) const {
        const Cell& c = cell(j, k);
        switch (c.state) {
            case CellState::Pending: return std::nullopt;
            case CellState::Public: return Placement::public_cloud();
            case CellState::Dispatched: return Placement::private_replica(*c.replica);
        }
        return std::nullopt;
    }

    double replica_busy_until(StageId k, ReplicaId r) const { return busy_until_.at(k).at(r); }
    void set_replica_busy_until(StageId k, ReplicaId r, double t) { busy_until_.at(k).at(r) = t; }
    bool replica_idle(StageId k, ReplicaId r, double now) const {
        return busy_until_.at(k).at(r) <= now + kTimeEps;
    }

private:
    enum class CellState { Pending, Dispatched, Public };
    struct Cell {
        CellState state = CellState::Pending;
        bool complete = false;
        std::optional<ReplicaId> replica;
    };

    Cell& cell(JobId j, StageId k) { return cells_.at(j * dag_->stage_count() + k); }
    const Cell& cell(JobId j, StageId k) const { return cells_.at(j * dag_->stage_count() + k); }

    bool forced_private(JobId j) const { return !(*jobs_)[j].must_private.empty(); }

    StageId min_source() const { return dag_->sources().front(); }

    bool before(JobId a, JobId b) const {
        switch (order_) {
            case PriorityOrder::Spt:
                if (keys_[a] != keys_[b]) return keys_[a] < keys_[b];
                break;
            case PriorityOrder::Hcf:
                if (keys_[a] != keys_[b]) return keys_[a] > keys_[b];
                break;
            case PriorityOrder::Fifo:
                break;
        }
        return a < b;
    }

    void queue_insert(StageId k, JobId j) {
        auto& q = queues_.at(k);
        const auto pos = std::lower_bound(q.begin(), q.end(), j, [&](JobId lhs, JobId rhs) {
            return before(lhs, rhs);
        });
        q.insert(pos, j);
    }

    // Converts every not-yet-started stage of the job to the public cloud and
    // pulls the job out of any queue it sits in. Returns the stages whose
    // queues changed.
    std::vector<StageId> mark_job_public(JobId j, StageId log_stage, OffloadReason reason, double now) {
        public_chain_[j] = 1;
        for (StageId k = 0; k < dag_->stage_count(); ++k) {
            Cell& c = cell(j, k);
            if (c.state == CellState::Pending) c.state = CellState::Public;
        }
        std::vector<StageId> touched;
        for (StageId k = 0; k < dag_->stage_count(); ++k) {
            auto& q = queues_[k];
            const auto it = std::find(q.begin(), q.end(), j);
            if (it != q.end()) {
                q.erase(it);
                touched.push_back(k);
            }
        }
        log_.push_back({now, j, log_stage, reason});
        return touched;
    }

    const AppDag* dag_;
    const std::vector<Job>* jobs_;
    double c_max_;
    PriorityOrder order_;
    CostModel cost_model_;
    double capacity_ = 0.0;
    bool partition_done_ = false;

    std::vector<double> keys_;
    std::vector<std::vector<JobId>> queues_;
    std::vector<Cell> cells_;
    std::vector<std::uint32_t> preds_done_;
    std::vector<char> public_chain_;
    std::vector<std::vector<double>> busy_until_;
    std::vector<std::vector<double>> cp_;
    std::vector<OffloadRecord> log_;
};

}  // namespace hybsched
