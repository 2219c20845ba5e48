#pragma once

// Deterministic discrete-event simulator of the hybrid platform. The greedy
// scheduler decides with estimate latencies; execution consumes the realized
// values from a LatencyTable.

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybsched/model.hpp"
#include "hybsched/sched.hpp"

namespace hybsched {

inline constexpr double kDeadlineEps = 1e-6;

enum class SimEventKind {
    BatchArrival = 0,
    PublicStageComplete = 1,
    PrivateStageComplete = 2,
    PublicUploadComplete = 3,
    ResultDownloadComplete = 4,
};

inline const char* to_string(SimEventKind kind) {
    switch (kind) {
        case SimEventKind::BatchArrival: return "batch_arrival";
        case SimEventKind::PublicStageComplete: return "public_stage_complete";
        case SimEventKind::PrivateStageComplete: return "private_stage_complete";
        case SimEventKind::PublicUploadComplete: return "public_upload_complete";
        case SimEventKind::ResultDownloadComplete: return "result_download_complete";
    }
    return "?";
}

struct SimEvent {
    double time_ms = 0.0;
    SimEventKind kind = SimEventKind::BatchArrival;
    JobId job = 0;
    StageId stage = 0;
    std::optional<ReplicaId> replica;
};

struct StageRecord {
    Placement placement = Placement::public_cloud();
    double start_ms = std::numeric_limits<double>::quiet_NaN();
    double finish_ms = std::numeric_limits<double>::quiet_NaN();
};

struct SimReport {
    std::string policy;
    double c_max_ms = 0.0;
    double makespan_ms = 0.0;
    double total_cost_usd = 0.0;
    std::size_t offloaded_stage_count = 0;
    std::size_t offloaded_initial_count = 0;
    bool deadline_missed = false;
    bool capacity_warning = false;
    std::vector<std::vector<StageRecord>> records;  // [job][stage]
    std::vector<SimEvent> trace;
    std::vector<OffloadRecord> offload_log;
};

using TruthTable = LatencyTable;

namespace detail {

class SimEngine {
public:
    SimEngine(const AppDag& dag, const std::vector<Job>& batch, const TruthTable& truth, CostModel cm)
        : dag_(dag), batch_(batch), truth_(truth), cm_(cm) {
        validate_batch(batch, dag);
        truth.validate(batch.size(), dag.stage_count());
        cm.validate();
        const std::size_t cells = batch.size() * dag.stage_count();
        placement_.assign(cells, std::nullopt);
        complete_.assign(cells, 0);
        started_public_.assign(cells, 0);
        preds_done_.assign(cells, 0);
        records_.assign(batch.size(), std::vector<StageRecord>(dag.stage_count()));
        gate_time_.assign(batch.size(), 0.0);
        gate_done_.assign(batch.size(), 0);
        gate_stage_.assign(batch.size(), dag.sources().front());
    }

    SimReport run_greedy(PriorityOrder order, double c_max_ms) {
        SchedulerState state(dag_, batch_, c_max_ms, order, cm_);
        state_ = &state;
        SimReport report = run(c_max_ms);
        report.policy = to_string(order);
        report.offload_log = state.offload_log();
        for (const OffloadRecord& rec : report.offload_log)
            if (rec.reason == OffloadReason::Initial) ++report.offloaded_initial_count;
        state_ = nullptr;
        return report;
    }

    SimReport run_all_public() {
        all_public_ = true;
        SimReport report = run(0.0);
        report.policy = "all-public";
        report.deadline_missed = false;
        report.offload_log = log_;
        report.offloaded_initial_count = batch_.size();
        return report;
    }

private:
    struct Ev {
        double time;
        SimEventKind kind;
        JobId job;
        StageId stage;
        ReplicaId replica;
        bool has_replica;
        bool operator>(const Ev& o) const {
            if (time != o.time) return time > o.time;
            if (kind != o.kind) return kind > o.kind;
            if (job != o.job) return job > o.job;
            return stage > o.stage;
        }
    };

    std::size_t idx(JobId j, StageId k) const { return static_cast<std::size_t>(j) * dag_.stage_count() + k; }

    void push(double t, SimEventKind kind, JobId j, StageId k, std::optional<ReplicaId> r = std::nullopt) {
        heap_.push(Ev{t, kind, j, k, r.value_or(0), r.has_value()});
    }

    SimReport run(double c_max_ms) {
        push(0.0, SimEventKind::BatchArrival, 0, 0);
        while (!heap_.empty()) {
            const double t = heap_.top().time;
            do {
                while (!heap_.empty() && heap_.top().time == t) {
                    const Ev ev = heap_.top();
                    heap_.pop();
                    handle(ev);
                }
                if (state_ != nullptr) dispatch_phase(t);
            } while (!heap_.empty() && heap_.top().time == t);
        }
        return assemble(c_max_ms);
    }

    void handle(const Ev& ev) {
        trace_.push_back(SimEvent{ev.time, ev.kind, ev.job, ev.stage,
                                  ev.has_replica ? std::optional<ReplicaId>(ev.replica) : std::nullopt});
        switch (ev.kind) {
            case SimEventKind::BatchArrival: on_batch_arrival(ev.time); break;
            case SimEventKind::PublicStageComplete: on_public_complete(ev.job, ev.stage, ev.time); break;
            case SimEventKind::PrivateStageComplete: on_private_complete(ev.job, ev.stage, ev.time); break;
            case SimEventKind::PublicUploadComplete: on_upload_complete(ev.job, ev.time); break;
            case SimEventKind::ResultDownloadComplete: result_times_.push_back(ev.time); break;
        }
    }

    void on_batch_arrival(double t) {
        if (all_public_) {
            for (JobId j = 0; j < batch_.size(); ++j) {
                for (StageId k = 0; k < dag_.stage_count(); ++k) set_public(j, k);
                log_.push_back({t, j, dag_.sources().front(), OffloadReason::Initial});
                open_gate(j, t, entry_upload_from_sources(j));
            }
            return;
        }
        const auto part = state_->initial_partition();
        capacity_warning_ = part.capacity_warning;
        for (JobId j : part.offloaded) {
            mirror_public(j);
            open_gate(j, t, entry_upload_from_sources(j));
        }
        for (StageId s : dag_.sources()) scan_queue(s, t);
    }

    double entry_upload_from_sources(JobId j) const {
        double u = 0.0;
        for (StageId s : dag_.sources()) u = std::max(u, truth_.upload_ms[j][s]);
        return u;
    }

    // Upload paid when the job enters the public cloud at `entry`: the raw
    // input for a source stage, otherwise the predecessors' stored results.
    double entry_upload_at(JobId j, StageId entry) const {
        const auto& preds = dag_.predecessors(entry);
        if (preds.empty()) return truth_.upload_ms[j][entry];
        double u = 0.0;
        for (StageId p : preds) u = std::max(u, truth_.upload_ms[j][p]);
        return u;
    }

    void open_gate(JobId j, double t, double upload_ms) {
        gate_time_[j] = t + upload_ms;
        push(gate_time_[j], SimEventKind::PublicUploadComplete, j, gate_stage_[j]);
    }

    void set_public(JobId j, StageId k) {
        if (placement_[idx(j, k)]) return;
        placement_[idx(j, k)] = Placement::public_cloud();
        records_[j][k].placement = Placement::public_cloud();
    }

    void mirror_public(JobId j) {
        for (StageId k = 0; k < dag_.stage_count(); ++k)
            if (state_->is_public(j, k)) set_public(j, k);
    }

    void scan_queue(StageId stage, double t) {
        std::set<StageId> worklist{stage};
        while (!worklist.empty()) {
            const StageId s = *worklist.begin();
            worklist.erase(worklist.begin());
            const auto res = state_->on_queue_change(s, t);
            for (JobId j : res.offloaded) {
                mirror_public(j);
                gate_stage_[j] = s;
                open_gate(j, t, entry_upload_at(j, s));
            }
            for (StageId m : res.other_queues_changed) worklist.insert(m);
        }
    }

    void dispatch_phase(double t) {
        for (StageId k = 0; k < dag_.stage_count(); ++k) {
            while (!state_->queue(k).empty()) {
                std::optional<ReplicaId> idle;
                for (ReplicaId r = 0; r < dag_.replicas(k); ++r)
                    if (state_->replica_idle(k, r, t)) {
                        idle = r;
                        break;
                    }
                if (!idle) break;
                const auto job = state_->on_replica_available(k, *idle, t);
                if (!job) break;
                do_dispatch(*job, k, *idle, t);
                scan_queue(k, t);
            }
        }
    }

    void do_dispatch(JobId j, StageId k, ReplicaId r, double t) {
        placement_[idx(j, k)] = Placement::private_replica(r);
        records_[j][k].placement = Placement::private_replica(r);
        records_[j][k].start_ms = t;
        const double finish = t + truth_.p_private_ms[j][k];
        records_[j][k].finish_ms = finish;
        state_->set_replica_busy_until(k, r, finish);
        push(finish, SimEventKind::PrivateStageComplete, j, k, r);
    }

    void on_private_complete(JobId j, StageId k, double t) {
        complete_[idx(j, k)] = 1;
        if (dag_.is_sink(k)) result_times_.push_back(t);
        if (state_ != nullptr) {
            const auto triggers = state_->on_stage_complete(j, k, t);
            for (const auto& trig : triggers)
                if (trig.kind == SchedulerState::TriggerKind::Enqueued) scan_queue(trig.stage, t);
        }
        bump_successors(j, k);
    }

    void on_public_complete(JobId j, StageId k, double t) {
        complete_[idx(j, k)] = 1;
        if (dag_.is_sink(k))
            push(t + truth_.download_ms[j][k], SimEventKind::ResultDownloadComplete, j, k);
        if (state_ != nullptr) state_->on_stage_complete(j, k, t);
        bump_successors(j, k);
    }

    void bump_successors(JobId j, StageId k) {
        for (StageId q : dag_.successors(k)) {
            ++preds_done_[idx(j, q)];
            attempt_start_public(j, q);
        }
    }

    void on_upload_complete(JobId j, double /*t*/) {
        gate_done_[j] = 1;
        for (StageId k = 0; k < dag_.stage_count(); ++k) attempt_start_public(j, k);
    }

    void attempt_start_public(JobId j, StageId k) {
        const std::size_t i = idx(j, k);
        if (!placement_[i] || !placement_[i]->is_public()) return;
        if (started_public_[i] || !gate_done_[j]) return;
        if (preds_done_[i] != dag_.predecessors(k).size()) return;
        double start = gate_time_[j];
        for (StageId p : dag_.predecessors(k)) {
            double bound = records_[j][p].finish_ms;
            if (placement_[idx(j, p)]->is_private()) bound += truth_.upload_ms[j][p];
            start = std::max(start, bound);
        }
        started_public_[i] = 1;
        records_[j][k].start_ms = start;
        const double finish = start + truth_.p_public_ms[j][k];
        records_[j][k].finish_ms = finish;
        push(finish, SimEventKind::PublicStageComplete, j, k);
    }

    SimReport assemble(double c_max_ms) {
        for (JobId j = 0; j < batch_.size(); ++j)
            for (StageId k = 0; k < dag_.stage_count(); ++k)
                if (!complete_[idx(j, k)])
                    throw std::logic_error("simulation stalled: stage never completed");
        std::size_t expected = batch_.size() * dag_.sinks().size();
        if (result_times_.size() != expected)
            throw std::logic_error("simulation stalled: missing result events");

        SimReport report;
        report.c_max_ms = c_max_ms;
        report.records = records_;
        report.trace = trace_;
        report.capacity_warning = capacity_warning_;
        for (double t : result_times_) report.makespan_ms = std::max(report.makespan_ms, t);
        report.deadline_missed = c_max_ms > 0.0 && report.makespan_ms > c_max_ms + kDeadlineEps;
        for (JobId j = 0; j < batch_.size(); ++j)
            for (StageId k = 0; k < dag_.stage_count(); ++k)
                if (records_[j][k].placement.is_public()) {
                    ++report.offloaded_stage_count;
                    report.total_cost_usd +=
                        cost_of_execution(truth_.p_public_ms[j][k], dag_.memory_mb(k), cm_);
                }
        return report;
    }

    const AppDag& dag_;
    const std::vector<Job>& batch_;
    const TruthTable& truth_;
    CostModel cm_;
    SchedulerState* state_ = nullptr;
    bool all_public_ = false;
    bool capacity_warning_ = false;

    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> heap_;
    std::vector<std::optional<Placement>> placement_;
    std::vector<char> complete_, started_public_;
    std::vector<std::uint32_t> preds_done_;
    std::vector<std::vector<StageRecord>> records_;
    std::vector<double> gate_time_;
    std::vector<char> gate_done_;
    std::vector<StageId> gate_stage_;
    std::vector<double> result_times_;
    std::vector<SimEvent> trace_;
    std::vector<OffloadRecord> log_;
};

}  // namespace detail

inline SimReport run_greedy(const AppDag& dag, const std::vector<Job>& batch, const TruthTable& truth,
                            PriorityOrder order, double c_max_ms, CostModel cm = {}) {
    if (!(c_max_ms > 0.0)) throw std::invalid_argument("run_greedy: c_max must be positive");
    detail::SimEngine engine(dag, batch, truth, cm);
    return engine.run_greedy(order, c_max_ms);
}

inline SimReport run_all_public(const AppDag& dag, const std::vector<Job>& batch, const TruthTable& truth,
                                CostModel cm = {}) {
    detail::SimEngine engine(dag, batch, truth, cm);
    return engine.run_all_public();
}

// All-private baseline: the greedy run under a deadline loose enough that no
// offload can trigger.
inline SimReport run_all_private(const AppDag& dag, const std::vector<Job>& batch, const TruthTable& truth,
                                 PriorityOrder order, CostModel cm = {}) {
    double total = 0.0;
    for (const Job& j : batch) total += job_private_runtime(j);
    for (JobId j = 0; j < batch.size(); ++j)
        for (StageId k = 0; k < dag.stage_count(); ++k) total += truth.p_private_ms.at(j).at(k);
    const double c_huge = 4.0 * total + 1000.0;
    detail::SimEngine engine(dag, batch, truth, cm);
    SimReport report = engine.run_greedy(order, c_huge);
    report.policy = "all-private";
    return report;
}

// Replays the placements and per-replica sequences of a fixed schedule,
// recomputing start times from realized latencies as early as precedence and
// replica order allow.
inline SimReport execute_fixed(const AppDag& dag, const std::vector<Job>& batch, const TruthTable& truth,
                               const Schedule& schedule, double c_max_ms, CostModel cm = {}) {
    validate_batch(batch, dag);
    truth.validate(batch.size(), dag.stage_count());
    cm.validate();
    if (schedule.job_count() != batch.size() || schedule.stage_count() != dag.stage_count())
        throw std::invalid_argument("execute_fixed: schedule dimensions do not match the batch");
    if (!schedule.complete()) throw std::invalid_argument("execute_fixed: schedule is incomplete");

    std::vector<std::vector<Placement>> placement(batch.size(),
                                                  std::vector<Placement>(dag.stage_count()));
    for (JobId j = 0; j < batch.size(); ++j)
        for (StageId k = 0; k < dag.stage_count(); ++k) placement[j][k] = schedule.at(j, k).placement;
    const auto orders = schedule.replica_orders(dag);
    const TimingResult tr = earliest_start_times(dag, truth, placement, orders);

    SimReport report;
    report.policy = "fixed";
    report.c_max_ms = c_max_ms;
    report.makespan_ms = tr.makespan_ms;
    report.deadline_missed = c_max_ms > 0.0 && tr.makespan_ms > c_max_ms + kDeadlineEps;
    report.records.assign(batch.size(), std::vector<StageRecord>(dag.stage_count()));
    report.trace.push_back(SimEvent{0.0, SimEventKind::BatchArrival, 0, 0, std::nullopt});
    for (JobId j = 0; j < batch.size(); ++j)
        for (StageId k = 0; k < dag.stage_count(); ++k) {
            StageRecord& rec = report.records[j][k];
            rec.placement = placement[j][k];
            rec.start_ms = tr.start_ms[j][k];
            rec.finish_ms = tr.finish_ms[j][k];
            if (placement[j][k].is_public()) {
                ++report.offloaded_stage_count;
                report.total_cost_usd += cost_of_execution(truth.p_public_ms[j][k], dag.memory_mb(k), cm);
                report.trace.push_back(SimEvent{rec.finish_ms, SimEventKind::PublicStageComplete, j, k,
                                                std::nullopt});
                if (dag.is_sink(k))
                    report.trace.push_back(SimEvent{rec.finish_ms + truth.download_ms[j][k],
                                                    SimEventKind::ResultDownloadComplete, j, k, std::nullopt});
            } else {
                report.trace.push_back(SimEvent{rec.finish_ms, SimEventKind::PrivateStageComplete, j, k,
                                                placement[j][k].replica()});
            }
        }
    std::sort(report.trace.begin(), report.trace.end(), [](const SimEvent& a, const SimEvent& b) {
        if (a.time_ms != b.time_ms) return a.time_ms < b.time_ms;
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.job != b.job) return a.job < b.job;
        return a.stage < b.stage;
    });
    return report;
}

inline Schedule schedule_from_report(const SimReport& report) {
    if (report.records.empty()) throw std::invalid_argument("schedule_from_report: empty report");
    Schedule sched(report.records.size(), report.records.front().size());
    for (JobId j = 0; j < report.records.size(); ++j)
        for (StageId k = 0; k < report.records[j].size(); ++k) {
            sched.at(j, k).placement = report.records[j][k].placement;
            sched.at(j, k).start_ms = report.records[j][k].start_ms;
        }
    return sched;
}

// ---------------------------------------------------------------------------
// Text output

inline void write_report_block(std::ostream& os, const SimReport& r) {
    os << "policy " << r.policy << "\n";
    os << "c_max_ms " << util::format_g17(r.c_max_ms) << "\n";
    os << "makespan_ms " << util::format_g17(r.makespan_ms) << "\n";
    os << "total_cost_usd " << util::format_g17(r.total_cost_usd) << "\n";
    os << "offloaded_stage_count " << r.offloaded_stage_count << "\n";
    os << "offloaded_initial_count " << r.offloaded_initial_count << "\n";
    os << "deadline_missed " << (r.deadline_missed ? 1 : 0) << "\n";
    os << "capacity_warning " << (r.capacity_warning ? 1 : 0) << "\n";
    os << "job_count " << r.records.size() << "\n";
    os << "stage_count " << (r.records.empty() ? 0 : r.records.front().size()) << "\n";
}

inline void write_trace(std::ostream& os, const SimReport& r) {
    for (const SimEvent& ev : r.trace) {
        os << util::format_g17(ev.time_ms) << " " << to_string(ev.kind);
        if (ev.kind == SimEventKind::BatchArrival) {
            os << " - - - -\n";
            continue;
        }
        os << " " << ev.job << " " << ev.stage;
        const StageRecord& rec = r.records[ev.job][ev.stage];
        os << " " << (rec.placement.is_public() ? "public" : "private");
        if (ev.replica)
            os << " " << *ev.replica << "\n";
        else
            os << " -\n";
    }
}

inline void write_offload_csv(std::ostream& os, const std::vector<OffloadRecord>& log) {
    os << "time_ms,job_id,stage,reason\n";
    for (const OffloadRecord& rec : log)
        os << util::format_g17(rec.time_ms) << "," << rec.job << "," << rec.stage << ","
           << (rec.reason == OffloadReason::Initial ? "initial" : "acd") << "\n";
}

}  // namespace hybsched
