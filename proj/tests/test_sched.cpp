#include <catch2/catch_amalgamated.hpp>

#include "hybsched/sched.hpp"
#include "test_util.hpp"

using namespace hybsched;
using testutil::chain_dag;
using testutil::coarse_cost_model;
using testutil::diamond_dag;
using testutil::make_job;

namespace {

std::vector<Job> single_stage_jobs(const std::vector<double>& p_private) {
    std::vector<Job> jobs;
    for (JobId j = 0; j < p_private.size(); ++j) jobs.push_back(make_job(j, {p_private[j]}, {100.0}));
    return jobs;
}

}  // namespace

TEST_CASE("initial_partition keeps the maximal fitting prefix under SPT") {
    const AppDag dag = chain_dag({1});
    const auto jobs = single_stage_jobs({50.0, 60.0, 70.0});
    SchedulerState state(dag, jobs, 120.0, PriorityOrder::Spt);
    const auto part = state.initial_partition();
    REQUIRE(part.retained == std::vector<JobId>{0, 1});
    REQUIRE(part.offloaded == std::vector<JobId>{2});
    REQUIRE_FALSE(part.capacity_warning);
    REQUIRE(state.queue(0) == std::vector<JobId>{0, 1});
    REQUIRE(state.is_public(2, 0));
    REQUIRE(state.on_public_chain(2));
    REQUIRE(state.offload_log().size() == 1);
    REQUIRE(state.offload_log()[0].reason == OffloadReason::Initial);
}

TEST_CASE("initial_partition retains everything when capacity covers the batch") {
    const AppDag dag = chain_dag({1});
    const auto jobs = single_stage_jobs({50.0, 60.0, 70.0});
    SchedulerState state(dag, jobs, 180.0, PriorityOrder::Spt);
    const auto part = state.initial_partition();
    REQUIRE(part.offloaded.empty());
    REQUIRE(state.queue(0).size() == 3);
}

TEST_CASE("initial_partition under HCF offloads the cheapest tail job") {
    const AppDag dag = chain_dag({1});
    // public costs with the coarse model: 0.1 USD per started 100ms
    std::vector<Job> jobs{make_job(0, {40000.0}, {9000.0}), make_job(1, {40000.0}, {5000.0}),
                          make_job(2, {40000.0}, {1000.0})};
    const CostModel cm = coarse_cost_model();
    SchedulerState state(dag, jobs, 80000.0, PriorityOrder::Hcf, cm);
    REQUIRE(state.priority_key(0) == Catch::Approx(9.0));
    REQUIRE(state.priority_key(1) == Catch::Approx(5.0));
    REQUIRE(state.priority_key(2) == Catch::Approx(1.0));
    const auto part = state.initial_partition();
    REQUIRE(part.retained == std::vector<JobId>{0, 1});
    REQUIRE(part.offloaded == std::vector<JobId>{2});

    // Oracle: of all feasible priority-order prefixes, the chosen one offloads
    // the least public cost.
    const std::vector<double> h{9.0, 5.0, 1.0};
    const double t_max = compute_capacity(dag, 80000.0);
    double best_offload_cost = std::numeric_limits<double>::infinity();
    for (std::size_t keep = 0; keep <= jobs.size(); ++keep) {
        double c_sum = 0.0, offload_cost = 0.0;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            (i < keep ? c_sum : offload_cost) += i < keep ? job_private_runtime(jobs[i]) : h[i];
        if (c_sum <= t_max) best_offload_cost = std::min(best_offload_cost, offload_cost);
    }
    REQUIRE(best_offload_cost == Catch::Approx(1.0));
}

TEST_CASE("must-private jobs are never offloaded at initialization") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {50.0}, {100.0}), make_job(1, {60.0}, {100.0}, {}, {}, {0}),
                          make_job(2, {70.0}, {100.0})};
    SECTION("forced job charged against capacity first") {
        SchedulerState state(dag, jobs, 120.0, PriorityOrder::Spt);
        const auto part = state.initial_partition();
        // forced job 1 uses 60 of 120; only job 0 still fits
        REQUIRE(part.retained == std::vector<JobId>{0, 1});
        REQUIRE(part.offloaded == std::vector<JobId>{2});
        REQUIRE_FALSE(part.capacity_warning);
    }
    SECTION("forced jobs beyond capacity raise the warning but stay private") {
        SchedulerState state(dag, jobs, 50.0, PriorityOrder::Spt);
        const auto part = state.initial_partition();
        REQUIRE(part.capacity_warning);  // the forced job alone exceeds T_max = 50
        REQUIRE(std::find(part.retained.begin(), part.retained.end(), 1) != part.retained.end());
        REQUIRE_FALSE(state.is_public(1, 0));
    }
}

TEST_CASE("forced-private overload sets the capacity warning") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {80.0}, {100.0}, {}, {}, {0})};
    SchedulerState state(dag, jobs, 50.0, PriorityOrder::Spt);
    const auto part = state.initial_partition();
    REQUIRE(part.capacity_warning);
    REQUIRE(part.retained == std::vector<JobId>{0});
    REQUIRE(part.offloaded.empty());
}

TEST_CASE("acd substitutes remaining time, queue delay and critical path") {
    SECTION("single stage, empty queue ahead") {
        const AppDag dag = chain_dag({1});
        const auto jobs = single_stage_jobs({10000.0});
        SchedulerState state(dag, jobs, 60000.0, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.acd(0, 0, 0.0) == Catch::Approx(50000.0));
    }
    SECTION("two jobs ahead split across two replicas") {
        const AppDag dag = chain_dag({2});
        const auto jobs = single_stage_jobs({10000.0, 10000.0, 10000.0});
        SchedulerState state(dag, jobs, 60000.0, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.queue(0) == std::vector<JobId>{0, 1, 2});
        REQUIRE(state.acd(0, 2, 0.0) == Catch::Approx(60000.0 - (10000.0 + 10000.0)));
    }
    SECTION("two-stage chain counts the downstream critical path") {
        const AppDag dag = chain_dag({1, 1});
        std::vector<Job> jobs{make_job(0, {30000.0, 45000.0}, {100.0, 100.0})};
        SchedulerState state(dag, jobs, 60000.0, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.acd(0, 0, 20000.0) == Catch::Approx(-35000.0));
    }
    SECTION("job not in the queue is a logic error") {
        const AppDag dag = chain_dag({1});
        const auto jobs = single_stage_jobs({10.0});
        SchedulerState state(dag, jobs, 100.0, PriorityOrder::Spt);
        REQUIRE_THROWS_AS(state.acd(0, 0, 0.0), std::logic_error);
    }
}

TEST_CASE("on_queue_change offloads negative-ACD jobs against the shrinking queue") {
    const AppDag dag = chain_dag({1});
    const auto jobs = single_stage_jobs({10000.0, 10000.0});
    SchedulerState state(dag, jobs, 35000.0, PriorityOrder::Spt);
    state.initial_partition();  // capacity 35000 covers both
    REQUIRE(state.queue(0) == std::vector<JobId>{0, 1});
    // at now = 20000 the remaining window is 15000
    const auto res = state.on_queue_change(0, 20000.0);
    REQUIRE(res.offloaded == std::vector<JobId>{1});
    REQUIRE(state.queue(0) == std::vector<JobId>{0});
    REQUIRE(state.is_public(1, 0));
    // every survivor satisfies the sign rule against the final queue
    REQUIRE(state.acd(0, 0, 20000.0) >= 0.0);
}

TEST_CASE("on_queue_change is a no-op on empty queues and slack-rich jobs") {
    const AppDag dag = chain_dag({1});
    const auto jobs = single_stage_jobs({10.0, 10.0});
    SchedulerState state(dag, jobs, 1e9, PriorityOrder::Spt);
    state.initial_partition();
    const auto res = state.on_queue_change(0, 0.0);
    REQUIRE(res.offloaded.empty());
    REQUIRE(state.queue(0).size() == 2);
    SchedulerState empty_state(dag, jobs, 1e9, PriorityOrder::Spt);
    const auto res2 = empty_state.on_queue_change(0, 0.0);
    REQUIRE(res2.offloaded.empty());
}

TEST_CASE("must-private jobs survive a negative ACD") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {10000.0}, {100.0}, {}, {}, {0}),
                          make_job(1, {10000.0}, {100.0}, {}, {}, {0})};
    SchedulerState state(dag, jobs, 15000.0, PriorityOrder::Spt);
    auto part = state.initial_partition();
    REQUIRE(part.capacity_warning);  // 20000 of forced work vs 15000 capacity
    const auto res = state.on_queue_change(0, 14000.0);
    REQUIRE(res.offloaded.empty());
    REQUIRE(state.queue(0).size() == 2);
}

TEST_CASE("on_replica_available dispatches the head and leaves the sign rule intact") {
    const AppDag dag = chain_dag({1});
    // SPT keys order the queue [j2, j0]
    std::vector<Job> jobs{make_job(0, {30000.0}, {100.0}), make_job(1, {90000.0}, {100.0}),
                          make_job(2, {10000.0}, {100.0})};
    SchedulerState state(dag, jobs, 40000.0, PriorityOrder::Spt);
    const auto part = state.initial_partition();
    REQUIRE(part.retained == std::vector<JobId>{2, 0});
    REQUIRE(state.queue(0) == std::vector<JobId>{2, 0});

    const auto dispatched = state.on_replica_available(0, 0, 0.0);
    REQUIRE(dispatched == JobId{2});
    REQUIRE(state.is_dispatched(2, 0));
    REQUIRE(state.queue(0) == std::vector<JobId>{0});
    // after the removal the tail job has non-negative ACD and must stay
    const auto res = state.on_queue_change(0, 0.0);
    REQUIRE(res.offloaded.empty());
    REQUIRE(state.queue(0) == std::vector<JobId>{0});

    state.set_replica_busy_until(0, 0, 10000.0);
    REQUIRE_THROWS_AS(state.on_replica_available(0, 0, 5000.0), std::logic_error);
    SchedulerState empty_state(dag, jobs, 1e9, PriorityOrder::Spt);
    REQUIRE(empty_state.on_replica_available(0, 0, 0.0) == std::nullopt);
}

TEST_CASE("on_stage_complete enqueues successors and honors join semantics") {
    SECTION("chain successor is enqueued") {
        const AppDag dag = chain_dag({1, 1});
        std::vector<Job> jobs{make_job(0, {10.0, 10.0}, {1.0, 1.0})};
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.on_replica_available(0, 0, 0.0) == JobId{0});
        const auto triggers = state.on_stage_complete(0, 0, 10.0);
        REQUIRE(triggers.size() == 1);
        REQUIRE(triggers[0].stage == 1);
        REQUIRE(triggers[0].kind == SchedulerState::TriggerKind::Enqueued);
        REQUIRE(state.queue(1) == std::vector<JobId>{0});
    }
    SECTION("diamond join fires only after both branches complete") {
        const AppDag dag = diamond_dag(1);
        std::vector<Job> jobs{make_job(0, {1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0})};
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.on_replica_available(0, 0, 0.0) == JobId{0});
        auto triggers = state.on_stage_complete(0, 0, 1.0);
        REQUIRE(triggers.size() == 2);  // b and c enqueued
        REQUIRE(state.on_replica_available(1, 0, 1.0) == JobId{0});
        REQUIRE(state.on_replica_available(2, 0, 1.0) == JobId{0});
        triggers = state.on_stage_complete(0, 1, 2.0);
        REQUIRE(triggers.empty());  // d still waits on c
        triggers = state.on_stage_complete(0, 2, 2.0);
        REQUIRE(triggers.size() == 1);
        REQUIRE(triggers[0].stage == 3);
        REQUIRE(state.queue(3) == std::vector<JobId>{0});
    }
    SECTION("public-chain job skips queueing downstream") {
        const AppDag dag = chain_dag({1, 1});
        std::vector<Job> jobs{make_job(0, {5.0, 5.0}, {1.0, 1.0}), make_job(1, {10.0, 10.0}, {1.0, 1.0})};
        // T_max = 20; only the short job fits
        SchedulerState state(dag, jobs, 10.0, PriorityOrder::Spt);
        const auto part = state.initial_partition();
        REQUIRE(part.offloaded == std::vector<JobId>{1});
        const auto triggers = state.on_stage_complete(1, 0, 5.0);
        REQUIRE(triggers.size() == 1);
        REQUIRE(triggers[0].kind == SchedulerState::TriggerKind::PublicReady);
        REQUIRE(state.queue(1).empty());
        REQUIRE(state.is_public(1, 1));
    }
    SECTION("completing a never-dispatched stage is an error") {
        const AppDag dag = chain_dag({1});
        const auto jobs = single_stage_jobs({10.0});
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE_THROWS_AS(state.on_stage_complete(0, 0, 0.0), std::logic_error);
    }
}

TEST_CASE("offloading converts all not-yet-started stages, not only descendants") {
    const AppDag dag = diamond_dag(1);
    std::vector<Job> jobs{make_job(0, {10.0, 100.0, 100.0, 10.0}, {1.0, 1.0, 1.0, 1.0})};
    SchedulerState state(dag, jobs, 150.0, PriorityOrder::Spt);
    state.initial_partition();
    REQUIRE(state.on_replica_available(0, 0, 0.0) == JobId{0});
    state.on_stage_complete(0, 0, 10.0);  // b and c queued
    REQUIRE(state.queue(1) == std::vector<JobId>{0});
    REQUIRE(state.queue(2) == std::vector<JobId>{0});
    // late enough that the queue scan at b offloads the job
    const auto res = state.on_queue_change(1, 60.0);
    REQUIRE(res.offloaded == std::vector<JobId>{0});
    // the sibling branch c was converted too and left its queue
    REQUIRE(state.is_public(0, 2));
    REQUIRE(state.is_public(0, 3));
    REQUIRE(state.queue(2).empty());
    REQUIRE(res.other_queues_changed == std::vector<StageId>{2});
    // the completed source stage keeps its private record
    REQUIRE_FALSE(state.is_public(0, 0));
}

TEST_CASE("priority orders sort queues deterministically") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {50.0}, {300.0}), make_job(1, {50.0}, {100.0}),
                          make_job(2, {20.0}, {200.0})};
    SECTION("spt sorts ascending runtime, ties by id") {
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Spt);
        state.initial_partition();
        REQUIRE(state.queue(0) == std::vector<JobId>{2, 0, 1});
    }
    SECTION("hcf sorts descending public cost") {
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Hcf, coarse_cost_model());
        state.initial_partition();
        REQUIRE(state.queue(0) == std::vector<JobId>{0, 2, 1});
    }
    SECTION("fifo keeps arrival order") {
        SchedulerState state(dag, jobs, 1e9, PriorityOrder::Fifo);
        state.initial_partition();
        REQUIRE(state.queue(0) == std::vector<JobId>{0, 1, 2});
    }
}

TEST_CASE("identical inputs produce identical offload logs") {
    const AppDag dag = chain_dag({1, 1});
    std::vector<Job> jobs;
    for (JobId j = 0; j < 6; ++j)
        jobs.push_back(make_job(j, {1000.0 + 100.0 * j, 500.0 + 50.0 * j}, {400.0, 300.0}));
    auto run = [&]() {
        SchedulerState state(dag, jobs, 4000.0, PriorityOrder::Spt);
        state.initial_partition();
        state.on_queue_change(0, 1500.0);
        std::vector<std::pair<JobId, StageId>> log;
        for (const auto& rec : state.offload_log()) log.emplace_back(rec.job, rec.stage);
        return log;
    };
    REQUIRE(run() == run());
}
