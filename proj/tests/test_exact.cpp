#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hybsched/exact.hpp"
#include "hybsched/sim.hpp"
#include "test_util.hpp"

using namespace hybsched;
using testutil::chain_dag;
using testutil::coarse_cost_model;
using testutil::make_job;

namespace {

// Independent 0/1 knapsack oracle: integer capacity, keep the most valuable
// job set whose private runtimes fit.
double knapsack_best_savings(const std::vector<long long>& weights, const std::vector<double>& values,
                             long long capacity) {
    std::vector<double> dp(static_cast<std::size_t>(capacity) + 1, 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i)
        for (long long w = capacity; w >= weights[i]; --w)
            dp[w] = std::max(dp[w], dp[w - weights[i]] + values[i]);
    return dp.back();
}

std::vector<Job> two_job_instance() {
    // coarse cost model: H = {9, 5}
    return {make_job(0, {40000.0}, {9000.0}, {100.0}, {100.0}),
            make_job(1, {50000.0}, {5000.0}, {100.0}, {100.0})};
}

}  // namespace

TEST_CASE("verify_schedule accepts a feasible serial schedule") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {20000.0}, {1000.0}), make_job(1, {20000.0}, {1000.0})};
    const MilpInstance inst = MilpInstance::make(dag, jobs, 60000.0);
    Schedule sched(2, 1);
    sched.at(0, 0) = {Placement::private_replica(0), 0.0};
    sched.at(1, 0) = {Placement::private_replica(0), 20000.0};
    REQUIRE(verify_schedule(inst, sched).empty());

    SECTION("overlapping starts on one replica are a sequencing violation") {
        sched.at(1, 0).start_ms = 0.0;
        const auto violations = verify_schedule(inst, sched);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations[0].family == "sequencing");
        REQUIRE(violations[0].job == 1);
        REQUIRE(violations[0].slack == Catch::Approx(20000.0));
    }
    SECTION("negative start times are flagged") {
        sched.at(0, 0).start_ms = -5.0;
        const auto violations = verify_schedule(inst, sched);
        REQUIRE_FALSE(violations.empty());
        REQUIRE(violations[0].family == "start-time");
    }
    SECTION("finishing after the deadline is a makespan violation") {
        sched.at(1, 0).start_ms = 55000.0;
        const auto violations = verify_schedule(inst, sched);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations[0].family == "makespan");
        REQUIRE(violations[0].slack == Catch::Approx(15000.0));
    }
}

TEST_CASE("verify_schedule flags privacy violations") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {1000.0}, {1000.0}, {}, {}, {0})};
    const MilpInstance inst = MilpInstance::make(dag, jobs, 60000.0);
    Schedule sched(1, 1);
    sched.at(0, 0) = {Placement::public_cloud(), 0.0};
    const auto violations = verify_schedule(inst, sched);
    REQUIRE(violations.size() == 1);
    REQUIRE(violations[0].family == "privacy");
}

TEST_CASE("verify_schedule charges transfers on chain transitions") {
    const AppDag dag = chain_dag({1, 1});
    std::vector<Job> jobs{make_job(0, {1000.0, 1000.0}, {800.0, 800.0}, {500.0, 500.0}, {300.0, 300.0})};
    const MilpInstance inst = MilpInstance::make(dag, jobs, 60000.0);
    SECTION("private to public needs the upstream upload") {
        Schedule sched(1, 2);
        sched.at(0, 0) = {Placement::private_replica(0), 0.0};
        sched.at(0, 1) = {Placement::public_cloud(), 1200.0};  // needs >= 1000 + 500
        auto violations = verify_schedule(inst, sched);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations[0].family == "precedence");
        REQUIRE(violations[0].slack == Catch::Approx(300.0));
        sched.at(0, 1).start_ms = 1500.0;
        REQUIRE(verify_schedule(inst, sched).empty());
    }
    SECTION("public to private needs the download") {
        Schedule sched(1, 2);
        sched.at(0, 0) = {Placement::public_cloud(), 0.0};
        sched.at(0, 1) = {Placement::private_replica(0), 900.0};  // needs >= 800 + 300
        auto violations = verify_schedule(inst, sched);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations[0].family == "precedence");
        sched.at(0, 1).start_ms = 1100.0;
        REQUIRE(verify_schedule(inst, sched).empty());
    }
    SECTION("a public sink must download before the deadline") {
        Schedule sched(1, 2);
        sched.at(0, 0) = {Placement::private_replica(0), 0.0};
        sched.at(0, 1) = {Placement::public_cloud(), 59000.0};
        // finish 59800 fits, but 59800 + 300 download does not
        const MilpInstance tight = MilpInstance::make(dag, jobs, 60000.0);
        auto violations = verify_schedule(tight, sched);
        REQUIRE(violations.size() == 1);
        REQUIRE(violations[0].family == "makespan");
    }
    SECTION("replica index out of range") {
        Schedule sched(1, 2);
        sched.at(0, 0) = {Placement::private_replica(3), 0.0};
        sched.at(0, 1) = {Placement::private_replica(0), 1000.0};
        auto violations = verify_schedule(inst, sched);
        REQUIRE_FALSE(violations.empty());
        REQUIRE(violations[0].family == "replica-assignment");
    }
}

TEST_CASE("enumerate_exhaustive picks the most valuable fitting job") {
    const AppDag dag = chain_dag({1});
    const auto jobs = two_job_instance();
    const CostModel cm = coarse_cost_model();
    SECTION("only one job fits before the deadline") {
        const MilpInstance inst = MilpInstance::make(dag, jobs, 60000.0, cm);
        const ExactSolution sol = enumerate_exhaustive(inst);
        REQUIRE(sol.feasible);
        REQUIRE(sol.savings_usd == Catch::Approx(9.0));
        REQUIRE(sol.public_cost_usd == Catch::Approx(5.0));
        REQUIRE(sol.schedule.at(0, 0).placement.is_private());
        REQUIRE(sol.schedule.at(1, 0).placement.is_public());
        REQUIRE(verify_schedule(inst, sol.schedule).empty());
        REQUIRE(sol.savings_usd + sol.public_cost_usd == Catch::Approx(inst.total_h()).margin(1e-12));
    }
    SECTION("a roomy deadline keeps both jobs private") {
        const MilpInstance inst = MilpInstance::make(dag, jobs, 90000.0, cm);
        const ExactSolution sol = enumerate_exhaustive(inst);
        REQUIRE(sol.savings_usd == Catch::Approx(14.0));
        REQUIRE(sol.public_cost_usd == Catch::Approx(0.0).margin(1e-15));
        REQUIRE(verify_schedule(inst, sol.schedule).empty());
    }
    SECTION("a forced-private stage that cannot meet the deadline is infeasible") {
        std::vector<Job> hard{make_job(0, {50000.0, 1000.0}, {1000.0, 1000.0}, {}, {}, {0})};
        const MilpInstance inst = MilpInstance::make(chain_dag({1, 1}), hard, 20000.0, cm);
        const ExactSolution sol = enumerate_exhaustive(inst);
        REQUIRE_FALSE(sol.feasible);
        REQUIRE(sol.optimal);
    }
    SECTION("the guard rejects oversized instances") {
        std::vector<Job> many;
        for (JobId j = 0; j < 13; ++j) many.push_back(make_job(j, {10.0}, {10.0}));
        const MilpInstance inst = MilpInstance::make(dag, many, 1000.0, cm);
        REQUIRE_THROWS_WITH(enumerate_exhaustive(inst),
                            Catch::Matchers::ContainsSubstring("exhaustive guard"));
    }
}

TEST_CASE("solve_exact matches the exhaustive oracle on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> job_count(2, 4);
    std::uniform_int_distribution<int> stage_count(1, 2);
    std::uniform_int_distribution<int> replica_count(1, 2);
    std::uniform_real_distribution<double> priv(5000.0, 40000.0);
    std::uniform_real_distribution<double> pub(1000.0, 20000.0);
    std::uniform_real_distribution<double> frac(0.35, 0.9);
    int checked = 0;
    for (int it = 0; it < 15; ++it) {
        const int k_count = stage_count(rng);
        std::vector<std::uint32_t> replicas;
        for (int k = 0; k < k_count; ++k) replicas.push_back(replica_count(rng));
        const AppDag dag = chain_dag(replicas);
        if (dag.total_replicas() > 4) continue;
        const int j_count = job_count(rng);
        if (static_cast<std::size_t>(j_count * k_count) > 12) continue;
        std::vector<Job> jobs;
        double total_c = 0.0;
        for (JobId j = 0; j < static_cast<JobId>(j_count); ++j) {
            std::vector<double> pp, pq, up, down;
            for (int k = 0; k < k_count; ++k) {
                pp.push_back(priv(rng));
                pq.push_back(pub(rng));
                up.push_back(200.0);
                down.push_back(100.0);
            }
            jobs.push_back(make_job(j, pp, pq, up, down));
            total_c += job_private_runtime(jobs.back());
        }
        const double c_max = frac(rng) * total_c / dag.total_replicas() + 25000.0;
        const MilpInstance inst = MilpInstance::make(dag, jobs, c_max);
        const ExactSolution oracle = enumerate_exhaustive(inst);
        const ExactSolution bnb = solve_exact(inst);
        REQUIRE(bnb.optimal);
        REQUIRE(oracle.feasible == bnb.feasible);
        if (oracle.feasible) {
            REQUIRE(bnb.savings_usd == Catch::Approx(oracle.savings_usd).margin(1e-12));
            REQUIRE(verify_schedule(inst, oracle.schedule).empty());
            REQUIRE(verify_schedule(inst, bnb.schedule).empty());
            ++checked;
        }
    }
    REQUIRE(checked >= 8);
}

TEST_CASE("solve_exact keeps everything private when capacity allows") {
    const AppDag dag = chain_dag({2});
    std::vector<Job> jobs{make_job(0, {1000.0}, {500.0}), make_job(1, {1500.0}, {700.0}),
                          make_job(2, {2000.0}, {900.0})};
    const MilpInstance inst = MilpInstance::make(dag, jobs, 10000.0);
    const ExactSolution sol = solve_exact(inst);
    REQUIRE(sol.feasible);
    REQUIRE(sol.optimal);
    REQUIRE(sol.savings_usd == Catch::Approx(inst.total_h()).margin(1e-15));
    REQUIRE(sol.public_cost_usd == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("an exhausted node budget returns a valid incumbent without optimality") {
    const AppDag dag = chain_dag({1});
    const auto jobs = two_job_instance();
    const MilpInstance inst = MilpInstance::make(dag, jobs, 60000.0, coarse_cost_model());
    const ExactSolution sol = solve_exact(inst, 1);
    REQUIRE(sol.feasible);
    REQUIRE_FALSE(sol.optimal);
    REQUIRE(sol.savings_usd == Catch::Approx(0.0).margin(1e-15));  // all-public baseline
    REQUIRE(verify_schedule(inst, sol.schedule).empty());
}

TEST_CASE("free placement can beat the chain-restricted space") {
    const AppDag dag = chain_dag({1, 1});
    // stage 0 cannot run privately in time; stage 1 is valuable and cheap to keep
    std::vector<Job> jobs{make_job(0, {50000.0, 2000.0}, {3000.0, 9000.0}, {100.0, 100.0},
                                   {200.0, 200.0})};
    const CostModel cm = coarse_cost_model();
    const double c_max = 20000.0;
    const MilpInstance restricted = MilpInstance::make(dag, jobs, c_max, cm, false);
    const MilpInstance free_inst = MilpInstance::make(dag, jobs, c_max, cm, true);
    const ExactSolution r = enumerate_exhaustive(restricted);
    const ExactSolution f = enumerate_exhaustive(free_inst);
    REQUIRE(r.feasible);
    REQUIRE(f.feasible);
    REQUIRE(r.savings_usd == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(f.savings_usd == Catch::Approx(9.0));  // stage 1 stays private after a download
    REQUIRE(f.schedule.at(0, 0).placement.is_public());
    REQUIRE(f.schedule.at(0, 1).placement.is_private());
    REQUIRE(verify_schedule(free_inst, f.schedule).empty());
    // the branch-and-bound agrees in both spaces
    REQUIRE(solve_exact(restricted).savings_usd == Catch::Approx(r.savings_usd).margin(1e-12));
    REQUIRE(solve_exact(free_inst).savings_usd == Catch::Approx(f.savings_usd).margin(1e-12));
}

TEST_CASE("single-stage instances reduce to a knapsack") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> weight(5000, 30000);
    std::uniform_int_distribution<int> pub_ms(1000, 15000);
    for (int it = 0; it < 5; ++it) {
        const AppDag dag = chain_dag({1});
        std::vector<Job> jobs;
        std::vector<long long> weights;
        std::vector<double> values;
        for (JobId j = 0; j < 4; ++j) {
            const long long w = weight(rng);
            jobs.push_back(make_job(j, {double(w)}, {double(pub_ms(rng))}, {50.0}, {50.0}));
            weights.push_back(w);
            values.push_back(stage_cost(jobs.back(), 0, dag));
        }
        const long long capacity = 45000;
        const MilpInstance inst = MilpInstance::make(dag, jobs, double(capacity));
        const ExactSolution sol = enumerate_exhaustive(inst);
        REQUIRE(sol.feasible);
        REQUIRE(sol.savings_usd ==
                Catch::Approx(knapsack_best_savings(weights, values, capacity)).margin(1e-12));
        REQUIRE(solve_exact(inst).savings_usd == Catch::Approx(sol.savings_usd).margin(1e-12));
    }
}

TEST_CASE("big constants dominate the instance scale") {
    const AppDag dag = chain_dag({1, 1});
    std::vector<Job> jobs{make_job(0, {1000.0, 2000.0}, {500.0, 700.0}, {100.0, 100.0},
                                   {50.0, 50.0})};
    const MilpInstance inst = MilpInstance::make(dag, jobs, 5000.0);
    REQUIRE(inst.q_seq > 1.0 * 2.0 * 2000.0 + 5000.0);
    std::uint32_t max_deg = 0;
    for (StageId k = 0; k < dag.stage_count(); ++k) max_deg = std::max(max_deg, dag.out_degree(k));
    REQUIRE(inst.m_ind > max_deg);
}

TEST_CASE("greedy output verifies cleanly as a schedule") {
    const AppDag dag = chain_dag({1});
    std::vector<Job> jobs{make_job(0, {40000.0}, {30000.0}, {2000.0}, {1000.0}),
                          make_job(1, {40000.0}, {30000.0}, {2000.0}, {1000.0})};
    const TruthTable truth = TruthTable::from_jobs(jobs);
    const SimReport report = run_greedy(dag, jobs, truth, PriorityOrder::Spt, 60000.0);
    REQUIRE_FALSE(report.deadline_missed);
    const Schedule sched = schedule_from_report(report);
    const MilpInstance inst = MilpInstance::make(dag, jobs, std::max(60000.0, report.makespan_ms));
    REQUIRE(verify_schedule(inst, sched).empty());
}

TEST_CASE("greedy never beats the exact optimum") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> priv(5000.0, 30000.0);
    std::uniform_real_distribution<double> pub(2000.0, 15000.0);
    for (int it = 0; it < 10; ++it) {
        const AppDag dag = chain_dag({1, 1});
        std::vector<Job> jobs;
        double total = 0.0;
        for (JobId j = 0; j < 3; ++j) {
            jobs.push_back(make_job(j, {priv(rng), priv(rng)}, {pub(rng), pub(rng)}, {100.0, 100.0},
                                    {50.0, 50.0}));
            total += job_private_runtime(jobs.back());
        }
        const double c_max = 0.55 * total / 2.0 + 20000.0;
        const TruthTable truth = TruthTable::from_jobs(jobs);
        const MilpInstance inst = MilpInstance::make(dag, jobs, c_max);
        const ExactSolution sol = enumerate_exhaustive(inst);
        for (PriorityOrder order : {PriorityOrder::Spt, PriorityOrder::Hcf}) {
            const SimReport report = run_greedy(dag, jobs, truth, order, c_max);
            if (!report.deadline_missed && sol.feasible)
                REQUIRE(report.total_cost_usd >= sol.public_cost_usd - 1e-12);
        }
    }
}

TEST_CASE("schedule CSV round-trips") {
    Schedule sched(2, 2);
    sched.at(0, 0) = {Placement::private_replica(0), 0.0};
    sched.at(0, 1) = {Placement::public_cloud(), 1234.5};
    sched.at(1, 0) = {Placement::private_replica(1), 10.25};
    sched.at(1, 1) = {Placement::public_cloud(), 99.125};
    std::ostringstream os;
    write_schedule_csv(os, sched);
    std::istringstream is(os.str());
    const Schedule back = parse_schedule_csv(is, 2, 2);
    for (JobId j = 0; j < 2; ++j)
        for (StageId k = 0; k < 2; ++k) {
            REQUIRE(back.at(j, k).placement == sched.at(j, k).placement);
            REQUIRE(back.at(j, k).start_ms == sched.at(j, k).start_ms);
        }
    std::istringstream missing("job,stage,placement,replica,start_ms\n0,0,private,0,0\n");
    REQUIRE_THROWS_WITH(parse_schedule_csv(missing, 2, 2),
                        Catch::Matchers::ContainsSubstring("missing"));
}
