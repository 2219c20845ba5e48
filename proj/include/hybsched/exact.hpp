#pragma once

// Exact side of the artifact: schedule feasibility verification against the
// flow-shop style constraint system, an exhaustive oracle for tiny instances,
// and a branch-and-bound solver that maximizes the cost savings of stages
// kept in the private cloud.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybsched/model.hpp"

namespace hybsched {

class MilpInstance {
public:
    static MilpInstance make(AppDag dag, std::vector<Job> jobs, double c_max_ms, CostModel cm = {},
                             bool free_placement = false) {
        if (!(c_max_ms > 0.0)) throw std::invalid_argument("MilpInstance: c_max must be positive");
        validate_batch(jobs, dag);
        cm.validate();
        MilpInstance inst;
        inst.c_max_ms = c_max_ms;
        inst.cost_model = cm;
        inst.free_placement = free_placement;
        double max_latency = 0.0;
        for (const Job& job : jobs) {
            std::vector<double> row;
            for (StageId k = 0; k < dag.stage_count(); ++k) {
                row.push_back(stage_cost(job, k, dag, cm));
                max_latency = std::max({max_latency, job.p_private_ms[k], job.p_public_ms[k],
                                        job.upload_ms[k], job.download_ms[k]});
            }
            inst.h_usd.push_back(std::move(row));
        }
        inst.q_seq = static_cast<double>(jobs.size() * dag.stage_count()) * max_latency + c_max_ms + 1.0;
        std::uint32_t max_deg = 0;
        for (StageId k = 0; k < dag.stage_count(); ++k) max_deg = std::max(max_deg, dag.out_degree(k));
        inst.m_ind = static_cast<double>(max_deg) + 1.0;
        inst.dag_.emplace(std::move(dag));
        inst.jobs_ = std::move(jobs);
        return inst;
    }

    const AppDag& dag() const { return *dag_; }
    const std::vector<Job>& jobs() const { return jobs_; }

    double total_h() const {
        double sum = 0.0;
        for (const auto& row : h_usd)
            for (double h : row) sum += h;
        return sum;
    }

    double c_max_ms = 0.0;
    CostModel cost_model;
    bool free_placement = false;             // lift the public-chain closure on placements
    std::vector<std::vector<double>> h_usd;  // [job][stage] public execution cost
    double q_seq = 0.0;                      // disjunctive big constant
    double m_ind = 0.0;                      // indicator big constant

private:
    std::optional<AppDag> dag_;  // owned; AppDag has no default constructor
    std::vector<Job> jobs_;
};

struct Violation {
    std::string family;
    JobId job = 0;
    StageId stage = 0;
    double slack = 0.0;  // amount by which the constraint is violated
    std::string message;
};

// Checks a complete schedule against the constraint system: makespan with
// sink downloads, precedence with chain-transition transfers, replica bounds,
// per-replica non-overlap, privacy and non-negative starts. Violations are
// data, not errors.
inline std::vector<Violation> verify_schedule(const MilpInstance& inst, const Schedule& sched) {
    const AppDag& dag = inst.dag();
    const std::vector<Job>& jobs = inst.jobs();
    if (sched.job_count() != jobs.size() || sched.stage_count() != dag.stage_count())
        throw std::invalid_argument("verify_schedule: schedule dimensions do not match the instance");
    if (!sched.complete()) throw std::invalid_argument("verify_schedule: schedule is incomplete");

    const double tol = kTimeEps;
    std::vector<Violation> out;
    auto finish_of = [&](JobId j, StageId k) {
        const Assignment& a = sched.at(j, k);
        const double p = a.placement.is_public() ? jobs[j].p_public_ms[k] : jobs[j].p_private_ms[k];
        return a.start_ms + p;
    };

    for (JobId j = 0; j < jobs.size(); ++j) {
        for (StageId k = 0; k < dag.stage_count(); ++k) {
            const Assignment& a = sched.at(j, k);
            if (a.start_ms < -tol)
                out.push_back({"start-time", j, k, -a.start_ms,
                               "start time is negative"});
            if (a.placement.is_private() && a.placement.replica() >= dag.replicas(k))
                out.push_back({"replica-assignment", j, k,
                               static_cast<double>(a.placement.replica() - dag.replicas(k) + 1),
                               "replica index exceeds the stage's replica count"});
            const double finish = finish_of(j, k);
            if (finish > inst.c_max_ms + tol)
                out.push_back({"makespan", j, k, finish - inst.c_max_ms,
                               "stage finishes after the deadline"});
            if (dag.is_sink(k) && a.placement.is_public()) {
                const double stored = finish + jobs[j].download_ms[k];
                if (stored > inst.c_max_ms + tol && finish <= inst.c_max_ms + tol)
                    out.push_back({"makespan", j, k, stored - inst.c_max_ms,
                                   "result download completes after the deadline"});
            }
            if (jobs[j].must_private.count(k) && a.placement.is_public())
                out.push_back({"privacy", j, k, 0.0, "must-private stage placed in the public cloud"});
        }
        for (const auto& [p, q] : dag.edges()) {
            const bool p_private = sched.at(j, p).placement.is_private();
            const bool q_private = sched.at(j, q).placement.is_private();
            double required = finish_of(j, p);
            if (p_private && !q_private) required += jobs[j].upload_ms[p];
            if (!p_private && q_private) required += jobs[j].download_ms[p];
            const double start_q = sched.at(j, q).start_ms;
            if (start_q < required - tol)
                out.push_back({"precedence", j, q, required - start_q,
                               "stage starts before its predecessor's output is available"});
        }
    }

    for (StageId k = 0; k < dag.stage_count(); ++k) {
        for (ReplicaId r = 0; r < dag.replicas(k); ++r) {
            std::vector<JobId> assigned;
            for (JobId j = 0; j < jobs.size(); ++j) {
                const Placement& pl = sched.at(j, k).placement;
                if (pl.is_private() && pl.replica() == r) assigned.push_back(j);
            }
            std::sort(assigned.begin(), assigned.end(), [&](JobId a, JobId b) {
                const double sa = sched.at(a, k).start_ms, sb = sched.at(b, k).start_ms;
                if (sa != sb) return sa < sb;
                return a < b;
            });
            for (std::size_t i = 1; i < assigned.size(); ++i) {
                const double prev_finish = finish_of(assigned[i - 1], k);
                const double next_start = sched.at(assigned[i], k).start_ms;
                if (next_start < prev_finish - tol)
                    out.push_back({"sequencing", assigned[i], k, prev_finish - next_start,
                                   "overlaps job " + std::to_string(assigned[i - 1]) +
                                       " on replica " + std::to_string(r)});
            }
        }
    }
    return out;
}

struct ExactSolution {
    Schedule schedule;
    double savings_usd = 0.0;      // objective z
    double public_cost_usd = 0.0;  // total H of the public complement
    bool optimal = false;          // search ran to completion
    bool feasible = false;
    std::uint64_t nodes_explored = 0;
};

namespace detail {

struct SequencingFound {
    std::vector<std::vector<std::vector<JobId>>> orders;
    TimingResult timing;
};

// Searches replica assignments (canonical: a job may open at most one new
// replica) and per-replica permutations for the fixed placement; returns the
// first sequencing whose earliest-start timing meets the deadline. Stages are
// processed in topological order and timed incrementally, so a prefix that
// already blows the deadline is pruned before any downstream choice is made.
class SequencingSearch {
public:
    SequencingSearch(const AppDag& dag, const LatencyTable& lat,
                     const std::vector<std::vector<char>>& is_private, double c_max_ms)
        : dag_(dag), lat_(lat), is_private_(is_private), c_max_(c_max_ms) {
        const std::size_t j_count = is_private.size();
        const std::size_t k_count = dag.stage_count();
        private_jobs_.assign(k_count, {});
        for (JobId j = 0; j < j_count; ++j)
            for (StageId k = 0; k < k_count; ++k)
                if (is_private[j][k]) private_jobs_[k].push_back(j);
        orders_.assign(k_count, {});
        for (StageId k = 0; k < k_count; ++k) orders_[k].resize(dag.replicas(k));
        finish_.assign(j_count, std::vector<double>(k_count, 0.0));
    }

    std::optional<SequencingFound> run() {
        if (!stage_dfs(0)) return std::nullopt;
        std::vector<std::vector<Placement>> placement(
            is_private_.size(), std::vector<Placement>(dag_.stage_count(), Placement::public_cloud()));
        for (StageId k = 0; k < dag_.stage_count(); ++k)
            for (ReplicaId r = 0; r < orders_[k].size(); ++r)
                for (JobId j : orders_[k][r]) placement[j][k] = Placement::private_replica(r);
        return SequencingFound{orders_, earliest_start_times(dag_, lat_, placement, orders_)};
    }

private:
    double ready_bound(JobId j, StageId q) const {
        double t = 0.0;
        const bool q_private = is_private_[j][q] != 0;
        if (!q_private && dag_.predecessors(q).empty()) t = lat_.upload_ms[j][q];
        for (StageId p : dag_.predecessors(q)) {
            double b = finish_[j][p];
            const bool p_private = is_private_[j][p] != 0;
            if (p_private && !q_private) b += lat_.upload_ms[j][p];
            if (!p_private && q_private) b += lat_.download_ms[j][p];
            t = std::max(t, b);
        }
        return t;
    }

    bool stage_dfs(std::size_t idx) {
        if (idx == dag_.stage_count()) return true;
        const StageId k = dag_.topological_order()[idx];
        // public executions at this stage are forced; bail out if any miss
        for (JobId j = 0; j < is_private_.size(); ++j) {
            if (is_private_[j][k]) continue;
            const double finish = ready_bound(j, k) + lat_.p_public_ms[j][k];
            double done = finish;
            if (dag_.is_sink(k)) done += lat_.download_ms[j][k];
            if (done > c_max_ + kTimeEps) return false;
            finish_[j][k] = finish;
        }
        return assign_job(idx, k, 0, 0);
    }

    bool assign_job(std::size_t idx, StageId k, std::size_t i, ReplicaId used) {
        if (i == private_jobs_[k].size()) return permute_replica(idx, k, 0);
        const JobId j = private_jobs_[k][i];
        const ReplicaId limit = std::min<ReplicaId>(dag_.replicas(k) - 1, used);
        for (ReplicaId r = 0; r <= limit; ++r) {
            orders_[k][r].push_back(j);
            if (assign_job(idx, k, i + 1, std::max<ReplicaId>(used, r + 1))) return true;
            orders_[k][r].pop_back();
        }
        return false;
    }

    bool permute_replica(std::size_t idx, StageId k, ReplicaId r) {
        if (r == dag_.replicas(k)) {
            if (!time_stage(k)) return false;
            return stage_dfs(idx + 1);
        }
        auto& seq = orders_[k][r];
        std::sort(seq.begin(), seq.end());
        do {
            if (permute_replica(idx, k, r + 1)) return true;
        } while (std::next_permutation(seq.begin(), seq.end()));
        return false;
    }

    bool time_stage(StageId k) {
        for (ReplicaId r = 0; r < orders_[k].size(); ++r) {
            double free_at = 0.0;
            for (JobId j : orders_[k][r]) {
                const double finish =
                    std::max(free_at, ready_bound(j, k)) + lat_.p_private_ms[j][k];
                if (finish > c_max_ + kTimeEps) return false;
                finish_[j][k] = finish;
                free_at = finish;
            }
        }
        return true;
    }

    const AppDag& dag_;
    const LatencyTable& lat_;
    const std::vector<std::vector<char>>& is_private_;
    double c_max_;
    std::vector<std::vector<JobId>> private_jobs_;
    std::vector<std::vector<std::vector<JobId>>> orders_;
    std::vector<std::vector<double>> finish_;
};

inline std::optional<SequencingFound> find_feasible_sequencing(const AppDag& dag, const LatencyTable& lat,
                                                               const std::vector<std::vector<char>>& is_private,
                                                               double c_max_ms) {
    return SequencingSearch(dag, lat, is_private, c_max_ms).run();
}

// Candidate public-stage sets per job as bitmasks; in the restricted space a
// stage may only run publicly if all of its successors do too.
inline std::vector<std::uint32_t> candidate_public_sets(const AppDag& dag, bool free_placement) {
    const std::size_t k_count = dag.stage_count();
    if (k_count > 20) throw std::invalid_argument("candidate_public_sets: too many stages");
    std::vector<std::uint32_t> sets;
    for (std::uint32_t mask = 0; mask < (1u << k_count); ++mask) {
        bool ok = true;
        if (!free_placement) {
            for (StageId k = 0; k < k_count && ok; ++k) {
                if (!(mask & (1u << k))) continue;
                for (StageId q : dag.successors(k))
                    if (!(mask & (1u << q))) {
                        ok = false;
                        break;
                    }
            }
        }
        if (ok) sets.push_back(mask);
    }
    // Order by the e-vector (1 = private) read stage 0 first, ascending.
    auto e_key = [k_count](std::uint32_t mask) {
        std::uint32_t key = 0;
        for (StageId k = 0; k < k_count; ++k)
            if (!(mask & (1u << k))) key |= 1u << (k_count - 1 - k);
        return key;
    };
    std::sort(sets.begin(), sets.end(),
              [&](std::uint32_t a, std::uint32_t b) { return e_key(a) < e_key(b); });
    return sets;
}

inline Schedule schedule_from_search(const AppDag& dag, const std::vector<std::vector<char>>& is_private,
                                     const SequencingFound& found) {
    const std::size_t j_count = is_private.size();
    Schedule sched(j_count, dag.stage_count());
    for (JobId j = 0; j < j_count; ++j)
        for (StageId k = 0; k < dag.stage_count(); ++k) {
            sched.at(j, k).placement = Placement::public_cloud();
            sched.at(j, k).start_ms = found.timing.start_ms[j][k];
        }
    for (StageId k = 0; k < dag.stage_count(); ++k)
        for (ReplicaId r = 0; r < found.orders[k].size(); ++r)
            for (JobId j : found.orders[k][r]) sched.at(j, k).placement = Placement::private_replica(r);
    return sched;
}

}  // namespace detail

// Brute-force optimum over every placement, replica assignment and sequencing.
// Guarded to desk-scale instances; the search order fixes ties.
inline ExactSolution enumerate_exhaustive(const MilpInstance& inst) {
    const AppDag& dag = inst.dag();
    const std::vector<Job>& jobs = inst.jobs();
    const std::size_t j_count = jobs.size();
    const std::size_t k_count = dag.stage_count();
    if (j_count * k_count > 12 || dag.total_replicas() > 4)
        throw std::invalid_argument(
            "enumerate_exhaustive: instance exceeds the exhaustive guard (J*K <= 12, total replicas <= 4)");

    const auto all_sets = detail::candidate_public_sets(dag, inst.free_placement);
    std::vector<std::vector<std::uint32_t>> per_job(j_count);
    for (JobId j = 0; j < j_count; ++j) {
        std::uint32_t omega = 0;
        for (StageId k : jobs[j].must_private) omega |= 1u << k;
        for (std::uint32_t mask : all_sets)
            if ((mask & omega) == 0) per_job[j].push_back(mask);
    }

    const LatencyTable lat = LatencyTable::from_jobs(jobs);
    ExactSolution best;
    best.optimal = true;
    std::vector<std::uint32_t> chosen(j_count, 0);

    // Canonical (job, stage)-ordered sum so the savings of a given placement
    // is bit-identical across solvers.
    auto canonical_savings = [&](const std::vector<std::vector<char>>& is_private) {
        double z = 0.0;
        for (JobId j = 0; j < j_count; ++j)
            for (StageId k = 0; k < k_count; ++k)
                if (is_private[j][k]) z += inst.h_usd[j][k];
        return z;
    };

    auto recurse = [&](auto&& self, JobId j) -> void {
        if (j == j_count) {
            std::vector<std::vector<char>> is_private(j_count, std::vector<char>(k_count, 0));
            for (JobId jj = 0; jj < j_count; ++jj)
                for (StageId k = 0; k < k_count; ++k)
                    is_private[jj][k] = (chosen[jj] & (1u << k)) ? 0 : 1;
            const double z = canonical_savings(is_private);
            if (best.feasible && z <= best.savings_usd) return;
            const auto found = detail::find_feasible_sequencing(dag, lat, is_private, inst.c_max_ms);
            if (!found) return;
            best.feasible = true;
            best.savings_usd = z;
            best.public_cost_usd = inst.total_h() - z;
            best.schedule = detail::schedule_from_search(dag, is_private, *found);
            return;
        }
        for (std::uint32_t mask : per_job[j]) {
            chosen[j] = mask;
            self(self, j + 1);
        }
    };
    recurse(recurse, 0);
    return best;
}

// Branch-and-bound over the per-stage placement variables in descending-cost
// order; the bound assumes every undecided stage stays private. Leaves are
// checked by the same sequencing search the oracle uses.
inline ExactSolution solve_exact(const MilpInstance& inst, std::uint64_t node_budget = 1u << 20) {
    const AppDag& dag = inst.dag();
    const std::vector<Job>& jobs = inst.jobs();
    const std::size_t j_count = jobs.size();
    const std::size_t k_count = dag.stage_count();
    if (j_count * k_count > 32 || dag.total_replicas() > 8)
        throw std::invalid_argument(
            "solve_exact: instance exceeds the solver's intended scale (J*K <= 32, total replicas <= 8)");
    const LatencyTable lat = LatencyTable::from_jobs(jobs);

    std::vector<std::vector<StageId>> ancestors(k_count), descendants(k_count);
    for (StageId k = 0; k < k_count; ++k) {
        std::vector<char> seen(k_count, 0);
        std::vector<StageId> stack{k};
        while (!stack.empty()) {
            const StageId cur = stack.back();
            stack.pop_back();
            for (StageId q : dag.successors(cur))
                if (!seen[q]) {
                    seen[q] = 1;
                    descendants[k].push_back(q);
                    stack.push_back(q);
                }
        }
        std::sort(descendants[k].begin(), descendants[k].end());
    }
    for (StageId k = 0; k < k_count; ++k)
        for (StageId d : descendants[k]) ancestors[d].push_back(k);

    // -1 undecided, 0 public, 1 private
    std::vector<signed char> base(j_count * k_count, -1);
    auto at = [k_count](std::vector<signed char>& a, JobId j, StageId k) -> signed char& {
        return a[j * k_count + k];
    };
    auto propagate = [&](std::vector<signed char>& a, JobId j, StageId k, signed char v) -> bool {
        std::vector<std::pair<StageId, signed char>> stack{{k, v}};
        while (!stack.empty()) {
            const auto [s, val] = stack.back();
            stack.pop_back();
            signed char& cell = at(a, j, s);
            if (cell == val) continue;
            if (cell != -1) return false;
            cell = val;
            if (inst.free_placement) continue;
            if (val == 1)
                for (StageId anc : ancestors[s]) stack.emplace_back(anc, 1);
            else
                for (StageId d : descendants[s]) stack.emplace_back(d, 0);
        }
        return true;
    };

    for (JobId j = 0; j < j_count; ++j)
        for (StageId k : jobs[j].must_private)
            if (!propagate(base, j, k, 1))
                throw std::logic_error("solve_exact: must-private constraints are contradictory");

    std::vector<std::pair<JobId, StageId>> var_order;
    for (JobId j = 0; j < j_count; ++j)
        for (StageId k = 0; k < k_count; ++k) var_order.emplace_back(j, k);
    std::sort(var_order.begin(), var_order.end(), [&](const auto& a, const auto& b) {
        const double ha = inst.h_usd[a.first][a.second], hb = inst.h_usd[b.first][b.second];
        if (ha != hb) return ha > hb;
        return a < b;
    });

    ExactSolution best;
    auto try_leaf = [&](const std::vector<signed char>& a) {
        double z = 0.0;
        std::vector<std::vector<char>> is_private(j_count, std::vector<char>(k_count, 0));
        for (JobId j = 0; j < j_count; ++j)
            for (StageId k = 0; k < k_count; ++k)
                if (a[j * k_count + k] == 1) {
                    is_private[j][k] = 1;
                    z += inst.h_usd[j][k];
                }
        if (best.feasible && z <= best.savings_usd) return;
        const auto found = detail::find_feasible_sequencing(dag, lat, is_private, inst.c_max_ms);
        if (!found) return;
        best.feasible = true;
        best.savings_usd = z;
        best.public_cost_usd = inst.total_h() - z;
        best.schedule = detail::schedule_from_search(dag, is_private, *found);
    };

    // Baseline incumbent: only the forced-private stages stay private.
    {
        std::vector<signed char> a = base;
        for (auto& cell : a)
            if (cell == -1) cell = 0;
        try_leaf(a);
    }

    bool truncated = false;
    auto dfs = [&](auto&& self, std::vector<signed char>& a) -> void {
        if (truncated) return;
        ++best.nodes_explored;
        if (best.nodes_explored > node_budget) {
            truncated = true;
            return;
        }
        // canonical (job, stage)-ordered bound: undecided stages count as private
        double bound = 0.0;
        for (JobId j = 0; j < j_count; ++j)
            for (StageId k = 0; k < k_count; ++k)
                if (a[j * k_count + k] != 0) bound += inst.h_usd[j][k];
        std::size_t next = var_order.size();
        for (std::size_t i = 0; i < var_order.size(); ++i) {
            const auto [j, k] = var_order[i];
            if (a[j * k_count + k] == -1) {
                next = i;
                break;
            }
        }
        if (best.feasible && bound <= best.savings_usd + 1e-18) return;
        if (next == var_order.size()) {
            try_leaf(a);
            return;
        }
        const auto [j, k] = var_order[next];
        for (signed char v : {static_cast<signed char>(1), static_cast<signed char>(0)}) {
            std::vector<signed char> child = a;
            if (!propagate(child, j, k, v)) continue;
            self(self, child);
            if (truncated) return;
        }
    };
    dfs(dfs, base);
    best.optimal = !truncated;
    return best;
}

// ---------------------------------------------------------------------------
// Schedule CSV: job,stage,placement,replica,start_ms (replica blank if public)

inline void write_schedule_csv(std::ostream& os, const Schedule& sched) {
    os << "job,stage,placement,replica,start_ms\n";
    for (JobId j = 0; j < sched.job_count(); ++j)
        for (StageId k = 0; k < sched.stage_count(); ++k) {
            const Assignment& a = sched.at(j, k);
            os << j << "," << k << ",";
            if (a.placement.is_private())
                os << "private," << a.placement.replica() << ",";
            else
                os << "public,,";
            os << util::format_g17(a.start_ms) << "\n";
        }
}

inline Schedule parse_schedule_csv(std::istream& is, std::size_t job_count, std::size_t stage_count,
                                   const std::string& source = "schedule") {
    std::string line;
    if (!std::getline(is, line) ||
        util::trim(line) != std::string_view("job,stage,placement,replica,start_ms"))
        throw std::runtime_error(source + ":1: expected header 'job,stage,placement,replica,start_ms'");
    Schedule sched(job_count, stage_count);
    std::vector<char> seen(job_count * stage_count, 0);
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto cells = util::split(std::string(util::trim(line)), ',');
        if (cells.size() != 5) throw std::runtime_error(where + ": expected 5 columns");
        const auto j = static_cast<std::size_t>(util::parse_int(cells[0], where));
        const auto k = static_cast<std::size_t>(util::parse_int(cells[1], where));
        if (j >= job_count || k >= stage_count)
            throw std::runtime_error(where + ": job or stage out of range");
        if (seen[j * stage_count + k]) throw std::runtime_error(where + ": duplicate (job, stage) row");
        seen[j * stage_count + k] = 1;
        Assignment a;
        if (cells[2] == "private") {
            a.placement = Placement::private_replica(
                static_cast<ReplicaId>(util::parse_int(cells[3], where)));
        } else if (cells[2] == "public") {
            if (!util::trim(cells[3]).empty())
                throw std::runtime_error(where + ": public rows must leave the replica column empty");
            a.placement = Placement::public_cloud();
        } else {
            throw std::runtime_error(where + ": placement must be 'private' or 'public'");
        }
        a.start_ms = util::parse_double(cells[4], where);
        sched.at(static_cast<JobId>(j), static_cast<StageId>(k)) = a;
    }
    if (!sched.complete())
        throw std::runtime_error(source + ": missing (job, stage) rows");
    return sched;
}

inline void write_solution_block(std::ostream& os, const ExactSolution& sol) {
    os << "feasible " << (sol.feasible ? 1 : 0) << "\n";
    os << "optimal " << (sol.optimal ? 1 : 0) << "\n";
    os << "savings_usd " << util::format_g17(sol.savings_usd) << "\n";
    os << "public_cost_usd " << util::format_g17(sol.public_cost_usd) << "\n";
    os << "nodes_explored " << sol.nodes_explored << "\n";
}

}  // namespace hybsched
