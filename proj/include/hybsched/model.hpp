#pragma once

// Core domain types shared by the scheduler, the simulator and the exact
// solver: application DAGs, jobs, the public-cloud billing model, schedules
// and the path/capacity helpers built on top of them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybsched/util.hpp"

namespace hybsched {

using StageId = std::uint32_t;
using JobId = std::uint32_t;
using ReplicaId = std::uint32_t;

// Slack used when comparing derived timestamps.
inline constexpr double kTimeEps = 1e-9;

// Public-cloud billing parameters. The defaults reproduce per-100ms billing
// at a 1024 MB reference configuration; the fields exist so tests and
// experiments can swap in any deterministic cost function of execution time.
struct CostModel {
    double granularity_ms = 100.0;
    double rate_usd_per_gb_ms = 0.00001667 / 1000.0;
    double reference_memory_mb = 1024.0;

    void validate() const {
        if (!(granularity_ms > 0.0) || !(rate_usd_per_gb_ms > 0.0) || !(reference_memory_mb > 0.0))
            throw std::invalid_argument("CostModel: all fields must be strictly positive");
    }
};

// Billed cost in USD of one public-cloud execution of t_ms milliseconds on a
// function configured with memory_mb of memory.
inline double cost_of_execution(double t_ms, double memory_mb, const CostModel& cm = {}) {
    if (t_ms < 0.0) throw std::domain_error("cost_of_execution: negative duration");
    if (!(memory_mb > 0.0)) throw std::domain_error("cost_of_execution: memory must be positive");
    const double billed_ms = cm.granularity_ms * std::ceil(t_ms / cm.granularity_ms);
    return billed_ms * (memory_mb / cm.reference_memory_mb) * cm.rate_usd_per_gb_ms;
}

struct StageSpec {
    std::string name;
    std::uint32_t replicas = 1;
    double memory_mb = 1024.0;
};

// Immutable application template. Stage ids are dense 0..K-1 in declaration
// order; the edge relation must be acyclic and weakly connected so that every
// stage is reachable from a source and reaches a sink.
class AppDag {
public:
    AppDag(std::vector<StageSpec> stages, std::vector<std::pair<StageId, StageId>> edges,
           std::set<StageId> default_must_private = {})
        : stages_(std::move(stages)), edges_(std::move(edges)),
          default_must_private_(std::move(default_must_private)) {
        validate_and_build();
    }

    std::size_t stage_count() const { return stages_.size(); }
    const std::string& stage_name(StageId k) const { return stages_.at(k).name; }
    std::uint32_t replicas(StageId k) const { return stages_.at(k).replicas; }
    double memory_mb(StageId k) const { return stages_.at(k).memory_mb; }
    const std::vector<StageSpec>& stages() const { return stages_; }
    const std::vector<std::pair<StageId, StageId>>& edges() const { return edges_; }
    const std::set<StageId>& default_must_private() const { return default_must_private_; }

    std::uint32_t out_degree(StageId k) const { return static_cast<std::uint32_t>(successors_.at(k).size()); }
    const std::vector<StageId>& successors(StageId k) const { return successors_.at(k); }
    const std::vector<StageId>& predecessors(StageId k) const { return predecessors_.at(k); }
    const std::vector<StageId>& topological_order() const { return topo_order_; }
    const std::vector<StageId>& sources() const { return sources_; }
    const std::vector<StageId>& sinks() const { return sinks_; }
    bool is_source(StageId k) const { return predecessors_.at(k).empty(); }
    bool is_sink(StageId k) const { return successors_.at(k).empty(); }

    std::uint32_t total_replicas() const {
        std::uint32_t n = 0;
        for (const auto& s : stages_) n += s.replicas;
        return n;
    }

    std::optional<StageId> stage_by_name(std::string_view name) const {
        for (StageId k = 0; k < stages_.size(); ++k)
            if (stages_[k].name == name) return k;
        return std::nullopt;
    }

private:
    void validate_and_build() {
        const std::size_t k_count = stages_.size();
        if (k_count == 0) throw std::invalid_argument("AppDag: at least one stage required");
        for (StageId k = 0; k < k_count; ++k) {
            if (stages_[k].name.empty())
                throw std::invalid_argument("AppDag: stage " + std::to_string(k) + " has an empty name");
            if (stages_[k].replicas < 1)
                throw std::invalid_argument("AppDag: stage '" + stages_[k].name + "' must have at least one replica");
            if (!(stages_[k].memory_mb > 0.0))
                throw std::invalid_argument("AppDag: stage '" + stages_[k].name + "' must have positive memory");
            for (StageId m = 0; m < k; ++m)
                if (stages_[m].name == stages_[k].name)
                    throw std::invalid_argument("AppDag: duplicate stage name '" + stages_[k].name + "'");
        }
        successors_.assign(k_count, {});
        predecessors_.assign(k_count, {});
        std::set<std::pair<StageId, StageId>> seen;
        for (const auto& [src, dst] : edges_) {
            if (src >= k_count || dst >= k_count)
                throw std::invalid_argument("AppDag: edge references an unknown stage id");
            if (src == dst)
                throw std::invalid_argument("AppDag: self edge on stage '" + stages_[src].name + "'");
            if (!seen.insert({src, dst}).second)
                throw std::invalid_argument("AppDag: duplicate edge " + stages_[src].name + " -> " + stages_[dst].name);
            successors_[src].push_back(dst);
            predecessors_[dst].push_back(src);
        }
        for (auto& v : successors_) std::sort(v.begin(), v.end());
        for (auto& v : predecessors_) std::sort(v.begin(), v.end());

        for (StageId k : default_must_private_)
            if (k >= k_count)
                throw std::invalid_argument("AppDag: must_private references an unknown stage id");

        // Kahn's algorithm, smallest stage id first, for a deterministic order.
        std::vector<std::uint32_t> indeg(k_count, 0);
        for (const auto& [src, dst] : edges_) { (void)src; ++indeg[dst]; }
        std::vector<std::uint32_t> remaining = indeg;
        topo_order_.clear();
        std::set<StageId> ready;
        for (StageId k = 0; k < k_count; ++k)
            if (remaining[k] == 0) ready.insert(k);
        while (!ready.empty()) {
            const StageId k = *ready.begin();
            ready.erase(ready.begin());
            topo_order_.push_back(k);
            for (StageId q : successors_[k])
                if (--remaining[q] == 0) ready.insert(q);
        }
        if (topo_order_.size() != k_count) {
            for (StageId k = 0; k < k_count; ++k)
                if (remaining[k] > 0)
                    throw std::invalid_argument("AppDag: cycle detected involving stage '" + stages_[k].name + "'");
        }

        // Weak connectivity: a stage in its own component would neither feed
        // nor consume the rest of the pipeline.
        if (k_count > 1) {
            std::vector<char> visited(k_count, 0);
            std::vector<StageId> stack{0};
            visited[0] = 1;
            while (!stack.empty()) {
                const StageId k = stack.back();
                stack.pop_back();
                for (StageId q : successors_[k])
                    if (!visited[q]) { visited[q] = 1; stack.push_back(q); }
                for (StageId q : predecessors_[k])
                    if (!visited[q]) { visited[q] = 1; stack.push_back(q); }
            }
            for (StageId k = 0; k < k_count; ++k)
                if (!visited[k])
                    throw std::invalid_argument("AppDag: stage '" + stages_[k].name +
                                                "' is not connected to the rest of the DAG");
        }

        sources_.clear();
        sinks_.clear();
        for (StageId k = 0; k < k_count; ++k) {
            if (predecessors_[k].empty()) sources_.push_back(k);
            if (successors_[k].empty()) sinks_.push_back(k);
        }
    }

    std::vector<StageSpec> stages_;
    std::vector<std::pair<StageId, StageId>> edges_;
    std::set<StageId> default_must_private_;
    std::vector<std::vector<StageId>> successors_, predecessors_;
    std::vector<StageId> topo_order_, sources_, sinks_;
};

// Re-checks the structural rules on an already built DAG. Construction
// enforces the same rules, so this is mainly a hook for loaders and tests.
inline void validate_dag(const AppDag& dag) {
    AppDag copy(dag.stages(), dag.edges(), dag.default_must_private());
    (void)copy;
}

// One batch member. Latency fields hold the estimates the scheduler decides
// with; realized values live in a LatencyTable.
struct Job {
    JobId id = 0;
    std::vector<double> p_private_ms;
    std::vector<double> p_public_ms;
    std::vector<double> upload_ms;
    std::vector<double> download_ms;
    std::set<StageId> must_private;
    std::vector<std::vector<double>> features;  // per stage; consumed by predict/bench
};

inline void validate_job(const Job& job, const AppDag& dag) {
    const std::size_t k_count = dag.stage_count();
    auto check_len = [&](const std::vector<double>& v, const char* what) {
        if (v.size() != k_count)
            throw std::invalid_argument("Job " + std::to_string(job.id) + ": " + what +
                                        " must have one entry per stage");
    };
    check_len(job.p_private_ms, "p_private_ms");
    check_len(job.p_public_ms, "p_public_ms");
    check_len(job.upload_ms, "upload_ms");
    check_len(job.download_ms, "download_ms");
    for (StageId k = 0; k < k_count; ++k) {
        if (!(job.p_private_ms[k] > 0.0) || !(job.p_public_ms[k] > 0.0))
            throw std::invalid_argument("Job " + std::to_string(job.id) +
                                        ": stage durations must be strictly positive");
        if (job.upload_ms[k] < 0.0 || job.download_ms[k] < 0.0)
            throw std::invalid_argument("Job " + std::to_string(job.id) +
                                        ": transfer latencies must be non-negative");
    }
    for (StageId k : job.must_private)
        if (k >= k_count)
            throw std::invalid_argument("Job " + std::to_string(job.id) +
                                        ": must_private references an unknown stage");
    if (!job.features.empty() && job.features.size() != k_count)
        throw std::invalid_argument("Job " + std::to_string(job.id) +
                                    ": features must be empty or one vector per stage");
}

inline void validate_batch(const std::vector<Job>& jobs, const AppDag& dag) {
    if (jobs.empty()) throw std::invalid_argument("batch must not be empty");
    for (JobId j = 0; j < jobs.size(); ++j) {
        if (jobs[j].id != j)
            throw std::invalid_argument("batch: job ids must be dense 0..J-1 in order");
        validate_job(jobs[j], dag);
    }
}

// Total private-cloud runtime of one job across all stages.
inline double job_private_runtime(const Job& job) {
    double sum = 0.0;
    for (double p : job.p_private_ms) sum += p;
    return sum;
}

inline double stage_cost(const Job& job, StageId k, const AppDag& dag, const CostModel& cm = {}) {
    return cost_of_execution(job.p_public_ms.at(k), dag.memory_mb(k), cm);
}

inline double job_public_cost(const Job& job, const AppDag& dag, const CostModel& cm = {}) {
    double sum = 0.0;
    for (StageId k = 0; k < dag.stage_count(); ++k) sum += stage_cost(job, k, dag, cm);
    return sum;
}

// Aggregate private compute capacity: every replica of every stage running
// for the whole makespan window.
inline double compute_capacity(const AppDag& dag, double c_max_ms) {
    return static_cast<double>(dag.total_replicas()) * c_max_ms;
}

// Longest private-latency path from `from` to any sink, inclusive of `from`.
inline double critical_path_latency(const AppDag& dag, const Job& job, StageId from) {
    if (from >= dag.stage_count()) throw std::invalid_argument("critical_path_latency: bad stage id");
    std::vector<double> down(dag.stage_count(), 0.0);
    const auto& topo = dag.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const StageId k = *it;
        double best = 0.0;
        for (StageId q : dag.successors(k)) best = std::max(best, down[q]);
        down[k] = job.p_private_ms.at(k) + best;
    }
    return down[from];
}

// ---------------------------------------------------------------------------
// Placement and schedules

class Placement {
public:
    static Placement public_cloud() { return Placement{}; }
    static Placement private_replica(ReplicaId r) {
        Placement p;
        p.replica_ = r;
        return p;
    }
    bool is_public() const { return !replica_.has_value(); }
    bool is_private() const { return replica_.has_value(); }
    ReplicaId replica() const {
        if (!replica_) throw std::logic_error("Placement: public placement has no replica");
        return *replica_;
    }
    friend bool operator==(const Placement&, const Placement&) = default;

private:
    std::optional<ReplicaId> replica_;
};

struct Assignment {
    Placement placement = Placement::public_cloud();
    double start_ms = std::numeric_limits<double>::quiet_NaN();
};

// Placement plus start time for every (job, stage); per-replica sequences are
// implied by start times.
class Schedule {
public:
    Schedule() = default;
    Schedule(std::size_t job_count, std::size_t stage_count)
        : jobs_(job_count), stages_(stage_count), cells_(job_count * stage_count) {}

    std::size_t job_count() const { return jobs_; }
    std::size_t stage_count() const { return stages_; }
    bool empty() const { return cells_.empty(); }

    Assignment& at(JobId j, StageId k) { return cells_.at(index(j, k)); }
    const Assignment& at(JobId j, StageId k) const { return cells_.at(index(j, k)); }

    bool complete() const {
        for (const auto& c : cells_)
            if (std::isnan(c.start_ms)) return false;
        return !cells_.empty();
    }

    // Jobs on each (stage, replica), ordered by start time then job id.
    std::vector<std::vector<std::vector<JobId>>> replica_orders(const AppDag& dag) const {
        std::vector<std::vector<std::vector<JobId>>> out(stages_);
        for (StageId k = 0; k < stages_; ++k) out[k].resize(dag.replicas(k));
        for (StageId k = 0; k < stages_; ++k) {
            std::vector<JobId> private_jobs;
            for (JobId j = 0; j < jobs_; ++j)
                if (at(j, k).placement.is_private()) private_jobs.push_back(j);
            std::sort(private_jobs.begin(), private_jobs.end(), [&](JobId a, JobId b) {
                const double sa = at(a, k).start_ms, sb = at(b, k).start_ms;
                if (sa != sb) return sa < sb;
                return a < b;
            });
            for (JobId j : private_jobs) {
                const ReplicaId r = at(j, k).placement.replica();
                if (r >= dag.replicas(k))
                    throw std::invalid_argument("Schedule: replica index out of range for stage " +
                                                dag.stage_name(k));
                out[k][r].push_back(j);
            }
        }
        return out;
    }

private:
    std::size_t index(JobId j, StageId k) const {
        if (j >= jobs_ || k >= stages_) throw std::out_of_range("Schedule: index out of range");
        return static_cast<std::size_t>(j) * stages_ + k;
    }

    std::size_t jobs_ = 0, stages_ = 0;
    std::vector<Assignment> cells_;
};

// Realized per-(job, stage) latencies; may differ from the estimates carried
// by the jobs themselves.
struct LatencyTable {
    std::vector<std::vector<double>> p_private_ms, p_public_ms, upload_ms, download_ms;

    static LatencyTable from_jobs(const std::vector<Job>& jobs) {
        LatencyTable t;
        for (const Job& j : jobs) {
            t.p_private_ms.push_back(j.p_private_ms);
            t.p_public_ms.push_back(j.p_public_ms);
            t.upload_ms.push_back(j.upload_ms);
            t.download_ms.push_back(j.download_ms);
        }
        return t;
    }

    void validate(std::size_t job_count, std::size_t stage_count) const {
        auto check = [&](const std::vector<std::vector<double>>& m, const char* what, bool strictly_positive) {
            if (m.size() != job_count)
                throw std::invalid_argument(std::string("LatencyTable: ") + what + ": wrong job count");
            for (const auto& row : m) {
                if (row.size() != stage_count)
                    throw std::invalid_argument(std::string("LatencyTable: ") + what + ": wrong stage count");
                for (double v : row) {
                    if (strictly_positive ? !(v > 0.0) : (v < 0.0))
                        throw std::invalid_argument(std::string("LatencyTable: ") + what + ": bad value");
                }
            }
        };
        check(p_private_ms, "p_private_ms", true);
        check(p_public_ms, "p_public_ms", true);
        check(upload_ms, "upload_ms", false);
        check(download_ms, "download_ms", false);
    }
};

struct TimingResult {
    std::vector<std::vector<double>> start_ms, finish_ms;  // [job][stage]; finish excludes downloads
    double makespan_ms = 0.0;                              // includes downloads after public sinks
};

// Earliest start times for fixed placements and per-replica job orders.
// Transfers follow the chain transitions: a private->public edge waits for
// the upstream stage's upload, a public->private edge for its download.
inline TimingResult earliest_start_times(const AppDag& dag, const LatencyTable& lat,
                                         const std::vector<std::vector<Placement>>& placement,
                                         const std::vector<std::vector<std::vector<JobId>>>& replica_orders) {
    const std::size_t job_count = placement.size();
    const std::size_t k_count = dag.stage_count();
    lat.validate(job_count, k_count);
    if (replica_orders.size() != k_count)
        throw std::invalid_argument("earliest_start_times: one order list per stage required");

    TimingResult tr;
    tr.start_ms.assign(job_count, std::vector<double>(k_count, 0.0));
    tr.finish_ms.assign(job_count, std::vector<double>(k_count, 0.0));

    auto ready_bound = [&](JobId j, StageId q) {
        double t = 0.0;
        const bool q_private = placement[j][q].is_private();
        // a public source stage first uploads the job input from private storage
        if (!q_private && dag.predecessors(q).empty()) t = lat.upload_ms[j][q];
        for (StageId p : dag.predecessors(q)) {
            double b = tr.finish_ms[j][p];
            const bool p_private = placement[j][p].is_private();
            if (p_private && !q_private) b += lat.upload_ms[j][p];
            if (!p_private && q_private) b += lat.download_ms[j][p];
            t = std::max(t, b);
        }
        return t;
    };

    std::vector<char> placed(job_count * k_count, 0);
    for (StageId k : dag.topological_order()) {
        for (JobId j = 0; j < job_count; ++j) {
            if (!placement[j][k].is_public()) continue;
            tr.start_ms[j][k] = ready_bound(j, k);
            tr.finish_ms[j][k] = tr.start_ms[j][k] + lat.p_public_ms[j][k];
            placed[j * k_count + k] = 1;
        }
        if (replica_orders[k].size() != dag.replicas(k))
            throw std::invalid_argument("earliest_start_times: wrong replica count for stage " +
                                        dag.stage_name(k));
        for (ReplicaId r = 0; r < replica_orders[k].size(); ++r) {
            double free_at = 0.0;
            for (JobId j : replica_orders[k][r]) {
                if (j >= job_count || !placement[j][k].is_private() || placement[j][k].replica() != r)
                    throw std::invalid_argument("earliest_start_times: order entry does not match placement");
                if (placed[j * k_count + k])
                    throw std::invalid_argument("earliest_start_times: job sequenced twice on stage " +
                                                dag.stage_name(k));
                tr.start_ms[j][k] = std::max(free_at, ready_bound(j, k));
                tr.finish_ms[j][k] = tr.start_ms[j][k] + lat.p_private_ms[j][k];
                free_at = tr.finish_ms[j][k];
                placed[j * k_count + k] = 1;
            }
        }
        for (JobId j = 0; j < job_count; ++j)
            if (!placed[j * k_count + k])
                throw std::invalid_argument("earliest_start_times: private stage missing from replica orders");
    }

    double makespan = 0.0;
    for (JobId j = 0; j < job_count; ++j)
        for (StageId k : dag.sinks()) {
            double done = tr.finish_ms[j][k];
            if (placement[j][k].is_public()) done += lat.download_ms[j][k];
            makespan = std::max(makespan, done);
        }
    tr.makespan_ms = makespan;
    return tr;
}

// ---------------------------------------------------------------------------
// DAG text format
//
//   stage <name> replicas=<int> mem_mb=<number>
//   edge <src_name> <dst_name>
//   must_private <stage_name>
//
// Stage lines define ids in order; blank lines and '#' comments are ignored.

inline AppDag parse_app_dag(std::istream& in, const std::string& source = "dag") {
    std::vector<StageSpec> stages;
    std::vector<std::pair<std::string, std::string>> edge_names;
    std::vector<std::pair<std::string, int>> must_names;
    std::vector<int> edge_lines;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view stripped = util::trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        std::istringstream ls{std::string(stripped)};
        std::string directive;
        ls >> directive;
        const std::string where = source + ":" + std::to_string(lineno);
        if (directive == "stage") {
            StageSpec spec;
            if (!(ls >> spec.name)) throw std::runtime_error(where + ": stage line needs a name");
            std::string kv;
            bool have_replicas = false, have_mem = false;
            while (ls >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::runtime_error(where + ": expected key=value, got '" + kv + "'");
                const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
                if (key == "replicas") {
                    const long long n = util::parse_int(value, where);
                    if (n < 1) throw std::runtime_error(where + ": replicas must be >= 1");
                    spec.replicas = static_cast<std::uint32_t>(n);
                    have_replicas = true;
                } else if (key == "mem_mb") {
                    spec.memory_mb = util::parse_double(value, where);
                    if (!(spec.memory_mb > 0.0)) throw std::runtime_error(where + ": mem_mb must be positive");
                    have_mem = true;
                } else {
                    throw std::runtime_error(where + ": unknown stage attribute '" + key + "'");
                }
            }
            if (!have_replicas || !have_mem)
                throw std::runtime_error(where + ": stage line requires replicas= and mem_mb=");
            stages.push_back(std::move(spec));
        } else if (directive == "edge") {
            std::string a, b;
            if (!(ls >> a >> b)) throw std::runtime_error(where + ": edge line needs two stage names");
            edge_names.emplace_back(a, b);
            edge_lines.push_back(lineno);
        } else if (directive == "must_private") {
            std::string a;
            if (!(ls >> a)) throw std::runtime_error(where + ": must_private line needs a stage name");
            must_names.emplace_back(a, lineno);
        } else {
            throw std::runtime_error(where + ": unknown directive '" + directive + "'");
        }
    }

    auto stage_id = [&](const std::string& name, int at_line) -> StageId {
        for (StageId k = 0; k < stages.size(); ++k)
            if (stages[k].name == name) return k;
        throw std::runtime_error(source + ":" + std::to_string(at_line) + ": unknown stage '" + name + "'");
    };

    std::vector<std::pair<StageId, StageId>> edges;
    for (std::size_t i = 0; i < edge_names.size(); ++i)
        edges.emplace_back(stage_id(edge_names[i].first, edge_lines[i]),
                           stage_id(edge_names[i].second, edge_lines[i]));
    std::set<StageId> must;
    for (const auto& [name, at_line] : must_names) must.insert(stage_id(name, at_line));

    try {
        return AppDag(std::move(stages), std::move(edges), std::move(must));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": " + e.what());
    }
}

inline AppDag load_app_dag(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dag file '" + path + "'");
    return parse_app_dag(in, path);
}

inline void write_app_dag(std::ostream& os, const AppDag& dag) {
    for (StageId k = 0; k < dag.stage_count(); ++k)
        os << "stage " << dag.stage_name(k) << " replicas=" << dag.replicas(k)
           << " mem_mb=" << util::format_g17(dag.memory_mb(k)) << "\n";
    auto edges = dag.edges();
    std::sort(edges.begin(), edges.end());
    for (const auto& [src, dst] : edges)
        os << "edge " << dag.stage_name(src) << " " << dag.stage_name(dst) << "\n";
    for (StageId k : dag.default_must_private())
        os << "must_private " << dag.stage_name(k) << "\n";
}

inline void save_app_dag(const std::string& path, const AppDag& dag) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write dag file '" + path + "'");
    write_app_dag(os, dag);
}

}  // namespace hybsched
