#pragma once

// Synthetic workload generation in the shapes of canonical serverless
// pipelines (compute-heavy 2-stage chain, mixed 4-stage diamond, I/O-heavy
// 3-stage chain), plus the deadline-sweep harness and the greedy-vs-optimal
// comparison record.

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybsched/exact.hpp"
#include "hybsched/model.hpp"
#include "hybsched/sim.hpp"

namespace hybsched {

struct StageTemplate {
    std::string name;
    std::uint32_t replicas = 2;
    double memory_mb = 1024.0;
    double feature_scale = 1.0;  // stage feature = job base feature * scale
    double priv_slope = 1.0, priv_intercept = 0.0;
    double pub_slope = 1.0, pub_intercept = 0.0;
    double upload_slope = 0.0, upload_intercept = 0.0;
    double download_slope = 0.0, download_intercept = 0.0;
    double noise_sigma = 0.05;  // log-normal sigma on the realized latencies
};

struct WorkloadTemplate {
    std::string name;
    std::vector<StageTemplate> stages;
    std::vector<std::pair<StageId, StageId>> edges;
    std::set<StageId> must_private;
    double feature_min = 100.0, feature_max = 1000.0;

    AppDag to_dag() const {
        std::vector<StageSpec> specs;
        for (const StageTemplate& s : stages) specs.push_back({s.name, s.replicas, s.memory_mb});
        return AppDag(specs, edges, must_private);
    }

    // Compute-heavy two-stage chain; feature is the input matrix dimension.
    static WorkloadTemplate matrix_chain() {
        WorkloadTemplate t;
        t.name = "matrix";
        t.feature_min = 350.0;
        t.feature_max = 500.0;
        t.stages = {
            {"multiply", 2, 2048.0, 1.0, 14.0, -1400.0, 11.0, -850.0, 1.2, 100.0, 0.4, 50.0, 0.04},
            {"decompose", 2, 2048.0, 1.0, 10.0, -1000.0, 8.0, -700.0, 0.8, 0.0, 0.5, 40.0, 0.04},
        };
        t.edges = {{0, 1}};
        return t;
    }

    // Mixed compute/I-O diamond; feature is the clip duration in seconds.
    // The detect stage is the bottleneck by a wide margin.
    static WorkloadTemplate video_dag() {
        WorkloadTemplate t;
        t.name = "video";
        t.feature_min = 4.0;
        t.feature_max = 10.0;
        t.stages = {
            {"extract", 2, 1024.0, 1.0, 300.0, -600.0, 260.0, -400.0, 250.0, 200.0, 40.0, 30.0, 0.05},
            {"detect", 2, 3008.0, 1.0, 600.0, 400.0, 480.0, 400.0, 60.0, 50.0, 50.0, 40.0, 0.05},
            {"rescale", 2, 1024.0, 1.0, 150.0, 200.0, 130.0, 180.0, 80.0, 60.0, 40.0, 30.0, 0.05},
            {"merge", 2, 512.0, 1.0, 40.0, 60.0, 36.0, 50.0, 30.0, 20.0, 60.0, 40.0, 0.05},
        };
        t.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
        return t;
    }

    // I/O-heavy three-stage chain; feature is the input size in KB.
    static WorkloadTemplate image_chain() {
        WorkloadTemplate t;
        t.name = "image";
        t.feature_min = 500.0;
        t.feature_max = 5000.0;
        t.stages = {
            {"rotate", 2, 2048.0, 1.0, 0.09, 90.0, 0.075, 70.0, 0.03, 20.0, 0.02, 15.0, 0.08},
            {"resize", 2, 2048.0, 1.0, 0.05, 60.0, 0.045, 50.0, 0.02, 12.0, 0.015, 10.0, 0.08},
            {"compress", 2, 2048.0, 1.0, 0.04, 45.0, 0.035, 40.0, 0.015, 10.0, 0.02, 15.0, 0.08},
        };
        t.edges = {{0, 1}, {1, 2}};
        return t;
    }

    // Generic linear generators over a user-supplied DAG.
    static WorkloadTemplate custom(const AppDag& dag) {
        WorkloadTemplate t;
        t.name = "custom";
        t.feature_min = 100.0;
        t.feature_max = 1000.0;
        for (StageId k = 0; k < dag.stage_count(); ++k)
            t.stages.push_back({dag.stage_name(k), dag.replicas(k), dag.memory_mb(k), 1.0, 1.0, 100.0,
                                0.9, 90.0, 0.1, 10.0, 0.05, 5.0, 0.05});
        t.edges = dag.edges();
        t.must_private = dag.default_must_private();
        return t;
    }
};

struct Workload {
    AppDag dag;
    std::vector<Job> jobs;      // latency fields hold the scheduler's estimates
    LatencyTable truth;
};

// Samples one batch: per-job base feature, per-stage realized latencies from
// the template's linear generators with log-normal noise, and estimates that
// differ from the truth by one log-normal factor per (job, stage). A zero
// error sigma reproduces the truth bit-exactly.
inline Workload generate_workload(const WorkloadTemplate& tmpl, std::size_t n_jobs, std::uint64_t seed,
                                  double estimate_error_sigma = 0.0) {
    if (n_jobs < 1) throw std::invalid_argument("generate_workload: need at least one job");
    if (estimate_error_sigma < 0.0) throw std::invalid_argument("generate_workload: negative error sigma");
    Workload w{tmpl.to_dag(), {}, {}};
    const std::size_t k_count = tmpl.stages.size();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> base_dist(tmpl.feature_min, tmpl.feature_max);
    std::normal_distribution<double> unit;

    for (JobId j = 0; j < n_jobs; ++j) {
        const double base = base_dist(rng);
        Job job;
        job.id = j;
        job.must_private = tmpl.must_private;
        std::vector<double> t_priv(k_count), t_pub(k_count), t_up(k_count), t_down(k_count);
        for (StageId k = 0; k < k_count; ++k) {
            const StageTemplate& st = tmpl.stages[k];
            const double f = base * st.feature_scale;
            job.features.push_back({f});
            const double z_priv = unit(rng);
            const double z_pub = unit(rng);
            t_priv[k] = std::max(1.0, (st.priv_slope * f + st.priv_intercept) * std::exp(st.noise_sigma * z_priv));
            t_pub[k] = std::max(1.0, (st.pub_slope * f + st.pub_intercept) * std::exp(st.noise_sigma * z_pub));
            t_up[k] = std::max(0.0, st.upload_slope * f + st.upload_intercept);
            t_down[k] = std::max(0.0, st.download_slope * f + st.download_intercept);
        }
        for (StageId k = 0; k < k_count; ++k) {
            const double factor = std::exp(estimate_error_sigma * unit(rng));
            job.p_private_ms.push_back(std::max(1.0, t_priv[k] * factor));
            job.p_public_ms.push_back(std::max(1.0, t_pub[k] * factor));
            job.upload_ms.push_back(t_up[k]);
            job.download_ms.push_back(t_down[k]);
        }
        w.truth.p_private_ms.push_back(std::move(t_priv));
        w.truth.p_public_ms.push_back(std::move(t_pub));
        w.truth.upload_ms.push_back(std::move(t_up));
        w.truth.download_ms.push_back(std::move(t_down));
        w.jobs.push_back(std::move(job));
    }
    validate_batch(w.jobs, w.dag);
    w.truth.validate(n_jobs, k_count);
    return w;
}

inline WorkloadTemplate template_by_name(const std::string& name) {
    if (name == "matrix") return WorkloadTemplate::matrix_chain();
    if (name == "video") return WorkloadTemplate::video_dag();
    if (name == "image") return WorkloadTemplate::image_chain();
    throw std::invalid_argument("unknown workload template '" + name + "' (matrix, video, image, custom)");
}

// ---------------------------------------------------------------------------
// Deadline sweeps

enum class Policy { Spt, Hcf, AllPublic, AllPrivate };

inline std::string to_string(Policy p) {
    switch (p) {
        case Policy::Spt: return "spt";
        case Policy::Hcf: return "hcf";
        case Policy::AllPublic: return "all-public";
        case Policy::AllPrivate: return "all-private";
    }
    return "?";
}

inline Policy parse_policy(const std::string& s) {
    if (s == "spt") return Policy::Spt;
    if (s == "hcf") return Policy::Hcf;
    if (s == "all-public") return Policy::AllPublic;
    if (s == "all-private") return Policy::AllPrivate;
    throw std::invalid_argument("unknown policy '" + s + "'");
}

struct SweepSpec {
    std::vector<double> c_max_list;
    std::vector<Policy> policies;
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;
};

struct SweepRow {
    double c_max_ms = 0.0;
    Policy policy = Policy::Spt;
    std::size_t repetition = 0;
    double makespan_ms = 0.0;
    double cost_usd = 0.0;
    std::size_t offloaded_count = 0;
    double offloaded_fraction = 0.0;
    bool deadline_missed = false;
};

inline std::vector<SweepRow> sweep(const AppDag& dag, const std::vector<Job>& jobs, const TruthTable& truth,
                                   const SweepSpec& spec, CostModel cm = {}) {
    if (spec.c_max_list.empty() || spec.policies.empty())
        throw std::invalid_argument("sweep: c_max list and policy list must be non-empty");
    if (spec.repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
    for (double c : spec.c_max_list)
        if (!(c > 0.0)) throw std::invalid_argument("sweep: c_max values must be positive");

    const double stage_total = static_cast<double>(jobs.size() * dag.stage_count());
    // The baselines do not depend on the deadline; run them once.
    std::optional<SimReport> all_public, all_private;
    for (Policy p : spec.policies) {
        if (p == Policy::AllPublic && !all_public) all_public = run_all_public(dag, jobs, truth, cm);
        if (p == Policy::AllPrivate && !all_private)
            all_private = run_all_private(dag, jobs, truth, PriorityOrder::Spt, cm);
    }

    std::vector<SweepRow> rows;
    for (double c_max : spec.c_max_list) {
        for (Policy policy : spec.policies) {
            SimReport report;
            switch (policy) {
                case Policy::Spt: report = run_greedy(dag, jobs, truth, PriorityOrder::Spt, c_max, cm); break;
                case Policy::Hcf: report = run_greedy(dag, jobs, truth, PriorityOrder::Hcf, c_max, cm); break;
                case Policy::AllPublic: report = *all_public; break;
                case Policy::AllPrivate: report = *all_private; break;
            }
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                SweepRow row;
                row.c_max_ms = c_max;
                row.policy = policy;
                row.repetition = rep;
                row.makespan_ms = report.makespan_ms;
                row.cost_usd = report.total_cost_usd;
                row.offloaded_count = report.offloaded_stage_count;
                row.offloaded_fraction = static_cast<double>(report.offloaded_stage_count) / stage_total;
                row.deadline_missed = report.makespan_ms > c_max + kDeadlineEps;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "c_max_ms,policy,repetition,makespan_ms,cost_usd,offloaded_count,offloaded_fraction,"
          "deadline_missed\n";
    for (const SweepRow& r : rows)
        os << util::format_g17(r.c_max_ms) << "," << to_string(r.policy) << "," << r.repetition << ","
           << util::format_g17(r.makespan_ms) << "," << util::format_g17(r.cost_usd) << ","
           << r.offloaded_count << "," << util::format_g17(r.offloaded_fraction) << ","
           << (r.deadline_missed ? 1 : 0) << "\n";
}

// ---------------------------------------------------------------------------
// Greedy vs. optimal

struct MethodResult {
    std::string name;
    double cost_usd = 0.0;
    double makespan_ms = 0.0;
    bool deadline_missed = false;
};

struct CompareRecord {
    MethodResult spt, hcf, all_public;
    ExactSolution exact;
    double exact_makespan_ms = 0.0;  // realized by replaying the optimal schedule
    double spt_over_optimal = 0.0;
    double hcf_over_optimal = 0.0;
};

inline CompareRecord compare_with_optimal(const AppDag& dag, const std::vector<Job>& jobs,
                                          const TruthTable& truth, double c_max_ms,
                                          std::uint64_t node_budget = 1u << 20, CostModel cm = {}) {
    CompareRecord rec;
    auto method = [&](const SimReport& r, const std::string& name) {
        return MethodResult{name, r.total_cost_usd, r.makespan_ms, r.deadline_missed};
    };
    rec.spt = method(run_greedy(dag, jobs, truth, PriorityOrder::Spt, c_max_ms, cm), "spt");
    rec.hcf = method(run_greedy(dag, jobs, truth, PriorityOrder::Hcf, c_max_ms, cm), "hcf");
    rec.all_public = method(run_all_public(dag, jobs, truth, cm), "all-public");

    const MilpInstance inst = MilpInstance::make(dag, jobs, c_max_ms, cm, false);
    rec.exact = solve_exact(inst, node_budget);
    if (rec.exact.feasible)
        rec.exact_makespan_ms = execute_fixed(dag, jobs, truth, rec.exact.schedule, c_max_ms, cm).makespan_ms;

    auto ratio = [&](double greedy_cost) {
        if (!rec.exact.feasible) return std::numeric_limits<double>::quiet_NaN();
        if (rec.exact.public_cost_usd > 0.0) return greedy_cost / rec.exact.public_cost_usd;
        return greedy_cost <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    };
    rec.spt_over_optimal = ratio(rec.spt.cost_usd);
    rec.hcf_over_optimal = ratio(rec.hcf.cost_usd);
    return rec;
}

inline void write_compare_block(std::ostream& os, const CompareRecord& rec) {
    auto method = [&](const MethodResult& m) {
        os << m.name << ".cost_usd " << util::format_g17(m.cost_usd) << "\n";
        os << m.name << ".makespan_ms " << util::format_g17(m.makespan_ms) << "\n";
        os << m.name << ".deadline_missed " << (m.deadline_missed ? 1 : 0) << "\n";
    };
    method(rec.spt);
    method(rec.hcf);
    method(rec.all_public);
    os << "optimal.feasible " << (rec.exact.feasible ? 1 : 0) << "\n";
    os << "optimal.optimal " << (rec.exact.optimal ? 1 : 0) << "\n";
    os << "optimal.cost_usd " << util::format_g17(rec.exact.public_cost_usd) << "\n";
    os << "optimal.savings_usd " << util::format_g17(rec.exact.savings_usd) << "\n";
    os << "optimal.makespan_ms " << util::format_g17(rec.exact_makespan_ms) << "\n";
    os << "optimal.nodes_explored " << rec.exact.nodes_explored << "\n";
    os << "ratio.spt_over_optimal " << util::format_g17(rec.spt_over_optimal) << "\n";
    os << "ratio.hcf_over_optimal " << util::format_g17(rec.hcf_over_optimal) << "\n";
}

// ---------------------------------------------------------------------------
// Workload CSV: job_id,stage,p_private_ms,p_public_ms,upload_ms,download_ms,feature_0..

inline void write_workload_csv(std::ostream& os, const std::vector<Job>& jobs, const LatencyTable& lat) {
    if (jobs.empty()) throw std::invalid_argument("write_workload_csv: empty batch");
    const std::size_t k_count = jobs.front().p_private_ms.size();
    const std::size_t f_count = jobs.front().features.empty() ? 0 : jobs.front().features.front().size();
    os << "job_id,stage,p_private_ms,p_public_ms,upload_ms,download_ms";
    for (std::size_t i = 0; i < f_count; ++i) os << ",feature_" << i;
    os << "\n";
    for (JobId j = 0; j < jobs.size(); ++j)
        for (StageId k = 0; k < k_count; ++k) {
            os << j << "," << k << "," << util::format_g17(lat.p_private_ms[j][k]) << ","
               << util::format_g17(lat.p_public_ms[j][k]) << "," << util::format_g17(lat.upload_ms[j][k])
               << "," << util::format_g17(lat.download_ms[j][k]);
            for (std::size_t i = 0; i < f_count; ++i) {
                const double f = jobs[j].features.empty() ? 0.0 : jobs[j].features[k][i];
                os << "," << util::format_g17(f);
            }
            os << "\n";
        }
}

struct WorkloadRows {
    std::size_t job_count = 0;
    std::size_t stage_count = 0;
    LatencyTable table;
    std::vector<std::vector<std::vector<double>>> features;  // [job][stage][i]
};

inline WorkloadRows parse_workload_csv(std::istream& is, std::size_t stage_count,
                                       const std::string& source = "workload") {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(source + ": missing header");
    const auto header = util::split(std::string(util::trim(line)), ',');
    const std::vector<std::string> fixed = {"job_id", "stage", "p_private_ms", "p_public_ms",
                                            "upload_ms", "download_ms"};
    if (header.size() < fixed.size())
        throw std::runtime_error(source + ":1: missing columns");
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (header[i] != fixed[i])
            throw std::runtime_error(source + ":1: expected column '" + fixed[i] + "', got '" + header[i] + "'");
    const std::size_t f_count = header.size() - fixed.size();
    for (std::size_t i = 0; i < f_count; ++i)
        if (header[fixed.size() + i] != "feature_" + std::to_string(i))
            throw std::runtime_error(source + ":1: unexpected column '" + header[fixed.size() + i] + "'");

    struct RawRow {
        std::size_t job, stage;
        double p_priv, p_pub, up, down;
        std::vector<double> features;
    };
    std::vector<RawRow> raw;
    std::size_t max_job = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto cells = util::split(std::string(util::trim(line)), ',');
        if (cells.size() != fixed.size() + f_count)
            throw std::runtime_error(where + ": wrong number of columns");
        RawRow row;
        row.job = static_cast<std::size_t>(util::parse_int(cells[0], where));
        row.stage = static_cast<std::size_t>(util::parse_int(cells[1], where));
        if (row.stage >= stage_count) throw std::runtime_error(where + ": stage out of range");
        row.p_priv = util::parse_double(cells[2], where);
        row.p_pub = util::parse_double(cells[3], where);
        row.up = util::parse_double(cells[4], where);
        row.down = util::parse_double(cells[5], where);
        for (std::size_t i = 0; i < f_count; ++i)
            row.features.push_back(util::parse_double(cells[6 + i], where));
        max_job = std::max(max_job, row.job);
        raw.push_back(std::move(row));
    }
    if (raw.empty()) throw std::runtime_error(source + ": no data rows");

    WorkloadRows out;
    out.job_count = max_job + 1;
    out.stage_count = stage_count;
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    out.table.p_private_ms.assign(out.job_count, std::vector<double>(stage_count, nan));
    out.table.p_public_ms.assign(out.job_count, std::vector<double>(stage_count, nan));
    out.table.upload_ms.assign(out.job_count, std::vector<double>(stage_count, nan));
    out.table.download_ms.assign(out.job_count, std::vector<double>(stage_count, nan));
    out.features.assign(out.job_count, std::vector<std::vector<double>>(stage_count));
    for (const RawRow& row : raw) {
        if (!std::isnan(out.table.p_private_ms[row.job][row.stage]))
            throw std::runtime_error(source + ": duplicate row for job " + std::to_string(row.job) +
                                     " stage " + std::to_string(row.stage));
        out.table.p_private_ms[row.job][row.stage] = row.p_priv;
        out.table.p_public_ms[row.job][row.stage] = row.p_pub;
        out.table.upload_ms[row.job][row.stage] = row.up;
        out.table.download_ms[row.job][row.stage] = row.down;
        out.features[row.job][row.stage] = row.features;
    }
    for (std::size_t j = 0; j < out.job_count; ++j)
        for (std::size_t k = 0; k < stage_count; ++k)
            if (std::isnan(out.table.p_private_ms[j][k]))
                throw std::runtime_error(source + ": missing row for job " + std::to_string(j) + " stage " +
                                         std::to_string(k));
    return out;
}

inline std::vector<Job> jobs_from_rows(const WorkloadRows& rows, const AppDag& dag) {
    std::vector<Job> jobs;
    for (JobId j = 0; j < rows.job_count; ++j) {
        Job job;
        job.id = j;
        job.p_private_ms = rows.table.p_private_ms[j];
        job.p_public_ms = rows.table.p_public_ms[j];
        job.upload_ms = rows.table.upload_ms[j];
        job.download_ms = rows.table.download_ms[j];
        job.features = rows.features[j];
        job.must_private = dag.default_must_private();
        jobs.push_back(std::move(job));
    }
    validate_batch(jobs, dag);
    return jobs;
}

}  // namespace hybsched
