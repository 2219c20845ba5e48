#pragma once

// Shared builders for the test suites.

#include <set>
#include <string>
#include <vector>

#include "hybsched/model.hpp"

namespace testutil {

using namespace hybsched;

// A chain DAG s0 -> s1 -> ... with the given replica counts.
inline AppDag chain_dag(const std::vector<std::uint32_t>& replicas, double memory_mb = 1024.0) {
    std::vector<StageSpec> stages;
    std::vector<std::pair<StageId, StageId>> edges;
    for (std::size_t k = 0; k < replicas.size(); ++k) {
        stages.push_back({"s" + std::to_string(k), replicas[k], memory_mb});
        if (k > 0) edges.push_back({static_cast<StageId>(k - 1), static_cast<StageId>(k)});
    }
    return AppDag(stages, edges);
}

// a -> {b, c} -> d with uniform replica counts.
inline AppDag diamond_dag(std::uint32_t replicas = 1, double memory_mb = 1024.0) {
    return AppDag({{"a", replicas, memory_mb},
                   {"b", replicas, memory_mb},
                   {"c", replicas, memory_mb},
                   {"d", replicas, memory_mb}},
                  {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

inline Job make_job(JobId id, std::vector<double> p_private, std::vector<double> p_public,
                    std::vector<double> upload = {}, std::vector<double> download = {},
                    std::set<StageId> must_private = {}) {
    Job job;
    job.id = id;
    job.p_private_ms = std::move(p_private);
    job.p_public_ms = std::move(p_public);
    const std::size_t k = job.p_private_ms.size();
    job.upload_ms = upload.empty() ? std::vector<double>(k, 0.0) : std::move(upload);
    job.download_ms = download.empty() ? std::vector<double>(k, 0.0) : std::move(download);
    job.must_private = std::move(must_private);
    return job;
}

// Cost model that bills 0.1 USD per started 100ms at the reference memory;
// handy for tests that want round dollar values.
inline CostModel coarse_cost_model() {
    CostModel cm;
    cm.granularity_ms = 100.0;
    cm.rate_usd_per_gb_ms = 0.001;
    cm.reference_memory_mb = 1024.0;
    return cm;
}

}  // namespace testutil
