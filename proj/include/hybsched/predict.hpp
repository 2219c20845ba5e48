#pragma once

// Per-stage performance models: ridge-regression latency fits with an
// unpenalized intercept, a constant framework-overhead term, output-size
// chaining across the DAG, and MAPE reporting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybsched/model.hpp"
#include "hybsched/util.hpp"

namespace hybsched {

struct LinearModel {
    std::vector<double> weights;  // slope weights, intercept last
    double lambda = 0.0;

    std::size_t dim() const { return weights.empty() ? 0 : weights.size() - 1; }
    double intercept() const { return weights.empty() ? 0.0 : weights.back(); }
};

inline double predict(const LinearModel& m, const std::vector<double>& features) {
    if (features.size() != m.dim())
        throw std::invalid_argument("predict: feature vector has dimension " +
                                    std::to_string(features.size()) + ", model expects " +
                                    std::to_string(m.dim()));
    double v = m.intercept();
    for (std::size_t i = 0; i < features.size(); ++i) v += m.weights[i] * features[i];
    return v;
}

namespace detail {

// Gaussian elimination with partial pivoting; throws on a singular system.
inline std::vector<double> solve_linear_system(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    const double tol = std::max(scale, 1.0) * 1e-12;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) <= tol)
            throw std::invalid_argument("rank-deficient normal equations: column " + std::to_string(col) +
                                        " has no usable pivot (singular at lambda=0; retry with lambda>0)");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri][c] * x[c];
        x[ri] = acc / a[ri][ri];
    }
    return x;
}

}  // namespace detail

// Ridge fit via the normal equations with an appended intercept column; the
// lambda shift applies to the slope block only.
inline LinearModel fit_ridge(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                             double lambda) {
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n) throw std::invalid_argument("fit_ridge: need n >= 1 rows with matching targets");
    const std::size_t d = x.front().size();
    if (d == 0) throw std::invalid_argument("fit_ridge: need d >= 1 features");
    if (lambda < 0.0) throw std::invalid_argument("fit_ridge: lambda must be >= 0");
    for (const auto& row : x) {
        if (row.size() != d) throw std::invalid_argument("fit_ridge: ragged feature matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("fit_ridge: non-finite feature");
    }
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("fit_ridge: non-finite target");

    const std::size_t m = d + 1;
    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    std::vector<double> rhs(m, 0.0);
    auto aug = [&](const std::vector<double>& row, std::size_t i) {
        return i < d ? row[i] : 1.0;
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            const double ai = aug(x[r], i);
            rhs[i] += ai * y[r];
            for (std::size_t j = i; j < m; ++j) gram[i][j] += ai * aug(x[r], j);
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) gram[i][j] = gram[j][i];
    for (std::size_t i = 0; i < d; ++i) gram[i][i] += lambda;

    LinearModel model;
    model.weights = detail::solve_linear_system(std::move(gram), std::move(rhs));
    model.lambda = lambda;
    return model;
}

// Arithmetic mean of the framework-overhead samples.
inline double fit_overhead(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("fit_overhead: no samples");
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

inline double mape(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.empty() || actual.size() != predicted.size())
        throw std::invalid_argument("mape: need equal-length, non-empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw std::domain_error("mape: actual value is zero at index " + std::to_string(i));
        sum += std::fabs(actual[i] - predicted[i]) / std::fabs(actual[i]);
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

struct StageModels {
    LinearModel private_latency;
    LinearModel public_latency;
    double overhead_ms = 0.0;
    std::optional<LinearModel> output_feature_model;  // absent on sink stages
};

struct StageModelSet {
    std::vector<StageModels> stages;
};

struct StageEstimate {
    double p_private_ms = 0.0;
    double p_public_ms = 0.0;
};

// Propagates features in topological order: source stages consume the raw
// input features, every other stage consumes its predecessors' predicted
// output features concatenated in predecessor id order. Estimates are clamped
// to a 1ms floor so downstream arithmetic stays sane.
inline std::vector<StageEstimate> chain_predict(const AppDag& dag, const StageModelSet& models,
                                                const std::vector<double>& input_features) {
    if (models.stages.size() != dag.stage_count())
        throw std::invalid_argument("chain_predict: model set does not cover every stage");

    std::vector<std::vector<double>> feat(dag.stage_count());
    std::vector<double> out_feature(dag.stage_count(), 0.0);
    std::vector<StageEstimate> est(dag.stage_count());

    for (StageId k : dag.topological_order()) {
        if (dag.is_source(k)) {
            feat[k] = input_features;
        } else {
            for (StageId p : dag.predecessors(k)) feat[k].push_back(out_feature[p]);
        }
        const StageModels& sm = models.stages[k];
        est[k].p_private_ms = std::max(1.0, predict(sm.private_latency, feat[k]) + sm.overhead_ms);
        est[k].p_public_ms = std::max(1.0, predict(sm.public_latency, feat[k]));
        if (!dag.is_sink(k)) {
            if (!sm.output_feature_model)
                throw std::runtime_error("chain_predict: stage '" + dag.stage_name(k) +
                                         "' has successors but no output feature model");
            out_feature[k] = predict(*sm.output_feature_model, feat[k]);
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// Lambda selection: a deterministic k-fold grid search over fit_ridge.

struct LambdaSelection {
    double best_lambda = 0.0;
    std::vector<double> mean_mse;  // aligned with the candidate list
};

inline LambdaSelection select_lambda(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                     const std::vector<double>& lambdas, std::size_t folds,
                                     std::uint64_t seed) {
    if (lambdas.empty()) throw std::invalid_argument("select_lambda: empty candidate list");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("select_lambda: need at least two rows");
    folds = std::min(folds, n);
    if (folds < 2) throw std::invalid_argument("select_lambda: need at least two folds");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    LambdaSelection sel;
    sel.mean_mse.assign(lambdas.size(), 0.0);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        double total_sq = 0.0;
        std::size_t total_rows = 0;
        bool failed = false;
        for (std::size_t f = 0; f < folds && !failed; ++f) {
            const std::size_t lo = f * n / folds, hi = (f + 1) * n / folds;
            std::vector<std::vector<double>> xt;
            std::vector<double> yt;
            for (std::size_t i = 0; i < n; ++i) {
                if (i >= lo && i < hi) continue;
                xt.push_back(x[idx[i]]);
                yt.push_back(y[idx[i]]);
            }
            try {
                const LinearModel m = fit_ridge(xt, yt, lambdas[li]);
                for (std::size_t i = lo; i < hi; ++i) {
                    const double e = predict(m, x[idx[i]]) - y[idx[i]];
                    total_sq += e * e;
                    ++total_rows;
                }
            } catch (const std::invalid_argument&) {
                failed = true;  // singular fold at this lambda
            }
        }
        sel.mean_mse[li] = failed ? std::numeric_limits<double>::infinity()
                                  : total_sq / static_cast<double>(total_rows);
    }
    std::size_t best = 0;
    for (std::size_t li = 1; li < lambdas.size(); ++li)
        if (sel.mean_mse[li] < sel.mean_mse[best]) best = li;
    sel.best_lambda = lambdas[best];
    return sel;
}

// ---------------------------------------------------------------------------
// Model persistence: flat key-value text, one weight per line, 17 significant
// digits so files round-trip bit-exactly.

inline void save_models(std::ostream& os, const StageModelSet& set) {
    os << "stage_count " << set.stages.size() << "\n";
    auto dump = [&](const std::string& prefix, const LinearModel& m) {
        os << prefix << ".lambda " << util::format_g17(m.lambda) << "\n";
        os << prefix << ".dim " << m.dim() << "\n";
        for (std::size_t i = 0; i < m.dim(); ++i)
            os << prefix << ".w." << i << " " << util::format_g17(m.weights[i]) << "\n";
        os << prefix << ".intercept " << util::format_g17(m.intercept()) << "\n";
    };
    for (std::size_t k = 0; k < set.stages.size(); ++k) {
        const std::string base = "stage." + std::to_string(k);
        const StageModels& sm = set.stages[k];
        os << base << ".overhead_ms " << util::format_g17(sm.overhead_ms) << "\n";
        dump(base + ".private", sm.private_latency);
        dump(base + ".public", sm.public_latency);
        os << base << ".has_output " << (sm.output_feature_model ? 1 : 0) << "\n";
        if (sm.output_feature_model) dump(base + ".output", *sm.output_feature_model);
    }
}

inline StageModelSet load_models(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string_view stripped = util::trim(line);
        if (stripped.empty()) continue;
        const auto sp = stripped.find(' ');
        if (sp == std::string_view::npos)
            throw std::runtime_error("models:" + std::to_string(lineno) + ": expected 'key value'");
        kv[std::string(stripped.substr(0, sp))] = std::string(util::trim(stripped.substr(sp + 1)));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("models: missing key '" + key + "'");
        return it->second;
    };
    auto read_model = [&](const std::string& prefix) {
        LinearModel m;
        m.lambda = util::parse_double(need(prefix + ".lambda"), prefix);
        const long long dim = util::parse_int(need(prefix + ".dim"), prefix);
        for (long long i = 0; i < dim; ++i)
            m.weights.push_back(util::parse_double(need(prefix + ".w." + std::to_string(i)), prefix));
        m.weights.push_back(util::parse_double(need(prefix + ".intercept"), prefix));
        return m;
    };

    StageModelSet set;
    const long long stage_count = util::parse_int(need("stage_count"), "models");
    for (long long k = 0; k < stage_count; ++k) {
        const std::string base = "stage." + std::to_string(k);
        StageModels sm;
        sm.overhead_ms = util::parse_double(need(base + ".overhead_ms"), base);
        sm.private_latency = read_model(base + ".private");
        sm.public_latency = read_model(base + ".public");
        if (util::parse_int(need(base + ".has_output"), base) != 0)
            sm.output_feature_model = read_model(base + ".output");
        set.stages.push_back(std::move(sm));
    }
    return set;
}

inline void save_models_file(const std::string& path, const StageModelSet& set) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write model file '" + path + "'");
    save_models(os, set);
}

inline StageModelSet load_models_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model file '" + path + "'");
    return load_models(is);
}

// ---------------------------------------------------------------------------
// Training traces: long-format CSV, one row per executed stage.
// Header: job_id,stage,location,feature_0..,latency_ms,output_feature_0..

struct TrainingRow {
    JobId job = 0;
    StageId stage = 0;
    bool is_public = false;
    std::vector<double> features;
    double latency_ms = 0.0;
    std::vector<double> output_features;
};

inline std::vector<TrainingRow> parse_trace_csv(std::istream& is, const std::string& source = "trace") {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(source + ": missing header");
    const auto header = util::split(std::string(util::trim(line)), ',');
    std::size_t feature_count = 0, output_count = 0;
    {
        std::size_t i = 0;
        auto expect = [&](const std::string& name) {
            if (i >= header.size() || header[i] != name)
                throw std::runtime_error(source + ":1: expected column '" + name + "'");
            ++i;
        };
        expect("job_id");
        expect("stage");
        expect("location");
        while (i < header.size() && header[i] == "feature_" + std::to_string(feature_count)) {
            ++feature_count;
            ++i;
        }
        if (feature_count == 0) throw std::runtime_error(source + ":1: expected at least feature_0");
        expect("latency_ms");
        while (i < header.size() && header[i] == "output_feature_" + std::to_string(output_count)) {
            ++output_count;
            ++i;
        }
        if (i != header.size())
            throw std::runtime_error(source + ":1: unexpected column '" + header[i] + "'");
    }

    std::vector<TrainingRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto cells = util::split(std::string(util::trim(line)), ',');
        if (cells.size() != 3 + feature_count + 1 + output_count)
            throw std::runtime_error(where + ": wrong number of columns");
        TrainingRow row;
        row.job = static_cast<JobId>(util::parse_int(cells[0], where));
        row.stage = static_cast<StageId>(util::parse_int(cells[1], where));
        if (cells[2] == "private")
            row.is_public = false;
        else if (cells[2] == "public")
            row.is_public = true;
        else
            throw std::runtime_error(where + ": location must be 'private' or 'public'");
        for (std::size_t i = 0; i < feature_count; ++i)
            row.features.push_back(util::parse_double(cells[3 + i], where));
        row.latency_ms = util::parse_double(cells[3 + feature_count], where);
        for (std::size_t i = 0; i < output_count; ++i)
            row.output_features.push_back(util::parse_double(cells[4 + feature_count + i], where));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct StageFitReport {
    double mape_private = 0.0;
    double mape_public = 0.0;
    std::optional<double> mape_output;
    std::size_t rows_private = 0;
    std::size_t rows_public = 0;
};

struct TrainResult {
    StageModelSet models;
    std::vector<StageFitReport> report;
};

// Fits per-stage private/public latency models (and output-size models for
// non-sink stages) from a trace. The framework overhead is not separable from
// this trace format, so the intercept absorbs it unless overhead_ms is given.
inline TrainResult fit_stage_models(const AppDag& dag, const std::vector<TrainingRow>& rows, double lambda,
                                    double overhead_ms = 0.0) {
    if (overhead_ms < 0.0) throw std::invalid_argument("fit_stage_models: overhead must be >= 0");
    TrainResult result;
    result.models.stages.resize(dag.stage_count());
    result.report.resize(dag.stage_count());

    for (StageId k = 0; k < dag.stage_count(); ++k) {
        std::vector<std::vector<double>> xp, xq, xo;
        std::vector<double> yp, yq, yo;
        for (const TrainingRow& r : rows) {
            if (r.stage != k) continue;
            if (r.is_public) {
                xq.push_back(r.features);
                yq.push_back(r.latency_ms);
            } else {
                xp.push_back(r.features);
                // keep the ridge target net of the constant overhead term
                yp.push_back(r.latency_ms - overhead_ms);
            }
            if (!r.output_features.empty()) {
                xo.push_back(r.features);
                yo.push_back(r.output_features.front());
            }
        }
        const std::string name = dag.stage_name(k);
        if (xp.empty()) throw std::runtime_error("fit_stage_models: no private rows for stage '" + name + "'");
        if (xq.empty()) throw std::runtime_error("fit_stage_models: no public rows for stage '" + name + "'");
        StageModels& sm = result.models.stages[k];
        sm.overhead_ms = overhead_ms;
        sm.private_latency = fit_ridge(xp, yp, lambda);
        sm.public_latency = fit_ridge(xq, yq, lambda);
        if (!dag.is_sink(k)) {
            if (xo.empty())
                throw std::runtime_error("fit_stage_models: stage '" + name +
                                         "' has successors but the trace has no output features for it");
            sm.output_feature_model = fit_ridge(xo, yo, lambda);
        }

        StageFitReport& rep = result.report[k];
        auto eval = [&](const LinearModel& m, const std::vector<std::vector<double>>& x,
                        const std::vector<double>& y, double shift) {
            std::vector<double> pred;
            pred.reserve(x.size());
            for (const auto& f : x) pred.push_back(predict(m, f) + shift);
            std::vector<double> actual = y;
            for (double& a : actual) a += shift;
            return mape(actual, pred);
        };
        rep.rows_private = xp.size();
        rep.rows_public = xq.size();
        rep.mape_private = eval(sm.private_latency, xp, yp, overhead_ms);
        rep.mape_public = eval(sm.public_latency, xq, yq, 0.0);
        if (sm.output_feature_model) rep.mape_output = eval(*sm.output_feature_model, xo, yo, 0.0);
    }
    return result;
}

}  // namespace hybsched
