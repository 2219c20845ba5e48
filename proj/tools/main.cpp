// Command-line front end: generate workloads, train latency models, simulate
// batch runs, solve and verify schedules, sweep deadlines and compare the
// greedy heuristics against the exact optimum.
//
// Exit codes: 0 success, 1 usage error, 2 input validation error,
// 3 verification failures present, 4 solver infeasible.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hybsched/bench.hpp"
#include "hybsched/exact.hpp"
#include "hybsched/model.hpp"
#include "hybsched/predict.hpp"
#include "hybsched/sched.hpp"
#include "hybsched/sim.hpp"

namespace fs = std::filesystem;
using namespace hybsched;

namespace {

struct RunConfig {
    std::string template_name = "matrix";
    std::string dag_path;
    std::string workload_path;
    std::string truth_path;
    std::string trace_path;
    std::string models_path;
    std::string schedule_path;
    std::string out_dir = ".";
    std::string policy = "spt";
    std::string cmax_list;
    std::string policy_list = "spt,hcf,all-public,all-private";
    double c_max_ms = 0.0;
    std::uint64_t seed = 0;
    double error_sigma = 0.0;
    double lambda = 1e-6;
    std::string lambda_grid;
    std::size_t folds = 5;
    double overhead_ms = 0.0;
    std::size_t jobs = 10;
    std::uint64_t node_budget = 1u << 20;
    bool free_placement = false;
    std::size_t repetitions = 1;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    return os;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

struct LoadedInstance {
    AppDag dag;
    std::vector<Job> jobs;
    TruthTable truth;
};

LoadedInstance load_instance(const RunConfig& cfg) {
    AppDag dag = load_app_dag(cfg.dag_path);
    std::ifstream wf(cfg.workload_path);
    if (!wf) throw std::runtime_error("cannot open workload '" + cfg.workload_path + "'");
    const WorkloadRows rows = parse_workload_csv(wf, dag.stage_count(), cfg.workload_path);
    std::vector<Job> jobs = jobs_from_rows(rows, dag);
    TruthTable truth = rows.table;
    if (!cfg.truth_path.empty()) {
        std::ifstream tf(cfg.truth_path);
        if (!tf) throw std::runtime_error("cannot open truth file '" + cfg.truth_path + "'");
        const WorkloadRows true_rows = parse_workload_csv(tf, dag.stage_count(), cfg.truth_path);
        if (true_rows.job_count != jobs.size())
            throw std::runtime_error("truth file has a different job count than the workload");
        truth = true_rows.table;
    }
    truth.validate(jobs.size(), dag.stage_count());
    return {std::move(dag), std::move(jobs), std::move(truth)};
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : util::split(csv, ','))
        if (!util::trim(tok).empty()) out.push_back(util::parse_double(tok, what));
    if (out.empty()) throw std::runtime_error(what + ": empty list");
    return out;
}

int cmd_generate(const RunConfig& cfg) {
    WorkloadTemplate tmpl = cfg.template_name == "custom"
                                ? WorkloadTemplate::custom(load_app_dag(cfg.dag_path))
                                : template_by_name(cfg.template_name);
    const Workload w = generate_workload(tmpl, cfg.jobs, cfg.seed, cfg.error_sigma);
    const fs::path out = prepare_out_dir(cfg.out_dir);
    save_app_dag((out / "app.dag").string(), w.dag);
    {
        auto os = open_out(out / "workload.csv");
        write_workload_csv(os, w.jobs, LatencyTable::from_jobs(w.jobs));
    }
    {
        auto os = open_out(out / "truth.csv");
        write_workload_csv(os, w.jobs, w.truth);
    }
    std::cout << "template " << tmpl.name << "\n"
              << "jobs " << w.jobs.size() << "\n"
              << "stages " << w.dag.stage_count() << "\n"
              << "seed " << cfg.seed << "\n"
              << "error_sigma " << util::format_g17(cfg.error_sigma) << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const AppDag dag = load_app_dag(cfg.dag_path);
    std::ifstream tf(cfg.trace_path);
    if (!tf) throw std::runtime_error("cannot open trace '" + cfg.trace_path + "'");
    const auto rows = parse_trace_csv(tf, cfg.trace_path);

    double lambda = cfg.lambda;
    if (!cfg.lambda_grid.empty()) {
        // Grid-search the penalty on the first stage's private rows.
        const auto grid = parse_double_list(cfg.lambda_grid, "--lambda-grid");
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (const auto& r : rows)
            if (r.stage == 0 && !r.is_public) {
                x.push_back(r.features);
                y.push_back(r.latency_ms);
            }
        if (x.size() < 2) throw std::runtime_error("--lambda-grid: not enough private rows for stage 0");
        lambda = select_lambda(x, y, grid, cfg.folds, cfg.seed).best_lambda;
    }

    const TrainResult result = fit_stage_models(dag, rows, lambda, cfg.overhead_ms);
    const fs::path out = prepare_out_dir(cfg.out_dir);
    save_models_file((out / "models.txt").string(), result.models);
    auto os = open_out(out / "train_report.txt");
    os << "lambda " << util::format_g17(lambda) << "\n";
    for (StageId k = 0; k < dag.stage_count(); ++k) {
        const StageFitReport& rep = result.report[k];
        os << "stage." << k << ".name " << dag.stage_name(k) << "\n";
        os << "stage." << k << ".mape_private " << util::format_g17(rep.mape_private) << "\n";
        os << "stage." << k << ".mape_public " << util::format_g17(rep.mape_public) << "\n";
        if (rep.mape_output)
            os << "stage." << k << ".mape_output " << util::format_g17(*rep.mape_output) << "\n";
        os << "stage." << k << ".rows_private " << rep.rows_private << "\n";
        os << "stage." << k << ".rows_public " << rep.rows_public << "\n";
    }
    std::cout << "lambda " << util::format_g17(lambda) << "\n"
              << "stages " << dag.stage_count() << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const LoadedInstance inst = load_instance(cfg);
    SimReport report;
    if (cfg.policy == "all-public") {
        report = run_all_public(inst.dag, inst.jobs, inst.truth);
    } else if (cfg.policy == "all-private") {
        report = run_all_private(inst.dag, inst.jobs, inst.truth, PriorityOrder::Spt);
    } else {
        if (!(cfg.c_max_ms > 0.0)) throw std::runtime_error("simulate: --cmax must be positive");
        report = run_greedy(inst.dag, inst.jobs, inst.truth, parse_priority_order(cfg.policy), cfg.c_max_ms);
    }
    const fs::path out = prepare_out_dir(cfg.out_dir);
    {
        auto os = open_out(out / "report.txt");
        write_report_block(os, report);
    }
    {
        auto os = open_out(out / "trace.txt");
        write_trace(os, report);
    }
    {
        auto os = open_out(out / "offloads.csv");
        write_offload_csv(os, report.offload_log);
    }
    write_report_block(std::cout, report);
    return 0;
}

int cmd_solve(const RunConfig& cfg) {
    const LoadedInstance loaded = load_instance(cfg);
    if (!(cfg.c_max_ms > 0.0)) throw std::runtime_error("solve: --cmax must be positive");
    const MilpInstance inst =
        MilpInstance::make(loaded.dag, loaded.jobs, cfg.c_max_ms, CostModel{}, cfg.free_placement);
    const ExactSolution sol = solve_exact(inst, cfg.node_budget);
    const fs::path out = prepare_out_dir(cfg.out_dir);
    {
        auto os = open_out(out / "solve_report.txt");
        write_solution_block(os, sol);
    }
    write_solution_block(std::cout, sol);
    if (!sol.feasible) return 4;
    auto os = open_out(out / "schedule.csv");
    write_schedule_csv(os, sol.schedule);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const LoadedInstance loaded = load_instance(cfg);
    if (!(cfg.c_max_ms > 0.0)) throw std::runtime_error("verify: --cmax must be positive");
    std::ifstream sf(cfg.schedule_path);
    if (!sf) throw std::runtime_error("cannot open schedule '" + cfg.schedule_path + "'");
    const Schedule sched =
        parse_schedule_csv(sf, loaded.jobs.size(), loaded.dag.stage_count(), cfg.schedule_path);
    const MilpInstance inst = MilpInstance::make(loaded.dag, loaded.jobs, cfg.c_max_ms);
    const auto violations = verify_schedule(inst, sched);
    std::cout << "violations " << violations.size() << "\n";
    for (const Violation& v : violations)
        std::cout << v.family << " job=" << v.job << " stage=" << v.stage
                  << " slack=" << util::format_g17(v.slack) << " " << v.message << "\n";
    return violations.empty() ? 0 : 3;
}

int cmd_sweep(const RunConfig& cfg) {
    const LoadedInstance loaded = load_instance(cfg);
    SweepSpec spec;
    spec.c_max_list = parse_double_list(cfg.cmax_list, "--cmax-list");
    for (const std::string& tok : util::split(cfg.policy_list, ','))
        if (!util::trim(tok).empty()) spec.policies.push_back(parse_policy(std::string(util::trim(tok))));
    spec.repetitions = cfg.repetitions;
    spec.seed = cfg.seed;
    const auto rows = sweep(loaded.dag, loaded.jobs, loaded.truth, spec);
    const fs::path out = prepare_out_dir(cfg.out_dir);
    auto os = open_out(out / "sweep.csv");
    write_sweep_csv(os, rows);
    std::cout << "rows " << rows.size() << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    const LoadedInstance loaded = load_instance(cfg);
    if (!(cfg.c_max_ms > 0.0)) throw std::runtime_error("compare: --cmax must be positive");
    const CompareRecord rec =
        compare_with_optimal(loaded.dag, loaded.jobs, loaded.truth, cfg.c_max_ms, cfg.node_budget);
    const fs::path out = prepare_out_dir(cfg.out_dir);
    {
        auto os = open_out(out / "compare.txt");
        write_compare_block(os, rec);
    }
    write_compare_block(std::cout, rec);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybsched: deadline-constrained batch scheduling over a hybrid private/public cloud"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic workload (dag, workload and truth CSVs)");
    gen->add_option("--template", cfg.template_name, "Workload template: matrix, video, image or custom");
    gen->add_option("--dag", cfg.dag_path, "DAG file (required for --template custom)");
    gen->add_option("--jobs", cfg.jobs, "Number of jobs in the batch");
    gen->add_option("--seed", cfg.seed, "RNG seed; all randomness derives from it");
    gen->add_option("--error-sigma", cfg.error_sigma, "Log-normal sigma of the estimate error (0 = perfect)");
    gen->add_option("--out", cfg.out_dir, "Output directory");

    auto* train = app.add_subcommand("train", "Fit per-stage latency models from a trace CSV");
    train->add_option("--trace", cfg.trace_path, "Trace CSV")->required();
    train->add_option("--dag", cfg.dag_path, "DAG file")->required();
    train->add_option("--lambda", cfg.lambda, "Ridge penalty");
    train->add_option("--lambda-grid", cfg.lambda_grid, "Comma-separated penalties for cross-validation");
    train->add_option("--folds", cfg.folds, "Cross-validation folds");
    train->add_option("--overhead-ms", cfg.overhead_ms, "Constant framework overhead folded into estimates");
    train->add_option("--seed", cfg.seed, "RNG seed for fold shuffling");
    train->add_option("--out", cfg.out_dir, "Output directory");

    auto* sim = app.add_subcommand("simulate", "Run the simulator under a scheduling policy");
    sim->add_option("--dag", cfg.dag_path, "DAG file")->required();
    sim->add_option("--workload", cfg.workload_path, "Workload CSV (scheduler estimates)")->required();
    sim->add_option("--truth", cfg.truth_path, "Truth CSV (defaults to the workload values)");
    sim->add_option("--policy", cfg.policy, "spt, hcf, fifo, all-public or all-private");
    sim->add_option("--cmax", cfg.c_max_ms, "Deadline in milliseconds");
    sim->add_option("--out", cfg.out_dir, "Output directory");

    auto* solve = app.add_subcommand("solve", "Solve the exact placement/sequencing problem");
    solve->add_option("--dag", cfg.dag_path, "DAG file")->required();
    solve->add_option("--workload", cfg.workload_path, "Workload CSV")->required();
    solve->add_option("--cmax", cfg.c_max_ms, "Deadline in milliseconds")->required();
    solve->add_option("--node-budget", cfg.node_budget, "Branch-and-bound node budget");
    solve->add_flag("--free-placement", cfg.free_placement,
                    "Lift the public-chain closure on placements");
    solve->add_option("--out", cfg.out_dir, "Output directory");

    auto* verify = app.add_subcommand("verify", "Check a schedule CSV against the constraint system");
    verify->add_option("--dag", cfg.dag_path, "DAG file")->required();
    verify->add_option("--workload", cfg.workload_path, "Workload CSV")->required();
    verify->add_option("--schedule", cfg.schedule_path, "Schedule CSV")->required();
    verify->add_option("--cmax", cfg.c_max_ms, "Deadline in milliseconds")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Run policies over a list of deadlines");
    sweep_cmd->add_option("--dag", cfg.dag_path, "DAG file")->required();
    sweep_cmd->add_option("--workload", cfg.workload_path, "Workload CSV")->required();
    sweep_cmd->add_option("--truth", cfg.truth_path, "Truth CSV (defaults to the workload values)");
    sweep_cmd->add_option("--cmax-list", cfg.cmax_list, "Comma-separated deadlines in ms")->required();
    sweep_cmd->add_option("--policies", cfg.policy_list, "Comma-separated policies");
    sweep_cmd->add_option("--reps", cfg.repetitions, "Repetitions per cell");
    sweep_cmd->add_option("--seed", cfg.seed, "RNG seed");
    sweep_cmd->add_option("--out", cfg.out_dir, "Output directory");

    auto* compare = app.add_subcommand("compare", "Compare SPT/HCF/all-public against the exact optimum");
    compare->add_option("--dag", cfg.dag_path, "DAG file")->required();
    compare->add_option("--workload", cfg.workload_path, "Workload CSV")->required();
    compare->add_option("--truth", cfg.truth_path, "Truth CSV (defaults to the workload values)");
    compare->add_option("--cmax", cfg.c_max_ms, "Deadline in milliseconds")->required();
    compare->add_option("--node-budget", cfg.node_budget, "Branch-and-bound node budget");
    compare->add_option("--out", cfg.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_generate(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg);
        if (compare->parsed()) return cmd_compare(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
