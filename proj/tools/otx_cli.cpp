// otx: entropic optimal transport solvers, benchmarks and decentralized barycenters.
//
// Exit codes: 0 converged / success, 1 usage or input error, 2 iteration budget exhausted.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "otx/barycenter.hpp"
#include "otx/bench.hpp"
#include "otx/io.hpp"
#include "otx/pipeline.hpp"
#include "otx/rounding.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_budget = 2;

struct SolveArgs
{
    std::string cost, r, l, out, log;
    std::optional<double> eps, eta, eps_prime;
    std::string algo = "apdrcd";
    std::uint64_t seed = 0;
    std::uint64_t max_iters = 0;
    std::uint64_t trace_every = 100;
    bool timing = false;
};

struct BenchArgs
{
    std::string images;
    std::size_t side = 20;
    std::size_t pairs = 10;
    double fg = 0.1;
    std::vector<double> eta, eps;
    std::vector<std::string> algos{"apdrcd", "apdgcd"};
    std::uint64_t budget = 1000;
    std::uint64_t trace_every = 10;
    std::uint64_t seed = 0;
    std::string metric = "sql2";
    std::optional<std::size_t> resize;
    std::string out, summary;
    bool timing = false;
};

struct BarycenterArgs
{
    std::string graph = "path";
    std::optional<std::size_t> m;
    std::string inputs, cost, out;
    double eps = 0.1;
    std::uint64_t iters = 500;
    std::string algo = "rcd";
    std::string lipschitz = "auto";
    std::uint64_t seed = 0;
};

void write_trace(const fs::path& path, const std::vector<otx::TraceSample>& trace)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw otx::Error(otx::Errc::IoError, "cannot write " + path.string());
    out << "iteration,violation,dual_value,ot_value,wall_ms\n";
    for (const auto& s : trace) {
        out << s.iteration << ',' << otx::io::format_real(s.violation) << ',' << otx::io::format_real(s.dual_value)
            << ',' << otx::io::format_real(s.ot_value) << ',' << otx::io::format_real(s.wall_ms) << '\n';
    }
}

int cmd_solve(const SolveArgs& a)
{
    const otx::CostMatrix cost(otx::io::read_matrix(a.cost));
    const otx::Histogram r = otx::io::read_histogram(a.r);
    const otx::Histogram l = otx::io::read_histogram(a.l);
    const otx::Algorithm algorithm = otx::parse_algorithm(a.algo);

    otx::SolveReport report{otx::TransportPlan(otx::Matrix::Zero(1, 1)), 0, 0.0, otx::SolveStatus::Converged, {}};
    std::optional<otx::TransportPlan> plan;
    double value = 0.0;
    if (a.eps) {
        otx::ApproxConfig cfg;
        cfg.epsilon = *a.eps;
        cfg.algorithm = algorithm;
        cfg.seed = a.seed;
        cfg.max_iters = a.max_iters;
        cfg.trace_every = a.trace_every;
        cfg.record_timing = a.timing;
        auto result = otx::approximate_ot(cost, r, l, cfg);
        report = std::move(result.report);
        plan.emplace(std::move(result.plan));
        value = result.ot_value;
    } else {
        const otx::RegularizedProblem prob(cost, r, l, *a.eta);
        otx::SolveOptions opts;
        opts.eps_prime = *a.eps_prime;
        opts.max_iters = a.max_iters;
        opts.trace_every = a.trace_every;
        opts.seed = a.seed;
        opts.record_timing = a.timing;
        report = otx::run_solver(prob, algorithm, opts);
        plan.emplace(otx::round_to_polytope(report.plan, r, l));
        value = otx::ot_objective(cost, *plan);
    }

    if (!a.log.empty()) write_trace(a.log, report.trace);
    std::cout << "ot_value=" << otx::io::format_real(value) << " iterations=" << report.iterations
              << " violation=" << otx::io::format_real(report.final_violation) << '\n';
    if (report.status == otx::SolveStatus::MaxItersExceeded) {
        std::cerr << "otx solve: iteration budget exhausted after " << report.iterations << " iterations\n";
        return exit_budget;
    }
    if (!a.out.empty()) otx::io::write_matrix(a.out, plan->entries());
    return exit_ok;
}

std::string default_summary_path(const std::string& out)
{
    const fs::path p(out);
    return (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
}

int cmd_bench(const BenchArgs& a, bool idx_mode)
{
    otx::bench::ExperimentConfig cfg;
    for (const auto& name : a.algos) cfg.algorithms.push_back(otx::parse_algorithm(name));
    if (!a.eps.empty()) {
        cfg.mode = otx::bench::ParamMode::Epsilon;
        cfg.params = a.eps;
    } else {
        cfg.mode = otx::bench::ParamMode::Eta;
        cfg.params = a.eta.empty() ? std::vector<double>{1.0, 5.0, 9.0} : a.eta;
    }
    cfg.seed = a.seed;
    cfg.budget = a.budget;
    cfg.trace_every = a.trace_every;
    cfg.record_timing = a.timing;
    if (const char* env = std::getenv("OTX_THREADS")) {
        const int t = std::atoi(env);
        if (t < 1) throw otx::Error(otx::Errc::InvalidArgument, "OTX_THREADS must be a positive integer");
        cfg.threads = static_cast<unsigned>(t);
    }

    const auto metric = otx::bench::parse_metric(a.metric);
    std::vector<otx::bench::ImagePair> pairs;
    if (idx_mode) {
        const auto images = otx::bench::read_idx(a.images);
        pairs = otx::bench::idx_pairs(images, a.pairs, a.seed, metric, a.resize);
    } else {
        otx::bench::SyntheticImageSpec spec;
        spec.side = a.side;
        spec.fg_fraction = a.fg;
        pairs = otx::bench::synthetic_pairs(a.pairs, spec, a.seed, metric);
    }

    const auto result = otx::bench::run_experiment(pairs, cfg);
    if (!result.failures.empty()) {
        for (const auto& f : result.failures) std::cerr << "otx bench: " << f << '\n';
        return exit_input;
    }

    const std::string summary = a.summary.empty() ? default_summary_path(a.out) : a.summary;
    std::ofstream out(a.out, std::ios::trunc);
    if (!out) throw otx::Error(otx::Errc::IoError, "cannot write " + a.out);
    otx::bench::write_records_csv(out, result.records);
    std::ofstream sum(summary, std::ios::trunc);
    if (!sum) throw otx::Error(otx::Errc::IoError, "cannot write " + summary);
    otx::bench::write_summary_csv(sum, result.summary);
    std::cout << "records=" << result.records.size() << " summary_rows=" << result.summary.size() << '\n';
    return exit_ok;
}

std::vector<otx::Histogram> read_agents(const fs::path& dir, std::optional<std::size_t> m)
{
    std::vector<otx::Histogram> out;
    for (std::size_t k = 0;; ++k) {
        const fs::path file = dir / ("agent_" + std::to_string(k) + ".csv");
        if (!fs::exists(file)) break;
        out.push_back(otx::io::read_histogram(file));
    }
    if (out.empty()) throw otx::Error(otx::Errc::IoError, "no agent_<k>.csv files in " + dir.string());
    if (m && out.size() < *m) {
        throw otx::Error(otx::Errc::DimensionMismatch,
                         "graph has " + std::to_string(*m) + " agents but only " + std::to_string(out.size()) +
                             " input files");
    }
    if (m) out.resize(*m, out.front());
    return out;
}

int cmd_barycenter(const BarycenterArgs& a)
{
    std::optional<otx::NetworkGraph> graph;
    std::vector<otx::Histogram> measures;
    if (a.graph == "path" || a.graph == "star" || a.graph == "cycle") {
        measures = read_agents(a.inputs, a.m);
        const std::size_t m = measures.size();
        graph.emplace(a.graph == "path" ? otx::NetworkGraph::path(m)
                      : a.graph == "star" ? otx::NetworkGraph::star(m)
                                          : otx::NetworkGraph::cycle(m));
    } else {
        graph.emplace(otx::NetworkGraph::read_edge_list(a.graph, a.m));
        measures = read_agents(a.inputs, graph->node_count());
    }
    const std::size_t m = measures.size();
    const std::size_t n = measures.front().size();

    const otx::CostMatrix cost = a.cost.empty() ? otx::bench::grid_cost(1, n, otx::bench::GroundMetric::SqL2)
                                                : otx::CostMatrix(otx::io::read_matrix(a.cost));
    std::optional<double> lipschitz;
    if (a.lipschitz != "auto") lipschitz = otx::io::parse_real(a.lipschitz);

    otx::CoordinateRule rule;
    if (a.algo == "rcd") rule = otx::CoordinateRule::Randomized;
    else if (a.algo == "gcd") rule = otx::CoordinateRule::Greedy;
    else throw otx::Error(otx::Errc::InvalidArgument, "--algo must be rcd or gcd");

    const otx::BarycenterProblem prob(measures, std::vector<otx::CostMatrix>(m, cost),
                                      otx::Vector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m)),
                                      a.eps, *graph, lipschitz);
    otx::BarycenterOptions opts;
    opts.rule = rule;
    opts.rounds = a.iters;
    opts.seed = a.seed;
    const auto result = otx::barycenter_solve(prob, opts);

    fs::create_directories(a.out);
    for (std::size_t k = 0; k < m; ++k) {
        otx::io::write_vector(fs::path(a.out) / ("barycenter_" + std::to_string(k) + ".csv"), result.q[k]);
    }
    std::ofstream trace(fs::path(a.out) / "trace.csv", std::ios::trunc);
    if (!trace) throw otx::Error(otx::Errc::IoError, "cannot write trace.csv in " + a.out);
    trace << "t,consensus_residual,objective\n";
    for (const auto& row : result.trace) {
        trace << row.t << ',' << otx::io::format_real(row.consensus_residual) << ','
              << otx::io::format_real(row.objective) << '\n';
    }
    const auto& last = result.trace.back();
    std::cout << "agents=" << m << " rounds=" << last.t
              << " consensus_residual=" << otx::io::format_real(last.consensus_residual)
              << " L=" << otx::io::format_real(prob.lipschitz()) << '\n';
    return exit_ok;
}

void add_bench_options(CLI::App* app, BenchArgs& a)
{
    app->add_option("--pairs", a.pairs, "Number of image pairs")->check(CLI::PositiveNumber);
    auto* eta = app->add_option("--eta", a.eta, "Comma-separated regularization values (default 1,5,9)")->delimiter(',');
    auto* eps = app->add_option("--eps", a.eps, "Comma-separated accuracies; runs the full approximation pipeline")
                    ->delimiter(',');
    eta->excludes(eps);
    app->add_option("--algos", a.algos, "Comma-separated algorithms: apdrcd,apdgcd,sinkhorn")->delimiter(',');
    app->add_option("--budget", a.budget, "Shared iteration budget")->check(CLI::PositiveNumber);
    app->add_option("--trace-every", a.trace_every, "Record every K iterations")->check(CLI::PositiveNumber);
    app->add_option("--seed", a.seed, "Root seed");
    app->add_option("--metric", a.metric, "Ground metric: l1|l2|sql2")->check(CLI::IsMember({"l1", "l2", "sql2"}));
    app->add_option("--out", a.out, "Record CSV")->required();
    app->add_option("--summary", a.summary, "Competitive-ratio CSV (default <out>_summary.csv)");
    app->add_flag("--timing", a.timing, "Fill wall_ms (output is then not reproducible)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entropic optimal transport via accelerated primal-dual coordinate descent"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Approximate OT between two histograms");
    solve->add_option("--cost", solve_args.cost, "Cost matrix CSV")->required()->check(CLI::ExistingFile);
    solve->add_option("--r", solve_args.r, "Row marginal file")->required()->check(CLI::ExistingFile);
    solve->add_option("--l", solve_args.l, "Column marginal file")->required()->check(CLI::ExistingFile);
    auto* eps_opt = solve->add_option("--eps", solve_args.eps, "Target accuracy (sets eta and eps')");
    auto* eta_opt = solve->add_option("--eta", solve_args.eta, "Regularization (requires --eps-prime)");
    auto* epsp_opt = solve->add_option("--eps-prime", solve_args.eps_prime, "Marginal tolerance for --eta mode");
    eps_opt->excludes(eta_opt)->excludes(epsp_opt);
    eta_opt->needs(epsp_opt);
    epsp_opt->needs(eta_opt);
    solve->add_option("--algo", solve_args.algo, "apdrcd|apdgcd|sinkhorn")
        ->check(CLI::IsMember({"apdrcd", "apdgcd", "sinkhorn"}));
    solve->add_option("--seed", solve_args.seed, "Seed for the randomized rule");
    solve->add_option("--max-iters", solve_args.max_iters, "Iteration budget (default: 4x the theoretical bound)");
    solve->add_option("--trace-every", solve_args.trace_every, "Trace sampling interval (0 = final only)");
    solve->add_option("--out", solve_args.out, "Rounded plan CSV");
    solve->add_option("--log", solve_args.log, "Trace CSV");
    solve->add_flag("--timing", solve_args.timing, "Fill wall_ms in the trace");

    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
    bench->require_subcommand(1);
    BenchArgs syn_args;
    auto* synthetic = bench->add_subcommand("synthetic", "Random foreground-square images");
    synthetic->add_option("--n", syn_args.side, "Image side in pixels")->check(CLI::Range(2, 4096));
    synthetic->add_option("--fg", syn_args.fg, "Foreground area fraction")->check(CLI::Range(0.0, 1.0));
    add_bench_options(synthetic, syn_args);
    BenchArgs idx_args;
    auto* idx = bench->add_subcommand("idx", "Images from an IDX3 ubyte file (e.g. MNIST)");
    idx->add_option("--images", idx_args.images, "IDX image file")->required()->check(CLI::ExistingFile);
    idx->add_option("--resize", idx_args.resize, "Box-average images to SxS")->check(CLI::PositiveNumber);
    add_bench_options(idx, idx_args);

    BarycenterArgs bary_args;
    auto* bary = app.add_subcommand("barycenter", "Decentralized Wasserstein barycenter");
    bary->add_option("--graph", bary_args.graph, "path|star|cycle or an edge-list file");
    bary->add_option("--m", bary_args.m, "Agent count (default: number of input files)")->check(CLI::PositiveNumber);
    bary->add_option("--inputs", bary_args.inputs, "Directory of agent_<k>.csv histograms")->required();
    bary->add_option("--cost", bary_args.cost, "Shared cost matrix CSV (default: squared 1-D grid distance)");
    bary->add_option("--eps", bary_args.eps, "Target accuracy")->check(CLI::Range(0.0, 8.0));
    bary->add_option("--iters", bary_args.iters, "Rounds")->check(CLI::PositiveNumber);
    bary->add_option("--algo", bary_args.algo, "rcd|gcd")->check(CLI::IsMember({"rcd", "gcd"}));
    bary->add_option("--L", bary_args.lipschitz, "Lipschitz bound or 'auto'");
    bary->add_option("--seed", bary_args.seed, "Root seed");
    bary->add_option("--out", bary_args.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "otx: " << e.what() << '\n';
        return exit_input;
    }

    try {
        if (*solve) {
            if (!solve_args.eps && !solve_args.eta) {
                std::cerr << "otx solve: one of --eps or --eta/--eps-prime is required\n";
                return exit_input;
            }
            return cmd_solve(solve_args);
        }
        if (*synthetic) return cmd_bench(syn_args, false);
        if (*idx) return cmd_bench(idx_args, true);
        if (*bary) return cmd_barycenter(bary_args);
    } catch (const otx::Error& e) {
        std::cerr << "otx: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "otx: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
