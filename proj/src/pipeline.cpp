#include "otx/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "otx/rounding.hpp"
#include "otx/sinkhorn.hpp"

namespace otx {

std::string_view algorithm_name(Algorithm a) noexcept
{
    switch (a) {
        case Algorithm::APDRCD: return "apdrcd";
        case Algorithm::APDGCD: return "apdgcd";
        case Algorithm::Sinkhorn: return "sinkhorn";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "apdrcd") return Algorithm::APDRCD;
    if (lower == "apdgcd") return Algorithm::APDGCD;
    if (lower == "sinkhorn") return Algorithm::Sinkhorn;
    throw Error(Errc::InvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

double pipeline_eta(double epsilon, std::size_t n)
{
    return epsilon / (4.0 * std::log(static_cast<double>(n)));
}

double pipeline_eps_prime(double epsilon, double cost_max)
{
    return epsilon / (8.0 * cost_max);
}

std::pair<Histogram, Histogram> smooth_marginals(const Histogram& r, const Histogram& l, double eps_prime)
{
    if (!(eps_prime > 0.0 && eps_prime <= 8.0)) {
        throw Error(Errc::EpsPrimeOutOfRange, "eps' must lie in (0, 8]");
    }
    if (r.size() != l.size()) throw Error(Errc::DimensionMismatch, "marginals differ in size");
    const double keep = 1.0 - eps_prime / 8.0;
    const double floor = eps_prime / (8.0 * static_cast<double>(r.size()));
    auto mix = [&](const Histogram& h) {
        return Histogram::from_normalized((keep * h.weights().array() + floor).matrix());
    };
    return {mix(r), mix(l)};
}

SolveReport run_solver(const RegularizedProblem& prob, Algorithm algorithm, const SolveOptions& opts)
{
    switch (algorithm) {
        case Algorithm::APDRCD: return solve(prob, CoordinateRule::Randomized, opts);
        case Algorithm::APDGCD: return solve(prob, CoordinateRule::Greedy, opts);
        case Algorithm::Sinkhorn: return sinkhorn_solve(prob, opts);
    }
    throw Error(Errc::InvalidArgument, "unknown algorithm");
}

ApproxResult approximate_ot(const CostMatrix& cost, const Histogram& r, const Histogram& l,
                            const ApproxConfig& cfg)
{
    const std::size_t n = cost.size();
    if (n < 2) throw Error(Errc::InvalidArgument, "approximate_ot needs n >= 2");
    if (r.size() != n || l.size() != n) throw Error(Errc::DimensionMismatch, "marginals do not match cost size");
    if (!(cfg.epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");

    if (cost.max_abs() == 0.0) {
        // Every feasible plan is optimal.
        TransportPlan plan(r.weights() * l.weights().transpose());
        SolveReport report{plan, 0, 0.0, SolveStatus::Converged, {}};
        return {plan, 0.0, 0.0, 0.0, std::move(report)};
    }

    const double eta = pipeline_eta(cfg.epsilon, n);
    const double eps_prime = pipeline_eps_prime(cfg.epsilon, cost.max_abs());
    auto [r_smooth, l_smooth] = smooth_marginals(r, l, eps_prime);
    const RegularizedProblem prob(cost, std::move(r_smooth), std::move(l_smooth), eta);

    SolveOptions opts;
    opts.eps_prime = eps_prime / 2.0;
    opts.max_iters = cfg.max_iters;
    opts.trace_every = cfg.trace_every;
    opts.seed = cfg.seed;
    opts.record_timing = cfg.record_timing;
    SolveReport report = run_solver(prob, cfg.algorithm, opts);

    TransportPlan plan = round_to_polytope(report.plan, r, l);
    const double value = ot_objective(cost, plan);
    return {std::move(plan), value, eta, eps_prime, std::move(report)};
}

CostMatrix line_cost(const Vector& support, double p)
{
    const auto n = support.size();
    Matrix c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) c(i, j) = std::pow(std::abs(support[i] - support[j]), p);
    }
    return CostMatrix(std::move(c));
}

CouplingResult monotone_coupling_oracle(const Vector& support, const Histogram& r, const Histogram& l,
                                        double p)
{
    const auto n = support.size();
    if (static_cast<Eigen::Index>(r.size()) != n || static_cast<Eigen::Index>(l.size()) != n) {
        throw Error(Errc::DimensionMismatch, "support and marginals differ in size");
    }
    if (!(p >= 1.0)) throw Error(Errc::InvalidArgument, "cost exponent must be >= 1");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(support[i] > support[i - 1])) throw Error(Errc::UnsortedSupport, "support must be strictly increasing");
    }

    Matrix plan = Matrix::Zero(n, n);
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    double supply = r[0];
    double demand = l[0];
    while (i < n && j < n) {
        const double moved = std::min(supply, demand);
        plan(i, j) += moved;
        supply -= moved;
        demand -= moved;
        // Advance whichever side is exhausted; ties advance both.
        const bool row_done = supply <= demand;
        const bool col_done = demand <= supply;
        if (row_done && ++i < n) supply = r[static_cast<std::size_t>(i)];
        if (col_done && ++j < n) demand = l[static_cast<std::size_t>(j)];
    }
    const CostMatrix cost = line_cost(support, p);
    const double value = ot_objective(cost, plan);
    return {TransportPlan(std::move(plan)), value};
}

} // namespace otx
