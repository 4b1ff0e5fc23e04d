#include "otx/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "otx/rng.hpp"

namespace otx {

ThetaSchedule advance_theta(const ThetaSchedule& s)
{
    if (!(s.theta > 0.0 && s.theta <= 1.0)) {
        throw Error(Errc::InvalidArgument, "theta must lie in (0, 1]");
    }
    const double t2 = s.theta * s.theta;
    const double next = 0.5 * t2 * (std::sqrt(1.0 + 4.0 / t2) - 1.0);
    return {next, s.k + 1, s.weight_sum + 1.0 / next};
}

SolverState::SolverState(std::size_t n, std::uint64_t seed)
    : lambda(n)
    , z(n)
    , y(n)
    , primal_sum(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)))
    , rng_seed(seed)
{}

std::size_t select_coordinate(CoordinateRule rule, const Vector& gradient, std::uint64_t seed,
                              std::uint64_t iteration)
{
    const auto dim = static_cast<std::uint64_t>(gradient.size());
    if (rule == CoordinateRule::Randomized) {
        return static_cast<std::size_t>(rng::uniform_index(seed, iteration, dim));
    }
    std::size_t best = 0;
    double best_abs = std::abs(gradient[0]);
    for (Eigen::Index i = 1; i < gradient.size(); ++i) {
        const double a = std::abs(gradient[i]);
        if (a > best_abs) {
            best_abs = a;
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

StepInfo apdcd_step(const RegularizedProblem& prob, SolverState& state, CoordinateRule rule)
{
    const std::size_t n = prob.n();
    if (state.y.n() != n || state.primal_sum.rows() != static_cast<Eigen::Index>(n)) {
        throw Error(Errc::DimensionMismatch, "solver state does not match problem size");
    }
    const double theta = state.schedule.theta;
    const double lip = prob.lipschitz();

    StepInfo info;
    info.y = state.y;
    info.weight_sum = state.schedule.weight_sum;

    const Matrix x = primal_map(prob, state.y);
    state.primal_sum += x / theta;

    const Vector g = gradient_from_plan(prob, x);
    const std::size_t i = select_coordinate(rule, g, state.rng_seed, state.iterations);
    info.coordinate = i;
    info.gradient = g[static_cast<Eigen::Index>(i)];

    // lambda^{k+1} agrees with y^k off the chosen coordinate; z^{k+1} with z^k.
    state.lambda = state.y;
    state.lambda[i] = state.y[i] - info.gradient / lip;
    state.z[i] -= info.gradient / (2.0 * static_cast<double>(n) * lip * theta);

    state.schedule = advance_theta(state.schedule);
    ++state.iterations;

    const double next = state.schedule.theta;
    state.y.stacked() = (1.0 - next) * state.lambda.stacked() + next * state.z.stacked();
    return info;
}

double iteration_bound(const RegularizedProblem& prob, double eps_prime)
{
    const double n = static_cast<double>(prob.n());
    const double min_mass = std::min(prob.r().min_entry(), prob.l().min_entry());
    const double big_r = prob.cost().max_abs() / prob.eta() + std::log(n) - 2.0 * std::log(min_mass);
    return 12.0 * std::pow(n, 1.5) * std::sqrt((big_r + 0.5) / eps_prime) + 1.0;
}

std::uint64_t default_max_iters(const RegularizedProblem& prob, double eps_prime)
{
    const double bound = 4.0 * iteration_bound(prob, eps_prime);
    if (!std::isfinite(bound) || bound > 1e15) {
        throw Error(Errc::InvalidArgument,
                    "no finite default iteration budget (zero marginal entries?); pass max_iters");
    }
    return static_cast<std::uint64_t>(std::ceil(bound));
}

SolveReport solve(const RegularizedProblem& prob, CoordinateRule rule, const SolveOptions& opts)
{
    if (!(opts.eps_prime > 0.0)) throw Error(Errc::InvalidArgument, "eps_prime must be positive");
    const std::uint64_t max_iters =
        opts.max_iters > 0 ? opts.max_iters : default_max_iters(prob, opts.eps_prime);
    const auto start = std::chrono::steady_clock::now();
    const Vector b = prob.stacked_marginals();
    const auto n = static_cast<Eigen::Index>(prob.n());

    SolverState state(prob.n(), opts.seed);
    SolveReport report{TransportPlan(Matrix::Zero(n, n)), 0, 0.0, SolveStatus::Converged, {}};

    auto sample = [&](std::uint64_t k, double violation, const DualPoint& lambda_k, const Matrix& x) {
        TraceSample s;
        s.iteration = k;
        s.violation = violation;
        s.dual_value = dual_value(prob, lambda_k);
        s.ot_value = ot_objective(prob.cost(), x);
        if (opts.record_timing) {
            s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        report.trace.push_back(s);
    };

    for (std::uint64_t k = 0;; ++k) {
        const DualPoint lambda_k = state.lambda;
        const StepInfo info = apdcd_step(prob, state, rule);

        // x^k = primal_sum / C_k; marginals are linear so scale after summing.
        const double inv = 1.0 / info.weight_sum;
        Vector ax(2 * n);
        ax << state.primal_sum.rowwise().sum() * inv, state.primal_sum.colwise().sum().transpose() * inv;
        const double violation = (ax - b).lpNorm<1>();

        const bool converged = violation <= opts.eps_prime;
        const bool exhausted = !converged && k >= max_iters;
        const bool due = opts.trace_every > 0 && k > 0 && k % opts.trace_every == 0;
        if (converged || exhausted || due) {
            const Matrix x = state.primal_sum * inv;
            sample(k, violation, lambda_k, x);
            if (converged || exhausted) {
                report.plan = TransportPlan(x);
                report.iterations = k;
                report.final_violation = violation;
                report.status = converged ? SolveStatus::Converged : SolveStatus::MaxItersExceeded;
                return report;
            }
        }
    }
}

} // namespace otx
