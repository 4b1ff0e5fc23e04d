#include "otx/sinkhorn.hpp"

#include <chrono>
#include <cmath>

namespace otx {

SolveReport sinkhorn_solve(const RegularizedProblem& prob, const SolveOptions& opts)
{
    if (!(opts.eps_prime > 0.0)) throw Error(Errc::InvalidArgument, "eps_prime must be positive");
    const std::uint64_t max_iters =
        opts.max_iters > 0 ? opts.max_iters : default_max_iters(prob, opts.eps_prime);
    const auto start = std::chrono::steady_clock::now();
    const auto n = static_cast<Eigen::Index>(prob.n());
    const double eta = prob.eta();
    const Vector& r = prob.r().weights();
    const Vector& l = prob.l().weights();

    // std::exp rather than the vectorized exp, which clamps large negative
    // arguments instead of underflowing to zero.
    const Matrix kernel = (-prob.cost().entries() / eta).unaryExpr([](double a) { return std::exp(a); });
    Vector u = Vector::Ones(n);
    Vector v = Vector::Ones(n);

    SolveReport report{TransportPlan(Matrix::Zero(n, n)), 0, 0.0, SolveStatus::Converged, {}};

    for (std::uint64_t k = 0;; ++k) {
        const Matrix x = u.asDiagonal() * kernel * v.asDiagonal();
        const double violation = marginal_violation(x, r, l);
        const bool converged = violation <= opts.eps_prime;
        const bool exhausted = !converged && k >= max_iters;
        const bool due = opts.trace_every > 0 && k > 0 && k % opts.trace_every == 0;
        if (converged || exhausted || due) {
            TraceSample s;
            s.iteration = k;
            s.violation = violation;
            const Vector alpha = eta * (u.array().log() + 0.5).matrix();
            const Vector beta = eta * (v.array().log() + 0.5).matrix();
            s.dual_value = dual_value(prob, DualPoint(alpha, beta));
            s.ot_value = ot_objective(prob.cost(), x);
            if (opts.record_timing) {
                s.wall_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            }
            report.trace.push_back(s);
            if (converged || exhausted) {
                report.plan = TransportPlan(x);
                report.iterations = k;
                report.final_violation = violation;
                report.status = converged ? SolveStatus::Converged : SolveStatus::MaxItersExceeded;
                return report;
            }
        }

        u = r.cwiseQuotient(kernel * v);
        v = l.cwiseQuotient(kernel.transpose() * u);
        if (!u.allFinite() || !v.allFinite() || u.minCoeff() <= 0.0 || v.minCoeff() <= 0.0) {
            throw Error(Errc::NonFiniteEntry, "Sinkhorn scaling under/overflowed; increase eta");
        }
    }
}

} // namespace otx
