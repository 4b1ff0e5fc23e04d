#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "otx/solver.hpp"

namespace otx {

enum class Algorithm { APDRCD, APDGCD, Sinkhorn };

std::string_view algorithm_name(Algorithm a) noexcept;
/// Accepts "apdrcd", "apdgcd", "sinkhorn" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

struct ApproxConfig
{
    double epsilon = 0.1;             // absolute, in cost units
    Algorithm algorithm = Algorithm::APDRCD;
    std::uint64_t seed = 0;
    std::uint64_t max_iters = 0;      // 0 selects default_max_iters
    std::uint64_t trace_every = 0;
    bool record_timing = false;
};

struct ApproxResult
{
    TransportPlan plan;               // exactly feasible for the original (r, l)
    double ot_value = 0.0;
    double eta = 0.0;
    double eps_prime = 0.0;
    SolveReport report;
};

/// Regularization and marginal tolerance for a target accuracy:
/// eta = eps / (4 ln n), eps' = eps / (8 ||C||_inf).
double pipeline_eta(double epsilon, std::size_t n);
double pipeline_eps_prime(double epsilon, double cost_max);

/// (1 - eps'/8) (r, l) + eps' / (8n) (1, 1). Requires 0 < eps' <= 8.
std::pair<Histogram, Histogram> smooth_marginals(const Histogram& r, const Histogram& l, double eps_prime);

/// Runs the chosen solver on (C, eta, smoothed r, smoothed l) to tolerance
/// eps'/2 and rounds the result onto U(r, l) for the original marginals.
/// A zero cost matrix short-circuits to the independent coupling r l^T.
ApproxResult approximate_ot(const CostMatrix& cost, const Histogram& r, const Histogram& l,
                            const ApproxConfig& cfg);

/// Dispatches to solve() or sinkhorn_solve().
SolveReport run_solver(const RegularizedProblem& prob, Algorithm algorithm, const SolveOptions& opts);

struct CouplingResult
{
    TransportPlan plan;
    double cost = 0.0;
};

/// North-west-corner coupling of (r, l) on a common strictly increasing 1-D
/// support with cost |s_i - s_j|^p. Optimal for p >= 1.
CouplingResult monotone_coupling_oracle(const Vector& support, const Histogram& r, const Histogram& l,
                                        double p);

/// C_ij = |s_i - s_j|^p.
CostMatrix line_cost(const Vector& support, double p);

} // namespace otx
