#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "otx/dual.hpp"

namespace otx {

/// theta_0 = 1, (1 - theta_{k+1}) / theta_{k+1}^2 = 1 / theta_k^2; weight_sum = C_k = sum_{j<=k} 1/theta_j.
struct ThetaSchedule
{
    double theta = 1.0;
    std::uint64_t k = 0;
    double weight_sum = 1.0;
};

ThetaSchedule advance_theta(const ThetaSchedule& s);

enum class CoordinateRule { Randomized, Greedy };

struct SolverState
{
    SolverState(std::size_t n, std::uint64_t seed);

    DualPoint lambda;
    DualPoint z;
    DualPoint y;
    ThetaSchedule schedule;
    Matrix primal_sum;   // sum_{j<k} x(y^j) / theta_j
    std::uint64_t rng_seed;
    std::uint64_t iterations = 0;
};

/// What a single accelerated coordinate step did.
struct StepInfo
{
    std::size_t coordinate = 0;
    double gradient = 0.0;
    double weight_sum = 1.0;   // C_k matching primal_sum after the step
    DualPoint y;               // y^k used for the gradient
};

/// One iteration of the accelerated primal-dual coordinate scheme. Expects
/// state.y mixed for the current k; leaves it mixed for k + 1.
StepInfo apdcd_step(const RegularizedProblem& prob, SolverState& state, CoordinateRule rule);

/// Coordinate the rule picks at y given grad phi(y). Randomized draws from
/// (seed, iteration); greedy takes the largest |g_i|, lowest index on ties.
std::size_t select_coordinate(CoordinateRule rule, const Vector& gradient, std::uint64_t seed,
                              std::uint64_t iteration);

enum class SolveStatus { Converged, MaxItersExceeded };

struct TraceSample
{
    std::uint64_t iteration = 0;
    double violation = 0.0;
    double dual_value = 0.0;
    double ot_value = 0.0;
    double wall_ms = 0.0;

    bool operator==(const TraceSample&) const = default;
};

struct SolveOptions
{
    double eps_prime = 1e-2;
    std::uint64_t max_iters = 0;      // 0 selects default_max_iters()
    std::uint64_t trace_every = 0;    // 0 disables sampling; the final iterate is always sampled
    std::uint64_t seed = 0;
    bool record_timing = false;       // wall_ms stays 0 unless set, keeping reports reproducible
};

struct SolveReport
{
    TransportPlan plan;               // averaged primal x^k
    std::uint64_t iterations = 0;
    double final_violation = 0.0;     // ||A vec(x^k) - b||_1
    SolveStatus status = SolveStatus::Converged;
    std::vector<TraceSample> trace;
};

/// 12 n^{3/2} sqrt((R + 1/2) / eps') + 1, R = ||C||_inf/eta + ln n - 2 ln min_i{r_i, l_i}.
double iteration_bound(const RegularizedProblem& prob, double eps_prime);

/// ceil(4 * iteration_bound).
std::uint64_t default_max_iters(const RegularizedProblem& prob, double eps_prime);

/// Runs apdcd_step until the averaged plan meets ||A vec(x^k) - b||_1 <= eps_prime.
SolveReport solve(const RegularizedProblem& prob, CoordinateRule rule, const SolveOptions& opts);

} // namespace otx
