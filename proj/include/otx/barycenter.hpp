#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "otx/core.hpp"
#include "otx/solver.hpp"

namespace otx {

using Edge = std::pair<std::size_t, std::size_t>;

/// Graph Laplacian: deg(i) on the diagonal, -1 per edge. Rejects self-loops,
/// out-of-range endpoints and disconnected graphs.
Matrix laplacian(const std::vector<Edge>& edges, std::size_t m);

/// Connected undirected simple graph over m agents.
class NetworkGraph
{
public:
    static NetworkGraph from_edges(std::size_t m, std::vector<Edge> edges);
    static NetworkGraph path(std::size_t m);
    static NetworkGraph star(std::size_t m);    // center 0
    static NetworkGraph cycle(std::size_t m);

    /// Edge list file, one "i j" pair per line, 0-indexed. Node count is the
    /// largest index + 1 unless m is given.
    static NetworkGraph read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> m = {});

    std::size_t node_count() const noexcept { return m_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Matrix& laplacian() const noexcept { return laplacian_; }
    bool adjacent(std::size_t i, std::size_t j) const;
    const std::vector<std::size_t>& neighbors(std::size_t k) const { return neighbors_.at(k); }

    /// Largest Laplacian eigenvalue by power iteration (Rayleigh quotient).
    double max_eigenvalue_estimate(int steps = 20) const;

private:
    NetworkGraph(std::size_t m, std::vector<Edge> edges, Matrix lap);

    std::size_t m_;
    std::vector<Edge> edges_;
    Matrix laplacian_;
    std::vector<std::vector<std::size_t>> neighbors_;
};

/// sqrt(q^T (W_bar kron I_n) q), evaluated blockwise.
double consensus_residual(const std::vector<Vector>& q, const NetworkGraph& graph);
double consensus_residual(const std::vector<Histogram>& q, const NetworkGraph& graph);

class BarycenterProblem
{
public:
    /// lipschitz defaults to sum_k (m / gamma(k)) * lambda_max(W_bar).
    BarycenterProblem(std::vector<Histogram> measures, std::vector<CostMatrix> costs, Vector weights,
                      double epsilon, NetworkGraph graph, std::optional<double> lipschitz = {});

    std::size_t m() const noexcept { return measures_.size(); }
    std::size_t n() const noexcept { return measures_.front().size(); }
    const std::vector<Histogram>& measures() const noexcept { return measures_; }
    const std::vector<CostMatrix>& costs() const noexcept { return costs_; }
    const Vector& weights() const noexcept { return weights_; }
    double epsilon() const noexcept { return epsilon_; }
    const NetworkGraph& graph() const noexcept { return graph_; }
    double lipschitz() const noexcept { return lipschitz_; }

    /// gamma(k) = eps / (4 m w_k ln n).
    double gamma(std::size_t k) const;

    /// Same problem with every measure replaced by (1 - eps/8)(r_k + eps/(n(8 - eps)) 1).
    BarycenterProblem smoothed() const;

private:
    std::vector<Histogram> measures_;
    std::vector<CostMatrix> costs_;
    Vector weights_;
    double epsilon_;
    NetworkGraph graph_;
    double lipschitz_;
};

/// Gradient of the conjugate of W_gamma(r_k, .): sum_j r_j softmax_i((lambda_i - C_ij) / gamma).
Vector conjugate_gradient(std::size_t k, const Vector& lambda, const BarycenterProblem& prob);

/// gamma sum_j r_j log sum_i exp((lambda_i - C_ij) / gamma).
double conjugate_value(std::size_t k, const Vector& lambda, const BarycenterProblem& prob);

/// Accelerated step sizes: alpha_{t+1} is the largest root of A_t + alpha = 2 L alpha^2.
struct AlphaSchedule
{
    double big_a = 0.0;
    double alpha = 0.0;
    std::uint64_t t = 0;
};

AlphaSchedule advance_alpha(const AlphaSchedule& s, double lipschitz);

/// Per-round gradient mailbox. Reads are only allowed from the reader itself
/// or a graph neighbor, and only after the source published this round.
class GradientExchange
{
public:
    GradientExchange(const NetworkGraph& graph, std::size_t n);

    void publish(std::size_t agent, Vector gradient);
    const Vector& read(std::size_t reader, std::size_t source);
    void next_round();

    /// access_counts()[reader][source] = number of reads so far.
    const std::vector<std::vector<std::uint64_t>>& access_counts() const noexcept { return counts_; }

private:
    const NetworkGraph* graph_;
    std::vector<Vector> slots_;
    std::vector<bool> published_;
    std::vector<std::vector<std::uint64_t>> counts_;
};

struct AgentState
{
    Vector lambda;
    Vector xi;
    Vector eta;     // dual averaging sequence, not a regularizer
    Vector q_hat;
};

struct BarycenterTraceRow
{
    std::uint64_t t = 0;
    double consensus_residual = 0.0;
    double objective = 0.0;         // sum_k conjugate_value(k, lambda_k^t)
};

struct BarycenterOptions
{
    CoordinateRule rule = CoordinateRule::Randomized;
    std::uint64_t rounds = 100;
    std::uint64_t seed = 0;
    /// Agent visiting order inside a round; empty means 0..m-1. Results do not depend on it.
    std::vector<std::size_t> agent_order;
};

struct BarycenterResult
{
    std::vector<Vector> q;
    std::vector<BarycenterTraceRow> trace;
    std::vector<AlphaSchedule> schedule;
    std::vector<std::vector<std::uint64_t>> access_counts;
};

/// Synchronous simulation of the decentralized accelerated coordinate scheme
/// on the smoothed problem.
BarycenterResult barycenter_solve(const BarycenterProblem& prob, const BarycenterOptions& opts);

} // namespace otx
