#include "otx/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "otx/rng.hpp"

namespace otx {

namespace {

std::vector<Edge> normalize_edges(std::size_t m, std::vector<Edge> edges)
{
    std::set<Edge> unique;
    for (auto [a, b] : edges) {
        if (a >= m || b >= m) {
            throw Error(Errc::IndexOutOfRange, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                                   ") references a node >= " + std::to_string(m));
        }
        if (a == b) throw Error(Errc::SelfLoop, "self-loop at node " + std::to_string(a));
        unique.insert({std::min(a, b), std::max(a, b)});
    }
    return {unique.begin(), unique.end()};
}

bool connected(std::size_t m, const std::vector<std::vector<std::size_t>>& adj)
{
    std::vector<bool> seen(m, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == m;
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t m, const std::vector<Edge>& edges)
{
    std::vector<std::vector<std::size_t>> adj(m);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

} // namespace

Matrix laplacian(const std::vector<Edge>& edges, std::size_t m)
{
    if (m == 0) throw Error(Errc::InvalidArgument, "graph has no nodes");
    const auto clean = normalize_edges(m, edges);
    if (!connected(m, adjacency(m, clean))) throw Error(Errc::DisconnectedGraph, "graph is not connected");
    const auto mi = static_cast<Eigen::Index>(m);
    Matrix w = Matrix::Zero(mi, mi);
    for (auto [a, b] : clean) {
        const auto i = static_cast<Eigen::Index>(a);
        const auto j = static_cast<Eigen::Index>(b);
        w(i, j) = -1.0;
        w(j, i) = -1.0;
        w(i, i) += 1.0;
        w(j, j) += 1.0;
    }
    return w;
}

NetworkGraph::NetworkGraph(std::size_t m, std::vector<Edge> edges, Matrix lap)
    : m_(m)
    , edges_(std::move(edges))
    , laplacian_(std::move(lap))
    , neighbors_(adjacency(m, edges_))
{}

NetworkGraph NetworkGraph::from_edges(std::size_t m, std::vector<Edge> edges)
{
    Matrix lap = otx::laplacian(edges, m);
    return NetworkGraph(m, normalize_edges(m, std::move(edges)), std::move(lap));
}

NetworkGraph NetworkGraph::path(std::size_t m)
{
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
    return from_edges(m, std::move(e));
}

NetworkGraph NetworkGraph::star(std::size_t m)
{
    std::vector<Edge> e;
    for (std::size_t i = 1; i < m; ++i) e.emplace_back(0, i);
    return from_edges(m, std::move(e));
}

NetworkGraph NetworkGraph::cycle(std::size_t m)
{
    if (m < 3) throw Error(Errc::InvalidArgument, "a simple cycle needs at least 3 nodes");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
    return from_edges(m, std::move(e));
}

NetworkGraph NetworkGraph::read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> m)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::vector<Edge> edges;
    std::size_t max_index = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        long long a = -1;
        long long b = -1;
        std::string rest;
        if (!(ss >> a >> b) || (ss >> rest) || a < 0 || b < 0) {
            throw Error(Errc::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected 'i j'");
        }
        edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        max_index = std::max({max_index, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
    }
    if (edges.empty()) throw Error(Errc::ParseError, path.string() + ": no edges");
    return from_edges(m.value_or(max_index + 1), std::move(edges));
}

bool NetworkGraph::adjacent(std::size_t i, std::size_t j) const
{
    const auto& list = neighbors_.at(i);
    return std::binary_search(list.begin(), list.end(), j);
}

double NetworkGraph::max_eigenvalue_estimate(int steps) const
{
    const auto mi = static_cast<Eigen::Index>(m_);
    if (mi == 1) return 0.0;
    // Generic start vector with the all-ones kernel direction removed.
    Vector v(mi);
    for (Eigen::Index i = 0; i < mi; ++i) {
        v[i] = static_cast<double>(rng::hash(0x4c4150, static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
    }
    v.array() -= v.mean();
    v.normalize();
    for (int s = 0; s < steps; ++s) {
        Vector w = laplacian_ * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
    }
    return v.dot(laplacian_ * v);
}

double consensus_residual(const std::vector<Vector>& q, const NetworkGraph& graph)
{
    const std::size_t m = graph.node_count();
    if (q.size() != m) throw Error(Errc::DimensionMismatch, "need one vector per agent");
    for (const auto& v : q) {
        if (v.size() != q.front().size()) throw Error(Errc::DimensionMismatch, "agent vectors differ in length");
    }
    const Matrix& w = graph.laplacian();
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            const double wkj = w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
            if (wkj != 0.0) total += wkj * q[k].dot(q[j]);
        }
    }
    // The quadratic form is PSD; clamp rounding noise below zero.
    return std::sqrt(std::max(total, 0.0));
}

double consensus_residual(const std::vector<Histogram>& q, const NetworkGraph& graph)
{
    std::vector<Vector> v;
    v.reserve(q.size());
    for (const auto& h : q) v.push_back(h.weights());
    return consensus_residual(v, graph);
}

BarycenterProblem::BarycenterProblem(std::vector<Histogram> measures, std::vector<CostMatrix> costs,
                                     Vector weights, double epsilon, NetworkGraph graph,
                                     std::optional<double> lipschitz)
    : measures_(std::move(measures))
    , costs_(std::move(costs))
    , weights_(std::move(weights))
    , epsilon_(epsilon)
    , graph_(std::move(graph))
    , lipschitz_(0.0)
{
    const std::size_t m = measures_.size();
    if (m == 0) throw Error(Errc::EmptyVector, "no measures");
    if (graph_.node_count() != m) throw Error(Errc::DimensionMismatch, "graph size differs from measure count");
    if (costs_.size() != m || static_cast<std::size_t>(weights_.size()) != m) {
        throw Error(Errc::DimensionMismatch, "need one cost matrix and one weight per measure");
    }
    const std::size_t n = measures_.front().size();
    if (n < 2) throw Error(Errc::InvalidArgument, "barycenter support needs n >= 2");
    for (std::size_t k = 0; k < m; ++k) {
        if (measures_[k].size() != n || costs_[k].size() != n) {
            throw Error(Errc::DimensionMismatch, "measure or cost " + std::to_string(k) + " has the wrong size");
        }
    }
    if (weights_.minCoeff() <= 0.0 || std::abs(weights_.sum() - 1.0) > simplex_tol) {
        throw Error(Errc::InvalidArgument, "weights must be positive and sum to one");
    }
    if (!(epsilon_ > 0.0 && epsilon_ < 8.0)) throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 8)");

    if (lipschitz) {
        if (!(*lipschitz > 0.0)) throw Error(Errc::InvalidArgument, "Lipschitz bound must be positive");
        lipschitz_ = *lipschitz;
    } else {
        double inv_gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) inv_gamma += static_cast<double>(m) / gamma(k);
        lipschitz_ = inv_gamma * graph_.max_eigenvalue_estimate(20);
        if (!(lipschitz_ > 0.0)) lipschitz_ = inv_gamma;   // single agent: empty Laplacian spectrum
    }
}

double BarycenterProblem::gamma(std::size_t k) const
{
    return epsilon_ / (4.0 * static_cast<double>(m()) * weights_[static_cast<Eigen::Index>(k)] *
                       std::log(static_cast<double>(n())));
}

BarycenterProblem BarycenterProblem::smoothed() const
{
    const double n = static_cast<double>(this->n());
    const double shift = epsilon_ / (n * (8.0 - epsilon_));
    std::vector<Histogram> smooth;
    smooth.reserve(m());
    for (const auto& r : measures_) {
        smooth.push_back(Histogram::from_normalized(((1.0 - epsilon_ / 8.0) * (r.weights().array() + shift)).matrix()));
    }
    return BarycenterProblem(std::move(smooth), costs_, weights_, epsilon_, graph_, lipschitz_);
}

namespace {

// Column-wise log-sum-exp of (lambda_i - C_ij) / gamma with max subtraction.
template <class Visit>
void for_each_column_softmax(const Vector& lambda, const Matrix& c, double gamma, Visit&& visit)
{
    const auto n = c.rows();
    Vector z(n);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        z = (lambda - c.col(j)) / gamma;
        const double top = z.maxCoeff();
        Vector e = (z.array() - top).unaryExpr([](double a) { return std::exp(a); }).matrix();
        const double total = e.sum();
        visit(j, e, total, top);
    }
}

void check_agent(std::size_t k, const Vector& lambda, const BarycenterProblem& prob)
{
    if (k >= prob.m()) throw Error(Errc::IndexOutOfRange, "agent index out of range");
    if (static_cast<std::size_t>(lambda.size()) != prob.n()) throw Error(Errc::DimensionMismatch, "lambda has the wrong size");
}

} // namespace

Vector conjugate_gradient(std::size_t k, const Vector& lambda, const BarycenterProblem& prob)
{
    check_agent(k, lambda, prob);
    const Histogram& r = prob.measures()[k];
    Vector out = Vector::Zero(lambda.size());
    for_each_column_softmax(lambda, prob.costs()[k].entries(), prob.gamma(k),
                            [&](Eigen::Index j, const Vector& e, double total, double) {
                                out += (r[static_cast<std::size_t>(j)] / total) * e;
                            });
    return out;
}

double conjugate_value(std::size_t k, const Vector& lambda, const BarycenterProblem& prob)
{
    check_agent(k, lambda, prob);
    const Histogram& r = prob.measures()[k];
    const double gamma = prob.gamma(k);
    double value = 0.0;
    for_each_column_softmax(lambda, prob.costs()[k].entries(), gamma,
                            [&](Eigen::Index j, const Vector&, double total, double top) {
                                value += r[static_cast<std::size_t>(j)] * (top + std::log(total));
                            });
    return gamma * value;
}

AlphaSchedule advance_alpha(const AlphaSchedule& s, double lipschitz)
{
    const double alpha = (1.0 + std::sqrt(1.0 + 8.0 * lipschitz * s.big_a)) / (4.0 * lipschitz);
    return {s.big_a + alpha, alpha, s.t + 1};
}

GradientExchange::GradientExchange(const NetworkGraph& graph, std::size_t n)
    : graph_(&graph)
    , slots_(graph.node_count(), Vector::Zero(static_cast<Eigen::Index>(n)))
    , published_(graph.node_count(), false)
    , counts_(graph.node_count(), std::vector<std::uint64_t>(graph.node_count(), 0))
{}

void GradientExchange::publish(std::size_t agent, Vector gradient)
{
    slots_.at(agent) = std::move(gradient);
    published_[agent] = true;
}

const Vector& GradientExchange::read(std::size_t reader, std::size_t source)
{
    if (reader != source && !graph_->adjacent(reader, source)) {
        throw Error(Errc::InvalidArgument, "agent " + std::to_string(reader) + " read non-neighbor " +
                                               std::to_string(source));
    }
    if (!published_.at(source)) {
        throw Error(Errc::InvalidArgument, "agent " + std::to_string(source) + " has not published this round");
    }
    ++counts_[reader][source];
    return slots_[source];
}

void GradientExchange::next_round()
{
    std::fill(published_.begin(), published_.end(), false);
}

BarycenterResult barycenter_solve(const BarycenterProblem& input, const BarycenterOptions& opts)
{
    if (opts.rounds == 0) throw Error(Errc::InvalidArgument, "need at least one round");
    const BarycenterProblem prob = input.smoothed();
    const std::size_t m = prob.m();
    const auto n = static_cast<Eigen::Index>(prob.n());
    const Matrix& w = prob.graph().laplacian();
    const double lip = prob.lipschitz();

    std::vector<std::size_t> order = opts.agent_order;
    if (order.empty()) {
        order.resize(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    {
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < m; ++k) {
            if (sorted.size() != m || sorted[k] != k) throw Error(Errc::InvalidArgument, "agent_order must be a permutation");
        }
    }

    std::vector<AgentState> agents(m, AgentState{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)});
    std::vector<Vector> own_gradient(m);
    GradientExchange exchange(prob.graph(), prob.n());
    AlphaSchedule sched;
    BarycenterResult result;
    result.trace.reserve(opts.rounds);
    result.schedule.reserve(opts.rounds);

    for (std::uint64_t t = 0; t < opts.rounds; ++t) {
        const AlphaSchedule next = advance_alpha(sched, lip);
        const double alpha = next.alpha;
        const double a_prev = sched.big_a;
        const double a_next = next.big_a;

        // Phase 1: mix and publish; no agent reads anything yet.
        double objective = 0.0;
        for (std::size_t k : order) {
            AgentState& s = agents[k];
            s.lambda = (alpha * s.xi + a_prev * s.eta) / a_next;
            own_gradient[k] = conjugate_gradient(k, s.lambda, prob);
            exchange.publish(k, own_gradient[k]);
        }
        for (std::size_t k = 0; k < m; ++k) objective += conjugate_value(k, agents[k].lambda, prob);

        // Phase 2: each agent combines its neighborhood and updates one coordinate.
        for (std::size_t k : order) {
            AgentState& s = agents[k];
            Vector direction = Vector::Zero(n);
            for (std::size_t j = 0; j < m; ++j) {
                const double wkj = w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                if (wkj != 0.0) direction += wkj * exchange.read(k, j);
            }
            Eigen::Index coord = 0;
            if (opts.rule == CoordinateRule::Randomized) {
                coord = static_cast<Eigen::Index>(
                    rng::uniform_index(rng::derive(opts.seed, {k}), t, static_cast<std::uint64_t>(n)));
            } else {
                coord = static_cast<Eigen::Index>(select_coordinate(CoordinateRule::Greedy, direction, 0, t));
            }
            s.xi[coord] -= alpha * direction[coord];
            s.eta[coord] = (alpha * s.xi[coord] + a_prev * s.eta[coord]) / a_next;
            s.q_hat = (alpha * own_gradient[k] + a_prev * s.q_hat) / a_next;
        }
        exchange.next_round();
        sched = next;
        result.schedule.push_back(sched);

        std::vector<Vector> q(m);
        for (std::size_t k = 0; k < m; ++k) q[k] = agents[k].q_hat;
        result.trace.push_back({t + 1, consensus_residual(q, prob.graph()), objective});
    }

    result.q.reserve(m);
    for (const auto& s : agents) result.q.push_back(s.q_hat);
    result.access_counts = exchange.access_counts();
    return result;
}

} // namespace otx
