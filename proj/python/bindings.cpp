#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otx/barycenter.hpp"
#include "otx/bench.hpp"
#include "otx/pipeline.hpp"
#include "otx/rounding.hpp"
#include "otx/sinkhorn.hpp"

namespace py = pybind11;
using namespace otx;

namespace {

Histogram as_histogram(const Vector& w)
{
    return make_histogram(w);
}

RegularizedProblem as_problem(const Matrix& cost, const Vector& r, const Vector& l, double eta)
{
    return RegularizedProblem(CostMatrix(cost), as_histogram(r), as_histogram(l), eta);
}

py::dict report_dict(const SolveReport& rep)
{
    py::list trace;
    for (const auto& s : rep.trace) {
        py::dict row;
        row["iteration"] = s.iteration;
        row["violation"] = s.violation;
        row["dual_value"] = s.dual_value;
        row["ot_value"] = s.ot_value;
        row["wall_ms"] = s.wall_ms;
        trace.append(row);
    }
    py::dict d;
    d["plan"] = rep.plan.entries();
    d["iterations"] = rep.iterations;
    d["final_violation"] = rep.final_violation;
    d["converged"] = rep.status == SolveStatus::Converged;
    d["trace"] = trace;
    return d;
}

} // namespace

PYBIND11_MODULE(_otx, m)
{
    m.doc() = "Accelerated primal-dual coordinate descent for entropic optimal transport";
    py::register_exception<Error>(m, "OtxError", PyExc_ValueError);

    m.def("normalize", [](const Vector& w) { return Vector(make_histogram(w).weights()); }, py::arg("weights"));

    m.def("primal_map",
          [](const Matrix& c, const Vector& r, const Vector& l, double eta, const Vector& lam) {
              return primal_map(as_problem(c, r, l, eta), DualPoint(lam));
          },
          py::arg("cost"), py::arg("r"), py::arg("l"), py::arg("eta"), py::arg("lam"));
    m.def("dual_value",
          [](const Matrix& c, const Vector& r, const Vector& l, double eta, const Vector& lam) {
              return dual_value(as_problem(c, r, l, eta), DualPoint(lam));
          },
          py::arg("cost"), py::arg("r"), py::arg("l"), py::arg("eta"), py::arg("lam"));
    m.def("full_gradient",
          [](const Matrix& c, const Vector& r, const Vector& l, double eta, const Vector& lam) {
              return full_gradient(as_problem(c, r, l, eta), DualPoint(lam));
          },
          py::arg("cost"), py::arg("r"), py::arg("l"), py::arg("eta"), py::arg("lam"));

    m.def("theta_schedule",
          [](std::uint64_t steps) {
              std::vector<double> out{1.0};
              ThetaSchedule s;
              for (std::uint64_t k = 0; k < steps; ++k) out.push_back((s = advance_theta(s)).theta);
              return out;
          },
          py::arg("steps"), "theta_0 .. theta_steps");

    m.def("solve",
          [](const Matrix& c, const Vector& r, const Vector& l, double eta, const std::string& algorithm,
             double eps_prime, std::uint64_t max_iters, std::uint64_t trace_every, std::uint64_t seed) {
              SolveOptions opts{eps_prime, max_iters, trace_every, seed, false};
              return report_dict(run_solver(as_problem(c, r, l, eta), parse_algorithm(algorithm), opts));
          },
          py::arg("cost"), py::arg("r"), py::arg("l"), py::arg("eta"), py::arg("algorithm") = "apdrcd",
          py::arg("eps_prime") = 1e-2, py::arg("max_iters") = 0, py::arg("trace_every") = 0, py::arg("seed") = 0,
          "Solve the regularized dual directly; returns a dict with the averaged plan and trace.");

    m.def("round_to_polytope",
          [](const Matrix& plan, const Vector& r, const Vector& l) {
              return Matrix(round_to_polytope(plan, as_histogram(r), as_histogram(l)).entries());
          },
          py::arg("plan"), py::arg("r"), py::arg("l"));

    m.def("approximate_ot",
          [](const Matrix& c, const Vector& r, const Vector& l, double epsilon, const std::string& algorithm,
             std::uint64_t seed, std::uint64_t max_iters) {
              ApproxConfig cfg{epsilon, parse_algorithm(algorithm), seed, max_iters, 0, false};
              const auto res = approximate_ot(CostMatrix(c), as_histogram(r), as_histogram(l), cfg);
              py::dict d = report_dict(res.report);
              d["plan"] = res.plan.entries();
              d["ot_value"] = res.ot_value;
              d["eta"] = res.eta;
              d["eps_prime"] = res.eps_prime;
              return d;
          },
          py::arg("cost"), py::arg("r"), py::arg("l"), py::arg("epsilon"), py::arg("algorithm") = "apdrcd",
          py::arg("seed") = 0, py::arg("max_iters") = 0,
          "Feasible plan whose cost is within epsilon of optimal; dict keys plan, ot_value, eta, eps_prime, ...");

    m.def("line_cost", [](const Vector& s, double p) { return Matrix(line_cost(s, p).entries()); },
          py::arg("support"), py::arg("p") = 1.0);
    m.def("monotone_coupling",
          [](const Vector& s, const Vector& r, const Vector& l, double p) {
              const auto res = monotone_coupling_oracle(s, as_histogram(r), as_histogram(l), p);
              return py::make_tuple(Matrix(res.plan.entries()), res.cost);
          },
          py::arg("support"), py::arg("r"), py::arg("l"), py::arg("p") = 1.0, "Returns (plan, cost).");

    m.def("grid_cost",
          [](std::size_t rows, std::size_t cols, const std::string& metric) {
              return Matrix(bench::grid_cost(rows, cols, bench::parse_metric(metric)).entries());
          },
          py::arg("rows"), py::arg("cols"), py::arg("metric") = "sql2");
    m.def("competitive_ratio", &bench::competitive_ratio, py::arg("d1"), py::arg("d2"));

    m.def("laplacian", &laplacian, py::arg("edges"), py::arg("m"));
    m.def("consensus_residual",
          [](const std::vector<Vector>& q, const std::vector<Edge>& edges) {
              return consensus_residual(q, NetworkGraph::from_edges(q.size(), edges));
          },
          py::arg("q"), py::arg("edges"));

    m.def("barycenter",
          [](const std::vector<Vector>& measures, const Matrix& cost, const std::vector<Edge>& edges, double epsilon,
             std::uint64_t rounds, const std::string& rule, std::uint64_t seed, std::optional<double> lipschitz) {
              const std::size_t k = measures.size();
              std::vector<Histogram> hs;
              for (const auto& v : measures) hs.push_back(as_histogram(v));
              const BarycenterProblem prob(hs, std::vector<CostMatrix>(k, CostMatrix(cost)),
                                           Vector::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k)),
                                           epsilon, NetworkGraph::from_edges(k, edges), lipschitz);
              BarycenterOptions opts;
              if (rule == "gcd") opts.rule = CoordinateRule::Greedy;
              else if (rule != "rcd") throw Error(Errc::InvalidArgument, "rule must be rcd or gcd");
              opts.rounds = rounds;
              opts.seed = seed;
              const auto res = barycenter_solve(prob, opts);
              std::vector<double> residual;
              for (const auto& row : res.trace) residual.push_back(row.consensus_residual);
              py::dict d;
              d["q"] = res.q;
              d["consensus_residual"] = residual;
              d["lipschitz"] = prob.lipschitz();
              return d;
          },
          py::arg("measures"), py::arg("cost"), py::arg("edges"), py::arg("epsilon") = 0.1, py::arg("rounds") = 500,
          py::arg("rule") = "rcd", py::arg("seed") = 0, py::arg("lipschitz") = py::none());
}
