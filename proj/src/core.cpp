#include "otx/core.hpp"

#include <cmath>
#include <string>

namespace otx {

namespace {

void check_finite_nonneg(const Eigen::Ref<const Matrix>& m, Errc negative_code, const char* what)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double v = m(i, j);
            if (!std::isfinite(v)) {
                throw Error(Errc::NonFiniteEntry, std::string(what) + " has a non-finite entry");
            }
            if (v < 0.0) {
                throw Error(negative_code, std::string(what) + " has a negative entry");
            }
        }
    }
}

void check_square(const Matrix& m, const char* what)
{
    if (m.rows() == 0) throw Error(Errc::EmptyVector, std::string(what) + " is empty");
    if (m.rows() != m.cols()) {
        throw Error(Errc::DimensionMismatch, std::string(what) + " must be square");
    }
}

} // namespace

Histogram Histogram::from_normalized(Vector weights)
{
    if (weights.size() == 0) throw Error(Errc::EmptyVector, "histogram is empty");
    check_finite_nonneg(weights, Errc::NegativeEntry, "histogram");
    if (std::abs(weights.sum() - 1.0) > simplex_tol) {
        throw Error(Errc::InvalidArgument, "histogram does not sum to one");
    }
    return Histogram(std::move(weights));
}

Histogram make_histogram(const Vector& weights)
{
    if (weights.size() == 0) throw Error(Errc::EmptyVector, "histogram is empty");
    check_finite_nonneg(weights, Errc::NegativeEntry, "histogram");
    const double total = weights.sum();
    if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "histogram has zero total mass");
    return Histogram(weights / total);
}

CostMatrix::CostMatrix(Matrix entries)
    : entries_(std::move(entries))
    , max_abs_(0.0)
{
    check_square(entries_, "cost matrix");
    check_finite_nonneg(entries_, Errc::NegativeEntry, "cost matrix");
    max_abs_ = entries_.maxCoeff();
}

TransportPlan::TransportPlan(Matrix entries)
    : entries_(std::move(entries))
{
    check_square(entries_, "transport plan");
    check_finite_nonneg(entries_, Errc::NegativeEntry, "transport plan");
}

Marginals marginals(const Matrix& plan)
{
    return {plan.rowwise().sum(), plan.colwise().sum().transpose()};
}

Marginals marginals(const TransportPlan& plan)
{
    return marginals(plan.entries());
}

double marginal_violation(const Matrix& plan, const Vector& r, const Vector& l)
{
    if (plan.rows() != r.size() || plan.cols() != l.size()) {
        throw Error(Errc::DimensionMismatch, "plan and marginals disagree in size");
    }
    const auto m = marginals(plan);
    return (m.row - r).lpNorm<1>() + (m.col - l).lpNorm<1>();
}

double marginal_violation(const TransportPlan& plan, const Histogram& r, const Histogram& l)
{
    return marginal_violation(plan.entries(), r.weights(), l.weights());
}

double ot_objective(const CostMatrix& cost, const Matrix& plan)
{
    if (plan.rows() != cost.entries().rows() || plan.cols() != cost.entries().cols()) {
        throw Error(Errc::DimensionMismatch, "plan and cost matrix disagree in size");
    }
    return cost.entries().cwiseProduct(plan).sum();
}

double ot_objective(const CostMatrix& cost, const TransportPlan& plan)
{
    return ot_objective(cost, plan.entries());
}

} // namespace otx
