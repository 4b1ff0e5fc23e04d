#include "otx/rounding.hpp"

#include <algorithm>
#include <cmath>

namespace otx {

namespace {

// min(1, target / current); a zero line has nothing to scale.
inline double shrink_factor(double target, double current)
{
    return current > 0.0 ? std::min(1.0, target / current) : 1.0;
}

} // namespace

TransportPlan round_to_polytope(const Matrix& plan, const Histogram& r, const Histogram& l)
{
    const auto n = plan.rows();
    if (plan.cols() != n || static_cast<Eigen::Index>(r.size()) != n ||
        static_cast<Eigen::Index>(l.size()) != n) {
        throw Error(Errc::DimensionMismatch, "plan and marginals disagree in size");
    }
    if (!plan.allFinite()) throw Error(Errc::NonFiniteEntry, "plan has a non-finite entry");
    if (n > 0 && plan.minCoeff() < 0.0) throw Error(Errc::NegativeInput, "plan has a negative entry");

    Matrix x = plan;
    const Vector rows = x.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) *= shrink_factor(r[static_cast<std::size_t>(i)], rows[i]);
    const Vector cols = x.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < n; ++j) x.col(j) *= shrink_factor(l[static_cast<std::size_t>(j)], cols[j]);

    // Scaling can only remove mass, so both residuals are nonnegative.
    const Vector err_r = (r.weights() - x.rowwise().sum()).cwiseMax(0.0);
    const Vector err_l = (l.weights() - x.colwise().sum().transpose()).cwiseMax(0.0);
    const double missing = err_r.sum();
    if (missing > 0.0) x.noalias() += err_r * err_l.transpose() / missing;
    return TransportPlan(std::move(x));
}

TransportPlan round_to_polytope(const TransportPlan& plan, const Histogram& r, const Histogram& l)
{
    return round_to_polytope(plan.entries(), r, l);
}

} // namespace otx
