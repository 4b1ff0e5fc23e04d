#include "otx/dual.hpp"

#include <cmath>
#include <string>

namespace otx {

namespace {

[[noreturn]] void overflow(double exponent)
{
    throw Error(Errc::ExponentOverflow, "exponent " + std::to_string(exponent) + " exceeds " +
                                            std::to_string(max_exponent));
}

inline double plan_entry(double cost, double a, double b, double eta)
{
    const double e = (-cost + a + b) / eta - 1.0;
    if (e > max_exponent) overflow(e);
    return std::exp(e);
}

void check_dims(const RegularizedProblem& prob, const DualPoint& lambda)
{
    if (lambda.n() != prob.n() || lambda.stacked().size() % 2 != 0) {
        throw Error(Errc::DimensionMismatch, "dual point has the wrong dimension");
    }
    if (!lambda.stacked().allFinite()) {
        throw Error(Errc::NonFiniteEntry, "dual point has a non-finite entry");
    }
}

} // namespace

DualPoint::DualPoint(Vector stacked)
    : values_(std::move(stacked))
{
    if (values_.size() % 2 != 0) throw Error(Errc::DimensionMismatch, "stacked dual has odd length");
}

DualPoint::DualPoint(const Vector& alpha, const Vector& beta)
{
    if (alpha.size() != beta.size()) throw Error(Errc::DimensionMismatch, "alpha and beta differ in size");
    values_.resize(alpha.size() + beta.size());
    values_ << alpha, beta;
}

RegularizedProblem::RegularizedProblem(CostMatrix cost, Histogram r, Histogram l, double eta)
    : cost_(std::move(cost))
    , r_(std::move(r))
    , l_(std::move(l))
    , eta_(eta)
{
    if (r_.size() != cost_.size() || l_.size() != cost_.size()) {
        throw Error(Errc::DimensionMismatch, "marginals do not match cost matrix size");
    }
    if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
        throw Error(Errc::InvalidArgument, "eta must be positive and finite");
    }
}

Vector RegularizedProblem::stacked_marginals() const
{
    Vector b(2 * static_cast<Eigen::Index>(n()));
    b << r_.weights(), l_.weights();
    return b;
}

Matrix primal_map(const RegularizedProblem& prob, const DualPoint& lambda)
{
    check_dims(prob, lambda);
    const auto n = static_cast<Eigen::Index>(prob.n());
    const auto& c = prob.cost().entries();
    const auto alpha = lambda.alpha();
    const auto beta = lambda.beta();
    const double eta = prob.eta();
    Matrix x(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = plan_entry(c(i, j), alpha[i], beta[j], eta);
        }
    }
    return x;
}

double dual_value(const RegularizedProblem& prob, const DualPoint& lambda)
{
    const Matrix x = primal_map(prob, lambda);
    return prob.eta() * x.sum() - lambda.alpha().dot(prob.r().weights()) -
           lambda.beta().dot(prob.l().weights());
}

double coordinate_gradient(const RegularizedProblem& prob, const DualPoint& lambda, std::size_t i)
{
    check_dims(prob, lambda);
    const std::size_t n = prob.n();
    if (i >= 2 * n) throw Error(Errc::IndexOutOfRange, "coordinate " + std::to_string(i) + " >= 2n");
    const auto& c = prob.cost().entries();
    const auto alpha = lambda.alpha();
    const auto beta = lambda.beta();
    const double eta = prob.eta();
    const auto ni = static_cast<Eigen::Index>(n);
    double sum = 0.0;
    if (i < n) {
        const auto row = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < ni; ++j) sum += plan_entry(c(row, j), alpha[row], beta[j], eta);
        return sum - prob.r()[i];
    }
    const auto col = static_cast<Eigen::Index>(i - n);
    for (Eigen::Index k = 0; k < ni; ++k) sum += plan_entry(c(k, col), alpha[k], beta[col], eta);
    return sum - prob.l()[i - n];
}

Vector gradient_from_plan(const RegularizedProblem& prob, const Matrix& plan)
{
    const auto m = marginals(plan);
    Vector g(2 * static_cast<Eigen::Index>(prob.n()));
    g << m.row - prob.r().weights(), m.col - prob.l().weights();
    return g;
}

Vector full_gradient(const RegularizedProblem& prob, const DualPoint& lambda)
{
    return gradient_from_plan(prob, primal_map(prob, lambda));
}

} // namespace otx
