#pragma once

#include <cstddef>

#include "otx/core.hpp"

namespace otx {

/// Exponents above this bound make primal_map throw ExponentOverflow.
inline constexpr double max_exponent = 700.0;

/// Stacked dual variable lambda = (alpha; beta) in R^{2n}.
class DualPoint
{
public:
    DualPoint() = default;
    explicit DualPoint(std::size_t n) : values_(Vector::Zero(2 * static_cast<Eigen::Index>(n))) {}
    explicit DualPoint(Vector stacked);
    DualPoint(const Vector& alpha, const Vector& beta);

    std::size_t n() const noexcept { return static_cast<std::size_t>(values_.size() / 2); }
    auto alpha() const { return values_.head(values_.size() / 2); }
    auto beta() const { return values_.tail(values_.size() / 2); }
    const Vector& stacked() const noexcept { return values_; }
    Vector& stacked() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

private:
    Vector values_;
};

/// Entropic OT instance (C, r, l, eta) with smoothness constant L = 4 / eta.
class RegularizedProblem
{
public:
    RegularizedProblem(CostMatrix cost, Histogram r, Histogram l, double eta);

    std::size_t n() const noexcept { return cost_.size(); }
    const CostMatrix& cost() const noexcept { return cost_; }
    const Histogram& r() const noexcept { return r_; }
    const Histogram& l() const noexcept { return l_; }
    double eta() const noexcept { return eta_; }
    double lipschitz() const noexcept { return 4.0 / eta_; }

    /// b = (r; l), the right-hand side of the marginal constraints.
    Vector stacked_marginals() const;

private:
    CostMatrix cost_;
    Histogram r_;
    Histogram l_;
    double eta_;
};

/// X_ij = exp((-C_ij + alpha_i + beta_j) / eta - 1).
Matrix primal_map(const RegularizedProblem& prob, const DualPoint& lambda);

/// phi(lambda) = eta * sum_ij X_ij(lambda) - <alpha, r> - <beta, l>.
double dual_value(const RegularizedProblem& prob, const DualPoint& lambda);

/// i-th partial derivative of phi; reads one row (i < n) or column of X in O(n).
double coordinate_gradient(const RegularizedProblem& prob, const DualPoint& lambda, std::size_t i);

/// grad phi = A vec(X(lambda)) - b.
Vector full_gradient(const RegularizedProblem& prob, const DualPoint& lambda);

/// Gradient from an already-evaluated plan X(lambda).
Vector gradient_from_plan(const RegularizedProblem& prob, const Matrix& plan);

} // namespace otx
