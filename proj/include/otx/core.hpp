#pragma once

#include <Eigen/Core>

#include <cstddef>

#include "otx/error.hpp"

namespace otx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance on the unit-sum check of a probability vector.
inline constexpr double simplex_tol = 1e-9;

/// Probability vector on the simplex. Only constructible through validating
/// factories, so every instance satisfies w >= 0 and sum(w) == 1 (to simplex_tol).
class Histogram
{
public:
    /// Validates an already-normalized vector without rescaling it.
    static Histogram from_normalized(Vector weights);

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
    double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
    const Vector& weights() const noexcept { return weights_; }
    double min_entry() const { return weights_.minCoeff(); }

private:
    explicit Histogram(Vector w) : weights_(std::move(w)) {}
    friend Histogram make_histogram(const Vector& weights);

    Vector weights_;
};

/// Normalizes nonnegative finite weights to unit sum.
Histogram make_histogram(const Vector& weights);

/// Dense square nonnegative cost matrix with its max entry cached.
class CostMatrix
{
public:
    explicit CostMatrix(Matrix entries);

    std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    double max_abs() const noexcept { return max_abs_; }

private:
    Matrix entries_;
    double max_abs_;
};

/// Dense square nonnegative plan. Mass is unconstrained here: solver iterates
/// may be far from stochastic.
class TransportPlan
{
public:
    explicit TransportPlan(Matrix entries);

    std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    double total_mass() const { return entries_.sum(); }

private:
    Matrix entries_;
};

struct Marginals
{
    Vector row;
    Vector col;
};

Marginals marginals(const TransportPlan& plan);
Marginals marginals(const Matrix& plan);

/// d(X) = ||X 1 - r||_1 + ||X^T 1 - l||_1.
double marginal_violation(const TransportPlan& plan, const Histogram& r, const Histogram& l);
double marginal_violation(const Matrix& plan, const Vector& r, const Vector& l);

/// <C, X> = sum_ij C_ij X_ij.
double ot_objective(const CostMatrix& cost, const TransportPlan& plan);
double ot_objective(const CostMatrix& cost, const Matrix& plan);

} // namespace otx
